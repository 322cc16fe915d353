//! Algebra definition files (TOML or JSON), one algebra per document.
//!
//! ```toml
//! name = "h3"
//! dim = 3
//! brackets = [[1, 2, 3, "1"]]
//! metric = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]
//! labels = ["X1", "Y1", "Z"]
//! [params]
//! eps = "1/2"
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{RawRational, Q};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub name: String,
    pub dim: usize,
    #[serde(default)]
    pub brackets: Vec<(usize, usize, usize, RawText)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<RawText>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, RawText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// A rational as written in a file; integers are accepted unquoted.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(transparent)]
pub struct RawText(#[serde(with = "raw")] pub String);

mod raw {
    use super::RawRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &str, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<String, D::Error> {
        Ok(match RawRational::deserialize(d)? {
            RawRational::Int(n) => n.to_string(),
            RawRational::Text(t) => t,
        })
    }
}

impl RawText {
    fn value(&self) -> Result<Q> {
        RawRational::Text(self.0.clone()).into_q()
    }
}

impl From<&Q> for RawText {
    fn from(x: &Q) -> Self {
        RawText(x.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Toml,
    Json,
}

impl Format {
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            _ => Format::Toml,
        }
    }
}

impl AlgebraFile {
    pub fn from_algebra(alg: &LieAlgebra) -> Self {
        let n = alg.dim();
        let metric = (alg.metric() != &Matrix::identity(n)).then(|| {
            alg.metric()
                .to_rows()
                .iter()
                .map(|r| r.iter().map(RawText::from).collect())
                .collect()
        });
        let default_labels: Vec<String> = (1..=n).map(|i| format!("e{i}")).collect();
        AlgebraFile {
            name: alg.name().to_string(),
            dim: n,
            brackets: alg
                .bracket_entries()
                .iter()
                .map(|(i, j, k, c)| (*i, *j, *k, RawText::from(c)))
                .collect(),
            metric,
            params: alg
                .params()
                .iter()
                .map(|(k, v)| (k.clone(), RawText::from(v)))
                .collect(),
            labels: (alg.labels() != default_labels.as_slice()).then(|| alg.labels().to_vec()),
        }
    }

    pub fn to_algebra(&self) -> Result<LieAlgebra> {
        let brackets = self
            .brackets
            .iter()
            .map(|(i, j, k, c)| Ok((*i, *j, *k, c.value()?)))
            .collect::<Result<Vec<_>>>()?;
        let metric = match &self.metric {
            Some(rows) => Some(Matrix::from_rows(
                rows.iter()
                    .map(|r| r.iter().map(RawText::value).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?,
            )?),
            None => None,
        };
        let params = self
            .params
            .iter()
            .map(|(k, v)| Ok((k.clone(), v.value()?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let alg = LieAlgebra::new(self.name.clone(), self.dim, &brackets, metric, params)?;
        match &self.labels {
            Some(l) => alg.with_labels(l.clone()),
            None => Ok(alg),
        }
    }

    pub fn parse(text: &str, format: Format) -> Result<Self> {
        match format {
            Format::Toml => toml::from_str(text).map_err(|e| Error::Parse(e.to_string())),
            Format::Json => serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string())),
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Toml => toml::to_string(self).map_err(|e| Error::Parse(e.to_string())),
            Format::Json => serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string())),
        }
    }
}

pub fn load(path: &Path) -> Result<LieAlgebra> {
    let text = std::fs::read_to_string(path)?;
    AlgebraFile::parse(&text, Format::from_path(path))?.to_algebra()
}

pub fn save(alg: &LieAlgebra, path: &Path) -> Result<()> {
    let text = AlgebraFile::from_algebra(alg).render(Format::from_path(path))?;
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qf;

    #[test]
    fn toml_and_json_round_trip() {
        let text = r#"
name = "n2w"
dim = 4
brackets = [[1, 2, 3, 1], [1, 3, 4, "1/2"]]
metric = [[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
labels = ["a", "b", "c", "d"]
[params]
eps = "-1/3"
"#;
        let alg = AlgebraFile::parse(text, Format::Toml).unwrap().to_algebra().unwrap();
        assert_eq!(alg.bracket_entries()[1].3, qf(1, 2));
        assert_eq!(alg.params()["eps"], qf(-1, 3));
        for fmt in [Format::Toml, Format::Json] {
            let f = AlgebraFile::from_algebra(&alg);
            let back = AlgebraFile::parse(&f.render(fmt).unwrap(), fmt).unwrap();
            assert_eq!(back, f);
            let alg2 = back.to_algebra().unwrap();
            assert_eq!(alg2.bracket_entries(), alg.bracket_entries());
            assert_eq!(alg2.metric(), alg.metric());
            assert_eq!(alg2.labels(), alg.labels());
        }
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(AlgebraFile::parse("name = 3", Format::Toml), Err(Error::Parse(_))));
        let bad = r#"{"name":"x","dim":2,"brackets":[[1,2,3,"1"]]}"#;
        assert!(matches!(
            AlgebraFile::parse(bad, Format::Json).unwrap().to_algebra(),
            Err(Error::IndexOutOfRange { .. })
        ));
        let zero = r#"{"name":"x","dim":3,"brackets":[[1,2,3,"1/0"]]}"#;
        assert!(AlgebraFile::parse(zero, Format::Json).unwrap().to_algebra().is_err());
        let extra = r#"{"name":"x","dim":3,"colour":1}"#;
        assert!(AlgebraFile::parse(extra, Format::Json).is_err());
    }
}
