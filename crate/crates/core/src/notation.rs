//! Textual notation for first integrals.
//!
//! ```text
//! E                         energy
//! lin:<v>                   ⟨Y, X⟩
//! right:<v>                 ⟨Ad(exp(−W))X, Y⟩
//! quad:<m>                  ½⟨Y, SY⟩
//! der:<m>                   f_{D*}
//! butler:<i>                ⟨V, j(Z)^{2i} V⟩
//! quot(<a> / <b>)           e^{−1/b²} sin(2πa/b)
//! ```
//!
//! A vector `<v>` is a basis label (`Z`, `e4`) or a literal `[1,0,1/2]`.
//! A matrix `<m>` is `id`, a named matrix of the context, `#k` (k-th solver
//! basis element, from 0) or a literal `[1,0;0,1]`.

use std::collections::BTreeMap;

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::integrals::FirstIntegral;
use crate::linalg::Matrix;
use crate::scalar::{parse_q, Q};
use crate::solvers::{killing2_tensors, skew_derivations, SolutionSpace};

#[derive(Clone, Debug)]
pub struct NamedMatrix {
    pub matrix: Matrix<Q>,
    /// Used as `D` in `f_{D*}` even when it fails the derivation test.
    pub assume_derivation: bool,
}

/// Names resolvable inside integral specs for one algebra.
#[derive(Clone, Debug, Default)]
pub struct NotationContext {
    pub matrices: BTreeMap<String, NamedMatrix>,
    pub integrals: BTreeMap<String, FirstIntegral>,
    derivations: Option<SolutionSpace>,
    killing: Option<SolutionSpace>,
}

impl NotationContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_matrix(mut self, name: impl Into<String>, m: Matrix<Q>, assume_derivation: bool) -> Self {
        self.matrices.insert(
            name.into(),
            NamedMatrix {
                matrix: m,
                assume_derivation,
            },
        );
        self
    }

    pub fn with_integral(mut self, name: impl Into<String>, f: FirstIntegral) -> Self {
        self.integrals.insert(name.into(), f);
        self
    }

    fn derivation_basis(&mut self, alg: &LieAlgebra) -> &SolutionSpace {
        self.derivations.get_or_insert_with(|| skew_derivations(alg))
    }

    fn killing_basis(&mut self, alg: &LieAlgebra) -> &SolutionSpace {
        self.killing.get_or_insert_with(|| killing2_tensors(alg))
    }
}

pub fn parse_integral(text: &str, alg: &LieAlgebra) -> Result<FirstIntegral> {
    parse_integral_in(text, alg, &mut NotationContext::new())
}

pub fn parse_integral_in(text: &str, alg: &LieAlgebra, ctx: &mut NotationContext) -> Result<FirstIntegral> {
    let t = text.trim();
    if let Some(f) = ctx.integrals.get(t) {
        return Ok(f.clone().with_label(t));
    }
    if t == "E" {
        return Ok(FirstIntegral::energy());
    }
    if let Some(inner) = t.strip_prefix("quot(").and_then(|r| r.strip_suffix(')')) {
        let (a, b) = split_quotient(inner)
            .ok_or_else(|| Error::Parse(format!("expected `quot(a / b)`, got `{t}`")))?;
        let num = parse_integral_in(a, alg, ctx)?;
        let den = parse_integral_in(b, alg, ctx)?;
        if !num.is_polynomial() || !den.is_polynomial() {
            return Err(Error::NonPolynomialVariant(t.to_string()));
        }
        return Ok(FirstIntegral::quotient(num, den));
    }
    let (head, arg) = t
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("unrecognised integral `{t}`")))?;
    let arg = arg.trim();
    match head.trim() {
        "lin" => FirstIntegral::linear(alg, parse_vector(arg, alg)?),
        "right" => FirstIntegral::right_invariant(alg, parse_vector(arg, alg)?),
        "quad" => {
            let m = resolve_matrix(arg, alg, ctx, false)?.0;
            FirstIntegral::quadratic(alg, m)
        }
        "der" => {
            let (m, assume) = resolve_matrix(arg, alg, ctx, true)?;
            if assume {
                FirstIntegral::derivation_unchecked(alg, m)
            } else {
                FirstIntegral::derivation(alg, m)
            }
        }
        "butler" => {
            let i = arg
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("invalid Butler index `{arg}`")))?;
            FirstIntegral::butler(alg, i)
        }
        other => Err(Error::Parse(format!("unknown integral kind `{other}`"))),
    }
}

pub fn parse_integrals(list: &[String], alg: &LieAlgebra, ctx: &mut NotationContext) -> Result<Vec<FirstIntegral>> {
    list.iter().map(|s| parse_integral_in(s, alg, ctx)).collect()
}

fn split_quotient(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            '/' if depth == 0 => {
                let (a, b) = (s[..i].trim(), s[i + 1..].trim());
                if !a.is_empty() && !b.is_empty() {
                    return Some((a, b));
                }
            }
            _ => {}
        }
    }
    None
}

fn parse_row(s: &str) -> Result<Vec<Q>> {
    s.split(',').map(parse_q).collect()
}

pub fn parse_vector(s: &str, alg: &LieAlgebra) -> Result<Vec<Q>> {
    if let Some(body) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let v = parse_row(body)?;
        if v.len() != alg.dim() {
            return Err(Error::DimensionMismatch {
                expected: alg.dim(),
                got: v.len(),
            });
        }
        return Ok(v);
    }
    alg.basis_index(s)
        .map(|i| alg.basis_vector(i))
        .ok_or_else(|| Error::UnknownName(s.to_string()))
}

pub fn parse_matrix_literal(s: &str) -> Result<Matrix<Q>> {
    let body = s
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected matrix literal, got `{s}`")))?;
    let rows = body.split(';').map(parse_row).collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(rows)
}

fn resolve_matrix(
    s: &str,
    alg: &LieAlgebra,
    ctx: &mut NotationContext,
    derivation: bool,
) -> Result<(Matrix<Q>, bool)> {
    let n = alg.dim();
    let m = if s == "id" {
        (Matrix::identity(n), false)
    } else if let Some(nm) = ctx.matrices.get(s) {
        (nm.matrix.clone(), nm.assume_derivation)
    } else if let Some(k) = s.strip_prefix('#') {
        let k: usize = k
            .parse()
            .map_err(|_| Error::Parse(format!("invalid basis index `{s}`")))?;
        let space = if derivation {
            ctx.derivation_basis(alg)
        } else {
            ctx.killing_basis(alg)
        };
        let m = space.basis.get(k).cloned().ok_or(Error::IndexOutOfRange {
            index: k,
            dim: space.dim,
        })?;
        (m, false)
    } else if s.starts_with('[') {
        (parse_matrix_literal(s)?, false)
    } else {
        return Err(Error::UnknownName(s.to_string()));
    };
    if m.0.rows() != n || m.0.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.0.rows(),
        });
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::int_brackets;
    use crate::integrals::IntegralKind;
    use crate::scalar::{q, qf};

    fn h3() -> LieAlgebra {
        LieAlgebra::new("h3", 3, &int_brackets(&[(1, 2, 3, 1)]), None, BTreeMap::new())
            .unwrap()
            .with_labels(vec!["X1".into(), "Y1".into(), "Z".into()])
            .unwrap()
    }

    #[test]
    fn parses_forms() {
        let a = h3();
        assert_eq!(parse_integral("E", &a).unwrap(), FirstIntegral::energy());
        let f = parse_integral("lin:Z", &a).unwrap();
        assert_eq!(f.kind(), &IntegralKind::Linear(vec![q(0), q(0), q(1)]));
        let f = parse_integral("right:[1,0,1/2]", &a).unwrap();
        assert_eq!(f.kind(), &IntegralKind::RightInvariant(vec![q(1), q(0), qf(1, 2)]));
        assert!(parse_integral("quad:id", &a).is_ok());
        assert!(parse_integral("der:#0", &a).is_ok());
        assert!(parse_integral("quad:#1", &a).is_ok());
        assert!(parse_integral("der:[0,-1,0;1,0,0;0,0,0]", &a).is_ok());
        let f = parse_integral("quot(right:X1 / lin:Z)", &a).unwrap();
        assert!(!f.is_polynomial());
    }

    #[test]
    fn round_trips_canonical() {
        let a = h3();
        for s in ["E", "lin:Z", "right:[1,2,0]", "quad:[1,0,0;0,2,0;0,0,3]", "quot(right:X1 / lin:Z)"] {
            let f = parse_integral(s, &a).unwrap();
            assert_eq!(f.canonical_spec(&a), s);
        }
    }

    #[test]
    fn rejects() {
        let a = h3();
        assert!(matches!(parse_integral("lin:Q", &a), Err(Error::UnknownName(_))));
        assert!(matches!(parse_integral("lin:[1,2]", &a), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(parse_integral("foo:1", &a), Err(Error::Parse(_))));
        assert!(matches!(parse_integral("quad:[0,1,0;0,0,0;0,0,0]", &a), Err(Error::NonSymmetric)));
        assert!(matches!(parse_integral("der:#4", &a), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(parse_integral("butler:1", &LieAlgebra::new("a", 2, &[], None, BTreeMap::new()).unwrap()), Err(Error::StepMismatch { .. })));
        assert!(parse_integral("lin:[1,1/0,0]", &a).is_err());
    }

    #[test]
    fn context_names() {
        let a = h3();
        let rot = Matrix::from_rows(vec![
            vec![q(0), q(-1), q(0)],
            vec![q(1), q(0), q(0)],
            vec![q(0), q(0), q(0)],
        ])
        .unwrap();
        let mut ctx = NotationContext::new().with_matrix("D", rot, true);
        let f = parse_integral_in("der:D", &a, &mut ctx).unwrap();
        ctx = ctx.with_integral("f_D*", f);
        let g = parse_integral_in("quot(f_D* / lin:Z)", &a, &mut ctx).unwrap();
        assert_eq!(g.canonical_spec(&a), "quot(f_D* / lin:Z)");
    }
}
