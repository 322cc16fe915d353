//! Canonical JSON rendering: sorted keys, two-space indentation, trailing newline.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Parse(e.to_string()))
}

/// `serde_json::Map` is ordered by key, so converting through [`Value`] sorts every object.
pub fn canonical_json<T: Serialize>(v: &T) -> Result<String> {
    let value = to_value(v)?;
    let mut s = serde_json::to_string_pretty(&value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Parses a report and renders it again canonically.
pub fn rerender(text: &str) -> Result<String> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    canonical_json(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn sorted_and_stable() {
        let v = json!({"z": 1, "a": {"y": "1/2", "b": [0.1, 1e-12, 3.0]}});
        let s = canonical_json(&v).unwrap();
        assert!(s.find("\"a\"").unwrap() < s.find("\"z\"").unwrap());
        assert_eq!(rerender(&s).unwrap(), s);
    }
}
