use clap::ValueEnum;
use serde_json::Value;

use nilflow::report::canonical_json;
use nilflow::{Error, Result};

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// One verb's result in all three renderings.
#[derive(Debug)]
pub struct Report {
    pub value: Value,
    pub text: String,
    pub csv: Option<String>,
    pub passed: bool,
}

impl Report {
    pub fn new(mut value: Value, text: String, passed: bool) -> Self {
        if let Value::Object(m) = &mut value {
            m.insert("passed".into(), Value::Bool(passed));
        }
        Report {
            value,
            text,
            csv: None,
            passed,
        }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => canonical_json(&self.value),
            Format::Text => {
                let mut s = self.text.clone();
                if !s.ends_with('\n') {
                    s.push('\n');
                }
                Ok(s)
            }
            Format::Csv => self
                .csv
                .clone()
                .ok_or_else(|| Error::InvalidArgument("csv output is not available for this verb".into())),
        }
    }
}

/// Rows to CSV text with a header line.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::InvalidArgument(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(e.to_string()))
}

pub fn mark(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}
