use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::sweep::SweepResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// 17 significant digits, enough to recover every `f64` exactly.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_error(e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io("writing CSV", io),
        other => CliError::compute(format!("writing CSV: {other:?}")),
    }
}

pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&result.columns).map_err(csv_error)?;
    for i in 0..result.rows() {
        w.write_record(result.data.iter().map(|col| format_value(col[i])))
            .map_err(csv_error)?;
    }
    w.flush().map_err(|e| CliError::io("writing CSV", e))
}

pub fn write_json<W: Write>(result: &SweepResult, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, result)
        .map_err(|e| CliError::compute(format!("serializing JSON: {e}")))?;
    writeln!(out).map_err(|e| CliError::io("writing JSON", e))
}

pub fn to_string(result: &SweepResult, format: Format) -> Result<String> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => write_csv(result, &mut buf)?,
        Format::Json => write_json(result, &mut buf)?,
    }
    Ok(String::from_utf8(buf).expect("emitters write UTF-8"))
}

pub fn parse_json(text: &str) -> Result<SweepResult> {
    serde_json::from_str(text).map_err(|e| CliError::config(format!("invalid sweep JSON: {e}")))
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit(result: &SweepResult, format: Format, path: Option<&Path>) -> Result<()> {
    write_text(&to_string(result, format)?, path)
}

pub fn write_text(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::io(format!("writing {}", p.display()), e))
        }
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("writing stdout", e)),
    }
}

/// A small labelled table: one row per label, one value per column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub label: String,
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<f64>)>,
}

impl Table {
    pub fn to_string(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => serde_json::to_string_pretty(self)
                .map(|s| s + "\n")
                .map_err(|e| CliError::compute(format!("serializing JSON: {e}"))),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(std::iter::once(&self.label).chain(&self.columns))
                    .map_err(csv_error)?;
                for (label, values) in &self.rows {
                    w.write_record(
                        std::iter::once(label.clone())
                            .chain(values.iter().map(|v| format_value(*v))),
                    )
                    .map_err(csv_error)?;
                }
                let bytes = w
                    .into_inner()
                    .map_err(|e| CliError::io("writing CSV", e.into_error()))?;
                Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_precision_round_trips() {
        for v in [0.1, 1.0 / 3.0, 2f64.sqrt() * 1e-9, -7.25e12, 0.0] {
            assert_eq!(format_value(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_value(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn table_csv() {
        let t = Table {
            label: "resource".into(),
            columns: vec!["fidelity".into()],
            rows: vec![("twb".into(), vec![0.5])],
        };
        assert_eq!(
            t.to_string(Format::Csv).unwrap(),
            "resource,fidelity\ntwb,5.0000000000000000e-1\n"
        );
        let back: Table = serde_json::from_str(&t.to_string(Format::Json).unwrap()).unwrap();
        assert_eq!(back, t);
    }
}
