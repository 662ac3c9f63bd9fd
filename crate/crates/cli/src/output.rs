use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;

use crate::error::CliError;
use crate::Out;

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// A table row with a fixed column set.
pub trait CsvRow {
    const HEADERS: &'static [&'static str];
    fn record(&self) -> Vec<String>;
}

pub fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

impl Out {
    fn write(&self, bytes: &[u8]) -> Result<(), CliError> {
        match &self.out {
            Some(path) => {
                std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(bytes)
                    .and_then(|_| stdout.flush())
                    .map_err(|e| CliError::Io(e.to_string()))
            }
        }
    }

    fn json<T: Serialize>(&self, doc: &T) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(doc).map_err(|e| CliError::Io(e.to_string()))?;
        s.push('\n');
        self.write(s.as_bytes())
    }

    /// Single JSON document; CSV is only offered for tabular commands.
    pub fn emit<T: Serialize>(&self, doc: &T) -> Result<(), CliError> {
        match self.format {
            Format::Json => self.json(doc),
            Format::Csv => Err(CliError::invalid(
                "--format csv is only available for sweep and enumerate",
            )),
        }
    }

    pub fn emit_rows<R: CsvRow, T: Serialize>(&self, rows: &[R], doc: T) -> Result<(), CliError> {
        match self.format {
            Format::Json => self.json(&doc),
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
                let io = |e: csv::Error| CliError::Io(e.to_string());
                w.write_record(R::HEADERS).map_err(io)?;
                for r in rows {
                    w.write_record(r.record()).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
                self.write(&bytes)
            }
        }
    }
}
