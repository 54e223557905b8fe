//! Report serialization: JSON with floats rounded to 12 significant digits,
//! or a flat CSV table.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use ngram_infocap::numfmt::round_significant;
use serde::Serialize;
use serde_json::Value;

use crate::config::Format;
use crate::CliError;

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub table: Table,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(body: &impl Serialize, table: Table, warnings: Vec<String>) -> Result<Self, CliError> {
        let mut json = serde_json::to_value(body)?;
        round_floats(&mut json);
        Ok(Report { json, table, warnings })
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Json => {
                let mut buf = serde_json::to_vec_pretty(&self.json)?;
                buf.push(b'\n');
                Ok(buf)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.table.header)?;
                for row in &self.table.rows {
                    w.write_record(row)?;
                }
                w.into_inner().map_err(|e| CliError::Output(e.into_error()))
            }
        }
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<(), CliError> {
        let bytes = self.render(format)?;
        match out {
            Some(path) => {
                let file = File::create(path).map_err(|source| CliError::Write { path: path.into(), source })?;
                let mut w = BufWriter::new(file);
                w.write_all(&bytes)
                    .and_then(|_| w.flush())
                    .map_err(|source| CliError::Write { path: path.into(), source })
            }
            None => {
                let mut stdout = io::stdout().lock();
                stdout.write_all(&bytes).and_then(|_| stdout.flush()).map_err(CliError::Output)
            }
        }
    }
}

/// Round every float in the tree to [`SIGNIFICANT_DIGITS`]; integers are left alone.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            let x = num.as_f64().expect("f64 number");
            if let Some(r) = serde_json::Number::from_f64(round_significant(x, SIGNIFICANT_DIGITS)) {
                *num = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// CSV cell for a float, using the same rounding as the JSON output.
pub fn cell(x: f64) -> String {
    round_significant(x, SIGNIFICANT_DIGITS).to_string()
}

pub fn opt_cell(x: Option<f64>) -> String {
    x.map(cell).unwrap_or_default()
}
