use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

use super::config::{Format, Mode};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 8] = [
    "sweep_value",
    "mode",
    "mean_n",
    "g2",
    "n_max_used",
    "tail_mass",
    "residual",
    "warnings",
];

const WARNING_SEP: &str = "; ";
const ERROR_PREFIX: &str = "error: ";

/// One (sweep point, mode) result. A failed point keeps its place in the
/// table with empty numeric fields and an `error: ...` warning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub mode: Mode,
    pub mean_n: Option<f64>,
    /// `None` when `<n>` is too small for g² to be meaningful.
    pub g2: Option<f64>,
    pub n_max_used: Option<usize>,
    pub tail_mass: Option<f64>,
    pub residual: Option<f64>,
    pub warnings: Vec<String>,
}

impl SweepRow {
    pub fn failed(sweep_value: f64, mode: Mode, error: &Error) -> Self {
        SweepRow {
            sweep_value,
            mode,
            mean_n: None,
            g2: None,
            n_max_used: None,
            tail_mass: None,
            residual: None,
            warnings: vec![format!("{ERROR_PREFIX}{error}")],
        }
    }

    pub fn error(&self) -> Option<&str> {
        self.warnings
            .iter()
            .find_map(|w| w.strip_prefix(ERROR_PREFIX))
    }

    pub fn is_ok(&self) -> bool {
        self.error().is_none()
    }
}

fn float_field(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

fn parse_float(field: &str, name: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse()
        .map(Some)
        .map_err(|_| Error::Config(format!("bad {name} field `{field}`")))
}

/// Destination that receives rows in order, possibly in several batches.
pub trait RowSink {
    fn write_rows(&mut self, rows: &[SweepRow]) -> Result<()>;
    fn finish(&mut self) -> Result<()>;
}

pub struct CsvSink<W: Write> {
    writer: csv::Writer<W>,
}

impl<W: Write> CsvSink<W> {
    pub fn new(inner: W) -> Result<Self> {
        let mut writer = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(inner);
        writer.write_record(CSV_HEADER)?;
        Ok(CsvSink { writer })
    }
}

impl<W: Write> RowSink for CsvSink<W> {
    fn write_rows(&mut self, rows: &[SweepRow]) -> Result<()> {
        for row in rows {
            self.writer.write_record([
                format!("{:.16e}", row.sweep_value),
                row.mode.to_string(),
                float_field(row.mean_n),
                float_field(row.g2),
                row.n_max_used.map(|n| n.to_string()).unwrap_or_default(),
                float_field(row.tail_mass),
                float_field(row.residual),
                row.warnings.join(WARNING_SEP),
            ])?;
        }
        self.writer.flush()?;
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        self.writer.flush()?;
        Ok(())
    }
}

/// Writes a JSON array incrementally, one record per line.
pub struct JsonSink<W: Write> {
    inner: W,
    written: usize,
}

impl<W: Write> JsonSink<W> {
    pub fn new(mut inner: W) -> Result<Self> {
        inner.write_all(b"[")?;
        Ok(JsonSink { inner, written: 0 })
    }
}

impl<W: Write> RowSink for JsonSink<W> {
    fn write_rows(&mut self, rows: &[SweepRow]) -> Result<()> {
        for row in rows {
            let sep = if self.written == 0 { "\n" } else { ",\n" };
            self.inner.write_all(sep.as_bytes())?;
            serde_json::to_writer(&mut self.inner, row)?;
            self.written += 1;
        }
        self.inner.flush()?;
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        self.inner.write_all(b"\n]\n")?;
        self.inner.flush()?;
        Ok(())
    }
}

/// Parses rows written by [`CsvSink`] or [`JsonSink`].
pub fn read_rows_from<R: Read>(mut reader: R, format: Format) -> Result<Vec<SweepRow>> {
    match format {
        Format::Json => Ok(serde_json::from_reader(reader)?),
        Format::Csv => {
            let mut text = String::new();
            reader.read_to_string(&mut text)?;
            let mut csv = csv::ReaderBuilder::new().from_reader(text.as_bytes());
            let header = csv.headers()?.clone();
            if header.iter().ne(CSV_HEADER) {
                return Err(Error::Config(format!("unexpected CSV header: {header:?}")));
            }
            let mut rows = Vec::new();
            for record in csv.records() {
                let r = record?;
                let warnings = if r[7].is_empty() {
                    Vec::new()
                } else {
                    r[7].split(WARNING_SEP).map(str::to_owned).collect()
                };
                rows.push(SweepRow {
                    sweep_value: parse_float(&r[0], "sweep_value")?
                        .ok_or_else(|| Error::Config("empty sweep_value".into()))?,
                    mode: r[1].parse()?,
                    mean_n: parse_float(&r[2], "mean_n")?,
                    g2: parse_float(&r[3], "g2")?,
                    n_max_used: if r[4].is_empty() {
                        None
                    } else {
                        Some(
                            r[4].parse().map_err(|_| {
                                Error::Config(format!("bad n_max_used `{}`", &r[4]))
                            })?,
                        )
                    },
                    tail_mass: parse_float(&r[5], "tail_mass")?,
                    residual: parse_float(&r[6], "residual")?,
                    warnings,
                });
            }
            Ok(rows)
        }
    }
}

/// Reads a results file, choosing the format from its first non-blank byte.
pub fn read_rows(path: &Path) -> Result<Vec<SweepRow>> {
    let bytes = std::fs::read(path)?;
    let format = match bytes.iter().find(|b| !b.is_ascii_whitespace()) {
        Some(b'[') => Format::Json,
        _ => Format::Csv,
    };
    read_rows_from(bytes.as_slice(), format)
}
