//! Machine-readable result tables. JSON is canonical; CSV (RFC 4180) is a
//! projection of the same rows. Floats are serialized with 17 significant
//! digits so round-trips are exact.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    UInt(u64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    pub fn csv_text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::UInt(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::UInt(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            _ => None,
        }
    }
}

/// 17 significant digits: enough to reproduce any f64 bit-exactly.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub ty: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

impl ColumnSpec {
    pub fn new(name: &str, ty: &str) -> Self {
        ColumnSpec {
            name: name.to_string(),
            ty: ty.to_string(),
            unit: None,
        }
    }

    pub fn with_unit(name: &str, ty: &str, unit: &str) -> Self {
        ColumnSpec {
            name: name.to_string(),
            ty: ty.to_string(),
            unit: Some(unit.to_string()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultTable {
    pub columns: Vec<ColumnSpec>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Map<String, Value>,
}

impl ResultTable {
    pub fn new(columns: Vec<ColumnSpec>) -> Self {
        ResultTable {
            columns,
            rows: Vec::new(),
            summary: Map::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn set_summary(&mut self, key: &str, value: Value) {
        self.summary.insert(key.to_string(), value);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// RFC 4180 CSV with a header row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns.iter().map(|c| c.name.as_str()))
            .map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.csv_text())).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Human-readable rendering for terminal output.
    pub fn render_text(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.name.len()).collect();
        let rendered: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(k, c)| {
                        let text = match c {
                            Cell::Float(v) => format!("{v:.6}"),
                            other => other.csv_text(),
                        };
                        widths[k] = widths[k].max(text.len());
                        text
                    })
                    .collect()
            })
            .collect();
        let mut out = String::new();
        for (k, c) in self.columns.iter().enumerate() {
            out.push_str(&format!("{:>width$}  ", c.name, width = widths[k]));
        }
        out.push('\n');
        for row in rendered {
            for (k, text) in row.iter().enumerate() {
                out.push_str(&format!("{:>width$}  ", text, width = widths[k]));
            }
            out.push('\n');
        }
        out
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    PhaseScan,
    LlnConvergence,
    IntersectionHist,
}

/// Writes plot-ready columns so an external plotter can reproduce the
/// standard curves; no rendering here.
pub fn emit_plot_data<W: Write>(table: &ResultTable, kind: PlotKind, out: W) -> Result<()> {
    let project = |names: &[&str]| -> Result<ResultTable> {
        let mut idx = Vec::with_capacity(names.len());
        for name in names {
            idx.push(table.column_index(name).ok_or_else(|| {
                Error::parameter(format!("table lacks column {name} required by this plot kind"))
            })?);
        }
        let mut out_table = ResultTable::new(
            idx.iter()
                .map(|&k| table.columns[k].clone())
                .collect::<Vec<_>>(),
        );
        for row in &table.rows {
            out_table.push(idx.iter().map(|&k| row[k].clone()).collect());
        }
        Ok(out_table)
    };
    let projected = match kind {
        PlotKind::LlnConvergence => project(&["N", "mean_g_over_n", "limit"])?,
        PlotKind::PhaseScan => project(&["mu", "lambda", "M", "r", "estimate", "se"])?,
        PlotKind::IntersectionHist => {
            // Pass the histogram through unchanged; it is already columnar.
            project(
                &table
                    .columns
                    .iter()
                    .map(|c| c.name.as_str())
                    .collect::<Vec<_>>(),
            )?
        }
    };
    projected.write_csv(out)
}
