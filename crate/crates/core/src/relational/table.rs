use std::collections::HashSet;
use std::io::Read;

use crate::error::{Error, Result};

/// A named relation of 64-bit float columns. Rows keep file order and
/// duplicates are preserved (bag semantics).
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    name: String,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let name = name.into();
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.as_str()) {
                return Err(Error::Schema(format!(
                    "table `{name}` declares column `{c}` more than once"
                )));
            }
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(Error::Schema(format!(
                    "table `{name}` row {} has {} fields, expected {}",
                    i + 1,
                    row.len(),
                    columns.len()
                )));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::Parse {
                    table: name,
                    row: i + 1,
                    column: columns[j].clone(),
                    message: "value is not finite".into(),
                });
            }
        }
        Ok(Table {
            name,
            columns,
            rows,
        })
    }

    /// Convenience constructor for literals in tests and examples.
    pub fn from_rows(name: &str, columns: &[&str], rows: &[&[f64]]) -> Result<Self> {
        Table::new(
            name,
            columns.iter().map(|c| c.to_string()).collect(),
            rows.iter().map(|r| r.to_vec()).collect(),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, column: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == column)
    }

    pub fn has_column(&self, column: &str) -> bool {
        self.column_index(column).is_some()
    }

    /// Copy of this table keeping only rows accepted by `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&[f64]) -> bool) -> Table {
        Table {
            name: self.name.clone(),
            columns: self.columns.clone(),
            rows: self.rows.iter().filter(|r| keep(r)).cloned().collect(),
        }
    }
}

/// Parse a comma-delimited table with a header line of unique column names.
pub fn load_table<R: Read>(source: R, name: &str) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let header = reader.headers().map_err(|e| Error::Parse {
        table: name.to_string(),
        row: 0,
        column: String::new(),
        message: e.to_string(),
    })?;
    let columns: Vec<String> = header.iter().map(str::to_string).collect();
    if columns.iter().any(|c| c.is_empty()) {
        return Err(Error::Schema(format!(
            "table `{name}` has an empty column name"
        )));
    }

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            table: name.to_string(),
            row: i + 1,
            column: String::new(),
            message: e.to_string(),
        })?;
        let mut row = Vec::with_capacity(columns.len());
        for (j, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                table: name.to_string(),
                row: i + 1,
                column: columns.get(j).cloned().unwrap_or_default(),
                message: format!("`{field}` is not a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    table: name.to_string(),
                    row: i + 1,
                    column: columns[j].clone(),
                    message: format!("`{field}` is not finite"),
                });
            }
            row.push(value);
        }
        rows.push(row);
    }
    Table::new(name, columns, rows)
}

/// Hashable, order-preserving key for a tuple of finite floats. Negative
/// zero is folded into positive zero so that join equality matches `==`.
pub(crate) fn value_key(v: f64) -> u64 {
    if v == 0.0 {
        0
    } else {
        v.to_bits()
    }
}

pub(crate) fn tuple_key(values: impl IntoIterator<Item = f64>) -> Vec<u64> {
    values.into_iter().map(value_key).collect()
}
