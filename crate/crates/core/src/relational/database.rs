use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relational::{
    build_hypergraph, build_join_tree_at, load_table, JoinHypergraph, JoinTree, Table,
};

pub const DEFAULT_JOIN_CAP: usize = 1_000_000;

/// Declared join schema as read from disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JoinSpec {
    pub tables: Vec<TableSource>,
    pub label: String,
    #[serde(default = "default_cap")]
    pub join_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSource {
    pub name: String,
    pub path: PathBuf,
}

fn default_cap() -> usize {
    DEFAULT_JOIN_CAP
}

impl JoinSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("join spec: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Load every table. Relative table paths resolve against `base`.
    pub fn load(&self, base: &Path) -> Result<Database> {
        let mut tables = Vec::with_capacity(self.tables.len());
        for src in &self.tables {
            let path = if src.path.is_absolute() {
                src.path.clone()
            } else {
                base.join(&src.path)
            };
            let file = File::open(&path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            tables.push(load_table(file, &src.name)?);
        }
        let mut db = Database::new(tables, &self.label)?;
        db.join_cap = self.join_cap;
        Ok(db)
    }
}

/// Validated collection of tables plus the label and feature ownership.
///
/// Each feature is owned by the lowest-index table containing it; that
/// table carries its factor function, its split thresholds and its sketch
/// coordinate.
#[derive(Debug, Clone)]
pub struct Database {
    tables: Vec<Table>,
    label: String,
    label_table: usize,
    features: Vec<String>,
    owner: BTreeMap<String, usize>,
    hypergraph: JoinHypergraph,
    pub join_cap: usize,
}

impl Database {
    pub fn new(tables: Vec<Table>, label: &str) -> Result<Self> {
        if tables.is_empty() {
            return Err(Error::Schema("no tables".into()));
        }
        for (i, t) in tables.iter().enumerate() {
            if tables[..i].iter().any(|o| o.name() == t.name()) {
                return Err(Error::Schema(format!(
                    "duplicate table name `{}`",
                    t.name()
                )));
            }
        }
        let holders: Vec<usize> = (0..tables.len())
            .filter(|&i| tables[i].has_column(label))
            .collect();
        let label_table = match holders.as_slice() {
            [one] => *one,
            [] => return Err(Error::Schema(format!("label column `{label}` not found"))),
            _ => {
                return Err(Error::Schema(format!(
                    "label column `{label}` appears in more than one table"
                )))
            }
        };
        let hypergraph = build_hypergraph(&tables);
        let features = hypergraph.vertices().to_vec();
        let mut owner = BTreeMap::new();
        for (i, t) in tables.iter().enumerate() {
            for c in t.columns() {
                owner.entry(c.clone()).or_insert(i);
            }
        }
        Ok(Database {
            tables,
            label: label.to_string(),
            label_table,
            features,
            owner,
            hypergraph,
            join_cap: DEFAULT_JOIN_CAP,
        })
    }

    pub fn tables(&self) -> &[Table] {
        &self.tables
    }

    pub fn table(&self, i: usize) -> &Table {
        &self.tables[i]
    }

    pub fn num_tables(&self) -> usize {
        self.tables.len()
    }

    pub fn table_index(&self, name: &str) -> Option<usize> {
        self.tables.iter().position(|t| t.name() == name)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn label_table(&self) -> usize {
        self.label_table
    }

    /// All columns including the label, in first-appearance order.
    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn owner(&self, feature: &str) -> Option<usize> {
        self.owner.get(feature).copied()
    }

    /// Columns of table `t` that it owns, in the table's column order.
    pub fn owned_columns(&self, t: usize) -> Vec<usize> {
        self.tables[t]
            .columns()
            .iter()
            .enumerate()
            .filter(|(_, c)| self.owner[c.as_str()] == t)
            .map(|(j, _)| j)
            .collect()
    }

    /// Split candidates: (table, column index) of every owned non-label
    /// column, ordered by table then column.
    pub fn split_features(&self) -> Vec<(usize, usize)> {
        (0..self.tables.len())
            .flat_map(|t| {
                self.owned_columns(t)
                    .into_iter()
                    .filter(move |&j| self.tables[t].columns()[j] != self.label)
                    .map(move |j| (t, j))
            })
            .collect()
    }

    /// Sorted distinct values of a column: the threshold candidates.
    pub fn column_domain(&self, t: usize, j: usize) -> Vec<f64> {
        let mut vals: Vec<f64> = self.tables[t].rows().iter().map(|r| r[j]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup_by(|a, b| a == b);
        vals
    }

    pub fn hypergraph(&self) -> &JoinHypergraph {
        &self.hypergraph
    }

    pub fn join_tree(&self, root: usize) -> Result<JoinTree> {
        build_join_tree_at(&self.hypergraph, root)
    }

    /// All column names; stored in models as the schema fingerprint.
    pub fn fingerprint(&self) -> Vec<String> {
        self.features.clone()
    }

    /// Copy with one table replaced; schema must be unchanged.
    pub fn with_table(&self, i: usize, table: Table) -> Result<Database> {
        if table.columns() != self.tables[i].columns() {
            return Err(Error::Schema("replacement table changes the schema".into()));
        }
        let mut tables = self.tables.clone();
        tables[i] = table;
        let mut db = Database::new(tables, &self.label)?;
        db.join_cap = self.join_cap;
        Ok(db)
    }
}
