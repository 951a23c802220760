use std::collections::BTreeSet;
use std::fmt;

use crate::relational::Table;

/// One vertex per distinct column name, one hyperedge per table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinHypergraph {
    vertices: Vec<String>,
    edge_names: Vec<String>,
    edges: Vec<BTreeSet<usize>>,
}

/// A single application of a GYO reduction rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GyoStep {
    /// Remove a column that occurs in exactly one remaining table.
    RemoveColumn { table: usize, column: usize },
    /// Remove a table whose remaining columns are contained in another
    /// remaining table.
    RemoveTable { table: usize, container: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Acyclicity {
    Acyclic {
        trace: Vec<GyoStep>,
    },
    Cyclic {
        trace: Vec<GyoStep>,
        /// Remaining (table index, remaining column indices).
        residual: Vec<(usize, Vec<usize>)>,
    },
}

impl Acyclicity {
    pub fn is_acyclic(&self) -> bool {
        matches!(self, Acyclicity::Acyclic { .. })
    }

    pub fn trace(&self) -> &[GyoStep] {
        match self {
            Acyclicity::Acyclic { trace } | Acyclicity::Cyclic { trace, .. } => trace,
        }
    }
}

pub fn build_hypergraph(tables: &[Table]) -> JoinHypergraph {
    let mut vertices: Vec<String> = Vec::new();
    let mut edges = Vec::with_capacity(tables.len());
    for t in tables {
        let mut edge = BTreeSet::new();
        for c in t.columns() {
            let idx = match vertices.iter().position(|v| v == c) {
                Some(i) => i,
                None => {
                    vertices.push(c.clone());
                    vertices.len() - 1
                }
            };
            edge.insert(idx);
        }
        edges.push(edge);
    }
    JoinHypergraph {
        vertices,
        edge_names: tables.iter().map(|t| t.name().to_string()).collect(),
        edges,
    }
}

impl JoinHypergraph {
    pub fn from_edges(edges: &[(&str, &[&str])]) -> Self {
        let tables: Vec<Table> = edges
            .iter()
            .map(|(name, cols)| Table::from_rows(name, cols, &[]).expect("valid edge"))
            .collect();
        build_hypergraph(&tables)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[BTreeSet<usize>] {
        &self.edges
    }

    pub fn edge_name(&self, e: usize) -> &str {
        &self.edge_names[e]
    }

    pub fn edge_columns(&self, e: usize) -> Vec<String> {
        self.edges[e]
            .iter()
            .map(|&v| self.vertices[v].clone())
            .collect()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Every reduction step available in the given state, in canonical
    /// order: column removals by (table, column), then table removals by
    /// (table, container).
    fn eligible_steps(alive: &[bool], edges: &[BTreeSet<usize>]) -> Vec<GyoStep> {
        let mut steps = Vec::new();
        for (t, edge) in edges.iter().enumerate() {
            if !alive[t] {
                continue;
            }
            for &c in edge {
                let solo = edges
                    .iter()
                    .enumerate()
                    .all(|(o, e)| o == t || !alive[o] || !e.contains(&c));
                if solo {
                    steps.push(GyoStep::RemoveColumn {
                        table: t,
                        column: c,
                    });
                }
            }
        }
        for (t, edge) in edges.iter().enumerate() {
            if !alive[t] {
                continue;
            }
            for (o, other) in edges.iter().enumerate() {
                if o != t && alive[o] && edge.is_subset(other) {
                    steps.push(GyoStep::RemoveTable {
                        table: t,
                        container: o,
                    });
                }
            }
        }
        steps
    }

    /// GYO reduction with a caller-chosen rule order. `choose` receives the
    /// eligible steps (never empty) and returns the index to apply.
    pub fn reduce_with(&self, mut choose: impl FnMut(&[GyoStep]) -> usize) -> Acyclicity {
        let mut edges = self.edges.clone();
        let mut alive = vec![true; edges.len()];
        let mut trace = Vec::new();
        loop {
            let steps = Self::eligible_steps(&alive, &edges);
            if steps.is_empty() {
                break;
            }
            let step = steps[choose(&steps).min(steps.len() - 1)].clone();
            match step {
                GyoStep::RemoveColumn { table, column } => {
                    edges[table].remove(&column);
                }
                GyoStep::RemoveTable { table, .. } => {
                    alive[table] = false;
                }
            }
            trace.push(step);
        }
        let residual: Vec<(usize, Vec<usize>)> = (0..edges.len())
            .filter(|&t| alive[t])
            .map(|t| (t, edges[t].iter().copied().collect()))
            .collect();
        // A single surviving table has lost all its columns to rule 1 and is
        // the last one standing; nothing more to reduce.
        if residual.len() <= 1 {
            Acyclicity::Acyclic { trace }
        } else {
            Acyclicity::Cyclic { trace, residual }
        }
    }

    /// Deterministic GYO reduction (always the first eligible step).
    pub fn check_acyclic(&self) -> Acyclicity {
        self.reduce_with(|_| 0)
    }
}

impl fmt::Display for JoinHypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in 0..self.edges.len() {
            if e > 0 {
                write!(f, " ")?;
            }
            write!(
                f,
                "{}({})",
                self.edge_names[e],
                self.edge_columns(e).join(",")
            )?;
        }
        Ok(())
    }
}

pub fn check_acyclic(h: &JoinHypergraph) -> Acyclicity {
    h.check_acyclic()
}
