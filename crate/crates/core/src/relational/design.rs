use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::relational::table::tuple_key;
use crate::relational::{Database, Table};

/// The materialized natural join. Only used as a desk-scale oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub label_index: Option<usize>,
}

impl DesignMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Positions of `table`'s columns inside a design-matrix row.
    pub fn projection(&self, table: &Table) -> Vec<usize> {
        table
            .columns()
            .iter()
            .map(|c| self.column_index(c).expect("table column in design matrix"))
            .collect()
    }
}

/// Exact natural join under bag semantics, rows sorted lexicographically.
/// Fails with a resource error if any intermediate result exceeds `cap`.
pub fn materialize_join(tables: &[Table], cap: usize) -> Result<DesignMatrix> {
    if tables.is_empty() {
        return Err(Error::Schema("no tables to join".into()));
    }
    let mut remaining: Vec<usize> = (1..tables.len()).collect();
    let mut columns: Vec<String> = tables[0].columns().to_vec();
    let mut rows: Vec<Vec<f64>> = tables[0].rows().to_vec();
    if rows.len() > cap {
        return Err(Error::Resource { cap });
    }

    while !remaining.is_empty() {
        // Prefer a table connected to what has been joined so far.
        let pos = remaining
            .iter()
            .position(|&t| tables[t].columns().iter().any(|c| columns.contains(c)))
            .unwrap_or(0);
        let next = &tables[remaining.remove(pos)];

        let shared: Vec<(usize, usize)> = next
            .columns()
            .iter()
            .enumerate()
            .filter_map(|(j, c)| columns.iter().position(|x| x == c).map(|i| (i, j)))
            .collect();
        let fresh: Vec<usize> = (0..next.columns().len())
            .filter(|j| !shared.iter().any(|&(_, s)| s == *j))
            .collect();

        let mut index: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
        for (r, row) in next.rows().iter().enumerate() {
            index
                .entry(tuple_key(shared.iter().map(|&(_, j)| row[j])))
                .or_default()
                .push(r);
        }

        let mut joined = Vec::new();
        for left in &rows {
            let key = tuple_key(shared.iter().map(|&(i, _)| left[i]));
            if let Some(matches) = index.get(&key) {
                for &r in matches {
                    if joined.len() == cap {
                        return Err(Error::Resource { cap });
                    }
                    let mut out = left.clone();
                    out.extend(fresh.iter().map(|&j| next.rows()[r][j]));
                    joined.push(out);
                }
            }
        }
        columns.extend(fresh.iter().map(|&j| next.columns()[j].clone()));
        rows = joined;
    }

    // Canonical column order: first appearance over the declared tables.
    let mut order: Vec<String> = Vec::new();
    for t in tables {
        for c in t.columns() {
            if !order.contains(c) {
                order.push(c.clone());
            }
        }
    }
    let perm: Vec<usize> = order
        .iter()
        .map(|c| columns.iter().position(|x| x == c).unwrap())
        .collect();
    let mut rows: Vec<Vec<f64>> = rows
        .into_iter()
        .map(|r| perm.iter().map(|&i| r[i]).collect())
        .collect();
    rows.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(DesignMatrix {
        columns: order,
        rows,
        label_index: None,
    })
}

impl Database {
    pub fn materialize(&self) -> Result<DesignMatrix> {
        let mut dm = materialize_join(self.tables(), self.join_cap)?;
        dm.label_index = dm.column_index(self.label());
        Ok(dm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t1() -> Table {
        Table::from_rows("T1", &["a", "b"], &[&[1.0, 1.0], &[2.0, 1.0]]).unwrap()
    }

    #[test]
    fn single_match_key() {
        let t2 = Table::from_rows("T2", &["b", "c"], &[&[1.0, 5.0]]).unwrap();
        let dm = materialize_join(&[t1(), t2], 100).unwrap();
        assert_eq!(dm.columns, vec!["a", "b", "c"]);
        assert_eq!(dm.rows, vec![vec![1.0, 1.0, 5.0], vec![2.0, 1.0, 5.0]]);
    }

    #[test]
    fn empty_join() {
        let t2 = Table::from_rows("T2", &["b", "c"], &[&[9.0, 5.0]]).unwrap();
        assert!(materialize_join(&[t1(), t2], 100).unwrap().is_empty());
    }

    #[test]
    fn multiplicities_multiply() {
        // Two b-values on the left, three matching rows each on the right.
        let left = Table::from_rows("L", &["a", "b"], &[&[1.0, 1.0], &[2.0, 2.0]]).unwrap();
        let right = Table::from_rows(
            "R",
            &["b", "c"],
            &[
                &[1.0, 10.0],
                &[1.0, 11.0],
                &[1.0, 12.0],
                &[2.0, 20.0],
                &[2.0, 21.0],
                &[2.0, 22.0],
            ],
        )
        .unwrap();
        let dm = materialize_join(&[left.clone(), right.clone()], 100).unwrap();
        // brute-force nested loop
        let mut expected = 0;
        for l in left.rows() {
            for r in right.rows() {
                if l[1] == r[0] {
                    expected += 1;
                }
            }
        }
        assert_eq!(dm.len(), expected);
        assert_eq!(dm.len(), 6);
    }

    #[test]
    fn duplicate_rows_contribute_multiplicity() {
        let left = Table::from_rows("L", &["a"], &[&[1.0], &[1.0]]).unwrap();
        let right =
            Table::from_rows("R", &["a", "b"], &[&[1.0, 2.0], &[1.0, 2.0], &[1.0, 3.0]]).unwrap();
        assert_eq!(materialize_join(&[left, right], 100).unwrap().len(), 6);
    }

    #[test]
    fn cap_enforced() {
        let left = Table::from_rows("L", &["a"], &[&[1.0], &[1.0], &[1.0]]).unwrap();
        let right = Table::from_rows("R", &["a"], &[&[1.0], &[1.0], &[1.0]]).unwrap();
        assert!(matches!(
            materialize_join(&[left, right], 8),
            Err(Error::Resource { cap: 8 })
        ));
    }
}
