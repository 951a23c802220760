use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::relational::table::tuple_key;
use crate::relational::Database;

/// Per table `t`: the distinct projections `D_t` of its rows onto the
/// features it owns (`E_t`), ordered lexicographically, and the index map
/// `w_t`.
#[derive(Debug, Clone)]
pub struct DomainIndex {
    assigned: Vec<Vec<usize>>,
    assigned_names: Vec<Vec<String>>,
    domains: Vec<Vec<Vec<f64>>>,
    lookup: Vec<HashMap<Vec<u64>, usize>>,
}

impl DomainIndex {
    pub fn new(db: &Database) -> Self {
        let mut assigned = Vec::new();
        let mut assigned_names = Vec::new();
        let mut domains = Vec::new();
        let mut lookup = Vec::new();
        for t in 0..db.num_tables() {
            let cols = db.owned_columns(t);
            let table = db.table(t);
            let mut dom: Vec<Vec<f64>> = table
                .rows()
                .iter()
                .map(|r| cols.iter().map(|&j| r[j]).collect())
                .collect();
            dom.sort_by(|a: &Vec<f64>, b| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            dom.dedup_by(|a, b| tuple_key(a.iter().copied()) == tuple_key(b.iter().copied()));
            let map = dom
                .iter()
                .enumerate()
                .map(|(i, p)| (tuple_key(p.iter().copied()), i))
                .collect();
            assigned_names.push(cols.iter().map(|&j| table.columns()[j].clone()).collect());
            assigned.push(cols);
            domains.push(dom);
            lookup.push(map);
        }
        DomainIndex {
            assigned,
            assigned_names,
            domains,
            lookup,
        }
    }

    pub fn num_tables(&self) -> usize {
        self.domains.len()
    }

    /// `|D_t|`
    pub fn domain_size(&self, t: usize) -> usize {
        self.domains[t].len()
    }

    pub fn domain(&self, t: usize) -> &[Vec<f64>] {
        &self.domains[t]
    }

    /// Names of the features in `E_t`.
    pub fn assigned_features(&self, t: usize) -> &[String] {
        &self.assigned_names[t]
    }

    /// `w_t` of a projection onto `E_t`.
    pub fn index_of_projection(&self, t: usize, projection: &[f64]) -> Result<usize> {
        self.lookup[t]
            .get(&tuple_key(projection.iter().copied()))
            .copied()
            .ok_or_else(|| Error::Index(projection.to_vec()))
    }

    /// `w_t` of a full row of table `t`, in the table's column order.
    pub fn index_of_row(&self, t: usize, row: &[f64]) -> Result<usize> {
        let proj: Vec<f64> = self.assigned[t].iter().map(|&j| row[j]).collect();
        self.index_of_projection(t, &proj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relational::Table;

    #[test]
    fn indices_follow_sorted_projections() {
        let t1 =
            Table::from_rows("T1", &["a", "b"], &[&[2.0, 1.0], &[1.0, 1.0], &[2.0, 1.0]]).unwrap();
        let t2 = Table::from_rows("T2", &["b", "y"], &[&[1.0, 9.0], &[1.0, 3.0]]).unwrap();
        let db = Database::new(vec![t1, t2], "y").unwrap();
        let d = DomainIndex::new(&db);
        assert_eq!(d.assigned_features(0), &["a", "b"]);
        assert_eq!(d.assigned_features(1), &["y"]);
        assert_eq!(d.domain_size(0), 2);
        assert_eq!(d.domain(1), &[vec![3.0], vec![9.0]]);
        assert_eq!(d.index_of_row(0, &[1.0, 1.0]).unwrap(), 0);
        assert_eq!(d.index_of_row(0, &[2.0, 1.0]).unwrap(), 1);
        assert_eq!(d.index_of_row(1, &[1.0, 9.0]).unwrap(), 1);
        assert!(d.index_of_projection(1, &[4.0]).is_err());
    }
}
