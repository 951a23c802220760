//! Inside-out evaluation: each bag aggregates its rows into a message keyed
//! by the features it shares with its parent; parents multiply in their
//! children's messages and pass the result upwards. The join itself is
//! never built.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::relational::table::tuple_key;
use crate::relational::{Database, JoinTree};
use crate::semiring::query::{FeatureFn, Interval, RowFn};
use crate::semiring::{Semiring, SumProdQuery};

/// Per-row query results for the rows of one table.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedResult<V> {
    pub table: usize,
    pub values: Vec<V>,
}

impl<V> GroupedResult<V> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A join tree compiled against concrete tables: separator keys are
/// resolved to dense ids once, so evaluating a query is array lookups only.
#[derive(Debug, Clone)]
pub struct JoinPlan {
    tree: JoinTree,
    order: Vec<usize>,
    row_counts: Vec<usize>,
    /// For each non-root bag: key id of each of its rows, and key count.
    up_ids: Vec<Vec<usize>>,
    n_keys: Vec<usize>,
    /// For each non-root bag: key id (in the bag's key space) of each row of
    /// its parent, or `None` when the parent row has no partner.
    down_ids: Vec<Vec<Option<usize>>>,
}

impl JoinPlan {
    pub fn new(db: &Database, tree: &JoinTree) -> JoinPlan {
        let n = tree.len();
        let mut up_ids = vec![Vec::new(); n];
        let mut n_keys = vec![0; n];
        let mut down_ids = vec![Vec::new(); n];
        for bag in 0..n {
            let Some(parent) = tree.parent(bag) else {
                continue;
            };
            let sep = tree.separator(bag);
            let child_t = db.table(bag);
            let parent_t = db.table(parent);
            let child_cols: Vec<usize> = sep
                .iter()
                .map(|f| child_t.column_index(f).unwrap())
                .collect();
            let parent_cols: Vec<usize> = sep
                .iter()
                .map(|f| parent_t.column_index(f).unwrap())
                .collect();

            let mut ids: HashMap<Vec<u64>, usize> = HashMap::new();
            up_ids[bag] = child_t
                .rows()
                .iter()
                .map(|row| {
                    let key = tuple_key(child_cols.iter().map(|&j| row[j]));
                    let next = ids.len();
                    *ids.entry(key).or_insert(next)
                })
                .collect();
            n_keys[bag] = ids.len();
            down_ids[bag] = parent_t
                .rows()
                .iter()
                .map(|row| {
                    ids.get(&tuple_key(parent_cols.iter().map(|&j| row[j])))
                        .copied()
                })
                .collect();
        }
        JoinPlan {
            order: tree.post_order(),
            tree: tree.clone(),
            row_counts: db.tables().iter().map(|t| t.len()).collect(),
            up_ids,
            n_keys,
            down_ids,
        }
    }

    pub fn tree(&self) -> &JoinTree {
        &self.tree
    }

    pub fn root(&self) -> usize {
        self.tree.root()
    }

    fn check_db(&self, db: &Database) -> Result<()> {
        let counts: Vec<usize> = db.tables().iter().map(|t| t.len()).collect();
        if counts != self.row_counts {
            return Err(Error::Query(
                "plan was compiled for different tables".into(),
            ));
        }
        Ok(())
    }

    /// One value per row of the root table; `None` stands for semiring zero.
    pub fn eval_root_rows<S: Semiring>(
        &self,
        db: &Database,
        q: &SumProdQuery<S::Value>,
        s: &S,
    ) -> Result<Vec<Option<S::Value>>> {
        self.check_db(db)?;
        q.validate(db)?;
        let root = self.tree.root();
        if !q.constraints.is_satisfiable() {
            return Ok(vec![None; db.table(root).len()]);
        }
        let compiled = CompiledQuery::new(db, q);

        let mut messages: Vec<Vec<Option<S::Value>>> = vec![Vec::new(); self.tree.len()];
        let mut out = Vec::new();
        for &bag in &self.order {
            let rows = db.table(bag).rows();
            let is_root = bag == root;
            let mut msg: Vec<Option<S::Value>> = if is_root {
                Vec::new()
            } else {
                vec![None; self.n_keys[bag]]
            };
            if is_root {
                out = vec![None; rows.len()];
            }
            'rows: for (r, row) in rows.iter().enumerate() {
                let Some(mut w) = compiled.row_weight(bag, row, s) else {
                    continue;
                };
                for &c in self.tree.children(bag) {
                    let Some(id) = self.down_ids[c][r] else {
                        continue 'rows;
                    };
                    let Some(m) = &messages[c][id] else {
                        continue 'rows;
                    };
                    w = s.mul(&w, m);
                }
                if is_root {
                    out[r] = Some(w);
                } else {
                    match &mut msg[self.up_ids[bag][r]] {
                        Some(acc) => s.add_assign(acc, &w),
                        slot @ None => *slot = Some(w),
                    }
                }
            }
            for &c in self.tree.children(bag) {
                messages[c] = Vec::new();
            }
            messages[bag] = msg;
        }
        Ok(out)
    }

    pub fn eval_grouped<S: Semiring>(
        &self,
        db: &Database,
        q: &SumProdQuery<S::Value>,
        s: &S,
    ) -> Result<GroupedResult<S::Value>> {
        let values = self
            .eval_root_rows(db, q, s)?
            .into_iter()
            .map(|v| v.unwrap_or_else(|| s.zero()))
            .collect();
        Ok(GroupedResult {
            table: self.root(),
            values,
        })
    }

    pub fn eval<S: Semiring>(
        &self,
        db: &Database,
        q: &SumProdQuery<S::Value>,
        s: &S,
    ) -> Result<S::Value> {
        let rows = self.eval_root_rows(db, q, s)?;
        Ok(s.sum(rows.iter().flatten()))
    }
}

struct CompiledQuery<'q, V> {
    gates: Vec<Vec<(usize, Interval)>>,
    factors: Vec<Vec<(usize, &'q FeatureFn<V>)>>,
    row_factors: Vec<Option<&'q RowFn<V>>>,
}

impl<'q, V: Clone> CompiledQuery<'q, V> {
    /// Every feature factor and constraint lands on the owning table.
    fn new(db: &Database, q: &'q SumProdQuery<V>) -> Self {
        let n = db.num_tables();
        let mut gates = vec![Vec::new(); n];
        let mut factors = vec![Vec::new(); n];
        let mut row_factors = vec![None; n];
        for (f, iv) in q.constraints.iter() {
            let t = db.owner(f).unwrap();
            gates[t].push((db.table(t).column_index(f).unwrap(), *iv));
        }
        for (f, func) in &q.factors {
            let t = db.owner(f).unwrap();
            factors[t].push((db.table(t).column_index(f).unwrap(), func));
        }
        for (name, func) in &q.row_factors {
            row_factors[db.table_index(name).unwrap()] = Some(func);
        }
        CompiledQuery {
            gates,
            factors,
            row_factors,
        }
    }

    fn row_weight<S: Semiring<Value = V>>(&self, t: usize, row: &[f64], s: &S) -> Option<V> {
        if !self.gates[t].iter().all(|(j, iv)| iv.contains(row[*j])) {
            return None;
        }
        let mut acc: Option<V> = None;
        let terms = self.factors[t]
            .iter()
            .map(|(j, f)| f(row[*j]))
            .chain(self.row_factors[t].map(|f| f(row)));
        for v in terms {
            acc = Some(match acc {
                None => v,
                Some(a) => s.mul(&a, &v),
            });
        }
        Some(acc.unwrap_or_else(|| s.one()))
    }
}

/// Scalar SumProd over the whole join.
pub fn eval_sumprod<S: Semiring>(
    db: &Database,
    tree: &JoinTree,
    q: &SumProdQuery<S::Value>,
    s: &S,
) -> Result<S::Value> {
    JoinPlan::new(db, tree).eval(db, q, s)
}

/// SumProd grouped by the rows of `group_table`; the tree is re-rooted at
/// that table if necessary.
pub fn eval_sumprod_grouped<S: Semiring>(
    db: &Database,
    tree: &JoinTree,
    group_table: &str,
    q: &SumProdQuery<S::Value>,
    s: &S,
) -> Result<GroupedResult<S::Value>> {
    let t = db
        .table_index(group_table)
        .ok_or_else(|| Error::Query(format!("unknown grouping table `{group_table}`")))?;
    let tree = if tree.root() == t {
        tree.clone()
    } else {
        tree.rerooted(t)
    };
    JoinPlan::new(db, &tree).eval_grouped(db, q, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relational::Table;
    use crate::semiring::{CountingSemiring, RealSemiring};

    fn example_db(t2_rows: &[&[f64]]) -> Database {
        let t1 = Table::from_rows("T1", &["a", "b"], &[&[1.0, 1.0], &[2.0, 1.0]]).unwrap();
        let t2 = Table::from_rows("T2", &["b", "c", "y"], t2_rows).unwrap();
        Database::new(vec![t1, t2], "y").unwrap()
    }

    #[test]
    fn counting_equals_join_cardinality() {
        let db = example_db(&[&[1.0, 5.0, 5.0]]);
        let tree = db.join_tree(0).unwrap();
        let n = eval_sumprod(&db, &tree, &SumProdQuery::new(), &CountingSemiring).unwrap();
        assert_eq!(n, db.materialize().unwrap().len() as u64);
        assert_eq!(n, 2);
    }

    #[test]
    fn label_sum() {
        let db = example_db(&[&[1.0, 5.0, 5.0]]);
        let tree = db.join_tree(1).unwrap();
        let q = SumProdQuery::new().factor("y", |y| y);
        assert_eq!(eval_sumprod(&db, &tree, &q, &RealSemiring).unwrap(), 10.0);
    }

    #[test]
    fn empty_join_is_zero() {
        let db = example_db(&[&[9.0, 5.0, 5.0]]);
        let tree = db.join_tree(0).unwrap();
        let q = SumProdQuery::new().factor("y", |y| y);
        assert_eq!(eval_sumprod(&db, &tree, &q, &RealSemiring).unwrap(), 0.0);
    }

    #[test]
    fn grouped_counts() {
        let db = example_db(&[&[1.0, 5.0, 5.0], &[7.0, 0.0, 1.0]]);
        let tree = db.join_tree(0).unwrap();
        let g = eval_sumprod_grouped(&db, &tree, "T1", &SumProdQuery::new(), &CountingSemiring)
            .unwrap();
        assert_eq!(g.values, vec![1, 1]);
        let g = eval_sumprod_grouped(&db, &tree, "T2", &SumProdQuery::new(), &CountingSemiring)
            .unwrap();
        assert_eq!(g.values, vec![2, 0]);
        let total = eval_sumprod(&db, &tree, &SumProdQuery::new(), &CountingSemiring).unwrap();
        assert_eq!(g.values.iter().sum::<u64>(), total);
    }

    #[test]
    fn unknown_group_or_factor() {
        let db = example_db(&[&[1.0, 5.0, 5.0]]);
        let tree = db.join_tree(0).unwrap();
        assert!(
            eval_sumprod_grouped(&db, &tree, "nope", &SumProdQuery::new(), &CountingSemiring)
                .is_err()
        );
        let q = SumProdQuery::new().factor("zz", |_| 1u64);
        assert!(matches!(
            eval_sumprod(&db, &tree, &q, &CountingSemiring),
            Err(Error::Query(_))
        ));
    }

    #[test]
    fn infeasible_constraint_is_zero() {
        let db = example_db(&[&[1.0, 5.0, 5.0]]);
        let tree = db.join_tree(0).unwrap();
        let q = SumProdQuery::new()
            .constrain("a", Interval::at_least(2.0))
            .constrain("a", Interval::below(1.0));
        assert_eq!(eval_sumprod(&db, &tree, &q, &CountingSemiring).unwrap(), 0);
    }
}
