use crate::relational::{Database, DesignMatrix, Table};
use crate::semiring::{GroupedResult, Semiring, SumProdQuery};

fn row_value<S: Semiring>(
    db: &Database,
    dm: &DesignMatrix,
    projections: &[Vec<usize>],
    x: &[f64],
    q: &SumProdQuery<S::Value>,
    s: &S,
) -> Option<S::Value> {
    if !q.constraints.admits(|f| dm.column_index(f).map(|i| x[i])) {
        return None;
    }
    let mut acc = s.one();
    for (f, func) in &q.factors {
        let i = dm.column_index(f)?;
        acc = s.mul(&acc, &func(x[i]));
    }
    for (name, func) in &q.row_factors {
        let t = db.table_index(name)?;
        let row: Vec<f64> = projections[t].iter().map(|&i| x[i]).collect();
        acc = s.mul(&acc, &func(&row));
    }
    Some(acc)
}

/// Direct fold over the materialized join. Testing oracle only.
pub fn eval_bruteforce<S: Semiring>(
    db: &Database,
    dm: &DesignMatrix,
    q: &SumProdQuery<S::Value>,
    s: &S,
) -> S::Value {
    let projections: Vec<Vec<usize>> = db.tables().iter().map(|t| dm.projection(t)).collect();
    let mut total = s.zero();
    for x in &dm.rows {
        if let Some(v) = row_value(db, dm, &projections, x, q, s) {
            s.add_assign(&mut total, &v);
        }
    }
    total
}

/// Brute-force grouped evaluation: each row `ρ` of `table` is joined on its
/// own with the other tables and the query folded over that join.
/// Duplicate rows of `table` therefore each get their own extension.
pub fn eval_bruteforce_grouped<S: Semiring>(
    db: &Database,
    dm: &DesignMatrix,
    table: usize,
    q: &SumProdQuery<S::Value>,
    s: &S,
) -> GroupedResult<S::Value> {
    let cap = db.join_cap.max(dm.len());
    let values = db
        .table(table)
        .rows()
        .iter()
        .map(|rho| {
            let t = db.table(table);
            let single = Table::new(t.name(), t.columns().to_vec(), vec![rho.clone()])
                .expect("row of a valid table");
            let mut sub = db.with_table(table, single).expect("same schema");
            sub.join_cap = cap;
            let sub_dm = sub
                .materialize()
                .expect("sub-join is no larger than the join");
            eval_bruteforce(&sub, &sub_dm, q, s)
        })
        .collect();
    GroupedResult { table, values }
}
