//! Seeded random acyclic instances for differential testing and benches.
//!
//! Tables are attached one at a time to a random earlier table and share
//! one or two of its columns, so the attachment tree is a join tree.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::relational::table::tuple_key;
use crate::relational::{Database, Table};
use crate::semiring::{CountingSemiring, JoinPlan, SumProdQuery};

#[derive(Debug, Clone)]
pub struct SynthParams {
    pub min_tables: usize,
    pub max_tables: usize,
    /// Distinct columns, label excluded.
    pub max_features: usize,
    pub max_rows: usize,
    /// Columns draw values from `0..d` with `d` in `2..=max_domain`.
    pub max_domain: usize,
    /// Labels are integers in `0..label_range`, or uniform reals when
    /// `real_labels` is set.
    pub label_range: usize,
    pub real_labels: bool,
    /// Remove duplicate rows from every table.
    pub distinct_rows: bool,
    pub min_join: u64,
    pub max_join: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            min_tables: 2,
            max_tables: 4,
            max_features: 6,
            max_rows: 50,
            max_domain: 4,
            label_range: 10,
            real_labels: false,
            distinct_rows: false,
            min_join: 1,
            max_join: 10_000,
        }
    }
}

/// Size of the natural join, counted with the inside-out evaluator.
pub fn join_size(db: &Database) -> u64 {
    let tree = db.join_tree(0).expect("synthetic schemas are acyclic");
    JoinPlan::new(db, &tree)
        .eval(db, &SumProdQuery::new(), &CountingSemiring)
        .expect("count query is valid")
}

fn schema<R: Rng>(rng: &mut R, p: &SynthParams) -> (Vec<Vec<String>>, usize) {
    let tables = rng.gen_range(p.min_tables..=p.max_tables);
    let mut next = 0;
    let fresh = |next: &mut usize| {
        *next += 1;
        format!("c{}", *next - 1)
    };
    let mut cols: Vec<Vec<String>> = Vec::with_capacity(tables);
    let first = rng.gen_range(1..=2.min(p.max_features));
    cols.push((0..first).map(|_| fresh(&mut next)).collect());
    for i in 1..tables {
        let parent = rng.gen_range(0..i);
        let mut pool = cols[parent].clone();
        pool.shuffle(rng);
        let shared = rng.gen_range(1..=2.min(pool.len()));
        let mut mine: Vec<String> = pool.into_iter().take(shared).collect();
        let private = rng.gen_range(0..=1);
        for _ in 0..private {
            if next < p.max_features {
                mine.push(fresh(&mut next));
            }
        }
        // keep columns of every table in a stable, readable order
        mine.sort_by_key(|c| c[1..].parse::<usize>().unwrap());
        cols.push(mine);
    }
    let label_table = rng.gen_range(0..tables);
    cols[label_table].push("y".to_string());
    (cols, label_table)
}

fn fill<R: Rng>(rng: &mut R, p: &SynthParams, cols: &[Vec<String>]) -> Database {
    let mut domains = std::collections::HashMap::new();
    let tables = cols
        .iter()
        .enumerate()
        .map(|(i, names)| {
            let n = rng.gen_range(1..=p.max_rows);
            let mut rows: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    names
                        .iter()
                        .map(|c| {
                            if c == "y" {
                                if p.real_labels {
                                    rng.gen_range(-5.0..5.0)
                                } else {
                                    rng.gen_range(0..p.label_range) as f64
                                }
                            } else {
                                let d = *domains
                                    .entry(c.clone())
                                    .or_insert_with(|| rng.gen_range(2..=p.max_domain.max(2)));
                                rng.gen_range(0..d) as f64
                            }
                        })
                        .collect()
                })
                .collect();
            if p.distinct_rows {
                let mut seen = std::collections::HashSet::new();
                rows.retain(|r| seen.insert(tuple_key(r.iter().copied())));
            }
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let rows: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
            Table::from_rows(&format!("T{i}"), &refs, &rows).expect("valid synthetic table")
        })
        .collect();
    Database::new(tables, "y").expect("valid synthetic database")
}

/// Random acyclic instance whose join size lies in
/// `[min_join, max_join]`.
pub fn random_instance<R: Rng>(rng: &mut R, p: &SynthParams) -> Database {
    loop {
        let (cols, _) = schema(rng, p);
        for _ in 0..20 {
            let db = fill(rng, p, &cols);
            let n = join_size(&db);
            if n >= p.min_join && n <= p.max_join {
                return db;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn instances_are_acyclic_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = SynthParams::default();
        for _ in 0..50 {
            let db = random_instance(&mut rng, &p);
            assert!((2..=4).contains(&db.num_tables()));
            assert!(db.features().len() <= p.max_features + 1);
            let n = join_size(&db);
            assert!((1..=10_000).contains(&n));
            let dm = db.materialize().unwrap();
            assert_eq!(dm.len() as u64, n);
            for t in 0..db.num_tables() {
                assert!(db
                    .join_tree(t)
                    .unwrap()
                    .check_running_intersection()
                    .is_ok());
            }
        }
    }

    #[test]
    fn distinct_rows_option() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = SynthParams {
            distinct_rows: true,
            ..SynthParams::default()
        };
        for _ in 0..20 {
            let db = random_instance(&mut rng, &p);
            for t in db.tables() {
                let mut keys: Vec<_> = t
                    .rows()
                    .iter()
                    .map(|r| tuple_key(r.iter().copied()))
                    .collect();
                let n = keys.len();
                keys.sort();
                keys.dedup();
                assert_eq!(keys.len(), n);
            }
        }
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let p = SynthParams::default();
        let a = random_instance(&mut ChaCha8Rng::seed_from_u64(9), &p);
        let b = random_instance(&mut ChaCha8Rng::seed_from_u64(9), &p);
        assert_eq!(a.tables(), b.tables());
    }
}
