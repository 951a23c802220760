//! Reference trainer over the materialized design matrix.
//!
//! Residuals are computed row by row and binned into the same histograms
//! the relational trainer uses, so both paths share thresholds, objective
//! and tie-breaking. Any disagreement points at the query side.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::relational::table::tuple_key;
use crate::relational::{Database, DesignMatrix};
use crate::semiring::Constraints;
use crate::sketch::{SketchVector, TensorSketch};
use crate::train::split::{
    bin_of, choose_split, score_candidates, Histogram, RegionStats, SplitFeature,
};
use crate::train::{grow, NodeEvaluation, NodeEvaluator, NodeRecord, TrainConfig};
use crate::tree::{Ensemble, RegressionTree};

#[derive(Debug, Clone, Default)]
pub struct OracleReport {
    /// Node records, one list per tree, with every scored candidate.
    pub records: Vec<Vec<NodeRecord>>,
    pub elapsed: Duration,
}

/// Design matrix plus the lookups the oracle needs.
pub struct Oracle<'a> {
    db: &'a Database,
    dm: &'a DesignMatrix,
    features: Vec<SplitFeature>,
    feature_cols: Vec<usize>,
    thresholds: Vec<Vec<f64>>,
    label_col: usize,
    col_of: HashMap<String, usize>,
}

impl<'a> Oracle<'a> {
    pub fn new(db: &'a Database, dm: &'a DesignMatrix) -> Result<Self> {
        let col_of: HashMap<String, usize> = dm
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        let missing = |c: &str| Error::Schema(format!("design matrix lacks column `{c}`"));
        let mut features = Vec::new();
        let mut feature_cols = Vec::new();
        let mut thresholds = Vec::new();
        for (t, j) in db.split_features() {
            let name = db.table(t).columns()[j].clone();
            feature_cols.push(*col_of.get(&name).ok_or_else(|| missing(&name))?);
            thresholds.push(db.column_domain(t, j));
            features.push(SplitFeature {
                table: t,
                column: j,
                name,
            });
        }
        let label_col = *col_of.get(db.label()).ok_or_else(|| missing(db.label()))?;
        Ok(Oracle {
            db,
            dm,
            features,
            feature_cols,
            thresholds,
            label_col,
            col_of,
        })
    }

    pub fn dm(&self) -> &DesignMatrix {
        self.dm
    }

    pub fn labels(&self) -> Vec<f64> {
        self.dm.rows.iter().map(|r| r[self.label_col]).collect()
    }

    /// `y − Σ_t ŷ_t` for every row.
    pub fn residuals(&self, trees: &[RegressionTree]) -> Result<Vec<f64>> {
        let bound = trees
            .iter()
            .map(|t| t.bind(&self.dm.columns))
            .collect::<Result<Vec<_>>>()?;
        Ok(self
            .dm
            .rows
            .iter()
            .map(|r| {
                let mut y = r[self.label_col];
                for b in &bound {
                    y -= b.predict(r);
                }
                y
            })
            .collect())
    }

    pub fn region(&self, constraints: &Constraints) -> Vec<usize> {
        (0..self.dm.len())
            .filter(|&i| {
                let row = &self.dm.rows[i];
                constraints.admits(|f| self.col_of.get(f).map(|&c| row[c]))
            })
            .collect()
    }

    pub fn region_stats(&self, residuals: &[f64], constraints: &Constraints) -> RegionStats {
        let mut s = RegionStats::default();
        for i in self.region(constraints) {
            s.count += 1.0;
            s.sum += residuals[i];
            s.sq += residuals[i] * residuals[i];
        }
        s
    }

    /// Exact statistics and best split of a node.
    pub fn evaluate(
        &self,
        residuals: &[f64],
        constraints: &Constraints,
        min_node: usize,
    ) -> NodeEvaluation {
        let rows = self.region(constraints);
        let mut parent = RegionStats::default();
        let mut label_sq = 0.0;
        for &i in &rows {
            let r = residuals[i];
            parent.count += 1.0;
            parent.sum += r;
            parent.sq += r * r;
            let y = self.dm.rows[i][self.label_col];
            label_sq += y * y;
        }
        let mut candidates = Vec::new();
        for (fi, (&col, th)) in self.feature_cols.iter().zip(&self.thresholds).enumerate() {
            let mut h: Histogram<f64> = Histogram::new(th.clone());
            for &i in &rows {
                let r = residuals[i];
                h.add(bin_of(th, self.dm.rows[i][col]), 1.0, r, &(r * r));
            }
            score_candidates(&h, fi, min_node as f64, &mut candidates);
        }
        let scale = parent.sq.max(label_sq);
        NodeEvaluation {
            stats: parent,
            split: choose_split(&self.features, &candidates, parent, scale),
            candidates,
        }
    }

    /// True SSE of splitting the node at `feature >= threshold`.
    pub fn split_sse(
        &self,
        residuals: &[f64],
        constraints: &Constraints,
        feature: &str,
        threshold: f64,
    ) -> Result<f64> {
        let col = *self
            .col_of
            .get(feature)
            .ok_or_else(|| Error::Schema(format!("unknown feature `{feature}`")))?;
        let mut left = RegionStats::default();
        let mut right = RegionStats::default();
        for i in self.region(constraints) {
            let r = residuals[i];
            let side = if self.dm.rows[i][col] >= threshold {
                &mut right
            } else {
                &mut left
            };
            side.count += 1.0;
            side.sum += r;
            side.sq += r * r;
        }
        Ok(left.sse() + right.sse())
    }

    /// Sketch of the residual vector restricted to the node, computed
    /// coordinate by coordinate, grouped by the rows of table `t`.
    pub fn direct_sketch(
        &self,
        sketch: &TensorSketch,
        residuals: &[f64],
        constraints: &Constraints,
        t: usize,
    ) -> Result<Vec<SketchVector>> {
        let projections: Vec<Vec<usize>> = self
            .db
            .tables()
            .iter()
            .map(|tb| self.dm.projection(tb))
            .collect();
        let table = self.db.table(t);
        let mut by_key: HashMap<Vec<u64>, SketchVector> = HashMap::new();
        for i in self.region(constraints) {
            let row = &self.dm.rows[i];
            let mut idx = Vec::with_capacity(projections.len());
            for (tt, proj) in projections.iter().enumerate() {
                let p: Vec<f64> = proj.iter().map(|&c| row[c]).collect();
                idx.push(sketch.domain().index_of_row(tt, &p)?);
            }
            let (bucket, sign) = sketch.coordinate(&idx);
            let key = tuple_key(projections[t].iter().map(|&c| row[c]));
            let v = by_key
                .entry(key)
                .or_insert_with(|| SketchVector::zeros(sketch.k()));
            v.coeffs_mut()[bucket] += sign * residuals[i];
        }
        Ok(table
            .rows()
            .iter()
            .map(|r| {
                by_key
                    .get(&tuple_key(r.iter().copied()))
                    .cloned()
                    .unwrap_or_else(|| SketchVector::zeros(sketch.k()))
            })
            .collect())
    }
}

struct OracleEvaluator<'o, 'a> {
    oracle: &'o Oracle<'a>,
    residuals: Vec<f64>,
    min_node: usize,
}

impl NodeEvaluator for OracleEvaluator<'_, '_> {
    fn evaluate(&mut self, _node: usize, constraints: &Constraints) -> Result<NodeEvaluation> {
        Ok(self
            .oracle
            .evaluate(&self.residuals, constraints, self.min_node))
    }
}

/// Greedy tree on the labels of the materialized join.
pub fn train_tree_oracle(
    db: &Database,
    dm: &DesignMatrix,
    cfg: &TrainConfig,
) -> Result<(RegressionTree, OracleReport)> {
    let one = TrainConfig {
        num_trees: 1,
        ..cfg.clone()
    };
    let (mut e, report) = train_boosted_oracle(db, dm, &one)?;
    Ok((e.trees.remove(0), report))
}

/// `cfg.num_trees` greedy trees, each fitted to the residuals of the ones
/// before it.
pub fn train_boosted_oracle(
    db: &Database,
    dm: &DesignMatrix,
    cfg: &TrainConfig,
) -> Result<(Ensemble, OracleReport)> {
    cfg.validate()?;
    let start = Instant::now();
    let oracle = Oracle::new(db, dm)?;
    let mut ensemble = Ensemble::new(db.label(), db.fingerprint());
    let mut report = OracleReport::default();
    for _ in 0..cfg.num_trees {
        let mut eval = OracleEvaluator {
            oracle: &oracle,
            residuals: oracle.residuals(&ensemble.trees)?,
            min_node: cfg.min_node,
        };
        let (mut tree, recs) = grow(&mut eval, cfg)?;
        if cfg.shrinkage != 1.0 {
            tree.scale_leaves(cfg.shrinkage);
        }
        ensemble.trees.push(tree);
        report.records.push(recs);
    }
    report.elapsed = start.elapsed();
    Ok((ensemble, report))
}

/// `Σ (y − ŷ)²` over join rows satisfying `constraints`.
pub fn ssr_oracle(
    dm: &DesignMatrix,
    ensemble: &Ensemble,
    constraints: &Constraints,
) -> Result<f64> {
    let label = dm
        .column_index(&ensemble.label)
        .ok_or_else(|| Error::Schema(format!("design matrix lacks label `{}`", ensemble.label)))?;
    let bound = ensemble.bind(&dm.columns)?;
    let mut total = 0.0;
    for row in &dm.rows {
        if constraints.admits(|f| dm.column_index(f).map(|i| row[i])) {
            let r = row[label] - bound.predict(row);
            total += r * r;
        }
    }
    Ok(total)
}
