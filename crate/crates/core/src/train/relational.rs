//! Training through grouped SumProd queries only.

use std::sync::Arc;

use crate::error::Result;
use crate::relational::Database;
use crate::semiring::{Constraints, JoinPlan, RealSemiring, RowFn, SumProdQuery};
use crate::sketch::{splitmix, DomainIndex, SketchSemiring, SketchVector, TensorSketch};
use crate::train::counter::{NodeTally, PhaseCounts, QueryLog};
use crate::train::grower::{grow, NodeEvaluation, NodeEvaluator, NodeRecord};
use crate::train::split::{
    bin_of, choose_split, score_candidates, Histogram, RegionStats, SplitFeature, SquareStat,
};
use crate::train::{Mode, TrainConfig};
use crate::tree::{Ensemble, LeafPath};

/// Split feature with the bin of every row of its owning table.
#[derive(Debug, Clone)]
pub struct FeatureBins {
    pub feature: SplitFeature,
    pub thresholds: Vec<f64>,
    pub row_bin: Vec<usize>,
}

/// Join plans rooted at every table, split features and the domain index:
/// everything that stays fixed during training.
pub struct JoinContext<'a> {
    db: &'a Database,
    plans: Vec<JoinPlan>,
    features: Vec<SplitFeature>,
    bins: Vec<FeatureBins>,
    domain: Arc<DomainIndex>,
    label_col: usize,
}

impl<'a> JoinContext<'a> {
    /// Fails with a cyclicity error when the schema has no join tree.
    pub fn new(db: &'a Database) -> Result<Self> {
        let mut plans = Vec::with_capacity(db.num_tables());
        for t in 0..db.num_tables() {
            plans.push(JoinPlan::new(db, &db.join_tree(t)?));
        }
        let bins: Vec<FeatureBins> = db
            .split_features()
            .into_iter()
            .map(|(t, j)| {
                let thresholds = db.column_domain(t, j);
                let row_bin = db
                    .table(t)
                    .rows()
                    .iter()
                    .map(|r| bin_of(&thresholds, r[j]))
                    .collect();
                FeatureBins {
                    feature: SplitFeature {
                        table: t,
                        column: j,
                        name: db.table(t).columns()[j].clone(),
                    },
                    thresholds,
                    row_bin,
                }
            })
            .collect();
        let lt = db.label_table();
        Ok(JoinContext {
            db,
            plans,
            features: bins.iter().map(|b| b.feature.clone()).collect(),
            bins,
            domain: Arc::new(DomainIndex::new(db)),
            label_col: db.table(lt).column_index(db.label()).unwrap(),
        })
    }

    pub fn db(&self) -> &'a Database {
        self.db
    }

    pub fn features(&self) -> &[SplitFeature] {
        &self.features
    }

    pub fn bins(&self) -> &[FeatureBins] {
        &self.bins
    }

    pub fn domain(&self) -> &Arc<DomainIndex> {
        &self.domain
    }

    /// Real-valued query grouped by the rows of table `t`.
    pub fn grouped(&self, t: usize, q: &SumProdQuery<f64>) -> Result<Vec<f64>> {
        Ok(self.plans[t]
            .eval_grouped(self.db, q, &RealSemiring)?
            .values)
    }

    pub fn grouped_sketch(
        &self,
        t: usize,
        q: &SumProdQuery<SketchVector>,
        k: usize,
    ) -> Result<Vec<SketchVector>> {
        Ok(self.plans[t]
            .eval_grouped(self.db, q, &SketchSemiring::new(k))?
            .values)
    }

    fn count_query(&self, c: &Constraints) -> SumProdQuery<f64> {
        SumProdQuery::new().with_constraints(c)
    }

    fn label_query(&self, c: &Constraints) -> SumProdQuery<f64> {
        SumProdQuery::new()
            .with_constraints(c)
            .factor(self.db.label(), |y| y)
    }
}

/// Per row of a grouping table: count, sum and square sum of the target
/// (label or residual) over the row's join extension within a node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeStats {
    pub table: usize,
    pub count: Vec<f64>,
    pub sum: Vec<f64>,
    pub sq: Vec<f64>,
}

impl NodeStats {
    pub fn total(&self) -> RegionStats {
        RegionStats {
            count: self.count.iter().sum(),
            sum: self.sum.iter().sum(),
            sq: self.sq.iter().sum(),
        }
    }
}

/// Residual statistics, plus the label square sums they were derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualStats {
    pub residual: NodeStats,
    pub label_sq: Vec<f64>,
}

/// Count, label sum and label-square sum per row of table `t` within the
/// node `constraints`: three grouped queries.
pub fn node_statistics(
    ctx: &JoinContext,
    constraints: &Constraints,
    t: usize,
    tally: &mut PhaseCounts,
) -> Result<NodeStats> {
    let (count, sum) = count_and_sum(ctx, constraints, t, tally)?;
    let q = SumProdQuery::new()
        .with_constraints(constraints)
        .factor(ctx.db.label(), |y| y * y);
    let sq = ctx.grouped(t, &q)?;
    tally.stats += 1;
    Ok(NodeStats {
        table: t,
        count,
        sum,
        sq,
    })
}

fn count_and_sum(
    ctx: &JoinContext,
    constraints: &Constraints,
    t: usize,
    tally: &mut PhaseCounts,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let count = ctx.grouped(t, &ctx.count_query(constraints))?;
    let sum = ctx.grouped(t, &ctx.label_query(constraints))?;
    tally.stats += 2;
    Ok((count, sum))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafWeight {
    /// `Σ ŷ`
    Pred,
    /// `Σ ŷ²`
    PredSq,
    /// `Σ y·ŷ`
    LabelWeighted,
}

/// Per row of table `t`: sum over the node's join rows of the weighted
/// prediction of one prior tree, one query per leaf.
pub fn leaf_sum_queries(
    ctx: &JoinContext,
    constraints: &Constraints,
    leaves: &[LeafPath],
    t: usize,
    weight: LeafWeight,
    tally: &mut PhaseCounts,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; ctx.db.table(t).len()];
    for leaf in leaves {
        let c = constraints.conjoin(&leaf.constraints);
        let (vals, scale) = match weight {
            LeafWeight::Pred => (ctx.grouped(t, &ctx.count_query(&c))?, leaf.value),
            LeafWeight::PredSq => (
                ctx.grouped(t, &ctx.count_query(&c))?,
                leaf.value * leaf.value,
            ),
            LeafWeight::LabelWeighted => (ctx.grouped(t, &ctx.label_query(&c))?, leaf.value),
        };
        tally.leaf_sums += 1;
        for (o, v) in out.iter_mut().zip(vals) {
            *o += scale * v;
        }
    }
    Ok(out)
}

/// Per row of table `t`: `Σ ŷ_i ŷ_j` over the node's join rows, one count
/// query per leaf pair.
pub fn cross_pair_sums(
    ctx: &JoinContext,
    constraints: &Constraints,
    leaves_i: &[LeafPath],
    leaves_j: &[LeafPath],
    t: usize,
    tally: &mut PhaseCounts,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; ctx.db.table(t).len()];
    for a in leaves_i {
        let ca = constraints.conjoin(&a.constraints);
        for b in leaves_j {
            let c = ca.conjoin(&b.constraints);
            let vals = ctx.grouped(t, &ctx.count_query(&c))?;
            tally.pair_sums += 1;
            let d = a.value * b.value;
            for (o, v) in out.iter_mut().zip(vals) {
                *o += d * v;
            }
        }
    }
    Ok(out)
}

/// Residual count, sum and square sum per row of table `t`, assembled as
/// `Σr² = Σy² − 2 Σ_t Σ y·ŷ_t + Σ_t Σ ŷ_t² + Σ_{t≠t'} Σ ŷ_t ŷ_t'`.
pub fn residual_stats_exact(
    ctx: &JoinContext,
    constraints: &Constraints,
    prior: &[Vec<LeafPath>],
    t: usize,
    tally: &mut PhaseCounts,
) -> Result<ResidualStats> {
    let base = node_statistics(ctx, constraints, t, tally)?;
    let label_sq = base.sq.clone();
    let mut sum = base.sum.clone();
    let mut sq = base.sq;

    // count and label sum per leaf give Σŷ, Σŷ² and Σy·ŷ
    for leaves in prior {
        for leaf in leaves {
            let c = constraints.conjoin(&leaf.constraints);
            let n = ctx.grouped(t, &ctx.count_query(&c))?;
            let ls = ctx.grouped(t, &ctx.label_query(&c))?;
            tally.leaf_sums += 2;
            let d = leaf.value;
            for r in 0..n.len() {
                sum[r] -= d * n[r];
                sq[r] += d * d * n[r] - 2.0 * d * ls[r];
            }
        }
    }
    for (i, li) in prior.iter().enumerate() {
        for (j, lj) in prior.iter().enumerate() {
            if i != j {
                let cross = cross_pair_sums(ctx, constraints, li, lj, t, tally)?;
                for (s, c) in sq.iter_mut().zip(cross) {
                    *s += c;
                }
            }
        }
    }
    Ok(ResidualStats {
        residual: NodeStats {
            table: t,
            count: base.count,
            sum,
            sq,
        },
        label_sq,
    })
}

/// `Σ_x r_x²` per row of table `t`.
pub fn residual_sq_exact(
    ctx: &JoinContext,
    constraints: &Constraints,
    prior: &[Vec<LeafPath>],
    t: usize,
    tally: &mut PhaseCounts,
) -> Result<Vec<f64>> {
    Ok(residual_stats_exact(ctx, constraints, prior, t, tally)?
        .residual
        .sq)
}

fn sketch_query(
    ctx: &JoinContext,
    sketch: &TensorSketch,
    constraints: &Constraints,
    label_weighted: bool,
) -> SumProdQuery<SketchVector> {
    let mut q = SumProdQuery::new().with_constraints(constraints);
    for t in 0..ctx.db.num_tables() {
        let weight = (label_weighted && t == ctx.db.label_table()).then_some(ctx.label_col);
        let f: RowFn<SketchVector> = sketch.row_factor(t, weight);
        q = q.row_factor(ctx.db.table(t).name(), f);
    }
    q
}

/// Per row of table `t`: the sketch `Y' − Σ_t Ŷ'_t` of the residual vector
/// restricted to the node, all under one sketching operator.
pub fn sketch_residual_vectors(
    ctx: &JoinContext,
    sketch: &TensorSketch,
    constraints: &Constraints,
    prior: &[Vec<LeafPath>],
    t: usize,
    tally: &mut PhaseCounts,
) -> Result<Vec<SketchVector>> {
    let k = sketch.k();
    let mut out = ctx.grouped_sketch(t, &sketch_query(ctx, sketch, constraints, true), k)?;
    tally.sketches += 1;
    for leaves in prior {
        for leaf in leaves {
            let c = constraints.conjoin(&leaf.constraints);
            let p = ctx.grouped_sketch(t, &sketch_query(ctx, sketch, &c, false), k)?;
            tally.sketches += 1;
            for (o, v) in out.iter_mut().zip(&p) {
                o.axpy(-leaf.value, v);
            }
        }
    }
    Ok(out)
}

/// For each threshold of a feature: the left and right sketched square-sum
/// estimates obtained from prefix sums of the per-row sketches.
pub fn approx_residual_sq(
    thresholds: &[f64],
    row_bin: &[usize],
    sketches: &[SketchVector],
) -> Vec<(f64, f64, f64)> {
    let k = sketches.first().map_or(1, |s| s.len());
    let mut bins = vec![SketchVector::zeros(k); thresholds.len()];
    for (&b, s) in row_bin.iter().zip(sketches) {
        bins[b].add_assign(s);
    }
    let mut total = SketchVector::zeros(k);
    for b in &bins {
        total.add_assign(b);
    }
    let mut left = SketchVector::zeros(k);
    let mut out = Vec::with_capacity(thresholds.len());
    for (i, &alpha) in thresholds.iter().enumerate() {
        if i > 0 {
            left.add_assign(&bins[i - 1]);
        }
        out.push((
            alpha,
            left.norm_sq(),
            SketchVector::estimate_diff(&total, &left),
        ));
    }
    out
}

/// Sketch seed of node `node` of tree `tree`.
pub fn node_seed(seed: u64, tree: usize, node: usize) -> u64 {
    splitmix(seed ^ splitmix(((tree as u64) << 32) | node as u64))
}

/// Evaluates nodes of one tree against the prior trees of the ensemble.
pub struct RelationalEvaluator<'c, 'a> {
    ctx: &'c JoinContext<'a>,
    prior: &'c [Vec<LeafPath>],
    mode: Mode,
    k: usize,
    seed: u64,
    tree: usize,
    min_node: f64,
    log: Option<&'c mut QueryLog>,
}

impl<'c, 'a> RelationalEvaluator<'c, 'a> {
    pub fn new(
        ctx: &'c JoinContext<'a>,
        prior: &'c [Vec<LeafPath>],
        cfg: &TrainConfig,
        mode: Mode,
        tree: usize,
        log: Option<&'c mut QueryLog>,
    ) -> Self {
        RelationalEvaluator {
            ctx,
            prior,
            mode,
            k: cfg.sketch_width(ctx.db.num_tables()),
            seed: cfg.seed,
            tree,
            min_node: cfg.min_node as f64,
            log,
        }
    }

    fn exact(&self, constraints: &Constraints, tally: &mut NodeTally) -> Result<NodeEvaluation> {
        let mut candidates = Vec::new();
        let mut parent = RegionStats::default();
        let mut scale = 0.0;
        for t in 0..self.ctx.db.num_tables() {
            let rs = residual_stats_exact(
                self.ctx,
                constraints,
                self.prior,
                t,
                &mut tally.per_table[t],
            )?;
            let st = &rs.residual;
            if t == 0 {
                parent = st.total();
                scale = parent.sq.max(rs.label_sq.iter().sum());
            }
            for (fi, fb) in self.ctx.bins.iter().enumerate() {
                if fb.feature.table != t {
                    continue;
                }
                let mut h: Histogram<f64> = Histogram::new(fb.thresholds.clone());
                for r in 0..st.count.len() {
                    if st.count[r] > 0.0 {
                        h.add(fb.row_bin[r], st.count[r], st.sum[r], &st.sq[r]);
                    }
                }
                score_candidates(&h, fi, self.min_node, &mut candidates);
            }
        }
        Ok(NodeEvaluation {
            stats: parent,
            split: choose_split(&self.ctx.features, &candidates, parent, scale),
            candidates,
        })
    }

    fn sketched(
        &self,
        node: usize,
        constraints: &Constraints,
        tally: &mut NodeTally,
    ) -> Result<NodeEvaluation> {
        let sketch = TensorSketch::new(
            self.ctx.domain.clone(),
            self.k,
            node_seed(self.seed, self.tree, node),
        );
        let mut candidates = Vec::new();
        let mut parent = RegionStats::default();
        for t in 0..self.ctx.db.num_tables() {
            let phase = &mut tally.per_table[t];
            let (count, mut sum) = count_and_sum(self.ctx, constraints, t, phase)?;
            let pred = leaf_sums_all(self.ctx, constraints, self.prior, t, phase)?;
            for (s, p) in sum.iter_mut().zip(pred) {
                *s -= p;
            }
            let sketches =
                sketch_residual_vectors(self.ctx, &sketch, constraints, self.prior, t, phase)?;
            if t == 0 {
                let mut total = SketchVector::zeros(self.k);
                for s in &sketches {
                    total.add_assign(s);
                }
                parent = RegionStats {
                    count: count.iter().sum(),
                    sum: sum.iter().sum(),
                    sq: total.norm_sq(),
                };
            }
            for (fi, fb) in self.ctx.bins.iter().enumerate() {
                if fb.feature.table != t {
                    continue;
                }
                let mut h: Histogram<SketchVector> = Histogram::new(fb.thresholds.clone());
                for r in 0..count.len() {
                    if count[r] > 0.0 {
                        h.add(fb.row_bin[r], count[r], sum[r], &sketches[r]);
                    }
                }
                score_candidates(&h, fi, self.min_node, &mut candidates);
            }
        }
        Ok(NodeEvaluation {
            stats: parent,
            split: choose_split(&self.ctx.features, &candidates, parent, parent.sq),
            candidates,
        })
    }
}

/// `Σ ŷ` over all prior trees, one count query per leaf.
fn leaf_sums_all(
    ctx: &JoinContext,
    constraints: &Constraints,
    prior: &[Vec<LeafPath>],
    t: usize,
    tally: &mut PhaseCounts,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; ctx.db.table(t).len()];
    for leaves in prior {
        let p = leaf_sum_queries(ctx, constraints, leaves, t, LeafWeight::Pred, tally)?;
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    Ok(out)
}

impl NodeEvaluator for RelationalEvaluator<'_, '_> {
    fn evaluate(&mut self, node: usize, constraints: &Constraints) -> Result<NodeEvaluation> {
        let sketched = self.mode == Mode::Sketch;
        let mut tally = NodeTally::new(
            self.tree,
            node,
            sketched,
            self.prior.iter().map(|l| l.len()).collect(),
            self.ctx.db.num_tables(),
        );
        let ev = if sketched {
            self.sketched(node, constraints, &mut tally)?
        } else {
            self.exact(constraints, &mut tally)?
        };
        if let Some(log) = self.log.as_deref_mut() {
            log.nodes.push(tally);
        }
        Ok(ev)
    }
}

/// Result of a relational training run.
#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub ensemble: Ensemble,
    pub log: QueryLog,
    /// Node records, one list per tree.
    pub records: Vec<Vec<NodeRecord>>,
}

/// A single tree fitted to the labels.
pub fn train_tree(db: &Database, cfg: &TrainConfig) -> Result<TrainOutput> {
    let one = TrainConfig {
        num_trees: 1,
        ..cfg.clone()
    };
    train_boosted(db, &one)
}

/// `cfg.num_trees` trees, each fitted to the residuals of its predecessors.
/// The first tree is always trained exactly; later trees use the configured
/// mode for their residual square sums.
pub fn train_boosted(db: &Database, cfg: &TrainConfig) -> Result<TrainOutput> {
    cfg.validate()?;
    let ctx = JoinContext::new(db)?;
    let mut ensemble = Ensemble::new(db.label(), db.fingerprint());
    let mut log = QueryLog::default();
    let mut records = Vec::new();
    let mut prior: Vec<Vec<LeafPath>> = Vec::new();
    for t in 0..cfg.num_trees {
        let mode = if t == 0 { Mode::Exact } else { cfg.mode };
        let mut eval = RelationalEvaluator::new(
            &ctx,
            &prior,
            cfg,
            mode,
            t,
            cfg.count_queries.then_some(&mut log),
        );
        let (mut tree, recs) = grow(&mut eval, cfg)?;
        if cfg.shrinkage != 1.0 {
            tree.scale_leaves(cfg.shrinkage);
        }
        prior.push(tree.leaf_paths());
        ensemble.trees.push(tree);
        records.push(recs);
    }
    Ok(TrainOutput {
        ensemble,
        log,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relational::Table;
    use crate::semiring::Interval;
    use crate::tree::RegressionTree;

    fn three_rows() -> Database {
        let t =
            Table::from_rows("T", &["f", "y"], &[&[1.0, 1.0], &[2.0, 2.0], &[3.0, 10.0]]).unwrap();
        Database::new(vec![t], "y").unwrap()
    }

    fn two_tables() -> Database {
        let a = Table::from_rows("A", &["k", "y"], &[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        let b =
            Table::from_rows("B", &["k", "g"], &[&[1.0, 0.0], &[1.0, 1.0], &[2.0, 0.0]]).unwrap();
        Database::new(vec![a, b], "y").unwrap()
    }

    #[test]
    fn root_stats_single_table() {
        let db = three_rows();
        let ctx = JoinContext::new(&db).unwrap();
        let mut tally = PhaseCounts::default();
        let s = node_statistics(&ctx, &Constraints::new(), 0, &mut tally).unwrap();
        assert_eq!(s.count, vec![1.0; 3]);
        assert_eq!(s.sum, vec![1.0, 2.0, 10.0]);
        assert_eq!(s.sq, vec![1.0, 4.0, 100.0]);
        assert_eq!(tally.stats, 3);
    }

    #[test]
    fn join_counts_and_empty_node() {
        let db = two_tables();
        let ctx = JoinContext::new(&db).unwrap();
        let mut tally = PhaseCounts::default();
        let s = node_statistics(&ctx, &Constraints::new(), 0, &mut tally).unwrap();
        assert_eq!(s.count, vec![2.0, 1.0]);
        let none = Constraints::new().with("g", Interval::at_least(5.0));
        let s = node_statistics(&ctx, &none, 0, &mut tally).unwrap();
        assert_eq!(s.total(), RegionStats::default());
    }

    #[test]
    fn single_leaf_prior() {
        let db = two_tables();
        let ctx = JoinContext::new(&db).unwrap();
        let leaves = RegressionTree::leaf(3.0).leaf_paths();
        let mut tally = PhaseCounts::default();
        let c = Constraints::new();
        let p = leaf_sum_queries(&ctx, &c, &leaves, 0, LeafWeight::Pred, &mut tally).unwrap();
        assert_eq!(p, vec![6.0, 3.0]);
        let p = leaf_sum_queries(&ctx, &c, &leaves, 0, LeafWeight::PredSq, &mut tally).unwrap();
        assert_eq!(p, vec![18.0, 9.0]);
        let other = RegressionTree::leaf(-2.0).leaf_paths();
        let x = cross_pair_sums(&ctx, &c, &leaves, &other, 0, &mut tally).unwrap();
        assert_eq!(x, vec![-12.0, -6.0]);
    }

    #[test]
    fn residual_square_by_hand() {
        // join labels {2, 2, 4}; prior leaf predicting 1 gives residuals {1, 1, 3}
        let db = two_tables();
        let ctx = JoinContext::new(&db).unwrap();
        let prior = vec![RegressionTree::leaf(1.0).leaf_paths()];
        let mut tally = PhaseCounts::default();
        let sq = residual_sq_exact(&ctx, &Constraints::new(), &prior, 0, &mut tally).unwrap();
        assert_eq!(sq, vec![2.0, 9.0]);
        let only_b = Constraints::new().with("g", Interval::below(1.0));
        let sq = residual_sq_exact(&ctx, &only_b, &prior, 0, &mut tally).unwrap();
        assert_eq!(sq.iter().sum::<f64>(), 10.0);
        let none = residual_sq_exact(&ctx, &Constraints::new(), &[], 1, &mut tally).unwrap();
        assert_eq!(none, vec![4.0, 4.0, 16.0]);
    }

    #[test]
    fn stump_on_three_rows() {
        let db = three_rows();
        let cfg = TrainConfig {
            max_leaves: 2,
            count_queries: true,
            ..TrainConfig::default()
        };
        let out = train_tree(&db, &cfg).unwrap();
        let tree = &out.ensemble.trees[0];
        let cols = vec!["f".to_string()];
        assert_eq!(tree.predict(&cols, &[2.0]).unwrap(), 1.5);
        assert_eq!(tree.predict(&cols, &[3.0]).unwrap(), 10.0);
        assert_eq!(tree.num_leaves(), 2);
        assert_eq!(out.log.nodes[0].per_table[0].total(), 3);
    }

    #[test]
    fn single_leaf_is_mean() {
        let db = three_rows();
        let cfg = TrainConfig {
            max_leaves: 1,
            ..TrainConfig::default()
        };
        let out = train_tree(&db, &cfg).unwrap();
        assert_eq!(out.ensemble.trees[0].nodes().len(), 1);
        assert_eq!(out.ensemble.predict(&[], &[]).unwrap(), 13.0 / 3.0);
    }

    #[test]
    fn sketch_prefix_telescopes() {
        let s = vec![
            SketchVector::from_vec(vec![1.0, 0.0]),
            SketchVector::from_vec(vec![0.0, 2.0]),
            SketchVector::from_vec(vec![-1.0, 1.0]),
        ];
        let out = approx_residual_sq(&[1.0, 2.0, 3.0], &[0, 1, 2], &s);
        assert_eq!(out[0], (1.0, 0.0, 9.0));
        assert_eq!(out[1], (2.0, 1.0, 10.0));
        assert_eq!(out[2], (3.0, 5.0, 2.0));
    }
}
