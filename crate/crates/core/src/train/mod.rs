//! Tree and ensemble training over a [`Database`](crate::relational::Database).

mod config;
pub mod counter;
mod grower;
mod relational;
pub mod split;

pub use config::{Mode, TrainConfig};
pub use counter::{expected_exact_node, expected_sketch_node, NodeTally, PhaseCounts, QueryLog};
pub use grower::{grow, NodeEvaluation, NodeEvaluator, NodeRecord};
pub use relational::{
    approx_residual_sq, cross_pair_sums, leaf_sum_queries, node_seed, node_statistics,
    residual_sq_exact, residual_stats_exact, sketch_residual_vectors, train_boosted, train_tree,
    FeatureBins, JoinContext, LeafWeight, NodeStats, RelationalEvaluator, ResidualStats,
    TrainOutput,
};
pub use split::{RegionStats, SplitChoice, SplitFeature};
