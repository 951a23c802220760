//! Gradient-boosted regression trees trained directly over acyclic joins.
//!
//! Every statistic the trainer needs is a SumProd query evaluated with the
//! inside-out algorithm on a join tree, so the design matrix is never
//! built. Sums of squared residuals for later trees are either assembled
//! exactly from leaf and leaf-pair queries or estimated with a tensor
//! sketch. The [`oracle`] module trains the same models on the
//! materialized join for differential testing.

pub mod error;
pub mod oracle;
pub mod relational;
pub mod semiring;
pub mod sketch;
pub mod synth;
pub mod train;
pub mod tree;

pub use error::{Error, Result};
