//! Tables, join schemas, acyclicity and join trees.

mod database;
mod design;
mod hypergraph;
mod join_tree;
pub(crate) mod table;

pub use database::{Database, JoinSpec, TableSource, DEFAULT_JOIN_CAP};
pub use design::{materialize_join, DesignMatrix};
pub use hypergraph::{build_hypergraph, check_acyclic, Acyclicity, GyoStep, JoinHypergraph};
pub use join_tree::{build_join_tree, build_join_tree_at, Bag, JoinTree};
pub use table::{load_table, Table};
