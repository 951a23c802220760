use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sketch::default_sketch_width;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sketch,
}

/// Training parameters, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub max_leaves: usize,
    #[serde(default = "default_depth")]
    pub max_depth: usize,
    #[serde(default = "default_min_node")]
    pub min_node: usize,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Sketch width; derived from `epsilon` and `delta` when absent.
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub count_queries: bool,
    #[serde(default = "default_trees")]
    pub num_trees: usize,
    /// Multiplier applied to every leaf of a finished tree.
    #[serde(default = "default_shrinkage")]
    pub shrinkage: f64,
}

fn default_depth() -> usize {
    32
}
fn default_min_node() -> usize {
    1
}
fn default_mode() -> Mode {
    Mode::Exact
}
fn default_epsilon() -> f64 {
    0.5
}
fn default_delta() -> f64 {
    0.1
}
fn default_trees() -> usize {
    1
}
fn default_shrinkage() -> f64 {
    1.0
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            max_leaves: 2,
            max_depth: default_depth(),
            min_node: default_min_node(),
            mode: default_mode(),
            epsilon: default_epsilon(),
            delta: default_delta(),
            k: None,
            seed: 0,
            count_queries: false,
            num_trees: default_trees(),
            shrinkage: default_shrinkage(),
        }
    }
}

impl TrainConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: TrainConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.max_leaves < 1 {
            return bad("max_leaves must be at least 1");
        }
        if self.min_node < 1 {
            return bad("min_node must be at least 1");
        }
        if self.num_trees < 1 {
            return bad("num_trees must be at least 1");
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon must lie in (0, 1)");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must lie in (0, 1)");
        }
        if self.k == Some(0) {
            return bad("k must be at least 1");
        }
        if !self.shrinkage.is_finite() {
            return bad("shrinkage must be finite");
        }
        Ok(())
    }

    /// Sketch width for a join of `tables` tables.
    pub fn sketch_width(&self, tables: usize) -> usize {
        self.k
            .unwrap_or_else(|| default_sketch_width(tables, self.epsilon, self.delta))
    }
}
