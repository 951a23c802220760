//! Regression trees, boosted ensembles and the versioned model document.
//!
//! A split sends rows with `feature >= threshold` right and everything
//! else left.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semiring::{Constraints, Interval};

pub const MODEL_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct SplitCriterion {
    pub feature: String,
    pub threshold: f64,
    /// Table owning `feature`.
    pub table: usize,
}

impl SplitCriterion {
    pub fn goes_right(&self, value: f64) -> bool {
        value >= self.threshold
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Split {
        criterion: SplitCriterion,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

/// Binary tree stored as a node array; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeafPath {
    pub node: usize,
    pub value: f64,
    pub constraints: Constraints,
}

impl RegressionTree {
    pub fn leaf(value: f64) -> Self {
        RegressionTree {
            nodes: vec![Node::Leaf { value }],
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Turn leaf `node` into a split with two fresh leaves; returns their
    /// indices (left, right).
    pub fn split_leaf(
        &mut self,
        node: usize,
        criterion: SplitCriterion,
        left_value: f64,
        right_value: f64,
    ) -> (usize, usize) {
        assert!(
            matches!(self.nodes[node], Node::Leaf { .. }),
            "node {node} is not a leaf"
        );
        let left = self.nodes.len();
        let right = left + 1;
        self.nodes.push(Node::Leaf { value: left_value });
        self.nodes.push(Node::Leaf { value: right_value });
        self.nodes[node] = Node::Split {
            criterion,
            left,
            right,
        };
        (left, right)
    }

    pub fn set_leaf_value(&mut self, node: usize, value: f64) {
        match &mut self.nodes[node] {
            Node::Leaf { value: v } => *v = value,
            Node::Split { .. } => panic!("node {node} is not a leaf"),
        }
    }

    pub fn scale_leaves(&mut self, factor: f64) {
        for n in &mut self.nodes {
            if let Node::Leaf { value } = n {
                *value *= factor;
            }
        }
    }

    pub fn num_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn go(t: &RegressionTree, v: usize) -> usize {
            match &t.nodes[v] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(t, *left).max(go(t, *right)),
            }
        }
        go(self, 0)
    }

    /// Walk from the root; `value_of` resolves feature names.
    pub fn predict_with(&self, mut value_of: impl FnMut(&str) -> Option<f64>) -> Result<f64> {
        let mut v = 0;
        loop {
            match &self.nodes[v] {
                Node::Leaf { value } => return Ok(*value),
                Node::Split {
                    criterion,
                    left,
                    right,
                } => {
                    let x = value_of(&criterion.feature).ok_or_else(|| {
                        Error::Schema(format!("row has no feature `{}`", criterion.feature))
                    })?;
                    v = if criterion.goes_right(x) {
                        *right
                    } else {
                        *left
                    };
                }
            }
        }
    }

    pub fn predict(&self, columns: &[String], row: &[f64]) -> Result<f64> {
        self.predict_with(|f| columns.iter().position(|c| c == f).map(|i| row[i]))
    }

    /// Resolve feature names against a column layout once.
    pub fn bind(&self, columns: &[String]) -> Result<BoundTree> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| match n {
                Node::Leaf { value } => Ok(BoundNode::Leaf(*value)),
                Node::Split {
                    criterion,
                    left,
                    right,
                } => {
                    let col = columns
                        .iter()
                        .position(|c| *c == criterion.feature)
                        .ok_or_else(|| {
                            Error::Schema(format!("row has no feature `{}`", criterion.feature))
                        })?;
                    Ok(BoundNode::Split {
                        col,
                        threshold: criterion.threshold,
                        left: *left,
                        right: *right,
                    })
                }
            })
            .collect::<Result<_>>()?;
        Ok(BoundTree { nodes })
    }

    /// Compiled constraint set of every node (root-to-node conjunction).
    pub fn node_constraints(&self) -> Vec<Constraints> {
        let mut out = vec![Constraints::new(); self.nodes.len()];
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            if let Node::Split {
                criterion,
                left,
                right,
            } = &self.nodes[v]
            {
                out[*left] = out[v]
                    .clone()
                    .with(&criterion.feature, Interval::below(criterion.threshold));
                out[*right] = out[v]
                    .clone()
                    .with(&criterion.feature, Interval::at_least(criterion.threshold));
                stack.push(*left);
                stack.push(*right);
            }
        }
        out
    }

    /// Raw criteria on the path to `node`: (criterion, went right).
    pub fn raw_path(&self, node: usize) -> Vec<(SplitCriterion, bool)> {
        let mut parent = vec![None; self.nodes.len()];
        for (v, n) in self.nodes.iter().enumerate() {
            if let Node::Split { left, right, .. } = n {
                parent[*left] = Some((v, false));
                parent[*right] = Some((v, true));
            }
        }
        let mut path = Vec::new();
        let mut cur = node;
        while let Some((p, right)) = parent[cur] {
            if let Node::Split { criterion, .. } = &self.nodes[p] {
                path.push((criterion.clone(), right));
            }
            cur = p;
        }
        path.reverse();
        path
    }

    pub fn leaf_paths(&self) -> Vec<LeafPath> {
        let constraints = self.node_constraints();
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(v, n)| match n {
                Node::Leaf { value } => Some(LeafPath {
                    node: v,
                    value: *value,
                    constraints: constraints[v].clone(),
                }),
                Node::Split { .. } => None,
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        if n == 0 {
            return Err(Error::Model("tree has no nodes".into()));
        }
        let mut referenced = vec![false; n];
        for (v, node) in self.nodes.iter().enumerate() {
            if let Node::Split {
                left,
                right,
                criterion,
            } = node
            {
                for &c in [left, right] {
                    if c <= v || c >= n || referenced[c] {
                        return Err(Error::Model(format!("node {v} has invalid child {c}")));
                    }
                    referenced[c] = true;
                }
                if !criterion.threshold.is_finite() {
                    return Err(Error::Model(format!("node {v} has a non-finite threshold")));
                }
            }
        }
        if referenced.iter().skip(1).any(|r| !r) {
            return Err(Error::Model("tree has unreachable nodes".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum BoundNode {
    Split {
        col: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf(f64),
}

#[derive(Debug, Clone)]
pub struct BoundTree {
    nodes: Vec<BoundNode>,
}

impl BoundTree {
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut v = 0;
        loop {
            match &self.nodes[v] {
                BoundNode::Leaf(value) => return *value,
                BoundNode::Split {
                    col,
                    threshold,
                    left,
                    right,
                } => {
                    v = if row[*col] >= *threshold {
                        *right
                    } else {
                        *left
                    }
                }
            }
        }
    }
}

/// Additive model: the prediction is the sum of all tree predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub trees: Vec<RegressionTree>,
    pub label: String,
    /// Column names of the schema the model was trained on.
    pub features: Vec<String>,
}

impl Ensemble {
    pub fn new(label: &str, features: Vec<String>) -> Self {
        Ensemble {
            trees: Vec::new(),
            label: label.to_string(),
            features,
        }
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn predict(&self, columns: &[String], row: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for t in &self.trees {
            total += t.predict(columns, row)?;
        }
        Ok(total)
    }

    pub fn residual(&self, columns: &[String], row: &[f64], label: f64) -> Result<f64> {
        Ok(label - self.predict(columns, row)?)
    }

    pub fn bind(&self, columns: &[String]) -> Result<BoundEnsemble> {
        Ok(BoundEnsemble {
            trees: self
                .trees
                .iter()
                .map(|t| t.bind(columns))
                .collect::<Result<_>>()?,
        })
    }

    pub fn to_json(&self) -> String {
        let doc = ModelDoc {
            version: MODEL_VERSION,
            label: self.label.clone(),
            features: self.features.clone(),
            trees: self
                .trees
                .iter()
                .map(|t| TreeDoc {
                    nodes: t
                        .nodes
                        .iter()
                        .map(|n| match n {
                            Node::Leaf { value } => NodeDoc::Leaf { leaf: *value },
                            Node::Split {
                                criterion,
                                left,
                                right,
                            } => NodeDoc::Split {
                                feature: criterion.feature.clone(),
                                threshold: criterion.threshold,
                                left: *left,
                                right: *right,
                                table: criterion.table,
                            },
                        })
                        .collect(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        match value.get("version").and_then(|v| v.as_u64()) {
            Some(MODEL_VERSION) => {}
            Some(other) => return Err(Error::Version(other)),
            None => return Err(Error::Model("missing version tag".into())),
        }
        let doc: ModelDoc =
            serde_json::from_value(value).map_err(|e| Error::Model(e.to_string()))?;
        let trees = doc
            .trees
            .into_iter()
            .map(|t| {
                let tree = RegressionTree {
                    nodes: t
                        .nodes
                        .into_iter()
                        .map(|n| match n {
                            NodeDoc::Leaf { leaf } => Node::Leaf { value: leaf },
                            NodeDoc::Split {
                                feature,
                                threshold,
                                left,
                                right,
                                table,
                            } => Node::Split {
                                criterion: SplitCriterion {
                                    feature,
                                    threshold,
                                    table,
                                },
                                left,
                                right,
                            },
                        })
                        .collect(),
                };
                tree.validate()?;
                Ok(tree)
            })
            .collect::<Result<_>>()?;
        Ok(Ensemble {
            trees,
            label: doc.label,
            features: doc.features,
        })
    }
}

/// `|a − b| ≤ rtol · max(|a|, |b|, 1)`
pub fn values_close(a: f64, b: f64, rtol: f64) -> bool {
    (a - b).abs() <= rtol * a.abs().max(b.abs()).max(1.0)
}

/// Structural comparison: identical node layout, split features and
/// bit-equal thresholds; leaf values within `rtol` (see [`values_close`]).
/// Returns the largest leaf deviation, or a description of the first
/// difference.
pub fn compare_ensembles(
    a: &Ensemble,
    b: &Ensemble,
    rtol: f64,
) -> std::result::Result<f64, String> {
    if a.trees.len() != b.trees.len() {
        return Err(format!("{} trees vs {}", a.trees.len(), b.trees.len()));
    }
    let mut worst: f64 = 0.0;
    for (i, (ta, tb)) in a.trees.iter().zip(&b.trees).enumerate() {
        if ta.nodes.len() != tb.nodes.len() {
            return Err(format!(
                "tree {i}: {} nodes vs {}",
                ta.nodes.len(),
                tb.nodes.len()
            ));
        }
        for (v, (na, nb)) in ta.nodes.iter().zip(&tb.nodes).enumerate() {
            match (na, nb) {
                (Node::Leaf { value: x }, Node::Leaf { value: y }) => {
                    if !values_close(*x, *y, rtol) {
                        return Err(format!("tree {i} node {v}: leaf {x} vs {y}"));
                    }
                    worst = worst.max((x - y).abs());
                }
                (
                    Node::Split {
                        criterion: ca,
                        left: la,
                        right: ra,
                    },
                    Node::Split {
                        criterion: cb,
                        left: lb,
                        right: rb,
                    },
                ) => {
                    if ca.feature != cb.feature
                        || ca.threshold.to_bits() != cb.threshold.to_bits()
                        || la != lb
                        || ra != rb
                    {
                        return Err(format!(
                            "tree {i} node {v}: split {} >= {} vs {} >= {}",
                            ca.feature, ca.threshold, cb.feature, cb.threshold
                        ));
                    }
                }
                _ => return Err(format!("tree {i} node {v}: leaf vs split")),
            }
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone)]
pub struct BoundEnsemble {
    trees: Vec<BoundTree>,
}

impl BoundEnsemble {
    pub fn predict(&self, row: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(row)).sum()
    }

    /// Predictions of each tree separately.
    pub fn predict_each(&self, row: &[f64]) -> Vec<f64> {
        self.trees.iter().map(|t| t.predict(row)).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    version: u64,
    label: String,
    #[serde(default)]
    features: Vec<String>,
    trees: Vec<TreeDoc>,
}

#[derive(Serialize, Deserialize)]
struct TreeDoc {
    nodes: Vec<NodeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NodeDoc {
    Split {
        feature: String,
        threshold: f64,
        left: usize,
        right: usize,
        #[serde(default)]
        table: usize,
    },
    Leaf {
        leaf: f64,
    },
}
