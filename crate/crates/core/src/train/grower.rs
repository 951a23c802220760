use std::collections::VecDeque;

use crate::error::Result;
use crate::semiring::{Constraints, Interval};
use crate::train::split::{CandidateScore, RegionStats, SplitChoice};
use crate::train::TrainConfig;
use crate::tree::{RegressionTree, SplitCriterion};

/// Outcome of evaluating one node.
#[derive(Debug, Clone)]
pub struct NodeEvaluation {
    pub stats: RegionStats,
    pub split: Option<SplitChoice>,
    /// Every scored candidate; kept only by evaluators that report them.
    pub candidates: Vec<CandidateScore>,
}

/// Something that can compute a node's statistics and best split.
pub trait NodeEvaluator {
    fn evaluate(&mut self, node: usize, constraints: &Constraints) -> Result<NodeEvaluation>;
}

/// Per-node record of a grown tree.
#[derive(Debug, Clone)]
pub struct NodeRecord {
    pub node: usize,
    pub depth: usize,
    pub constraints: Constraints,
    pub stats: RegionStats,
    pub split: Option<SplitChoice>,
    pub candidates: Vec<CandidateScore>,
}

/// Breadth-first growth: nodes are taken from the frontier in BFS order and
/// split when a valid split exists, until the tree has `max_leaves` leaves.
/// Leaves predict the mean target of their region.
pub fn grow<E: NodeEvaluator>(
    eval: &mut E,
    cfg: &TrainConfig,
) -> Result<(RegressionTree, Vec<NodeRecord>)> {
    let mut records = Vec::new();
    let root = eval.evaluate(0, &Constraints::new())?;
    let mut tree = RegressionTree::leaf(root.stats.mean());
    let mut leaves = 1;
    let mut frontier: VecDeque<(usize, usize, Constraints, Option<NodeEvaluation>, f64)> =
        VecDeque::new();
    frontier.push_back((0, 0, Constraints::new(), Some(root), f64::INFINITY));

    while let Some((node, depth, constraints, evaluated, count)) = frontier.pop_front() {
        if leaves >= cfg.max_leaves {
            if let Some(ev) = evaluated {
                records.push(record(node, depth, constraints, ev, false));
            }
            break;
        }
        if depth >= cfg.max_depth || count < 2.0 * cfg.min_node as f64 {
            continue;
        }
        let ev = match evaluated {
            Some(ev) => ev,
            None => eval.evaluate(node, &constraints)?,
        };
        let split = ev.split.clone();
        records.push(record(node, depth, constraints.clone(), ev, true));
        let Some(choice) = split else {
            continue;
        };
        let criterion = SplitCriterion {
            feature: choice.feature.name.clone(),
            threshold: choice.threshold,
            table: choice.feature.table,
        };
        let (left, right) =
            tree.split_leaf(node, criterion, choice.left.mean(), choice.right.mean());
        leaves += 1;
        let name = &choice.feature.name;
        frontier.push_back((
            left,
            depth + 1,
            constraints
                .clone()
                .with(name, Interval::below(choice.threshold)),
            None,
            choice.left.count,
        ));
        frontier.push_back((
            right,
            depth + 1,
            constraints.with(name, Interval::at_least(choice.threshold)),
            None,
            choice.right.count,
        ));
    }
    Ok((tree, records))
}

fn record(
    node: usize,
    depth: usize,
    constraints: Constraints,
    ev: NodeEvaluation,
    used: bool,
) -> NodeRecord {
    NodeRecord {
        node,
        depth,
        constraints,
        stats: ev.stats,
        split: if used { ev.split } else { None },
        candidates: ev.candidates,
    }
}
