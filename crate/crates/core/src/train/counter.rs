use serde::Serialize;

/// Grouped queries issued for one grouping table, by phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PhaseCounts {
    /// Count, label sum and label-square sum.
    pub stats: u64,
    /// One query per prior leaf and per weighting.
    pub leaf_sums: u64,
    /// One query per ordered pair of leaves from distinct prior trees.
    pub pair_sums: u64,
    /// Sketch-semiring queries: the label sketch plus one per prior leaf.
    pub sketches: u64,
}

impl PhaseCounts {
    pub fn total(&self) -> u64 {
        self.stats + self.leaf_sums + self.pair_sums + self.sketches
    }

    fn add(&mut self, o: &PhaseCounts) {
        self.stats += o.stats;
        self.leaf_sums += o.leaf_sums;
        self.pair_sums += o.pair_sums;
        self.sketches += o.sketches;
    }
}

/// Queries issued while evaluating one node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeTally {
    pub tree: usize,
    pub node: usize,
    pub sketched: bool,
    /// Leaf counts of the trees preceding this one.
    pub prior_leaves: Vec<usize>,
    pub per_table: Vec<PhaseCounts>,
}

impl NodeTally {
    pub fn new(
        tree: usize,
        node: usize,
        sketched: bool,
        prior_leaves: Vec<usize>,
        tables: usize,
    ) -> Self {
        NodeTally {
            tree,
            node,
            sketched,
            prior_leaves,
            per_table: vec![PhaseCounts::default(); tables],
        }
    }

    pub fn total(&self) -> PhaseCounts {
        let mut t = PhaseCounts::default();
        for p in &self.per_table {
            t.add(p);
        }
        t
    }

    /// Closed-form per-table count for this node's mode and prior trees.
    pub fn expected_per_table(&self) -> PhaseCounts {
        if self.sketched {
            expected_sketch_node(&self.prior_leaves)
        } else {
            expected_exact_node(&self.prior_leaves)
        }
    }

    pub fn matches_closed_form(&self) -> bool {
        let e = self.expected_per_table();
        self.per_table.iter().all(|p| *p == e)
    }
}

/// Exact node after trees with the given leaf counts:
/// `3 + 2 Σ L_i + Σ_{i≠j} L_i L_j` per table. With `m` trees of `L` leaves
/// the pair term is `m(m-1)L²`; with `m = 0` it is the three statistics.
pub fn expected_exact_node(prior_leaves: &[usize]) -> PhaseCounts {
    let sum: u64 = prior_leaves.iter().map(|&l| l as u64).sum();
    let sq: u64 = prior_leaves.iter().map(|&l| (l * l) as u64).sum();
    PhaseCounts {
        stats: 3,
        leaf_sums: 2 * sum,
        pair_sums: sum * sum - sq,
        sketches: 0,
    }
}

/// Sketched node: `Σ L_i + 1` sketch queries per table, plus the count and
/// label-sum statistics and one count query per prior leaf for the
/// residual sums.
pub fn expected_sketch_node(prior_leaves: &[usize]) -> PhaseCounts {
    let sum: u64 = prior_leaves.iter().map(|&l| l as u64).sum();
    PhaseCounts {
        stats: 2,
        leaf_sums: sum,
        pair_sums: 0,
        sketches: sum + 1,
    }
}

/// Tallies of every evaluated node of a training run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct QueryLog {
    pub nodes: Vec<NodeTally>,
}

impl QueryLog {
    pub fn total(&self) -> PhaseCounts {
        let mut t = PhaseCounts::default();
        for n in &self.nodes {
            t.add(&n.total());
        }
        t
    }

    /// Nodes whose tally differs from the closed form.
    pub fn mismatches(&self) -> Vec<&NodeTally> {
        self.nodes
            .iter()
            .filter(|n| !n.matches_closed_form())
            .collect()
    }
}
