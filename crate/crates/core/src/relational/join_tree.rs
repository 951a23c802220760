use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::relational::hypergraph::{Acyclicity, GyoStep, JoinHypergraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bag {
    pub table: usize,
    pub name: String,
    pub features: Vec<String>,
}

/// Rooted tree with one bag per input table. Bag `i` belongs to table `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinTree {
    bags: Vec<Bag>,
    /// Undirected adjacency, neighbours sorted ascending.
    adjacency: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    root: usize,
}

impl JoinTree {
    fn from_edges(bags: Vec<Bag>, undirected: &[(usize, usize)], root: usize) -> Self {
        let n = bags.len();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in undirected {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
            nbrs.dedup();
        }
        let mut tree = JoinTree {
            bags,
            adjacency,
            parent: vec![None; n],
            children: vec![Vec::new(); n],
            root,
        };
        tree.orient(root);
        tree
    }

    fn orient(&mut self, root: usize) {
        let n = self.bags.len();
        self.parent = vec![None; n];
        self.children = vec![Vec::new(); n];
        self.root = root;
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    self.parent[w] = Some(v);
                    self.children[v].push(w);
                    queue.push_back(w);
                }
            }
        }
    }

    /// Same bags and edges, rooted at `table`.
    pub fn rerooted(&self, table: usize) -> JoinTree {
        let mut t = self.clone();
        t.orient(table);
        t
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn bags(&self) -> &[Bag] {
        &self.bags
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn parent(&self, bag: usize) -> Option<usize> {
        self.parent[bag]
    }

    pub fn children(&self, bag: usize) -> &[usize] {
        &self.children[bag]
    }

    /// Undirected edges as (smaller, larger) pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, nbrs) in self.adjacency.iter().enumerate() {
            for &b in nbrs {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Children before parents; siblings in ascending order.
    pub fn post_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.bags.len());
        let mut stack = vec![(self.root, false)];
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                out.push(v);
            } else {
                stack.push((v, true));
                for &c in self.children[v].iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    /// Features shared between a bag and its parent, in the bag's column order.
    pub fn separator(&self, bag: usize) -> Vec<String> {
        match self.parent[bag] {
            None => Vec::new(),
            Some(p) => {
                let parent: BTreeSet<&String> = self.bags[p].features.iter().collect();
                self.bags[bag]
                    .features
                    .iter()
                    .filter(|f| parent.contains(f))
                    .cloned()
                    .collect()
            }
        }
    }

    /// Structural check: connected, acyclic, and every feature's bags form
    /// a connected subtree.
    pub fn check_running_intersection(&self) -> std::result::Result<(), String> {
        let n = self.bags.len();
        let reached = self
            .parent
            .iter()
            .enumerate()
            .filter(|&(v, p)| v == self.root || p.is_some())
            .count();
        if reached != n {
            return Err(format!("tree spans {reached} of {n} bags"));
        }
        if self.edges().len() + 1 != n {
            return Err("edge count is not n - 1".into());
        }
        let features: BTreeSet<&String> =
            self.bags.iter().flat_map(|b| b.features.iter()).collect();
        for f in features {
            let holders: Vec<usize> = (0..n)
                .filter(|&v| self.bags[v].features.contains(f))
                .collect();
            // A connected subtree has exactly one holder whose parent does
            // not hold the feature.
            let tops = holders
                .iter()
                .filter(|&&v| match self.parent[v] {
                    None => true,
                    Some(p) => !self.bags[p].features.contains(f),
                })
                .count();
            if tops != 1 {
                return Err(format!("feature `{f}` spans {tops} disconnected parts"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for JoinTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn walk(t: &JoinTree, v: usize, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let bag = &t.bags[v];
            writeln!(
                f,
                "{}{}({})",
                "  ".repeat(depth),
                bag.name,
                bag.features.join(",")
            )?;
            for &c in &t.children[v] {
                walk(t, c, depth + 1, f)?;
            }
            Ok(())
        }
        walk(self, self.root, 0, f)
    }
}

/// Join tree from the deterministic GYO elimination: each "remove table
/// contained in another" step links the removed table to its container.
pub fn build_join_tree(h: &JoinHypergraph, root_table: &str) -> Result<JoinTree> {
    let root = (0..h.num_edges())
        .find(|&e| h.edge_name(e) == root_table)
        .ok_or_else(|| Error::Schema(format!("unknown root table `{root_table}`")))?;
    build_join_tree_at(h, root)
}

pub fn build_join_tree_at(h: &JoinHypergraph, root: usize) -> Result<JoinTree> {
    if root >= h.num_edges() {
        return Err(Error::Schema(format!("root bag {root} out of range")));
    }
    let trace = match h.check_acyclic() {
        Acyclicity::Acyclic { trace } => trace,
        Acyclicity::Cyclic { residual, .. } => {
            return Err(Error::Cyclic {
                residual: residual
                    .into_iter()
                    .map(|(t, cols)| {
                        (
                            h.edge_name(t).to_string(),
                            cols.iter().map(|&c| h.vertices()[c].clone()).collect(),
                        )
                    })
                    .collect(),
            })
        }
    };
    let undirected: Vec<(usize, usize)> = trace
        .iter()
        .filter_map(|s| match *s {
            GyoStep::RemoveTable { table, container } => Some((table, container)),
            GyoStep::RemoveColumn { .. } => None,
        })
        .collect();
    let bags = (0..h.num_edges())
        .map(|e| Bag {
            table: e,
            name: h.edge_name(e).to_string(),
            features: h.edge_columns(e),
        })
        .collect();
    Ok(JoinTree::from_edges(bags, &undirected, root))
}
