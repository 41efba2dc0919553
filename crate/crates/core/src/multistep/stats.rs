//! Search-tree accounting.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::gbengine::Status;

/// One bounded Gröbner attempt made during a solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbCall {
    pub depth: usize,
    pub status: Status,
    pub seconds: f64,
}

/// Counters of one DFS run.
///
/// A leaf is a node that did not branch: it was either settled by the
/// elimination preprocessing or by a tame Gröbner attempt. Internal nodes
/// are those predicted wild by the oracle or found wild by the attempt.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveTree {
    pub q: u64,
    pub nodes: u64,
    pub internal: u64,
    pub leaves: u64,
    /// Leaves settled before the oracle was consulted.
    pub resolved_early: u64,
    pub predicted_tame: u64,
    pub predicted_wild: u64,
    pub computed_tame: u64,
    pub computed_wild: u64,
    pub max_depth: usize,
    pub min_tame_depth: Option<usize>,
    pub max_tame_depth: Option<usize>,
    pub nodes_by_depth: BTreeMap<usize, u64>,
    pub tame_by_depth: BTreeMap<usize, u64>,
    pub wild_by_depth: BTreeMap<usize, u64>,
    pub gb_calls: Vec<GbCall>,
    /// Set when a solution cut the search short, so the tree is incomplete.
    pub early_termination: bool,
}

impl Default for SolveTree {
    fn default() -> Self {
        SolveTree {
            q: 2,
            nodes: 0,
            internal: 0,
            leaves: 0,
            resolved_early: 0,
            predicted_tame: 0,
            predicted_wild: 0,
            computed_tame: 0,
            computed_wild: 0,
            max_depth: 0,
            min_tame_depth: None,
            max_tame_depth: None,
            nodes_by_depth: BTreeMap::new(),
            tame_by_depth: BTreeMap::new(),
            wild_by_depth: BTreeMap::new(),
            gb_calls: Vec::new(),
            early_termination: false,
        }
    }
}

impl SolveTree {
    pub(crate) fn visit(&mut self, depth: usize) {
        self.nodes += 1;
        self.max_depth = self.max_depth.max(depth);
        *self.nodes_by_depth.entry(depth).or_default() += 1;
    }

    pub(crate) fn leaf(&mut self, depth: usize) {
        self.leaves += 1;
        *self.tame_by_depth.entry(depth).or_default() += 1;
        self.min_tame_depth = Some(self.min_tame_depth.map_or(depth, |d| d.min(depth)));
        self.max_tame_depth = Some(self.max_tame_depth.map_or(depth, |d| d.max(depth)));
    }

    pub(crate) fn branch(&mut self, depth: usize) {
        self.internal += 1;
        *self.wild_by_depth.entry(depth).or_default() += 1;
    }

    /// Tame cases: every leaf of the tree.
    pub fn tame_cases(&self) -> u64 {
        self.leaves
    }

    /// Wild cases, computed or predicted.
    pub fn wild_cases(&self) -> u64 {
        self.computed_wild + self.predicted_wild
    }

    pub fn gb_seconds(&self, status: Status) -> Vec<f64> {
        self.gb_calls
            .iter()
            .filter(|c| c.status == status)
            .map(|c| c.seconds)
            .collect()
    }
}

/// Node and internal-node counts of a complete `q`-ary tree with `leaves`
/// leaves, or `None` if no such tree exists.
pub fn tree_counts(leaves: u64, q: u64) -> Option<(u64, u64)> {
    if leaves == 0 || q < 2 || !(leaves - 1).is_multiple_of(q - 1) {
        return None;
    }
    Some(((q * leaves - 1) / (q - 1), (leaves - 1) / (q - 1)))
}

/// Checks the complete-tree identities on the recorded counters.
pub fn tree_verify(stats: &SolveTree) -> bool {
    tree_counts(stats.leaves, stats.q) == Some((stats.nodes, stats.internal))
}

/// Ratio of all nodes to leaves in a complete `q`-ary tree.
pub fn speedup_ratio(leaves: u64, q: u64) -> Ratio<u64> {
    assert!(leaves >= 1 && q >= 2, "speedup_ratio needs leaves >= 1 and q >= 2");
    Ratio::new(q * leaves - 1, leaves * (q - 1))
}
