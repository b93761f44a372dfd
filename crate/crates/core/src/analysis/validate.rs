//! Structural validation of a whole tree.

use serde::Serialize;

use crate::observe::Observer;
use crate::params::robustness_offset;
use crate::tree::{Dir, NodeId, Tree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ViolationKind {
    Child,
    Grandchild,
    RobustChild,
    RobustGrandchild,
    /// The cached weight disagrees with the recomputed one.
    Weight,
    /// In-order keys are not strictly increasing.
    Order,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation<K> {
    pub key: K,
    pub kind: ViolationKind,
    pub measured: f64,
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BalanceReport<K> {
    pub violations: Vec<Violation<K>>,
}

impl<K> Default for BalanceReport<K> {
    fn default() -> Self {
        Self { violations: Vec::new() }
    }
}

impl<K> BalanceReport<K> {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

/// Checks every node for child and grandchild balance, weight consistency and
/// key order.
pub fn validate<K: Ord + Clone, O: Observer>(tree: &Tree<K, O>) -> BalanceReport<K> {
    validate_with(tree, false)
}

/// Like [`validate`]; with `robust` set every node is also checked against the
/// robust-balance inequalities.
///
/// Weights are recomputed bottom-up and never read from the nodes, except to
/// report [`ViolationKind::Weight`] mismatches.
pub fn validate_with<K: Ord + Clone, O: Observer>(tree: &Tree<K, O>, robust: bool) -> BalanceReport<K> {
    let mut walk = Walk { tree, robust, report: BalanceReport::default(), last: None };
    walk.visit(tree.root());
    walk.report
}

/// The robust-balance inequalities at a single node, on cached weights.
pub fn validate_robust<K: Ord, O: Observer>(tree: &Tree<K, O>, node: NodeId) -> bool {
    tree.robustly_balanced(node)
}

struct Walk<'a, K, O> {
    tree: &'a Tree<K, O>,
    robust: bool,
    report: BalanceReport<K>,
    last: Option<&'a K>,
}

impl<'a, K: Ord + Clone, O: Observer> Walk<'a, K, O> {
    /// Returns the recomputed weight of the subtree and of its two children.
    fn visit(&mut self, id: Option<NodeId>) -> (u64, [f64; 2]) {
        let Some(id) = id else {
            return (1, [0.5, 0.5]);
        };
        let (lw, lc) = self.visit(self.tree.child(id, Dir::Left));
        let key = self.tree.key(id);
        if let Some(prev) = self.last {
            if prev >= key {
                self.push(key, ViolationKind::Order, 0.0, 0.0);
            }
        }
        self.last = Some(key);
        let (rw, rc) = self.visit(self.tree.child(id, Dir::Right));

        let size = lw + rw;
        let cached = self.tree.node_weight(Some(id));
        if cached != size {
            self.push(key, ViolationKind::Weight, cached as f64, size as f64);
        }
        let p = self.tree.params();
        let w = size as f64;
        let child = lw.max(rw) as f64;
        let grandchild = lc.into_iter().chain(rc).fold(0.0, f64::max);
        if child > p.alpha * w {
            self.push(key, ViolationKind::Child, child, p.alpha * w);
        }
        if grandchild > p.beta * w {
            self.push(key, ViolationKind::Grandchild, grandchild, p.beta * w);
        }
        if self.robust {
            let child_limit = p.alpha * w + robustness_offset(p.alpha);
            let grandchild_limit = p.beta * w + robustness_offset(p.beta);
            if child > child_limit {
                self.push(key, ViolationKind::RobustChild, child, child_limit);
            }
            if grandchild > grandchild_limit {
                self.push(key, ViolationKind::RobustGrandchild, grandchild, grandchild_limit);
            }
        }
        (size, [lw as f64, rw as f64])
    }

    fn push(&mut self, key: &K, kind: ViolationKind, measured: f64, threshold: f64) {
        self.report.violations.push(Violation { key: key.clone(), kind, measured, threshold });
    }
}
