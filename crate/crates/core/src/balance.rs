//! The rebalancing routines.
//!
//! `c_balance` and `gc_balance` are the primitive steps, each a fixed list of
//! five cases evaluated in order. `cgc_balance` combines them to repair a root
//! that is slightly out of balance after an update below it; `rcgc_balance`
//! makes a root robustly balanced so that one later update anywhere below it
//! cannot break it.
//!
//! All routines take the root of a subtree and return the new root; the
//! caller relinks the parent.

use serde::Serialize;

use crate::error::{Result, TreeError};
use crate::observe::Observer;
use crate::params::robustness_offset;
use crate::tree::{Dir, NodeId, Tree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Routine {
    C,
    GC,
    CGC,
    RCGC,
    BaseCase,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rotation {
    None,
    SimpleLeft,
    SimpleRight,
    DoubleLeft,
    DoubleRight,
}

/// What one routine invocation did.
///
/// For `C` and `GC`, `case_index` is the case that fired (5 = no change).
/// For `CGC` and `RCGC`, it is 2 when the child-balancing branch ran, 3 when
/// only the grandchild branch rotated and 5 when nothing changed; `rotation`
/// is then the first rotation applied at the root. `BaseCase` marks a perfect
/// rebuild (`case_index` 1, no rotation).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RebalanceEvent {
    pub routine: Routine,
    pub case_index: u8,
    pub rotation: Rotation,
    pub subtree_weight: u64,
}

impl RebalanceEvent {
    pub fn rotated(&self) -> bool {
        self.rotation != Rotation::None
    }
}

/// Counts of internal consistency checks that failed. All stay zero when the
/// routines are used within their preconditions; debug builds additionally
/// assert on them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    /// Both children exceeded the child-balancing threshold at once.
    pub c_exclusion: u64,
    /// Two grandchildren exceeded the grandchild-balancing threshold at once.
    pub gc_exclusion: u64,
    /// Bottom-up: root not 19/24-child-balanced before combined balancing.
    pub alpha_bullet: u64,
    /// Top-down: root not robustly balanced after robust balancing.
    pub rcgc_not_robust: u64,
    /// Top-down: parent of the rebuilt base case lost its balance.
    pub base_case_parent: u64,
}

impl Diagnostics {
    pub fn total(&self) -> u64 {
        self.c_exclusion + self.gc_exclusion + self.alpha_bullet + self.rcgc_not_robust + self.base_case_parent
    }
}

#[inline]
fn exceeds(weight: f64, factor: f64, size: u64, offset: f64) -> bool {
    weight > factor * size as f64 + offset
}

impl<K: Ord, O: Observer> Tree<K, O> {
    fn emit(&mut self, event: RebalanceEvent) {
        self.observer.event(&event);
        if event.rotated() || event.routine == Routine::BaseCase {
            self.events.push(event);
        }
    }

    fn apply_rotation(&mut self, n: NodeId, rotation: Rotation) -> Result<NodeId> {
        match rotation {
            Rotation::None => Ok(n),
            Rotation::SimpleLeft => self.rotate_simple_raw(n, Dir::Left),
            Rotation::SimpleRight => self.rotate_simple_raw(n, Dir::Right),
            Rotation::DoubleLeft => self.rotate_double_raw(n, Dir::Left),
            Rotation::DoubleRight => self.rotate_double_raw(n, Dir::Right),
        }
    }

    /// Child-balancing with thresholds `u|n| + w` (trigger) and
    /// `(1 - v)|n| - x` (simple versus double rotation).
    pub fn c_balance(
        &mut self,
        n: NodeId,
        u: f64,
        v: f64,
        w: f64,
        x: f64,
    ) -> Result<(NodeId, RebalanceEvent)> {
        use Dir::*;
        let size = self.weight_of(Some(n));
        let left = self.weight_of(self.child(n, Left)) as f64;
        let right = self.weight_of(self.child(n, Right)) as f64;
        let left_heavy = exceeds(left, u, size, w);
        let right_heavy = exceeds(right, u, size, w);
        if left_heavy && right_heavy {
            self.diagnostics.c_exclusion += 1;
            debug_assert!(false, "child-balancing cases overlap at weight {size}");
        }
        let split = (1.0 - v) * size as f64 - x;
        let outer_left = self.grandchild_weight(n, Left, Left);
        let outer_right = self.grandchild_weight(n, Right, Right);
        let (case_index, rotation) = if left_heavy && outer_left >= split {
            (1, Rotation::SimpleRight)
        } else if right_heavy && outer_right >= split {
            (2, Rotation::SimpleLeft)
        } else if left_heavy {
            (3, Rotation::DoubleRight)
        } else if right_heavy {
            (4, Rotation::DoubleLeft)
        } else {
            (5, Rotation::None)
        };
        self.visited += 1;
        let root = self.apply_rotation(n, rotation)?;
        let event = RebalanceEvent {
            routine: Routine::C,
            case_index,
            rotation,
            subtree_weight: size,
        };
        self.emit(event);
        Ok((root, event))
    }

    /// Grandchild-balancing with threshold `y|n| + z`.
    pub fn gc_balance(&mut self, n: NodeId, y: f64, z: f64) -> Result<(NodeId, RebalanceEvent)> {
        use Dir::*;
        let size = self.weight_of(Some(n));
        let cases = [
            (1, (Left, Left), Rotation::SimpleRight),
            (2, (Right, Right), Rotation::SimpleLeft),
            (3, (Left, Right), Rotation::DoubleRight),
            (4, (Right, Left), Rotation::DoubleLeft),
        ];
        let mut fired = (5, Rotation::None);
        let mut hits = 0;
        for (index, (a, b), rotation) in cases {
            if exceeds(self.grandchild_weight(n, a, b), y, size, z) {
                hits += 1;
                if fired.0 == 5 {
                    fired = (index, rotation);
                }
            }
        }
        if hits > 1 {
            self.diagnostics.gc_exclusion += 1;
            debug_assert!(false, "grandchild-balancing cases overlap at weight {size}");
        }
        self.visited += 1;
        let root = self.apply_rotation(n, fired.1)?;
        let event = RebalanceEvent {
            routine: Routine::GC,
            case_index: fired.0,
            rotation: fired.1,
            subtree_weight: size,
        };
        self.emit(event);
        Ok((root, event))
    }

    fn gc_balance_child(&mut self, parent: NodeId, dir: Dir, y: f64, z: f64) -> Result<()> {
        if let Some(c) = self.child(parent, dir) {
            let (c, _) = self.gc_balance(c, y, z)?;
            self.set_child(parent, dir, Some(c));
        }
        Ok(())
    }

    fn cgc_balance_child(&mut self, parent: NodeId, dir: Dir, u: f64, y: f64) -> Result<()> {
        if let Some(c) = self.child(parent, dir) {
            let c = self.cgc_balance(c, u, y)?;
            self.set_child(parent, dir, Some(c));
        }
        Ok(())
    }

    /// Combined balancing `CGC(u, alpha_hat, y, beta_hat)`: child-balance the
    /// root; if that rotated, grandchild-balance both children and then the
    /// root with `beta_hat`, otherwise grandchild-balance the root with `y`.
    pub fn cgc_balance(&mut self, n: NodeId, u: f64, y: f64) -> Result<NodeId> {
        let (alpha_hat, beta_hat) = (self.params.alpha_hat, self.params.beta_hat);
        let size = self.weight_of(Some(n));
        self.observer.call_enter(Routine::CGC, size);
        let (root, first) = self.c_balance(n, u, alpha_hat, 0.0, 0.0)?;
        let (root, summary) = if first.rotated() {
            self.gc_balance_child(root, Dir::Left, beta_hat, 0.0)?;
            self.gc_balance_child(root, Dir::Right, beta_hat, 0.0)?;
            let (root, _) = self.gc_balance(root, beta_hat, 0.0)?;
            (root, (2, first.rotation))
        } else {
            let (root, second) = self.gc_balance(root, y, 0.0)?;
            let case = if second.rotated() { 3 } else { 5 };
            (root, (case, second.rotation))
        };
        let rotated = summary.1 != Rotation::None;
        self.observer.call_exit(Routine::CGC, rotated);
        self.emit(RebalanceEvent {
            routine: Routine::CGC,
            case_index: summary.0,
            rotation: summary.1,
            subtree_weight: size,
        });
        Ok(root)
    }

    /// Robust combined balancing `RCGC(alpha, alpha_hat, beta, beta_hat)` on a
    /// subtree with at least 30 nodes. Afterwards the root is robustly
    /// `(alpha, beta)`-balanced.
    pub fn rcgc_balance(&mut self, n: NodeId) -> Result<NodeId> {
        let size = self.weight_of(Some(n));
        if size < 31 {
            return Err(TreeError::Precondition(format!(
                "robust balancing needs at least 30 nodes, got {}",
                size - 1
            )));
        }
        let p = self.params;
        let (a, ah, b, bh) = (p.alpha, p.alpha_hat, p.beta, p.beta_hat);
        self.observer.call_enter(Routine::RCGC, size);
        let (mut root, first) =
            self.c_balance(n, a, ah, robustness_offset(a), robustness_offset(ah))?;
        let summary = if first.rotated() {
            self.cgc_balance_child(root, Dir::Left, ah, bh)?;
            self.cgc_balance_child(root, Dir::Right, ah, bh)?;
            root = self.gc_balance(root, bh, robustness_offset(bh))?.0;
            self.cgc_balance_child(root, Dir::Left, ah, bh)?;
            self.cgc_balance_child(root, Dir::Right, ah, bh)?;
            (2, first.rotation)
        } else {
            let (r, third) = self.gc_balance(root, b, robustness_offset(b))?;
            root = r;
            if third.rotated() {
                self.cgc_balance_child(root, Dir::Left, ah, bh)?;
                self.cgc_balance_child(root, Dir::Right, ah, bh)?;
                (3, third.rotation)
            } else {
                (5, Rotation::None)
            }
        };
        if !self.robustly_balanced(root) {
            self.diagnostics.rcgc_not_robust += 1;
            debug_assert!(false, "root not robust after robust balancing (weight {size})");
        }
        let rotated = summary.1 != Rotation::None;
        self.observer.call_exit(Routine::RCGC, rotated);
        self.emit(RebalanceEvent {
            routine: Routine::RCGC,
            case_index: summary.0,
            rotation: summary.1,
            subtree_weight: size,
        });
        Ok(root)
    }

    /// The four robust-balance inequalities at node `id`.
    pub(crate) fn robustly_balanced(&self, id: NodeId) -> bool {
        let (a, b) = (self.params.alpha, self.params.beta);
        let size = self.weight_of(Some(id)) as f64;
        let child = self.max_child_weight(id) as f64;
        let grandchild = self.max_grandchild_weight(id);
        child + 1.0 <= a * (size + 1.0)
            && child <= a * (size - 1.0)
            && grandchild + 1.0 <= b * (size + 1.0)
            && grandchild <= b * (size - 1.0)
    }

    /// Plain `(alpha, beta)`-balance at node `id`.
    pub(crate) fn balanced(&self, id: NodeId) -> bool {
        let size = self.weight_of(Some(id)) as f64;
        self.max_child_weight(id) as f64 <= self.params.alpha * size
            && self.max_grandchild_weight(id) <= self.params.beta * size
    }
}
