//! Public insert and delete entry points.
//!
//! Bottom-up updates descend to the leaf and rebalance on the way back with
//! combined balancing. Top-down updates robustly balance each subtree before
//! entering it and adjust weights on the way down, so they never climb back.
//! Both delete internal nodes by removing the in-order successor leaf and
//! moving its key up, and both rebuild small subtrees perfectly.

use std::cmp::Ordering;

use serde::Serialize;

use crate::balance::{RebalanceEvent, Routine, Rotation};
use crate::error::{Result, TreeError};
use crate::observe::Observer;
use crate::tree::{Dir, NodeId, Tree, WEIGHT_CAP};

/// Bottom-up base case: subtrees with at most 11 nodes.
pub const BU_BASE_MAX_NODES: u64 = 11;
/// Top-down base case: subtrees with at most 29 nodes.
pub const TD_BASE_MAX_NODES: u64 = 29;

const BU_BASE_MAX_WEIGHT: u64 = BU_BASE_MAX_NODES + 1;
const TD_BASE_MAX_WEIGHT: u64 = TD_BASE_MAX_NODES + 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Effect {
    Inserted,
    Deleted,
    Redundant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum UpdateKind {
    Insert,
    Delete,
}

impl UpdateKind {
    fn delta(self) -> i64 {
        match self {
            UpdateKind::Insert => 1,
            UpdateKind::Delete => -1,
        }
    }

    fn effect(self) -> Effect {
        match self {
            UpdateKind::Insert => Effect::Inserted,
            UpdateKind::Delete => Effect::Deleted,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Algorithm {
    BottomUp,
    TopDown,
}

/// Result of one attempted insertion or deletion.
///
/// `events` lists the routine invocations that changed the structure
/// (rotations and base-case rebuilds). `passes` is 2 when a redundant
/// top-down update had to walk the path again to undo its weight changes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UpdateOutcome {
    pub effect: Effect,
    pub events: Vec<RebalanceEvent>,
    pub nodes_visited: u64,
    pub passes: u8,
}

#[derive(Clone, Copy)]
enum Target<'a, K> {
    Key(&'a K),
    /// The minimum of the subtree: the successor of a node being deleted.
    Min,
}

enum Change<K> {
    Redundant,
    /// Carries the removed key when the target was `Min`.
    Applied(Option<K>),
}

#[derive(Clone, Copy)]
enum Slot {
    Root,
    Child(NodeId, Dir),
}

impl<K: Ord + Clone, O: Observer> Tree<K, O> {
    pub fn insert_bu(&mut self, key: K) -> Result<UpdateOutcome> {
        self.update(Algorithm::BottomUp, UpdateKind::Insert, &key)
    }

    pub fn delete_bu(&mut self, key: &K) -> Result<UpdateOutcome> {
        self.update(Algorithm::BottomUp, UpdateKind::Delete, key)
    }

    pub fn insert_td(&mut self, key: K) -> Result<UpdateOutcome> {
        self.update(Algorithm::TopDown, UpdateKind::Insert, &key)
    }

    pub fn delete_td(&mut self, key: &K) -> Result<UpdateOutcome> {
        self.update(Algorithm::TopDown, UpdateKind::Delete, key)
    }

    pub fn update(&mut self, algorithm: Algorithm, kind: UpdateKind, key: &K) -> Result<UpdateOutcome> {
        if kind == UpdateKind::Insert && self.weight() >= WEIGHT_CAP {
            return Err(TreeError::Capacity);
        }
        self.events.clear();
        self.visited = 0;
        self.observer.update_begin();
        let result = match algorithm {
            Algorithm::BottomUp => self.update_bu(kind, key).map(|e| (e, 1)),
            Algorithm::TopDown => self.update_td(kind, key),
        };
        self.observer.update_end();
        let (effect, passes) = result?;
        Ok(UpdateOutcome {
            effect,
            events: std::mem::take(&mut self.events),
            nodes_visited: self.visited,
            passes,
        })
    }

    fn update_bu(&mut self, kind: UpdateKind, key: &K) -> Result<Effect> {
        let (root, change) = self.bu_step(self.root, Target::Key(key), kind)?;
        self.root = root;
        Ok(match change {
            Change::Redundant => Effect::Redundant,
            Change::Applied(_) => kind.effect(),
        })
    }

    fn bu_step(
        &mut self,
        node: Option<NodeId>,
        target: Target<'_, K>,
        kind: UpdateKind,
    ) -> Result<(Option<NodeId>, Change<K>)> {
        if self.weight_of(node) <= BU_BASE_MAX_WEIGHT {
            return self.base_case(node, target, kind, false);
        }
        let id = node.expect("subtree above the base case is non-empty");
        self.visited += 1;
        let (dir, next, found) = match target {
            Target::Key(k) => match k.cmp(&self.nodes[id.0].key) {
                Ordering::Less => (Dir::Left, target, false),
                Ordering::Greater => (Dir::Right, target, false),
                Ordering::Equal if kind == UpdateKind::Insert => {
                    return Ok((node, Change::Redundant));
                }
                Ordering::Equal => (Dir::Right, Target::Min, true),
            },
            Target::Min => (Dir::Left, Target::Min, false),
        };
        let (child, change) = self.bu_step(self.child(id, dir), next, kind)?;
        self.set_child(id, dir, child);
        let mut removed = match change {
            Change::Redundant => return Ok((node, Change::Redundant)),
            Change::Applied(removed) => removed,
        };
        let weight = self.nodes[id.0].weight;
        self.observer.path_node(id, weight);
        self.observer.path_commit();
        self.nodes[id.0].weight = weight.checked_add_signed(kind.delta()).expect("weight underflow");
        if found {
            self.nodes[id.0].key = removed.take().expect("successor key");
        }
        let new_weight = self.nodes[id.0].weight as f64;
        if self.max_child_weight(id) as f64 > self.params.alpha_bullet * new_weight {
            self.diagnostics.alpha_bullet += 1;
            debug_assert!(false, "root not 19/24-child-balanced before combined balancing");
        }
        let (alpha, beta) = (self.params.alpha, self.params.beta);
        let root = self.cgc_balance(id, alpha, beta)?;
        Ok((Some(root), Change::Applied(removed)))
    }

    fn update_td(&mut self, kind: UpdateKind, key: &K) -> Result<(Effect, u8)> {
        let mut slot = Slot::Root;
        let mut target = Target::Key(key);
        let mut adjusted = 0usize;
        let mut pending: Option<NodeId> = None;
        let mut frontier_parent: Option<NodeId> = None;
        let redundant = loop {
            let cur = self.slot_get(slot);
            if self.weight_of(cur) <= TD_BASE_MAX_WEIGHT {
                let (new, change) = self.base_case(cur, target, kind, true)?;
                self.slot_set(slot, new);
                match change {
                    Change::Redundant => break true,
                    Change::Applied(Some(successor)) => {
                        let a = pending.expect("successor removed without a pending node");
                        self.nodes[a.0].key = successor;
                    }
                    Change::Applied(None) => {}
                }
                break false;
            }
            let id = self.rcgc_balance(cur.expect("non-empty above the base case"))?;
            self.slot_set(slot, Some(id));
            self.visited += 1;
            let dir = match target {
                Target::Key(k) => match k.cmp(&self.nodes[id.0].key) {
                    Ordering::Less => Dir::Left,
                    Ordering::Greater => Dir::Right,
                    Ordering::Equal if kind == UpdateKind::Insert => {
                        frontier_parent = None;
                        break true;
                    }
                    Ordering::Equal => {
                        pending = Some(id);
                        target = Target::Min;
                        Dir::Right
                    }
                },
                Target::Min => Dir::Left,
            };
            let weight = self.nodes[id.0].weight;
            self.observer.path_node(id, weight);
            self.nodes[id.0].weight = weight.checked_add_signed(kind.delta()).expect("weight underflow");
            adjusted += 1;
            frontier_parent = Some(id);
            slot = Slot::Child(id, dir);
        };
        let passes = if redundant {
            self.observer.path_discard();
            self.weight_revert_pass(key, kind, adjusted);
            2
        } else {
            1
        };
        if let Some(parent) = frontier_parent {
            if !self.balanced(parent) {
                self.diagnostics.base_case_parent += 1;
                debug_assert!(false, "parent of the top-down base case lost its balance");
            }
        }
        let effect = if redundant { Effect::Redundant } else { kind.effect() };
        Ok((effect, passes))
    }

    /// Second top-down pass after a redundant top-down update: walks the same
    /// comparison path and undoes the optimistic weight change of the first
    /// `levels` nodes.
    pub(crate) fn weight_revert_pass(&mut self, key: &K, kind: UpdateKind, levels: usize) {
        let mut cur = self.root;
        for _ in 0..levels {
            let id = cur.expect("revert path shorter than the adjusted path");
            let n = &mut self.nodes[id.0];
            n.weight = n.weight.checked_add_signed(-kind.delta()).expect("weight underflow");
            self.visited += 1;
            cur = match key.cmp(&n.key) {
                Ordering::Less => n.left,
                Ordering::Greater => n.right,
                Ordering::Equal => None,
            };
        }
    }

    fn slot_get(&self, slot: Slot) -> Option<NodeId> {
        match slot {
            Slot::Root => self.root,
            Slot::Child(id, dir) => self.child(id, dir),
        }
    }

    fn slot_set(&mut self, slot: Slot, value: Option<NodeId>) {
        match slot {
            Slot::Root => self.root = value,
            Slot::Child(id, dir) => self.set_child(id, dir, value),
        }
    }

    /// Performs the update inside a small subtree and rebuilds it perfectly.
    /// A redundant update rebuilds only when `rebuild_redundant` is set.
    fn base_case(
        &mut self,
        node: Option<NodeId>,
        target: Target<'_, K>,
        kind: UpdateKind,
        rebuild_redundant: bool,
    ) -> Result<(Option<NodeId>, Change<K>)> {
        // ancestors of the leaf inside this subtree, for the potential tracker
        let mut cur = node;
        while let Some(id) = cur {
            let n = &self.nodes[id.0];
            let next = match target {
                Target::Key(k) => match k.cmp(&n.key) {
                    Ordering::Less => n.left,
                    Ordering::Greater => n.right,
                    Ordering::Equal => break,
                },
                Target::Min => n.left,
            };
            if matches!(target, Target::Min) && next.is_none() {
                break;
            }
            self.observer.path_node(id, n.weight);
            cur = next;
        }

        let mut ids = Vec::with_capacity(TD_BASE_MAX_WEIGHT as usize + 1);
        self.collect_in_order(node, &mut ids);
        let size = self.weight_of(node);
        let change = match (target, kind) {
            (Target::Min, _) => {
                self.observer.path_commit();
                let first = ids.remove(0);
                Change::Applied(Some(self.free(first)))
            }
            (Target::Key(k), _) => {
                let pos = ids.binary_search_by(|id| self.nodes[id.0].key.cmp(k));
                match (pos, kind) {
                    (Ok(_), UpdateKind::Insert) | (Err(_), UpdateKind::Delete) => {
                        self.observer.path_discard();
                        Change::Redundant
                    }
                    (Err(pos), UpdateKind::Insert) => {
                        self.observer.path_commit();
                        let id = self.alloc(k.clone());
                        ids.insert(pos, id);
                        Change::Applied(None)
                    }
                    (Ok(pos), UpdateKind::Delete) => {
                        self.observer.path_commit();
                        let id = ids.remove(pos);
                        self.free(id);
                        Change::Applied(None)
                    }
                }
            }
        };
        if matches!(change, Change::Redundant) && !rebuild_redundant {
            return Ok((node, change));
        }
        self.observer.call_enter(Routine::BaseCase, size);
        for &id in &ids {
            self.observer.node_affected(id);
        }
        let root = self.link_perfect(&ids);
        self.observer.call_exit(Routine::BaseCase, false);
        self.counters.rebuilds += 1;
        self.visited += ids.len() as u64;
        let event = RebalanceEvent {
            routine: Routine::BaseCase,
            case_index: 1,
            rotation: Rotation::None,
            subtree_weight: self.weight_of(root),
        };
        self.observer.event(&event);
        self.events.push(event);
        Ok((root, change))
    }
}
