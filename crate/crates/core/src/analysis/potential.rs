//! Per-node counters whose sum bounds the amortized number of rotations.
//!
//! Each live node carries a counter. When a key is inserted or deleted below
//! a node of weight `w`, its counter grows by `2 / w`; when a rotation or a
//! rebuild changes its children, the counter drops to zero. Rotating
//! top-level balancing calls on large subtrees must lower the sum by a fixed
//! margin, and no single update may raise it by more than 16.

use serde::Serialize;

use crate::balance::Routine;
use crate::observe::Observer;
use crate::params::BalanceParams;
use crate::tree::NodeId;

/// Largest permitted growth of the sum during one update.
pub const MAX_UPDATE_INCREASE: f64 = 16.0;
const SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PotentialStats {
    pub updates: u64,
    pub max_update_delta: f64,
    pub update_violations: u64,
    /// Rotating top-level calls large enough to be checked.
    pub calls_checked: u64,
    pub call_violations: u64,
    /// Largest (least negative) change over the checked calls.
    pub max_call_delta: f64,
    pub min_counter: f64,
    pub min_sum: f64,
}

impl Default for PotentialStats {
    fn default() -> Self {
        Self {
            updates: 0,
            max_update_delta: f64::NEG_INFINITY,
            update_violations: 0,
            calls_checked: 0,
            call_violations: 0,
            max_call_delta: f64::NEG_INFINITY,
            min_counter: 0.0,
            min_sum: 0.0,
        }
    }
}

impl PotentialStats {
    pub fn ok(&self) -> bool {
        self.update_violations == 0 && self.call_violations == 0 && self.min_counter >= 0.0 && self.min_sum >= -SLACK
    }
}

#[derive(Clone, Debug)]
pub struct PotentialTracker {
    counters: Vec<Option<f64>>,
    sum: f64,
    pending: Vec<(NodeId, u64)>,
    depth: u32,
    call_start: f64,
    call_weight: u64,
    update_start: f64,
    /// Smallest subtree weight whose rotating calls are checked.
    pub check_weight: u64,
    /// Required decrease of a checked call.
    pub required_drop: f64,
    stats: PotentialStats,
}

impl PotentialTracker {
    pub fn new(params: &BalanceParams) -> Self {
        let margin = params.potential_margin();
        let check_weight = if margin > 0.0 {
            let needed = (2.0 / margin).ceil();
            if needed >= u64::MAX as f64 { u64::MAX } else { (needed as u64).max(31) }
        } else {
            u64::MAX
        };
        Self {
            counters: Vec::new(),
            sum: 0.0,
            pending: Vec::new(),
            depth: 0,
            call_start: 0.0,
            call_weight: 0,
            update_start: 0.0,
            check_weight,
            required_drop: params.delta_potential,
            stats: PotentialStats::default(),
        }
    }

    pub fn sum(&self) -> f64 {
        self.sum
    }

    pub fn stats(&self) -> PotentialStats {
        self.stats
    }

    pub fn counter(&self, id: NodeId) -> Option<f64> {
        self.counters.get(id.index()).copied().flatten()
    }

    /// Sum of live counters computed from scratch.
    pub fn recomputed_sum(&self) -> f64 {
        self.counters.iter().flatten().sum()
    }

    pub fn live_nodes(&self) -> usize {
        self.counters.iter().flatten().count()
    }

    fn slot(&mut self, id: NodeId) -> &mut Option<f64> {
        let i = id.index();
        if i >= self.counters.len() {
            self.counters.resize(i + 1, None);
        }
        &mut self.counters[i]
    }

    fn note_sum(&mut self) {
        self.stats.min_sum = self.stats.min_sum.min(self.sum);
    }
}

impl Observer for PotentialTracker {
    fn update_begin(&mut self) {
        self.update_start = self.sum;
        self.pending.clear();
    }

    fn update_end(&mut self) {
        let delta = self.sum - self.update_start;
        self.stats.updates += 1;
        self.stats.max_update_delta = self.stats.max_update_delta.max(delta);
        if delta > MAX_UPDATE_INCREASE + SLACK {
            self.stats.update_violations += 1;
        }
    }

    fn node_created(&mut self, id: NodeId) {
        *self.slot(id) = Some(0.0);
    }

    fn node_removed(&mut self, id: NodeId) {
        if let Some(c) = self.slot(id).take() {
            self.sum -= c;
            self.note_sum();
        }
    }

    fn path_node(&mut self, id: NodeId, weight_before: u64) {
        self.pending.push((id, weight_before));
    }

    fn path_commit(&mut self) {
        let pending = std::mem::take(&mut self.pending);
        for &(id, weight) in &pending {
            let inc = 2.0 / weight as f64;
            let c = self.slot(id).get_or_insert(0.0);
            *c += inc;
            self.sum += inc;
        }
        self.pending = pending;
        self.pending.clear();
    }

    fn path_discard(&mut self) {
        self.pending.clear();
    }

    fn node_affected(&mut self, id: NodeId) {
        let c = self.slot(id);
        let old = c.replace(0.0).unwrap_or(0.0);
        self.stats.min_counter = self.stats.min_counter.min(old);
        self.sum -= old;
        self.note_sum();
    }

    fn call_enter(&mut self, routine: Routine, subtree_weight: u64) {
        if !matches!(routine, Routine::CGC | Routine::RCGC) {
            return;
        }
        if self.depth == 0 {
            self.call_start = self.sum;
            self.call_weight = subtree_weight;
        }
        self.depth += 1;
    }

    fn call_exit(&mut self, routine: Routine, rotated: bool) {
        if !matches!(routine, Routine::CGC | Routine::RCGC) {
            return;
        }
        self.depth -= 1;
        if self.depth == 0 && rotated && self.call_weight >= self.check_weight {
            let delta = self.sum - self.call_start;
            self.stats.calls_checked += 1;
            self.stats.max_call_delta = self.stats.max_call_delta.max(delta);
            if delta > -self.required_drop + SLACK {
                self.stats.call_violations += 1;
            }
        }
    }

    fn potential(&self) -> Option<f64> {
        Some(self.sum)
    }
}
