//! Workload replay and the resulting report.

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use gcbtree::analysis::{tree_stats, validate, validate_with, PotentialStats, PotentialTracker, TreeStats, ViolationKind};
use gcbtree::params::script_b;
use gcbtree::{theoretical_bounds, Algorithm, BalanceParams, Diagnostics, Effect, Observer, Tree, UpdateKind};
use serde::{Deserialize, Serialize};

use crate::workload::{Op, Record};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
    /// False when the bound says nothing for these parameters.
    pub applicable: bool,
}

impl Verdict {
    fn at_most(measured: f64, bound: f64) -> Self {
        Self { measured, bound, pass: measured <= bound, applicable: true }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OpCounts {
    pub inserts: u64,
    pub deletes: u64,
    pub queries: u64,
    pub redundant: u64,
    pub query_hits: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub params: BalanceParams,
    pub algorithm: Algorithm,
    pub ops: OpCounts,
    pub stats: TreeStats,
    pub restructurings: u64,
    pub rotations_per_update: f64,
    pub violations: usize,
    pub valid: bool,
    pub height: Verdict,
    pub path_length: Verdict,
    pub rotations: Verdict,
    pub diagnostics: Diagnostics,
    /// Only in verify mode.
    pub robust_violations: Option<usize>,
    pub potential: Option<PotentialStats>,
    pub duration_ms: f64,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.valid
            && self.height.pass
            && self.path_length.pass
            && self.rotations.pass
            && self.diagnostics.total() == 0
            && self.potential.is_none_or(|p| p.ok())
    }
}

/// Offset `x` of the parameters from the critical point, measured as the
/// smaller of the two coordinate gaps.
pub fn critical_offset(params: &BalanceParams) -> f64 {
    (params.alpha - FRAC_1_SQRT_2).min(params.beta - script_b(FRAC_1_SQRT_2))
}

/// Crude amortized bound `30 (1 + 28/x) k` on the rotations of `k` updates,
/// stated for `0 < x < 0.1`.
pub fn rotation_verdict(params: &BalanceParams, restructurings: u64, updates: u64) -> Verdict {
    let x = critical_offset(params);
    if x > 0.0 && x < 0.1 {
        let bound = 30.0 * (1.0 + 28.0 / x) * updates as f64;
        Verdict::at_most(restructurings as f64, bound)
    } else {
        Verdict { measured: restructurings as f64, bound: f64::INFINITY, pass: true, applicable: false }
    }
}

fn replay<O: Observer>(tree: &mut Tree<i64, O>, alg: Algorithm, records: &[Record]) -> Result<OpCounts, CliError> {
    let mut counts = OpCounts::default();
    for r in records {
        let kind = match r.op {
            Op::Query => {
                counts.queries += 1;
                counts.query_hits += tree.find(&r.key) as u64;
                continue;
            }
            Op::Insert => {
                counts.inserts += 1;
                UpdateKind::Insert
            }
            Op::Delete => {
                counts.deletes += 1;
                UpdateKind::Delete
            }
        };
        if tree.update(alg, kind, &r.key)?.effect == Effect::Redundant {
            counts.redundant += 1;
        }
    }
    Ok(counts)
}

fn finish<O: Observer>(tree: &Tree<i64, O>, alg: Algorithm, ops: OpCounts, verify: bool, started: Instant) -> RunReport {
    let params = *tree.params();
    let stats = tree_stats(tree);
    let report = validate(tree);
    let bounds = theoretical_bounds(stats.n_nodes, &params);
    let updates = ops.inserts + ops.deletes;
    let restructurings = tree.counters().restructurings();
    let robust_violations = verify.then(|| {
        let r = validate_with(tree, true);
        r.count(ViolationKind::RobustChild) + r.count(ViolationKind::RobustGrandchild)
    });
    RunReport {
        params,
        algorithm: alg,
        ops,
        stats,
        restructurings,
        rotations_per_update: if updates == 0 { 0.0 } else { restructurings as f64 / updates as f64 },
        violations: report.violations.len(),
        valid: report.is_ok(),
        height: Verdict::at_most(stats.height.max(0) as f64, bounds.height),
        path_length: Verdict::at_most(stats.external_path_length as f64, bounds.external_path_length),
        rotations: rotation_verdict(&params, restructurings, updates),
        diagnostics: tree.diagnostics(),
        robust_violations,
        potential: None,
        duration_ms: started.elapsed().as_secs_f64() * 1e3,
    }
}

pub fn run(params: BalanceParams, alg: Algorithm, records: &[Record], verify: bool) -> Result<RunReport, CliError> {
    let started = Instant::now();
    if verify {
        let mut tree = Tree::with_observer(params, PotentialTracker::new(&params));
        let ops = replay(&mut tree, alg, records)?;
        let mut report = finish(&tree, alg, ops, true, started);
        report.potential = Some(tree.observer().stats());
        Ok(report)
    } else {
        let mut tree = Tree::new(params);
        let ops = replay(&mut tree, alg, records)?;
        Ok(finish(&tree, alg, ops, false, started))
    }
}

/// Flat form of [`RunReport`] for CSV output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub alpha: f64,
    pub beta: f64,
    pub algorithm: String,
    pub inserts: u64,
    pub deletes: u64,
    pub queries: u64,
    pub redundant: u64,
    pub n_nodes: u64,
    pub height: i64,
    pub height_bound: f64,
    pub height_ok: bool,
    pub internal_path_length: u64,
    pub external_path_length: u64,
    pub path_bound: f64,
    pub path_ok: bool,
    pub rotations_simple: u64,
    pub rotations_double: u64,
    pub rotations_per_update: f64,
    pub rotation_bound: f64,
    pub rotation_ok: bool,
    pub violations: usize,
    pub valid: bool,
    pub passed: bool,
    pub duration_ms: f64,
}

impl From<&RunReport> for RunRow {
    fn from(r: &RunReport) -> Self {
        Self {
            alpha: r.params.alpha,
            beta: r.params.beta,
            algorithm: crate::algorithm_name(r.algorithm).into(),
            inserts: r.ops.inserts,
            deletes: r.ops.deletes,
            queries: r.ops.queries,
            redundant: r.ops.redundant,
            n_nodes: r.stats.n_nodes,
            height: r.stats.height,
            height_bound: r.height.bound,
            height_ok: r.height.pass,
            internal_path_length: r.stats.internal_path_length,
            external_path_length: r.stats.external_path_length,
            path_bound: r.path_length.bound,
            path_ok: r.path_length.pass,
            rotations_simple: r.stats.rotations_simple,
            rotations_double: r.stats.rotations_double,
            rotations_per_update: r.rotations_per_update,
            rotation_bound: r.rotations.bound,
            rotation_ok: r.rotations.pass,
            violations: r.violations,
            valid: r.valid,
            passed: r.passed(),
            duration_ms: r.duration_ms,
        }
    }
}
