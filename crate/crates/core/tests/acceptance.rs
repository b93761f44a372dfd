//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_1_SQRT_2;

use gcbtree::analysis::{
    tightness, tree_stats, validate, worst_case_tree, PotentialTracker, MAX_UPDATE_INCREASE,
};
use gcbtree::params::script_b;
use gcbtree::{theoretical_bounds, Algorithm, BalanceParams, Effect, Observer, Tree, UpdateKind};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

const LONG_RUN: usize = 100_000;
const STEPWISE_RUN: usize = 1_000;
const CHECKPOINT_EVERY: usize = 500;
const CRITICAL_HEIGHT_COEF: f64 = 1.8798;
const CRITICAL_PATH_COEF: f64 = 1.1271;
const COEF_TOL: f64 = 1e-9;
const CALL_TOL: f64 = 1e-9;
const ROTATION_GUARD: f64 = 5.0;

fn report(criterion: u32, name: &str, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion} [{name}]: {verdict} {detail}");
}

fn points() -> Vec<(&'static str, BalanceParams)> {
    vec![
        ("critical", BalanceParams::critical()),
        ("(0.72,0.50)", BalanceParams::new(0.72, 0.50).unwrap()),
        ("(0.74,0.74^2)", BalanceParams::new(0.74, 0.74 * 0.74).unwrap()),
    ]
}

fn algorithms() -> [Algorithm; 2] {
    [Algorithm::BottomUp, Algorithm::TopDown]
}

/// Random insert/delete stream: keys in `[0, key_range)`, inserts with
/// probability `insert_share`.
fn workload(seed: u64, len: usize, key_range: i64, insert_share: f64) -> Vec<(UpdateKind, i64)> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    (0..len)
        .map(|_| {
            let kind = if rng.random_bool(insert_share) { UpdateKind::Insert } else { UpdateKind::Delete };
            (kind, rng.random_range(0..key_range))
        })
        .collect()
}

fn is_critical(p: &BalanceParams) -> bool {
    (p.alpha - FRAC_1_SQRT_2).abs() < 1e-12
}

#[derive(Default)]
struct RunCheck {
    final_violations: usize,
    step_violations: usize,
    diagnostics: u64,
    height_failures: usize,
    path_failures: usize,
    identity_failures: usize,
    checkpoints: usize,
    worst_height_coef: f64,
    worst_path_coef: f64,
}

fn long_run(params: BalanceParams, alg: Algorithm, seed: u64) -> RunCheck {
    let mut tree = Tree::new(params);
    let mut check = RunCheck::default();
    let ops = workload(seed, LONG_RUN, 30_000, 0.6);
    for (i, &(kind, key)) in ops.iter().enumerate() {
        tree.update(alg, kind, &key).unwrap();
        if i < STEPWISE_RUN {
            check.step_violations += validate(&tree).violations.len();
        }
        if (i + 1) % CHECKPOINT_EVERY == 0 {
            check.checkpoints += 1;
            let stats = tree_stats(&tree);
            let n = stats.n_nodes;
            let bounds = theoretical_bounds(n, &params);
            if stats.height as f64 > bounds.height {
                check.height_failures += 1;
            }
            if stats.external_path_length as f64 > bounds.external_path_length {
                check.path_failures += 1;
            }
            if stats.internal_path_length != stats.external_path_length - 2 * n {
                check.identity_failures += 1;
            }
            let lg = ((n + 1) as f64).log2();
            if n > 0 {
                check.worst_height_coef = check.worst_height_coef.max(stats.height as f64 / lg);
                check.worst_path_coef =
                    check.worst_path_coef.max(stats.external_path_length as f64 / ((n + 1) as f64 * lg));
            }
            if is_critical(&params) {
                if stats.height as f64 > CRITICAL_HEIGHT_COEF * lg + COEF_TOL {
                    check.height_failures += 1;
                }
                if stats.external_path_length as f64 > CRITICAL_PATH_COEF * (n + 1) as f64 * lg + COEF_TOL {
                    check.path_failures += 1;
                }
            }
        }
    }
    check.final_violations = validate(&tree).violations.len();
    check.diagnostics = tree.diagnostics().total();
    check
}

fn all_long_runs() -> Vec<(String, RunCheck)> {
    let mut out = Vec::new();
    for (name, p) in points() {
        for alg in algorithms() {
            out.push((format!("{name}/{alg:?}"), long_run(p, alg, 0xACCE_0001)));
        }
    }
    out
}

fn criterion_1_2_3_balance_height_and_path_length() {
    let runs = all_long_runs();
    let mut c1 = true;
    let mut c2 = true;
    let mut c3 = true;
    for (name, r) in &runs {
        c1 &= r.final_violations == 0 && r.step_violations == 0 && r.diagnostics == 0;
        c2 &= r.height_failures == 0;
        c3 &= r.path_failures == 0 && r.identity_failures == 0;
        println!(
            "  {name}: final violations {}, stepwise violations {}, diagnostics {}, checkpoints {}, \
             max h/lg(N+1) {:.4}, max ext/((N+1)lg(N+1)) {:.4}",
            r.final_violations, r.step_violations, r.diagnostics, r.checkpoints, r.worst_height_coef, r.worst_path_coef
        );
    }
    report(1, "balance preservation", c1, format!("{} runs x {LONG_RUN} ops", runs.len()));
    report(2, "height bound", c2, format!("coef at critical point <= {CRITICAL_HEIGHT_COEF}"));
    report(3, "path-length bound", c3, format!("coef at critical point <= {CRITICAL_PATH_COEF}"));
    assert!(c1 && c2 && c3);
}

fn criterion_4_tightness() {
    let p = BalanceParams::new(0.72, 0.50).unwrap();
    let mut pass = true;
    for s in [100u64, 1_000, 10_000, 100_000] {
        let tree = worst_case_tree(s, &p).unwrap();
        let valid = validate(&tree).is_ok();
        let t = tightness(s, &p).unwrap();
        println!(
            "  T({s}): valid {valid}, height {} >= {:.3}: {}, ext {} >= {:.1}: {}",
            t.height, t.height_threshold, t.height_ok, t.external_path_length, t.path_threshold, t.path_ok
        );
        pass &= valid && t.height_ok && t.path_ok;
    }
    report(4, "tightness of T(s)", pass, "s in {1e2, 1e3, 1e4, 1e5}".into());
    assert!(pass);
}

fn criterion_5_amortized_rotations() {
    let x = 0.01;
    let p = BalanceParams::near_critical(x).unwrap();
    let k = LONG_RUN;
    let crude = 30.0 * (1.0 + 28.0 / x) * k as f64;
    let mut pass = true;
    for alg in algorithms() {
        let mut tree = Tree::new(p);
        for (kind, key) in workload(0xACCE_0005, k, 30_000, 0.6) {
            tree.update(alg, kind, &key).unwrap();
        }
        let c = tree.counters();
        let rotations = c.restructurings() as f64;
        let rate = rotations / k as f64;
        println!(
            "  {alg:?}: simple {}, double {}, restructurings {rotations}, per update {rate:.4}, crude bound {crude:.3e}",
            c.simple, c.double
        );
        pass &= rotations < crude && rate < ROTATION_GUARD;
    }
    report(5, "amortized rotations", pass, format!("x = {x}, k = {k}, guard {ROTATION_GUARD}/update"));
    assert!(pass);
}

fn criterion_6_potential_accounting() {
    let p = BalanceParams::new(0.72, 0.50).unwrap();
    let mut pass = true;
    for alg in algorithms() {
        let mut tree = Tree::with_observer(p, PotentialTracker::new(&p));
        let mut min_sum = f64::INFINITY;
        let mut drift = 0.0f64;
        // ascending inserts rotate near the root, then a random mix
        let mut ops: Vec<(UpdateKind, i64)> = (0..LONG_RUN as i64 / 2).map(|k| (UpdateKind::Insert, k)).collect();
        ops.extend(workload(0xACCE_0006, LONG_RUN / 2, LONG_RUN as i64, 0.5));
        for (i, (kind, key)) in ops.into_iter().enumerate() {
            tree.update(alg, kind, &key).unwrap();
            let tr = tree.observer();
            min_sum = min_sum.min(tr.potential().unwrap());
            if i % 1000 == 0 {
                drift = drift.max((tr.sum() - tr.recomputed_sum()).abs());
            }
        }
        let tr = tree.observer();
        let s = tr.stats();
        println!(
            "  {alg:?}: max update dC {:.4} (limit {MAX_UPDATE_INCREASE}), checked calls {} on weight >= {}, \
             worst call dC {:.6} (limit -{:.6}), min C {:.4}, min counter {:.4}, drift {:.2e}",
            s.max_update_delta,
            s.calls_checked,
            tr.check_weight,
            s.max_call_delta,
            tr.required_drop,
            min_sum,
            s.min_counter,
            drift
        );
        pass &= s.ok()
            && s.max_update_delta <= MAX_UPDATE_INCREASE
            && s.calls_checked > 0
            && s.max_call_delta <= -tr.required_drop + CALL_TOL
            && min_sum >= -CALL_TOL
            && drift < 1e-6;
    }
    report(6, "potential accounting", pass, format!("{LONG_RUN} steps per algorithm"));
    assert!(pass);
}

fn criterion_7_oracle_equivalence() {
    let mut pass = true;
    let mut mismatches = 0;
    for seed in 0..100u64 {
        let p = BalanceParams::default();
        let mut bu = Tree::new(p);
        let mut td = Tree::new(p);
        let mut oracle = BTreeSet::new();
        for (kind, key) in workload(seed, 10_000, 2_000, 0.55) {
            let changed = match kind {
                UpdateKind::Insert => oracle.insert(key),
                UpdateKind::Delete => oracle.remove(&key),
            };
            let b = bu.update(Algorithm::BottomUp, kind, &key).unwrap().effect != Effect::Redundant;
            let t = td.update(Algorithm::TopDown, kind, &key).unwrap().effect != Effect::Redundant;
            if b != changed || t != changed {
                mismatches += 1;
            }
        }
        let expected: Vec<i64> = oracle.into_iter().collect();
        if bu.in_order_keys() != expected || td.in_order_keys() != expected {
            pass = false;
        }
    }
    pass &= mismatches == 0;
    report(7, "oracle equivalence", pass, format!("100 seeds x 10^4 ops, {mismatches} effect mismatches"));
    assert!(pass);
}

fn criterion_8_constant_sanity() {
    const GRID: usize = 50;
    const SAMPLE_STRIDE: usize = 97;
    const INVOCATIONS: usize = 10_000;
    let tol = 1e-12;
    let mut constant_failures = 0;
    let mut sampled = 0;
    let mut diagnostics = 0;
    let mut invocations = 0u64;
    let mut idx = 0usize;
    for i in 0..GRID {
        let alpha = FRAC_1_SQRT_2 + (0.75 - FRAC_1_SQRT_2) * i as f64 / GRID as f64;
        let lo = script_b(alpha);
        let hi = alpha * alpha;
        for j in 0..GRID {
            let beta = lo + (hi - lo) * j as f64 / (GRID - 1) as f64;
            let p = match BalanceParams::new(alpha, beta) {
                Ok(p) => p,
                Err(_) => {
                    constant_failures += 1;
                    continue;
                }
            };
            let delta = p.alpha_hat.min(p.beta_hat / p.alpha);
            let ok = p.alpha_hat_c >= FRAC_1_SQRT_2 - tol
                && p.alpha_hat_c <= p.alpha + tol
                && p.beta_hat > 0.25
                && p.beta_hat <= p.beta + tol
                && (delta - p.delta_gc).abs() <= tol
                && delta <= p.alpha_hat + tol;
            if !ok {
                constant_failures += 1;
            }
            if idx.is_multiple_of(SAMPLE_STRIDE) {
                sampled += 1;
                let mut rng = Xoshiro256PlusPlus::seed_from_u64(idx as u64);
                let mut tree = Tree::new(p);
                for _ in 0..INVOCATIONS {
                    let key = rng.random_range(0..3_000i64);
                    let kind = if rng.random_bool(0.6) { UpdateKind::Insert } else { UpdateKind::Delete };
                    let alg = if rng.random_bool(0.5) { Algorithm::BottomUp } else { Algorithm::TopDown };
                    let out = tree.update(alg, kind, &key).unwrap();
                    invocations += out.nodes_visited.max(1);
                }
                diagnostics += tree.diagnostics().total();
                if !validate(&tree).is_ok() {
                    diagnostics += 1;
                }
            }
            idx += 1;
        }
    }
    let pass = constant_failures == 0 && diagnostics == 0;
    report(
        8,
        "constant sanity",
        pass,
        format!(
            "{} grid points, {constant_failures} constant failures, {sampled} sampled x {INVOCATIONS} updates \
             ({invocations} node visits), {diagnostics} assertion hits",
            GRID * GRID
        ),
    );
    assert!(pass);
}

fn perfectly_balanced<O: Observer>(tree: &Tree<i64, O>) -> bool {
    let mut stack: Vec<_> = tree.root().into_iter().collect();
    while let Some(id) = stack.pop() {
        let l = tree.child(id, gcbtree::Dir::Left);
        let r = tree.child(id, gcbtree::Dir::Right);
        if tree.node_weight(l).abs_diff(tree.node_weight(r)) > 1 {
            return false;
        }
        stack.extend(l);
        stack.extend(r);
    }
    true
}

fn criterion_9_base_cases() {
    use gcbtree::update::{BU_BASE_MAX_NODES, TD_BASE_MAX_NODES};
    let p = BalanceParams::default();
    let mut cases = 0;
    let mut failures = 0;
    for (alg, max_nodes) in [(Algorithm::BottomUp, BU_BASE_MAX_NODES), (Algorithm::TopDown, TD_BASE_MAX_NODES)] {
        for n in 0..=max_nodes as i64 {
            let keys: Vec<i64> = (1..=n).map(|k| 2 * k).collect();
            let shapes = [
                gcbtree::Shape::perfect(n as u64 + 1),
                gcbtree::Shape::spine(n as usize, gcbtree::Dir::Left),
                gcbtree::Shape::spine(n as usize, gcbtree::Dir::Right),
            ];
            for shape in &shapes {
                // every gap and every present key, for both operations
                for key in 1..=2 * n + 1 {
                    for kind in [UpdateKind::Insert, UpdateKind::Delete] {
                        let mut tree = Tree::from_shape_keys(p, shape, keys.clone());
                        let was_perfect = perfectly_balanced(&tree);
                        let mut expected: BTreeSet<i64> = keys.iter().copied().collect();
                        let changed = match kind {
                            UpdateKind::Insert => expected.insert(key),
                            UpdateKind::Delete => expected.remove(&key),
                        };
                        tree.update(alg, kind, &key).unwrap();
                        cases += 1;
                        let keys_ok = tree.in_order_keys() == expected.iter().copied().collect::<Vec<_>>();
                        // bottom-up leaves the tree alone on a redundant update
                        let must_be_perfect = changed || alg == Algorithm::TopDown || was_perfect;
                        if !keys_ok || (must_be_perfect && !perfectly_balanced(&tree)) {
                            failures += 1;
                        }
                    }
                }
            }
        }
    }
    let pass = failures == 0;
    report(9, "base cases", pass, format!("{cases} cases, {failures} failures"));
    assert!(pass);
}

fn main() {
    let criteria: [(&str, fn()); 7] = [
        ("criteria 1-3", criterion_1_2_3_balance_height_and_path_length),
        ("criterion 4", criterion_4_tightness),
        ("criterion 5", criterion_5_amortized_rotations),
        ("criterion 6", criterion_6_potential_accounting),
        ("criterion 7", criterion_7_oracle_equivalence),
        ("criterion 8", criterion_8_constant_sanity),
        ("criterion 9", criterion_9_base_cases),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        if std::panic::catch_unwind(check).is_err() {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed {failed:?}");
        std::process::exit(1);
    }
}
