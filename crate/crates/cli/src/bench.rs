use gcbtree::analysis::{tree_stats, TightnessReport};
use gcbtree::{Algorithm, BalanceParams, Tree};
use serde::{Deserialize, Serialize};

use crate::workload::{generate, GenKind, Op};
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub alpha: f64,
    pub beta: f64,
    pub algorithm: String,
    pub n_nodes: u64,
    pub height: i64,
    pub height_ratio: f64,
    pub path_ratio: f64,
    pub rotations_per_update: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorstRow {
    pub weight: u64,
    pub height: i64,
    pub height_threshold: f64,
    pub height_ok: bool,
    pub external_path_length: u64,
    pub path_threshold: f64,
    pub path_ok: bool,
}

impl From<&TightnessReport> for WorstRow {
    fn from(t: &TightnessReport) -> Self {
        Self {
            weight: t.weight,
            height: t.height,
            height_threshold: t.height_threshold,
            height_ok: t.height_ok,
            external_path_length: t.external_path_length,
            path_threshold: t.path_threshold,
            path_ok: t.path_ok,
        }
    }
}

pub fn default_sweep() -> Vec<BalanceParams> {
    vec![
        BalanceParams::critical(),
        BalanceParams::new(0.72, 0.50).expect("interior point"),
        BalanceParams::new(0.74, 0.74 * 0.74).expect("weight-balanced curve"),
    ]
}

/// `n` random inserts per algorithm and point, all from the same stream.
pub fn run(n: u64, seed: u64, points: &[BalanceParams]) -> Result<Vec<BenchRow>, CliError> {
    let keys: Vec<i64> = generate(GenKind::Random, n, seed)
        .into_iter()
        .filter(|r| r.op == Op::Insert)
        .map(|r| r.key)
        .collect();
    let mut rows = Vec::new();
    for p in points {
        for alg in [Algorithm::BottomUp, Algorithm::TopDown] {
            let mut tree = Tree::new(*p);
            for &k in &keys {
                tree.update(alg, gcbtree::UpdateKind::Insert, &k)?;
            }
            let stats = tree_stats(&tree);
            let size = (stats.n_nodes + 1) as f64;
            let lg = size.log2();
            let ratio = |x: f64| if stats.n_nodes == 0 { 0.0 } else { x };
            rows.push(BenchRow {
                alpha: p.alpha,
                beta: p.beta,
                algorithm: crate::algorithm_name(alg).into(),
                n_nodes: stats.n_nodes,
                height: stats.height,
                height_ratio: ratio(stats.height as f64 / lg),
                path_ratio: ratio(stats.external_path_length as f64 / (size * lg)),
                rotations_per_update: if keys.is_empty() {
                    0.0
                } else {
                    tree.counters().restructurings() as f64 / keys.len() as f64
                },
            });
        }
    }
    Ok(rows)
}
