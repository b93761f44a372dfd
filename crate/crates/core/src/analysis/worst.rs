//! The worst-case family `T(s)`: trees that are as deep and as long as the
//! balance conditions allow, used to show the height and path-length bounds
//! are tight.

use std::collections::HashMap;

use serde::Serialize;

use crate::analysis::stats::tree_stats;
use crate::error::{Result, TreeError};
use crate::params::{domain_check, BalanceParams};
use crate::tree::{Shape, Tree};

fn check_region(params: &BalanceParams) -> Result<()> {
    if domain_check(params.alpha, params.beta).in_d_double_prime {
        Ok(())
    } else {
        Err(TreeError::Domain {
            alpha: params.alpha,
            beta: params.beta,
            region: "D'' (2/3 <= beta/alpha <= alpha < 3/4)",
        })
    }
}

/// Shape of `T(s)`, a tree of weight `s`.
pub fn worst_case_shape(s: u64, params: &BalanceParams) -> Result<Shape> {
    if s == 0 {
        return Err(TreeError::Precondition("worst-case tree needs weight >= 1".into()));
    }
    check_region(params)?;
    let ratio = params.beta / params.alpha;
    Ok(build(s, params.alpha, ratio))
}

fn build(s: u64, alpha: f64, ratio: f64) -> Shape {
    match s {
        1 => Shape::Empty,
        2 => Shape::leaf(),
        _ => {
            let heavy = (alpha * s as f64).floor() as u64;
            let light = s - heavy;
            let inner = (ratio * heavy as f64).floor() as u64;
            let outer = heavy - inner;
            Shape::node(build(light, alpha, ratio), Shape::node(build(inner, alpha, ratio), build(outer, alpha, ratio)))
        }
    }
}

/// `T(s)` with keys `1..s-1` in order.
pub fn worst_case_tree(s: u64, params: &BalanceParams) -> Result<Tree<i64>> {
    let shape = worst_case_shape(s, params)?;
    Ok(Tree::from_shape(*params, &shape))
}

/// Smallest external path length of any tree of weight `s`.
pub fn min_external_path(s: u64) -> u64 {
    fn go(s: u64, memo: &mut HashMap<u64, u64>) -> u64 {
        if s <= 1 {
            return 0;
        }
        if let Some(&v) = memo.get(&s) {
            return v;
        }
        let v = s + go(s / 2, memo) + go(s.div_ceil(2), memo);
        memo.insert(s, v);
        v
    }
    go(s, &mut HashMap::new())
}

/// Lower threshold for the height of `T(s)`.
pub fn height_threshold(s: u64, params: &BalanceParams) -> f64 {
    -2.0 * (s as f64).log2() / params.beta.log2() - 7.0
}

/// Lower threshold for the external path length of `T(s)`.
pub fn path_threshold(s: u64, params: &BalanceParams) -> f64 {
    let s = s as f64;
    s * s.log2() / params.entropy_delta - 4.0 * (s - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TightnessReport {
    pub weight: u64,
    pub height: i64,
    pub height_threshold: f64,
    pub external_path_length: u64,
    pub path_threshold: f64,
    pub height_ok: bool,
    pub path_ok: bool,
}

/// Builds `T(s)` and compares its height and path length with the thresholds.
pub fn tightness(s: u64, params: &BalanceParams) -> Result<TightnessReport> {
    let tree = worst_case_tree(s, params)?;
    let stats = tree_stats(&tree);
    let height_threshold = height_threshold(s, params);
    let path_threshold = path_threshold(s, params);
    Ok(TightnessReport {
        weight: s,
        height: stats.height,
        height_threshold,
        external_path_length: stats.external_path_length,
        path_threshold,
        height_ok: stats.height as f64 >= height_threshold,
        path_ok: stats.external_path_length as f64 >= path_threshold,
    })
}
