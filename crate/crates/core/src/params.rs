//! Parameter domains and every constant derived from `(alpha, beta)`.
//!
//! `alpha` bounds the weight of a child relative to its parent, `beta` the
//! weight of a grandchild. The update algorithms are correct on
//! `1/sqrt(2) <= alpha < 3/4`, `B(alpha) <= beta <= alpha^2`.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use crate::error::{Result, TreeError};

/// Slack used when testing membership on the closed edges of a region, so
/// that values such as `0.74 * 0.74` typed by hand are not rejected.
pub const DOMAIN_EPS: f64 = 1e-12;

const ALPHA_BULLET: f64 = 19.0 / 24.0;

/// Lower end of the admissible `beta` range for a given `alpha`.
pub fn script_b(alpha: f64) -> f64 {
    ((1.0 + 4.0 * alpha).sqrt() - 1.0) / 2.0
}

/// Shannon's binary entropy in bits. `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// `R(t) = min(-t, t - 1)`: the offset turning a plain threshold `t|n|` into
/// its robust counterpart `t|n| + R(t)`.
pub fn robustness_offset(t: f64) -> f64 {
    (-t).min(t - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DomainMembership {
    pub in_d: bool,
    pub in_d_prime: bool,
    pub in_d_double_prime: bool,
}

/// Membership of `(alpha, beta)` in the three parameter regions.
pub fn domain_check(alpha: f64, beta: f64) -> DomainMembership {
    let e = DOMAIN_EPS;
    let in_d = (0.5 - e..=1.0 + e).contains(&alpha)
        && beta >= alpha / 2.0 - e
        && beta <= alpha * alpha + e
        && !(alpha >= 1.0 - e && beta >= 1.0 - e);
    let in_d_prime = alpha >= FRAC_1_SQRT_2 - e
        && alpha < 0.75
        && beta >= script_b(alpha) - e
        && beta <= alpha * alpha + e;
    let gamma = beta / alpha;
    let in_d_double_prime = gamma >= 2.0 / 3.0 - e && gamma <= alpha + e && alpha < 0.75;
    DomainMembership {
        in_d,
        in_d_prime,
        in_d_double_prime,
    }
}

/// User parameters together with all derived constants.
///
/// * `alpha_hat_c` is the constant for which standalone child-balancing with
///   `w = x = 0` keeps affected nodes `alpha_hat_c`-child-balanced.
/// * `alpha_hat`, `beta_hat` are the target balances of nodes touched by the
///   combined (CGC / RCGC) routines; every update algorithm uses these.
/// * `delta_gc = min(alpha_hat, beta_hat / alpha)`.
/// * `entropy_delta` is the denominator of the external path length bound.
/// * `delta_potential` is half the margin `min(alpha - alpha_hat, beta - beta_hat, 1/62)`;
///   rotating calls on large subtrees lower the potential by at least this much.
///   When `beta = alpha^2` the grandchild margin is dropped.
///
/// The rotation bound degrades like `O(1/eta + 1/epsilon)`, see [`BalanceParams::eta`]
/// and [`BalanceParams::epsilon`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BalanceParams {
    pub alpha: f64,
    pub beta: f64,
    pub script_b: f64,
    pub alpha_hat_c: f64,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub delta_gc: f64,
    pub alpha_bullet: f64,
    pub entropy_delta: f64,
    pub delta_potential: f64,
}

impl BalanceParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() || !domain_check(alpha, beta).in_d_prime {
            return Err(TreeError::Domain {
                alpha,
                beta,
                region: "D' (1/sqrt(2) <= alpha < 3/4, B(alpha) <= beta <= alpha^2)",
            });
        }
        let params = Self::derive(alpha, beta);
        params.check_invariants();
        if params.delta_potential <= DOMAIN_EPS {
            log::warn!(
                "(alpha={alpha}, beta={beta}) sits on the boundary of D'; \
                 the amortized rotation bound degenerates here"
            );
        }
        Ok(params)
    }

    /// The critical point `(1/sqrt(2), B(1/sqrt(2)))`, where the height and
    /// path-length coefficients are smallest.
    pub fn critical() -> Self {
        Self::new(FRAC_1_SQRT_2, script_b(FRAC_1_SQRT_2)).expect("critical point lies in D'")
    }

    /// `(alpha_c + x, beta_c + x)`, the approach to the critical point used to
    /// state the rotation bound `30 (1 + 28/x) k`.
    pub fn near_critical(x: f64) -> Result<Self> {
        Self::new(FRAC_1_SQRT_2 + x, script_b(FRAC_1_SQRT_2) + x)
    }

    fn derive(alpha: f64, beta: f64) -> Self {
        let root = ((1.0 - alpha) * (5.0 - alpha)).sqrt();
        let alpha_hat_c = (1.0 + alpha - root) / (2.0 * (2.0 * alpha - 1.0));
        let alpha_hat =
            (1.0 - 2.0 * alpha + 6.0 * alpha * alpha - root) / (5.0 * (2.0 * alpha - 1.0));
        let beta_hat = alpha
            * (1.0 + alpha
                - ((1.0 - alpha).powi(2) + 4.0 * alpha * (alpha * alpha - beta)).sqrt())
            / (2.0 * (1.0 - alpha * alpha + beta));
        let delta_gc = alpha_hat.min(beta_hat / alpha);
        let entropy_delta =
            (binary_entropy(alpha) + alpha * binary_entropy(beta / alpha)) / (1.0 + alpha);
        let on_bb_curve = (alpha * alpha - beta).abs() <= DOMAIN_EPS;
        let margin = if on_bb_curve {
            (alpha - alpha_hat).min(1.0 / 62.0)
        } else {
            (alpha - alpha_hat).min(beta - beta_hat).min(1.0 / 62.0)
        };
        BalanceParams {
            alpha,
            beta,
            script_b: script_b(alpha),
            alpha_hat_c,
            alpha_hat,
            beta_hat,
            delta_gc,
            alpha_bullet: ALPHA_BULLET,
            entropy_delta,
            delta_potential: margin.max(0.0) / 2.0,
        }
    }

    fn check_invariants(&self) {
        let tol = 1e-9;
        assert!(
            self.alpha_hat_c >= FRAC_1_SQRT_2 - tol && self.alpha_hat_c <= self.alpha + tol,
            "alpha_hat_c out of range: {self:?}"
        );
        assert!(
            self.beta_hat > 0.25 && self.beta_hat <= self.beta + tol,
            "beta_hat out of range: {self:?}"
        );
        assert!(self.delta_gc <= self.alpha_hat + tol, "delta_gc > alpha_hat: {self:?}");
        assert!(self.delta_potential >= 0.0);
        assert!(
            self.entropy_delta >= 0.8 - tol && self.entropy_delta <= 1.0 + tol,
            "entropy delta out of range: {self:?}"
        );
    }

    /// `alpha - 1/sqrt(2)`.
    pub fn eta(&self) -> f64 {
        self.alpha - FRAC_1_SQRT_2
    }

    /// Distance of `beta` to the edges of its admissible range, or 1 on the
    /// weight-balanced curve `beta = alpha^2`.
    pub fn epsilon(&self) -> f64 {
        if (self.alpha * self.alpha - self.beta).abs() <= DOMAIN_EPS {
            1.0
        } else {
            (self.beta - self.script_b).min(self.alpha * self.alpha - self.beta)
        }
    }

    /// The margin `min(alpha - alpha_hat, beta - beta_hat, 1/62)`, i.e. twice
    /// `delta_potential`.
    pub fn potential_margin(&self) -> f64 {
        2.0 * self.delta_potential
    }
}

impl Default for BalanceParams {
    /// `(0.72, 0.50)`, an interior point of D'.
    fn default() -> Self {
        Self::new(0.72, 0.50).expect("default parameters lie in D'")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bounds {
    pub height: f64,
    pub external_path_length: f64,
}

/// Worst-case height and external path length of a tree with `n_nodes` nodes.
pub fn theoretical_bounds(n_nodes: u64, params: &BalanceParams) -> Bounds {
    let size = (n_nodes + 1) as f64;
    let lg = size.log2();
    Bounds {
        height: -2.0 * lg / params.beta.log2(),
        external_path_length: size * lg / params.entropy_delta,
    }
}
