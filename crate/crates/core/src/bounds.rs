//! Closed-form probability bounds.
//!
//! Every bound here has the shape `1 - sum_j a_j * q_j^n` with `q_j` a base
//! in `[0, inf)` built from the ball geometry and `n` the latent dimension.
//! When every `q_j < 1` the bound tends to one exponentially fast in `n`;
//! when some `q_j >= 1` or `n` is small the raw value may be negative, and the
//! bound is reported as vacuous rather than silently clamped.
//!
//! Powers are evaluated as `exp(n ln q)` so dimensions up to `10^6` neither
//! underflow nor lose the exponent.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Result};

/// A probability lower bound: the formula's raw value and its clamp to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub raw: f64,
    pub clamped: f64,
    pub vacuous: bool,
}

impl BoundValue {
    pub fn from_raw(raw: f64) -> Self {
        Self {
            raw,
            clamped: raw.clamp(0.0, 1.0),
            vacuous: raw <= 0.0,
        }
    }
}

/// Every constant that appears in the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    /// Latent dimension.
    pub n: usize,
    /// Number of examples.
    pub k: usize,
    /// Radius of the new-class ball.
    pub v: f64,
    /// Density scale of the new-class distribution.
    pub rho: f64,
    /// Density constant of the new-class distribution.
    pub c_new: f64,
    /// Quasi-orthogonality level.
    pub delta: f64,
    /// Shell thickness.
    pub eps: f64,
    /// Density scale of the base distribution on the unit ball.
    pub r: f64,
    /// Density constant of the base distribution.
    pub c_x: f64,
    pub theta: f64,
    /// Margin between `|mean|` and the localization radius of the centre.
    pub delta_cap: f64,
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        check_range("n", self.n as f64, "[1, inf)", |x| x >= 1.0)?;
        check_range("k", self.k as f64, "[1, inf)", |x| x >= 1.0)?;
        check_range("v", self.v, "(0, inf)", |x| x > 0.0)?;
        check_range("rho", self.rho, "(0, inf)", |x| x > 0.0)?;
        check_range("C_new", self.c_new, "(0, inf)", |x| x > 0.0)?;
        check_range("delta", self.delta, "(0, 1)", |x| x > 0.0 && x < 1.0)?;
        check_range("eps", self.eps, "(0, 1)", |x| x > 0.0 && x < 1.0)?;
        check_range("r", self.r, "(0, inf)", |x| x > 0.0)?;
        check_range("C_x", self.c_x, "(0, inf)", |x| x > 0.0)?;
        check_range("theta", self.theta, "(-inf, inf)", |_| true)?;
        check_range("delta_cap", self.delta_cap, "(-inf, inf)", |_| true)?;
        Ok(())
    }
}

/// `base^n` via logarithms; `base <= 0` gives `0`.
pub fn pow_n(base: f64, n: usize) -> f64 {
    if base <= 0.0 {
        0.0
    } else {
        (n as f64 * base.ln()).exp()
    }
}

fn pairs(k: usize) -> f64 {
    let k = k as f64;
    k * (k - 1.0) / 2.0
}

/// Agreement bound for a memorizing patch with threshold `theta` against a
/// base distribution on the unit ball with constants `(c_x, r)`:
/// `1 - (c_x / 2) [r (1 - theta^2)^(1/2)]^n`.
///
/// For `theta > 1` the half-space misses the unit ball and the bound is 1.
/// For `theta < 0` the cap holds more than half the ball; the formula no
/// longer applies and the result is the vacuous `0`.
pub fn pe_bound(c_x: f64, r: f64, theta: f64, n: usize) -> BoundValue {
    if theta > 1.0 {
        return BoundValue::from_raw(1.0);
    }
    if theta < 0.0 {
        return BoundValue::from_raw(0.0);
    }
    let base = r * ((1.0 - theta) * (1.0 + theta)).sqrt();
    BoundValue::from_raw(1.0 - c_x / 2.0 * pow_n(base, n))
}

/// Lower bound on the probability that `k` draws are pairwise
/// quasi-orthogonal about the centre: `|(x_i - c, x_j - c)| <= delta v`.
pub fn lemma1_a1_bound(c_new: f64, k: usize, rho: f64, v: f64, delta: f64, n: usize) -> BoundValue {
    BoundValue::from_raw(1.0 - r_delta(c_new, k, rho, v, delta, n))
}

/// Joint bound for quasi-orthogonality and every draw lying in the outer
/// shell `|x_i - c| >= (1 - eps) v`.
pub fn lemma1_a1a2_bound(
    c_new: f64,
    k: usize,
    rho: f64,
    v: f64,
    delta: f64,
    eps: f64,
    n: usize,
) -> BoundValue {
    BoundValue::from_raw(1.0 - r_eps_delta(c_new, k, rho, v, delta, eps, n))
}

/// `C_new k(k-1)/2 [rho v (1 - delta^2)^(1/2)]^n`.
pub fn r_delta(c_new: f64, k: usize, rho: f64, v: f64, delta: f64, n: usize) -> f64 {
    if k <= 1 {
        return 0.0;
    }
    let base = rho * v * ((1.0 - delta) * (1.0 + delta)).sqrt();
    c_new * pairs(k) * pow_n(base, n)
}

/// `C_new k [rho v (1 - eps)]^n + r_delta(...)`.
pub fn r_eps_delta(c_new: f64, k: usize, rho: f64, v: f64, delta: f64, eps: f64, n: usize) -> f64 {
    c_new * k as f64 * pow_n(rho * v * (1.0 - eps), n) + r_delta(c_new, k, rho, v, delta, n)
}

/// Interval `[L, U]` for the squared distance between the empirical mean
/// and the centre:
/// `L = (1-eps)^2 v^2 / k - (k-1)/k v delta`, `U = v^2 / k + (k-1)/k v delta`.
/// `L` may be negative, in which case the lower constraint is empty.
pub fn lemma2_interval(k: usize, v: f64, delta: f64, eps: f64) -> (f64, f64) {
    let kf = k as f64;
    let cross = (kf - 1.0) / kf * v * delta;
    let lower = (1.0 - eps).powi(2) * v * v / kf - cross;
    let upper = v * v / kf + cross;
    (lower, upper)
}

/// `(1 - R_{eps,delta}, 1 - R_delta)`: bounds for `L <= |mean - c|^2 <= U`
/// and for the upper constraint alone.
pub fn lemma2_prob_bounds(
    c_new: f64,
    k: usize,
    rho: f64,
    v: f64,
    delta: f64,
    eps: f64,
    n: usize,
) -> (BoundValue, BoundValue) {
    (
        BoundValue::from_raw(1.0 - r_eps_delta(c_new, k, rho, v, delta, eps, n)),
        BoundValue::from_raw(1.0 - r_delta(c_new, k, rho, v, delta, n)),
    )
}

/// `|mean| - (v^2/k + (k-1)/k v delta)^(1/2)`. May be nonpositive.
pub fn delta_cap(norm_mean: f64, k: usize, v: f64, delta: f64) -> f64 {
    let (_, upper) = lemma2_interval(k, v, delta, 0.0);
    norm_mean - upper.sqrt()
}

/// The two factors of the generalization bound, before combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem2Factors {
    /// `1 - (C_new / 2) [rho (v^2 - (delta_cap - theta)^2)^(1/2)]^n`.
    pub cap: BoundValue,
    /// `1 - C_new k(k-1)/2 [rho v (1 - delta^2)^(1/2)]^n`.
    pub centering: BoundValue,
}

pub fn theorem2_factors(inp: &BoundInputs) -> Result<Theorem2Factors> {
    inp.validate()?;
    let lo = (inp.delta_cap - inp.v).max(0.0);
    check_range("delta_cap", inp.delta_cap, "(0, inf)", |d| d > 0.0)?;
    check_range(
        "theta",
        inp.theta,
        "[max(delta_cap - v, 0), delta_cap]",
        |t| lo <= t && t <= inp.delta_cap,
    )?;
    let gap = inp.delta_cap - inp.theta;
    let chord2 = ((inp.v - gap) * (inp.v + gap)).max(0.0);
    let cap = 1.0 - inp.c_new / 2.0 * pow_n(inp.rho * chord2.sqrt(), inp.n);
    let centering = 1.0 - r_delta(inp.c_new, inp.k, inp.rho, inp.v, inp.delta, inp.n);
    Ok(Theorem2Factors {
        cap: BoundValue::from_raw(cap),
        centering: BoundValue::from_raw(centering),
    })
}

/// `(p_n, p_e)` for a generalizing patch.
///
/// `p_n` is the product of the two factors. When either factor is vacuous the
/// product is meaningless, so `p_n.raw` is the smaller factor (nonpositive)
/// and `p_n.clamped` is `0`.
pub fn theorem2_bounds(inp: &BoundInputs) -> Result<(BoundValue, BoundValue)> {
    let f = theorem2_factors(inp)?;
    let raw = if f.cap.vacuous || f.centering.vacuous {
        f.cap.raw.min(f.centering.raw)
    } else {
        f.cap.raw * f.centering.raw
    };
    let p_n = BoundValue::from_raw(raw);
    debug_assert_eq!(p_n.clamped, f.cap.clamped * f.centering.clamped);
    Ok((p_n, pe_bound(inp.c_x, inp.r, inp.theta, inp.n)))
}
