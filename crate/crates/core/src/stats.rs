//! Binomial proportion estimates with Wilson score intervals.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::special::beta_reg;

pub const DEFAULT_CONFIDENCE: f64 = 0.99;

/// `successes / trials` with a two-sided Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
}

/// Two-sided standard normal quantile `z` with `P(|Z| <= z) = confidence`.
pub fn z_for_confidence(confidence: f64) -> f64 {
    assert!(
        confidence > 0.0 && confidence < 1.0,
        "confidence must lie in (0, 1)"
    );
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    normal.inverse_cdf(0.5 + confidence / 2.0)
}

impl EstimateWithCI {
    pub fn wilson(successes: u64, trials: u64, confidence: f64) -> Self {
        assert!(trials > 0, "at least one trial is required");
        assert!(successes <= trials);
        let n = trials as f64;
        let p = successes as f64 / n;
        let z = z_for_confidence(confidence);
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        // Pin the degenerate ends: the interval must contain p_hat exactly.
        let ci_low = if successes == 0 {
            0.0
        } else {
            (center - half).clamp(0.0, p)
        };
        let ci_high = if successes == trials {
            1.0
        } else {
            (center + half).clamp(p, 1.0)
        };
        Self {
            successes,
            trials,
            p_hat: p,
            ci_low,
            ci_high,
            confidence,
        }
    }

    pub fn half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

/// Exact (Clopper–Pearson) two-sided interval for `successes / trials`.
///
/// Conservative at every sample size; used where many intervals are read
/// as one family and Wilson's undercoverage near 0 and 1 would add up.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    assert!(
        confidence > 0.0 && confidence < 1.0,
        "confidence must lie in (0, 1)"
    );
    let tail = (1.0 - confidence) / 2.0;
    let (s, f) = (successes as f64, (trials - successes) as f64);
    // Lower end solves P(Bin >= s) = tail, i.e. I_p(s, f + 1) = tail.
    let low = if successes == 0 {
        0.0
    } else {
        solve_increasing(|p| beta_reg(s, f + 1.0, p), tail)
    };
    // Upper end solves P(Bin <= s) = tail, i.e. I_{1-p}(f, s + 1) = tail.
    let high = if successes == trials {
        1.0
    } else {
        1.0 - solve_increasing(|q| beta_reg(f, s + 1.0, q), tail)
    };
    (low, high)
}

/// Confidence of each member of a family of `members` intervals such that
/// all of them hold together with probability at least `confidence`.
pub fn bonferroni(confidence: f64, members: u64) -> f64 {
    1.0 - (1.0 - confidence) / members.max(1) as f64
}

/// Root of an increasing `f` on `[0, 1]` by bisection, to full precision.
fn solve_increasing(f: impl Fn(f64) -> f64, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;
    use approx::assert_abs_diff_eq;

    #[test]
    fn z_values() {
        assert_abs_diff_eq!(
            z_for_confidence(0.95),
            1.959_963_984_540_054,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            z_for_confidence(0.99),
            2.575_829_303_548_901,
            epsilon = 1e-9
        );
    }

    #[test]
    fn known_interval() {
        // 0.95 Wilson interval for 7/10: (0.3968, 0.8922), standard tables.
        let e = EstimateWithCI::wilson(7, 10, 0.95);
        assert_abs_diff_eq!(e.ci_low, 0.396_781, epsilon = 1e-5);
        assert_abs_diff_eq!(e.ci_high, 0.892_208, epsilon = 1e-5);
    }

    #[test]
    fn extremes_contain_estimate() {
        let all = EstimateWithCI::wilson(100, 100, 0.99);
        assert_eq!(all.p_hat, 1.0);
        assert_eq!(all.ci_high, 1.0);
        assert!(all.ci_low < 1.0 && all.ci_low > 0.9);
        let none = EstimateWithCI::wilson(0, 100, 0.99);
        assert_eq!((none.ci_low, none.p_hat), (0.0, 0.0));
        assert!(none.ci_high > 0.0);
        let one = EstimateWithCI::wilson(1, 1, 0.99);
        assert!(one.contains(1.0));
    }

    #[test]
    fn clopper_pearson_known_values() {
        // Closed forms: 0 of n gives upper 1 - (tail)^(1/n); n of n gives lower tail^(1/n).
        let (lo, hi) = clopper_pearson(0, 50, 0.95);
        assert_eq!(lo, 0.0);
        assert_abs_diff_eq!(hi, 1.0 - 0.025_f64.powf(1.0 / 50.0), epsilon = 1e-12);
        let (lo, hi) = clopper_pearson(50, 50, 0.95);
        assert_abs_diff_eq!(lo, 0.025_f64.powf(1.0 / 50.0), epsilon = 1e-12);
        assert_eq!(hi, 1.0);
        // 7/10 at 0.95, roots of the beta tail equations at 30 digits.
        let (lo, hi) = clopper_pearson(7, 10, 0.95);
        assert_abs_diff_eq!(lo, 0.347_547_149_940_003, epsilon = 1e-10);
        assert_abs_diff_eq!(hi, 0.933_260_488_822_266, epsilon = 1e-10);
    }

    #[test]
    fn clopper_pearson_contains_wilson_point_and_is_wider_at_extremes() {
        let (lo, hi) = clopper_pearson(999, 1000, 0.99);
        let w = EstimateWithCI::wilson(999, 1000, 0.99);
        assert!(lo < 0.999 && 0.999 < hi);
        assert!(hi > w.ci_high);
        assert_eq!(bonferroni(0.99, 100), 0.9999);
    }

    #[test]
    fn coverage_of_fixed_p() {
        let p = 0.3;
        let reps = 10_000;
        let trials = 1000;
        let mut rng = Seed::new(2024).rng();
        let covered = (0..reps)
            .filter(|_| {
                let s = (0..trials).filter(|_| rng.uniform() < p).count() as u64;
                EstimateWithCI::wilson(s, trials, 0.99).contains(p)
            })
            .count();
        let coverage = covered as f64 / reps as f64;
        assert!((0.985..=0.995).contains(&coverage), "coverage {coverage}");
    }
}
