//! Distributions on balls with certified density bounds.
//!
//! Each [`BallDistribution`] carries constants `(C, scale)` such that its
//! density satisfies
//!
//! ```text
//! p(x) <= C / V_n(B_n) * scale^n     for every x in the support
//! ```
//!
//! which is exactly the non-degeneracy condition the bounds module assumes.
//! Sampling is rejection-free: a uniform direction times a radius drawn by
//! inverting the radial CDF.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Result};
use crate::geometry::{Ball, UnitDirection, Vector};
use crate::rng::{Seed, StreamRng};

/// Radial profile of a ball distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// Constant density on the ball.
    UniformBall,
    /// Density proportional to `|x - c|^alpha`, heaviest at the boundary.
    RadialPower { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallDistribution {
    support: Ball,
    shape: Shape,
}

impl BallDistribution {
    pub fn new(support: Ball, shape: Shape) -> Result<Self> {
        if let Shape::RadialPower { alpha } = shape {
            check_range("alpha", alpha, "[0, inf)", |a| a >= 0.0)?;
        }
        Ok(Self { support, shape })
    }

    pub fn uniform(support: Ball) -> Self {
        Self {
            support,
            shape: Shape::UniformBall,
        }
    }

    pub fn uniform_unit(dim: usize) -> Self {
        Self::uniform(Ball::unit(dim))
    }

    pub fn support(&self) -> &Ball {
        &self.support
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    /// Exponent `m` of the radial CDF `(t / v)^m`.
    fn radial_exponent(&self) -> f64 {
        let n = self.dim() as f64;
        match self.shape {
            Shape::UniformBall => n,
            Shape::RadialPower { alpha } => n + alpha,
        }
    }

    /// Constants `(C, scale)` with `p(x) <= C / V_n(B_n) * scale^n`.
    ///
    /// The uniform density on a radius-`v` ball is `1 / (V_n(B_n) v^n)`,
    /// hence `(1, 1/v)`. The radial-power density normalizes to
    /// `(n + alpha) / (n V_n(B_n) v^(n + alpha)) |x - c|^alpha`, whose maximum on
    /// the sphere `|x - c| = v` gives `C = (n + alpha) / n` with the same scale.
    pub fn certified_constants(&self) -> (f64, f64) {
        let scale = 1.0 / self.support.radius();
        let n = self.dim() as f64;
        match self.shape {
            Shape::UniformBall => (1.0, scale),
            Shape::RadialPower { alpha } => ((n + alpha) / n, scale),
        }
    }

    /// Ratio of the density at distance `t` from the centre to the uniform
    /// density on the same support.
    pub fn density_ratio_to_uniform(&self, t: f64) -> f64 {
        let v = self.support.radius();
        if t > v {
            return 0.0;
        }
        match self.shape {
            Shape::UniformBall => 1.0,
            Shape::RadialPower { alpha } => {
                let n = self.dim() as f64;
                (n + alpha) / n * (t / v).powf(alpha)
            }
        }
    }

    /// Writes one draw into `out`, which must have length `dim()`.
    pub fn sample_into(&self, rng: &mut StreamRng, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim());
        loop {
            rng.fill_gaussian(out);
            let len = out.iter().map(|x| x * x).sum::<f64>().sqrt();
            if len > 0.0 {
                let radius =
                    self.support.radius() * rng.uniform_open().powf(1.0 / self.radial_exponent());
                let f = radius / len;
                for (x, c) in out.iter_mut().zip(self.support.center().as_slice()) {
                    *x = c + *x * f;
                }
                return;
            }
        }
    }

    pub fn sample_one(&self, rng: &mut StreamRng) -> Vector {
        let mut buf = vec![0.0; self.dim()];
        self.sample_into(rng, &mut buf);
        Vector::from_raw(buf)
    }
}

/// `count` i.i.d. draws from `d`, reproducible from `seed`.
pub fn sample(d: &BallDistribution, seed: Seed, count: usize) -> Vec<Vector> {
    let mut rng = seed.rng();
    (0..count).map(|_| d.sample_one(&mut rng)).collect()
}

/// Like [`sample`], but every coordinate is replaced by its absolute value.
///
/// For a ball centred at the origin this is the original law restricted to
/// the nonnegative orthant (each orthant is an isometric copy), so pairwise
/// inner products are nonnegative.
pub fn sample_orthant(d: &BallDistribution, rng: &mut StreamRng, out: &mut [f64]) {
    d.sample_into(rng, out);
    for x in out {
        *x = x.abs();
    }
}

pub fn certified_constants(d: &BallDistribution) -> (f64, f64) {
    d.certified_constants()
}

/// Uniform direction on the unit sphere in `R^n`: a normalized standard
/// Gaussian vector.
pub fn sample_unit_sphere_direction(n: usize, seed: Seed) -> UnitDirection {
    assert!(n >= 1, "dimension must be positive");
    let mut rng = seed.rng();
    unit_direction_from(&mut rng, n)
}

pub(crate) fn unit_direction_from(rng: &mut StreamRng, n: usize) -> UnitDirection {
    let mut buf = vec![0.0; n];
    loop {
        rng.fill_gaussian(&mut buf);
        let v = Vector::from_raw(buf.clone());
        if let Ok(d) = crate::geometry::normalize(&v) {
            return d;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ball(center: Vec<f64>, r: f64) -> Ball {
        Ball::new(Vector::new(center).unwrap(), r).unwrap()
    }

    #[test]
    fn constants_examples() {
        assert_eq!(
            BallDistribution::uniform_unit(7).certified_constants(),
            (1.0, 1.0)
        );
        let half = BallDistribution::uniform(ball(vec![0.0; 3], 0.5));
        assert_eq!(half.certified_constants(), (1.0, 2.0));
        let radial =
            BallDistribution::new(Ball::unit(4), Shape::RadialPower { alpha: 2.0 }).unwrap();
        assert_eq!(radial.certified_constants(), (1.5, 1.0));
    }

    #[test]
    fn radial_constant_matches_quadrature() {
        // Volume-weighted mean of t^alpha over the unit ball is the
        // normalizer: integral_0^1 t^alpha n t^(n-1) dt, by Simpson's rule.
        let (n, alpha) = (4.0_f64, 2.0_f64);
        let m = 2000;
        let h = 1.0 / m as f64;
        let f = |t: f64| t.powf(alpha) * n * t.powf(n - 1.0);
        let mut s = f(0.0) + f(1.0);
        for i in 1..m {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        let normalizer = s * h / 3.0;
        let max_ratio = 1.0 / normalizer;
        let d = BallDistribution::new(Ball::unit(4), Shape::RadialPower { alpha }).unwrap();
        assert_abs_diff_eq!(d.certified_constants().0, max_ratio, epsilon = 1e-10);
        assert_abs_diff_eq!(d.density_ratio_to_uniform(1.0), max_ratio, epsilon = 1e-10);
    }

    #[test]
    fn negative_alpha_rejected() {
        assert!(BallDistribution::new(Ball::unit(2), Shape::RadialPower { alpha: -1.0 }).is_err());
    }

    #[test]
    fn samples_stay_in_support() {
        let dists = [
            BallDistribution::uniform(ball(vec![2.0, -1.0, 0.5], 0.3)),
            BallDistribution::uniform_unit(1),
            BallDistribution::new(ball(vec![0.0; 20], 3.0), Shape::RadialPower { alpha: 5.0 })
                .unwrap(),
        ];
        for (i, d) in dists.iter().enumerate() {
            for x in sample(d, Seed::new(i as u64), 5000) {
                assert!(d.support().contains(&x).unwrap());
            }
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let d = BallDistribution::uniform_unit(5);
        let a = sample(&d, Seed::with_stream(3, 9), 100);
        let b = sample(&d, Seed::with_stream(3, 9), 100);
        let bits = |xs: &[Vector]| -> Vec<u64> {
            xs.iter()
                .flat_map(|v| v.as_slice().iter().map(|c| c.to_bits()))
                .collect()
        };
        assert_eq!(bits(&a), bits(&b));
        assert_ne!(bits(&a), bits(&sample(&d, Seed::with_stream(3, 10), 100)));
    }

    #[test]
    fn one_dimensional_mean() {
        let d = BallDistribution::uniform_unit(1);
        let mut rng = Seed::new(1).rng();
        let n = 1_000_000;
        let mut buf = [0.0];
        let mut sum = 0.0;
        for _ in 0..n {
            d.sample_into(&mut rng, &mut buf);
            sum += buf[0];
        }
        assert!((sum / n as f64).abs() < 0.005);
    }

    #[test]
    fn radius_cdf_ks() {
        // Uniform ball: P(|x| <= t) = t^n.
        let d = BallDistribution::uniform_unit(5);
        let mut rng = Seed::new(2).rng();
        let n = 1_000_000;
        let mut buf = [0.0; 5];
        let mut radii: Vec<f64> = (0..n)
            .map(|_| {
                d.sample_into(&mut rng, &mut buf);
                buf.iter().map(|x| x * x).sum::<f64>().sqrt()
            })
            .collect();
        radii.sort_by(f64::total_cmp);
        let ks = radii
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let cdf = t.powi(5);
                (cdf - i as f64 / n as f64)
                    .abs()
                    .max(((i + 1) as f64 / n as f64 - cdf).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.002, "KS statistic {ks}");
    }

    #[test]
    fn radial_power_radius_cdf() {
        // P(|x| <= t) = t^(n + alpha) for the radial-power law.
        let d = BallDistribution::new(Ball::unit(3), Shape::RadialPower { alpha: 2.0 }).unwrap();
        let xs = sample(&d, Seed::new(5), 200_000);
        for t in [0.5, 0.8, 0.95] {
            let frac = xs.iter().filter(|x| x.norm() <= t).count() as f64 / xs.len() as f64;
            let want = f64::powi(t, 5);
            assert!((frac - want).abs() < 0.005, "t={t}: {frac} vs {want}");
        }
    }

    #[test]
    fn shell_density_respects_certified_bound() {
        for d in [
            BallDistribution::uniform(ball(vec![0.0; 6], 2.0)),
            BallDistribution::new(ball(vec![0.0; 6], 2.0), Shape::RadialPower { alpha: 3.0 })
                .unwrap(),
        ] {
            let n = d.dim() as i32;
            let v = d.support().radius();
            let (c, scale) = d.certified_constants();
            let bound_ratio = c * (scale * v).powi(n);
            let count = 200_000;
            let shells = 20;
            let mut hist = vec![0usize; shells];
            for x in sample(&d, Seed::new(8), count) {
                let t = x.norm() / v;
                hist[((t * shells as f64) as usize).min(shells - 1)] += 1;
            }
            for (i, &h) in hist.iter().enumerate() {
                let lo = i as f64 / shells as f64;
                let hi = (i + 1) as f64 / shells as f64;
                let vol = hi.powi(n) - lo.powi(n);
                let p = h as f64 / count as f64;
                let ratio = p / vol;
                let se = (p * (1.0 - p) / count as f64).sqrt() / vol;
                assert!(
                    ratio <= bound_ratio + 3.0 * se,
                    "shell {i}: {ratio} > {bound_ratio}"
                );
            }
        }
    }

    #[test]
    fn stream_independence() {
        let d = BallDistribution::uniform_unit(3);
        let a = sample(&d, Seed::with_stream(4, 0), 100_000);
        let b = sample(&d, Seed::with_stream(4, 1), 100_000);
        let xa: Vec<f64> = a.iter().map(|v| v.as_slice()[0]).collect();
        let xb: Vec<f64> = b.iter().map(|v| v.as_slice()[0]).collect();
        let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
        let (ma, mb) = (mean(&xa), mean(&xb));
        let cov: f64 = xa.iter().zip(&xb).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = xa.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = xb.iter().map(|y| (y - mb).powi(2)).sum();
        let corr = cov / (va * vb).sqrt();
        assert!(corr.abs() < 0.01, "correlation {corr}");
    }

    #[test]
    fn sphere_direction_properties() {
        for s in 0..100 {
            let d = sample_unit_sphere_direction(17, Seed::new(s));
            assert!((d.as_vector().norm() - 1.0).abs() <= 1e-12);
        }
        let mut rng = Seed::new(3).rng();
        let n = 1_000_000;
        let (mut sx, mut sy) = (0.0, 0.0);
        for _ in 0..n {
            let d = unit_direction_from(&mut rng, 2);
            sx += d.as_slice()[0];
            sy += d.as_slice()[1];
        }
        assert!((sx / n as f64).abs() < 0.005);
        assert!((sy / n as f64).abs() < 0.005);
    }

    #[test]
    fn sphere_cap_area_n3() {
        // Archimedes: area fraction of {x_1 >= a} on S^2 is (1 - a) / 2.
        let mut rng = Seed::new(12).rng();
        let n = 1_000_000;
        let hits = (0..n)
            .filter(|_| unit_direction_from(&mut rng, 3).as_slice()[0] >= 0.5)
            .count();
        let frac = hits as f64 / n as f64;
        assert!((frac - 0.25).abs() < 0.003, "{frac}");
    }

    #[test]
    fn orthant_samples_are_nonnegative() {
        let d = BallDistribution::uniform_unit(8);
        let mut rng = Seed::new(1).rng();
        let mut buf = vec![0.0; 8];
        for _ in 0..1000 {
            sample_orthant(&d, &mut rng, &mut buf);
            assert!(buf.iter().all(|&x| x >= 0.0));
            assert!(buf.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-12);
        }
    }
}
