//! Vectors, balls and spherical-cap volume fractions.
//!
//! Every probability bound in this crate is ultimately a statement about the
//! volume of a spherical cap: the part of a ball cut off by a hyperplane at
//! signed distance `a` from the centre. Two routes to that volume live here:
//!
//! * [`cap_fraction_bound`] is the closed-form upper estimate
//!   `(1/2)(1 - a^2)^(n/2)` that the bounds module relies on;
//! * [`cap_fraction_exact`] evaluates the exact fraction through the
//!   regularized incomplete beta function, `(1/2) I_{1-a^2}((n+1)/2, 1/2)`.
//!
//! The exact route exists so the estimate can be checked, not to replace it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::beta_reg;

/// Relative slack applied to radius comparisons.
pub const RADIUS_TOLERANCE: f64 = 1e-12;

/// Allowed deviation of a [`UnitDirection`] norm from one.
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// A point of the n-dimensional latent space.
///
/// Always has at least one coordinate, and every coordinate is finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some((index, &value)) = coords.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self(coords))
    }

    /// Builds a vector from coordinates produced inside the crate, where
    /// finiteness holds by construction.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        debug_assert!(coords.iter().all(|c| c.is_finite()));
        Self(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self(vec![0.0; dim])
    }

    /// The `axis`-th standard basis vector scaled by `length`.
    pub fn along_axis(dim: usize, axis: usize, length: f64) -> Self {
        let mut v = Self::zeros(dim);
        v.0[axis] = length;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm_slice(&self.0)
    }

    pub fn scaled(&self, factor: f64) -> Vector {
        Vector::from_raw(self.0.iter().map(|c| c * factor).collect())
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        check_dims(self.dim(), other.dim())?;
        Ok(Vector::from_raw(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        check_dims(self.dim(), other.dim())?;
        Ok(Vector::from_raw(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Vector::new(coords)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

/// A vector of unit Euclidean length, used as a hyperplane normal.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "Vec<f64>")]
pub struct UnitDirection(Vector);

impl UnitDirection {
    /// Accepts `v` if its norm is within [`UNIT_TOLERANCE`] of one.
    pub fn new(v: Vector) -> Result<Self> {
        let norm = v.norm();
        if (norm - 1.0).abs() <= UNIT_TOLERANCE {
            Ok(Self(v))
        } else {
            Err(Error::OutOfRange {
                name: "direction norm",
                value: norm,
                range: "1 +/- 1e-12",
            })
        }
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_vector(&self) -> &Vector {
        &self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    /// Signed projection `(w, x)` of a point onto this direction.
    pub fn project(&self, x: &Vector) -> Result<f64> {
        dot(&self.0, x)
    }
}

impl From<UnitDirection> for Vec<f64> {
    fn from(d: UnitDirection) -> Self {
        d.0.into_inner()
    }
}

impl<'de> Deserialize<'de> for UnitDirection {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let v = Vector::deserialize(deserializer)?;
        UnitDirection::new(v).map_err(serde::de::Error::custom)
    }
}

/// The closed ball `B_n(radius, center)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    center: Vector,
    radius: f64,
}

impl Ball {
    pub fn new(center: Vector, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::OutOfRange {
                name: "radius",
                value: radius,
                range: "(0, inf)",
            });
        }
        Ok(Self { center, radius })
    }

    /// The unit ball centred at the origin.
    pub fn unit(dim: usize) -> Self {
        Self {
            center: Vector::zeros(dim),
            radius: 1.0,
        }
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Membership test with [`RADIUS_TOLERANCE`] relative slack on the radius.
    pub fn contains(&self, x: &Vector) -> Result<bool> {
        ball_contains(self, x)
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

#[inline]
pub(crate) fn dot_slice(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm_slice(a: &[f64]) -> f64 {
    dot_slice(a, a).sqrt()
}

/// Euclidean inner product `sum a_i b_i`.
pub fn dot(a: &Vector, b: &Vector) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    Ok(dot_slice(&a.0, &b.0))
}

pub fn norm(a: &Vector) -> f64 {
    a.norm()
}

/// Scales `a` to unit length.
///
/// A zero vector yields [`Error::ZeroMean`]: in this crate the only vectors
/// that get normalized are empirical means.
pub fn normalize(a: &Vector) -> Result<UnitDirection> {
    let n = a.norm();
    if n == 0.0 {
        return Err(Error::ZeroMean);
    }
    let mut v = a.scaled(1.0 / n);
    // One refinement step keeps |‖v‖ - 1| at rounding level for huge dims.
    let m = v.norm();
    if (m - 1.0).abs() > UNIT_TOLERANCE {
        v = v.scaled(1.0 / m);
    }
    UnitDirection::new(v)
}

pub fn ball_contains(b: &Ball, x: &Vector) -> Result<bool> {
    check_dims(b.dim(), x.dim())?;
    let dist = norm_slice(
        &x.0.iter()
            .zip(&b.center.0)
            .map(|(xi, ci)| xi - ci)
            .collect::<Vec<_>>(),
    );
    Ok(dist <= b.radius * (1.0 + RADIUS_TOLERANCE))
}

fn check_cap_args(n: usize, a: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "n",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    crate::error::check_range("a", a, "[0, 1]", |a| (0.0..=1.0).contains(&a))
}

/// Upper estimate `(1/2)(1 - a^2)^(n/2)` of the fraction of the unit n-ball
/// lying at signed distance at least `a` along a fixed axis.
pub fn cap_fraction_bound(n: usize, a: f64) -> Result<f64> {
    check_cap_args(n, a)?;
    let s = (1.0 - a) * (1.0 + a);
    Ok(0.5 * s.powf(n as f64 / 2.0))
}

/// Exact fraction of the unit n-ball volume in the cap `{x : x_1 >= a}`.
pub fn cap_fraction_exact(n: usize, a: f64) -> Result<f64> {
    check_cap_args(n, a)?;
    let s = (1.0 - a) * (1.0 + a);
    Ok(0.5 * beta_reg((n as f64 + 1.0) / 2.0, 0.5, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn dot_examples() {
        assert_eq!(dot(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap(), 0.0);
        assert_eq!(dot(&v(&[1.0, 1.0]), &v(&[1.0, 1.0])).unwrap(), 2.0);
        assert_eq!(dot(&v(&[0.5, 0.5]), &v(&[1.0, 0.0])).unwrap(), 0.5);
        assert_eq!(
            dot(&v(&[1.0]), &v(&[1.0, 2.0])),
            Err(Error::DimensionMismatch {
                expected: 1,
                found: 2
            })
        );
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm(&v(&[3.0, 4.0])), 5.0);
        assert_eq!(norm(&v(&[0.0, 0.0])), 0.0);
        assert_eq!(norm(&v(&[1.0, 1.0, 1.0, 1.0])), 2.0);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&v(&[2.0, 0.0])).unwrap().as_slice(), &[1.0, 0.0]);
        let d = normalize(&v(&[1.0, 1.0])).unwrap();
        assert_abs_diff_eq!(
            d.as_slice()[0],
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            d.as_slice()[1],
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
        assert_eq!(normalize(&v(&[0.0, 0.0])), Err(Error::ZeroMean));
    }

    #[test]
    fn vector_rejects_bad_coordinates() {
        assert_eq!(Vector::new(vec![]), Err(Error::EmptyVector));
        assert!(matches!(
            Vector::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1, .. })
        ));
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn unit_direction_rejects_non_unit() {
        assert!(UnitDirection::new(v(&[1.0, 1.0])).is_err());
        assert!(UnitDirection::new(v(&[0.6, 0.8])).is_ok());
    }

    #[test]
    fn cap_bound_examples() {
        for n in [1, 2, 7, 30] {
            assert_eq!(cap_fraction_bound(n, 1.0).unwrap(), 0.0);
        }
        assert_eq!(cap_fraction_bound(10, 0.0).unwrap(), 0.5);
        assert_abs_diff_eq!(cap_fraction_bound(2, 0.5).unwrap(), 0.375, epsilon = 1e-15);
    }

    #[test]
    fn cap_exact_examples() {
        for n in [1, 2, 5, 30, 300] {
            assert_eq!(cap_fraction_exact(n, 0.0).unwrap(), 0.5);
            assert_eq!(cap_fraction_exact(n, 1.0).unwrap(), 0.0);
        }
        assert_abs_diff_eq!(cap_fraction_exact(1, 0.3).unwrap(), 0.35, epsilon = 1e-12);
        // Disc segment (acos a - a sqrt(1 - a^2)) / pi at a = 0.5, mpmath value.
        assert_abs_diff_eq!(
            cap_fraction_exact(2, 0.5).unwrap(),
            0.195_501_109_477_885_32,
            epsilon = 1e-12
        );
    }

    #[test]
    fn cap_args_validated() {
        assert!(cap_fraction_bound(3, -0.1).is_err());
        assert!(cap_fraction_exact(3, 1.1).is_err());
        assert!(cap_fraction_exact(0, 0.5).is_err());
        assert!(cap_fraction_bound(3, f64::NAN).is_err());
    }

    #[test]
    fn ball_contains_examples() {
        let unit = Ball::unit(2);
        assert!(ball_contains(&unit, &v(&[0.0, 0.0])).unwrap());
        assert!(ball_contains(&unit, &v(&[1.0, 0.0])).unwrap());
        assert!(!ball_contains(&unit, &v(&[1.1, 0.0])).unwrap());
        assert!(ball_contains(&unit, &v(&[1.0])).is_err());
        assert!(Ball::new(v(&[0.0]), 0.0).is_err());
    }

    #[test]
    fn vector_serde_validates() {
        let ok: Vector = serde_json::from_str("[1.0, 2.5]").unwrap();
        assert_eq!(ok.as_slice(), &[1.0, 2.5]);
        assert!(serde_json::from_str::<Vector>("[]").is_err());
        assert!(serde_json::from_str::<UnitDirection>("[1.0, 1.0]").is_err());
    }
}
