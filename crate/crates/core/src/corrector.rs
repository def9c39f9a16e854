//! Hyperplane patches that teach an existing classifier a new label.
//!
//! A classifier is viewed as `g ∘ f`: a feature map `f` into a latent space
//! followed by a decision rule `g` on latent points. A [`Patch`] leaves `f`
//! alone and wraps `g`:
//!
//! ```text
//! g*(x) = new_label   if (w, x) - theta >= 0
//!         g(x)        otherwise
//! ```
//!
//! where `w` is the unit direction of the empirical mean of the few latent
//! examples. [`build_few_patch`] picks `theta` as the smallest projection of
//! the examples (so every example is memorized), [`build_from_few_patch`]
//! picks it inside an interval that generalizes to the whole class.

use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{check_range, Error, Result};
use crate::geometry::{dot_slice, normalize, UnitDirection, Vector};

/// A class label. Compared by identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(pub String);

impl Label {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// The decision rule `g` acting on latent points. Must be deterministic.
pub trait BaseClassifier {
    fn classify(&self, x: &[f64]) -> Result<&Label>;
}

/// Assigns one label to every point.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantLabel(pub Label);

impl BaseClassifier for ConstantLabel {
    fn classify(&self, _x: &[f64]) -> Result<&Label> {
        Ok(&self.0)
    }
}

/// Assigns the label of the closest centroid; ties go to the earliest one.
#[derive(Debug, Clone, PartialEq)]
pub struct NearestCentroid {
    centroids: Vec<(Vector, Label)>,
}

impl NearestCentroid {
    pub fn new(centroids: Vec<(Vector, Label)>) -> Result<Self> {
        let first = centroids.first().ok_or(Error::EmptyInput(
            "nearest-centroid classifier needs a centroid",
        ))?;
        let dim = first.0.dim();
        if let Some((c, _)) = centroids.iter().find(|(c, _)| c.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: c.dim(),
            });
        }
        Ok(Self { centroids })
    }
}

impl BaseClassifier for NearestCentroid {
    fn classify(&self, x: &[f64]) -> Result<&Label> {
        let dim = self.centroids[0].0.dim();
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: x.len(),
            });
        }
        let mut best = (f64::INFINITY, &self.centroids[0].1);
        for (c, label) in &self.centroids {
            let d2: f64 = c
                .as_slice()
                .iter()
                .zip(x)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if d2 < best.0 {
                best = (d2, label);
            }
        }
        Ok(best.1)
    }
}

/// How a patch was built, with the inputs that determine its threshold.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// Threshold is the minimum projection of the examples.
    FewExamples { k: usize },
    /// Threshold lies in `[theta_lo, theta_hi] = [max(delta_cap - v, 0), delta_cap]`.
    FromFewExamples {
        k: usize,
        v: f64,
        delta: f64,
        delta_cap: f64,
        theta_lo: f64,
        theta_hi: f64,
    },
}

impl Provenance {
    pub fn k(&self) -> usize {
        match *self {
            Provenance::FewExamples { k } | Provenance::FromFewExamples { k, .. } => k,
        }
    }
}

/// A half-space override `(direction, x) - theta >= 0  =>  new_label`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PatchRecord", into = "PatchRecord")]
pub struct Patch {
    direction: UnitDirection,
    theta: f64,
    new_label: Label,
    provenance: Provenance,
}

impl Patch {
    fn validated(self) -> Result<Self> {
        check_range("theta", self.theta, "[-1, inf)", |t| t >= -1.0)?;
        match self.provenance {
            Provenance::FewExamples { k } => {
                check_range("k", k as f64, "[1, inf)", |k| k >= 1.0)?;
                check_range("theta", self.theta, "[0, inf)", |t| t >= 0.0)?;
            }
            Provenance::FromFewExamples {
                k,
                v,
                delta,
                delta_cap,
                theta_lo,
                theta_hi,
            } => {
                check_range("k", k as f64, "[1, inf)", |k| k >= 1.0)?;
                check_range("v", v, "(0, inf)", |v| v > 0.0)?;
                check_range("delta", delta, "(0, 1)", |d| d > 0.0 && d < 1.0)?;
                check_range("delta_cap", delta_cap, "(0, inf)", |d| d > 0.0)?;
                check_range("theta_lo", theta_lo, "max(delta_cap - v, 0)", |t| {
                    t == (delta_cap - v).max(0.0)
                })?;
                check_range("theta_hi", theta_hi, "delta_cap", |t| t == delta_cap)?;
                check_range("theta", self.theta, "[theta_lo, theta_hi]", |t| {
                    theta_lo <= t && t <= theta_hi
                })?;
            }
        }
        Ok(self)
    }

    pub fn direction(&self) -> &UnitDirection {
        &self.direction
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn new_label(&self) -> &Label {
        &self.new_label
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn dim(&self) -> usize {
        self.direction.dim()
    }

    /// `(direction, x) - theta`; the patch fires when this is nonnegative.
    pub fn margin(&self, x: &[f64]) -> f64 {
        dot_slice(self.direction.as_slice(), x) - self.theta
    }

    pub fn fires(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.margin(x) >= 0.0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("patch serialization is infallible")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

/// Wire form of a patch.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatchRecord {
    dim: usize,
    direction: Vec<f64>,
    theta: f64,
    new_label: Label,
    provenance: ProvenanceTag,
    params: PatchParams,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
enum ProvenanceTag {
    FewExamples,
    FromFewExamples,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatchParams {
    k: usize,
    v: Option<f64>,
    delta: Option<f64>,
    delta_cap: Option<f64>,
    theta_lo: Option<f64>,
    theta_hi: Option<f64>,
}

impl From<Patch> for PatchRecord {
    fn from(p: Patch) -> Self {
        let dim = p.dim();
        let (provenance, params) = match p.provenance {
            Provenance::FewExamples { k } => (
                ProvenanceTag::FewExamples,
                PatchParams {
                    k,
                    v: None,
                    delta: None,
                    delta_cap: None,
                    theta_lo: None,
                    theta_hi: None,
                },
            ),
            Provenance::FromFewExamples {
                k,
                v,
                delta,
                delta_cap,
                theta_lo,
                theta_hi,
            } => (
                ProvenanceTag::FromFewExamples,
                PatchParams {
                    k,
                    v: Some(v),
                    delta: Some(delta),
                    delta_cap: Some(delta_cap),
                    theta_lo: Some(theta_lo),
                    theta_hi: Some(theta_hi),
                },
            ),
        };
        PatchRecord {
            dim,
            direction: p.direction.into(),
            theta: p.theta,
            new_label: p.new_label,
            provenance,
            params,
        }
    }
}

impl TryFrom<PatchRecord> for Patch {
    type Error = String;

    fn try_from(r: PatchRecord) -> std::result::Result<Self, String> {
        if r.direction.len() != r.dim {
            return Err(format!(
                "dim is {} but direction has {} entries",
                r.dim,
                r.direction.len()
            ));
        }
        let direction = Vector::new(r.direction)
            .and_then(UnitDirection::new)
            .map_err(|e| e.to_string())?;
        let missing = |name: &str| format!("params.{name} is required for FromFewExamples");
        let provenance = match r.provenance {
            ProvenanceTag::FewExamples => Provenance::FewExamples { k: r.params.k },
            ProvenanceTag::FromFewExamples => Provenance::FromFewExamples {
                k: r.params.k,
                v: r.params.v.ok_or_else(|| missing("v"))?,
                delta: r.params.delta.ok_or_else(|| missing("delta"))?,
                delta_cap: r.params.delta_cap.ok_or_else(|| missing("delta_cap"))?,
                theta_lo: r.params.theta_lo.ok_or_else(|| missing("theta_lo"))?,
                theta_hi: r.params.theta_hi.ok_or_else(|| missing("theta_hi"))?,
            },
        };
        Patch {
            direction,
            theta: r.theta,
            new_label: r.new_label,
            provenance,
        }
        .validated()
        .map_err(|e| e.to_string())
    }
}

fn common_dim(points: &[Vector]) -> Result<usize> {
    let first = points
        .first()
        .ok_or(Error::EmptyInput("at least one latent point is required"))?;
    let dim = first.dim();
    match points.iter().find(|p| p.dim() != dim) {
        Some(p) => Err(Error::DimensionMismatch {
            expected: dim,
            found: p.dim(),
        }),
        None => Ok(dim),
    }
}

/// `(1/k) sum x_i`.
pub fn empirical_mean(points: &[Vector]) -> Result<Vector> {
    let dim = common_dim(points)?;
    let mut acc = vec![0.0; dim];
    for p in points {
        for (a, x) in acc.iter_mut().zip(p.as_slice()) {
            *a += x;
        }
    }
    let k = points.len() as f64;
    Ok(Vector::from_raw(acc.into_iter().map(|a| a / k).collect()))
}

/// Memorizing patch: direction of the empirical mean, threshold equal to the
/// smallest projection of the examples.
///
/// Requires `(mean, x_i) >= 0` for every example; otherwise returns
/// [`Error::HypothesisViolated`] listing the offending indices.
pub fn build_few_patch(latents: &[Vector], new_label: Label) -> Result<Patch> {
    let mean = empirical_mean(latents)?;
    let direction = normalize(&mean)?;
    let projections: Vec<f64> = latents
        .iter()
        .map(|x| dot_slice(direction.as_slice(), x.as_slice()))
        .collect();
    let bad: Vec<usize> = projections
        .iter()
        .enumerate()
        .filter(|(_, &p)| p < 0.0)
        .map(|(i, _)| i)
        .collect();
    if !bad.is_empty() {
        return Err(Error::HypothesisViolated { indices: bad });
    }
    let theta = projections.into_iter().fold(f64::INFINITY, f64::min);
    Ok(Patch {
        direction,
        theta,
        new_label,
        provenance: Provenance::FewExamples { k: latents.len() },
    })
}

/// Generalizing patch for samples from a ball of known radius `v`.
///
/// Computes the margin `delta_cap = |mean| - sqrt(v^2/k + (k-1)/k v delta)`
/// and sets `theta = (1 - theta_mix) * max(delta_cap - v, 0) + theta_mix * delta_cap`.
pub fn build_from_few_patch(
    latents: &[Vector],
    new_label: Label,
    v: f64,
    delta: f64,
    theta_mix: f64,
) -> Result<Patch> {
    check_range("v", v, "(0, inf)", |v| v > 0.0)?;
    check_range("delta", delta, "(0, 1)", |d| d > 0.0 && d < 1.0)?;
    check_range("theta_mix", theta_mix, "[0, 1]", |m| {
        (0.0..=1.0).contains(&m)
    })?;
    let mean = empirical_mean(latents)?;
    let direction = normalize(&mean)?;
    let k = latents.len();
    let norm_mean = mean.norm();
    let delta_cap = bounds::delta_cap(norm_mean, k, v, delta);
    if delta_cap <= 0.0 {
        return Err(Error::DeltaNotPositive {
            norm_mean,
            radius: bounds::lemma2_interval(k, v, delta, 0.0).1.sqrt(),
        });
    }
    let theta_lo = (delta_cap - v).max(0.0);
    let theta_hi = delta_cap;
    let theta = ((1.0 - theta_mix) * theta_lo + theta_mix * theta_hi).clamp(theta_lo, theta_hi);
    Ok(Patch {
        direction,
        theta,
        new_label,
        provenance: Provenance::FromFewExamples {
            k,
            v,
            delta,
            delta_cap,
            theta_lo,
            theta_hi,
        },
    })
}

/// A base classifier with an ordered stack of patches. The most recently
/// added patch is consulted first.
#[derive(Debug, Clone)]
pub struct PatchedClassifier<B> {
    base: B,
    patches: Vec<Patch>,
}

impl<B: BaseClassifier> PatchedClassifier<B> {
    pub fn new(base: B) -> Self {
        Self {
            base,
            patches: Vec::new(),
        }
    }

    pub fn with_patch(mut self, patch: Patch) -> Result<Self> {
        self.push(patch)?;
        Ok(self)
    }

    pub fn push(&mut self, patch: Patch) -> Result<()> {
        if let Some(first) = self.patches.first() {
            if first.dim() != patch.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: patch.dim(),
                });
            }
        }
        self.patches.push(patch);
        Ok(())
    }

    pub fn patches(&self) -> &[Patch] {
        &self.patches
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    pub fn apply_slice(&self, x: &[f64]) -> Result<&Label> {
        if let Some(first) = self.patches.first() {
            if x.len() != first.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: x.len(),
                });
            }
        }
        match self.patches.iter().rev().find(|p| p.margin(x) >= 0.0) {
            Some(p) => Ok(&p.new_label),
            None => self.base.classify(x),
        }
    }

    pub fn apply(&self, x: &Vector) -> Result<Label> {
        self.apply_slice(x.as_slice()).cloned()
    }
}

/// Whether every latent passes the patch test.
pub fn memorization_check(patch: &Patch, latents: &[Vector]) -> bool {
    latents.iter().all(|x| patch.fires(x.as_slice()))
}

pub fn apply<B: BaseClassifier>(pc: &PatchedClassifier<B>, x: &Vector) -> Result<Label> {
    pc.apply(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn axis_patch(theta: f64) -> Patch {
        Patch {
            direction: UnitDirection::new(v(&[1.0, 0.0])).unwrap(),
            theta,
            new_label: Label::from("new"),
            provenance: Provenance::FewExamples { k: 1 },
        }
    }

    #[test]
    fn mean_examples() {
        assert_eq!(
            empirical_mean(&[v(&[1.0, 0.0]), v(&[0.0, 1.0])]).unwrap(),
            v(&[0.5, 0.5])
        );
        assert_eq!(empirical_mean(&[v(&[2.0, 2.0])]).unwrap(), v(&[2.0, 2.0]));
        assert_eq!(
            empirical_mean(&[v(&[1.0, 0.0]), v(&[-1.0, 0.0])]).unwrap(),
            v(&[0.0, 0.0])
        );
        assert!(matches!(empirical_mean(&[]), Err(Error::EmptyInput(_))));
        assert!(matches!(
            empirical_mean(&[v(&[1.0]), v(&[1.0, 2.0])]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn few_patch_examples() {
        let p = build_few_patch(&[v(&[1.0, 0.0]), v(&[0.0, 1.0])], "new".into()).unwrap();
        assert_abs_diff_eq!(p.direction().as_slice()[0], FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(p.direction().as_slice()[1], FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(p.theta(), FRAC_1_SQRT_2, epsilon = 1e-15);

        let one = build_few_patch(&[v(&[0.8, 0.0])], "new".into()).unwrap();
        assert_eq!(one.direction().as_slice(), &[1.0, 0.0]);
        assert_eq!(one.theta(), 0.8);

        assert_eq!(
            build_few_patch(&[v(&[1.0, 0.0]), v(&[-1.0, 0.0])], "new".into()),
            Err(Error::ZeroMean)
        );
    }

    #[test]
    fn few_patch_hypothesis_violation_lists_indices() {
        let pts = [
            v(&[1.0, 0.0]),
            v(&[1.0, 0.1]),
            v(&[-0.5, 0.0]),
            v(&[0.9, 0.0]),
        ];
        assert_eq!(
            build_few_patch(&pts, "new".into()),
            Err(Error::HypothesisViolated { indices: vec![2] })
        );
    }

    #[test]
    fn from_few_patch_examples() {
        let p = build_from_few_patch(&[v(&[0.8, 0.0])], "new".into(), 0.3, 0.5, 1.0).unwrap();
        match *p.provenance() {
            Provenance::FromFewExamples {
                delta_cap,
                theta_lo,
                theta_hi,
                ..
            } => {
                assert_abs_diff_eq!(delta_cap, 0.5, epsilon = 1e-15);
                assert_abs_diff_eq!(theta_lo, 0.2, epsilon = 1e-15);
                assert_abs_diff_eq!(theta_hi, 0.5, epsilon = 1e-15);
            }
            _ => unreachable!(),
        }
        assert_abs_diff_eq!(p.theta(), 0.5, epsilon = 1e-15);

        // k = 4 points whose mean has norm 0.9 along the first axis.
        let pts = [
            v(&[0.9, 0.3]),
            v(&[0.9, -0.3]),
            v(&[0.9, 0.1]),
            v(&[0.9, -0.1]),
        ];
        let p = build_from_few_patch(&pts, "new".into(), 1.0, 0.1, 0.0).unwrap();
        match *p.provenance() {
            Provenance::FromFewExamples {
                delta_cap,
                theta_lo,
                theta_hi,
                ..
            } => {
                assert_abs_diff_eq!(delta_cap, 0.329_912_287_450_431, epsilon = 1e-12);
                assert_eq!(theta_lo, 0.0);
                assert_eq!(theta_hi, delta_cap);
            }
            _ => unreachable!(),
        }
        assert_eq!(p.theta(), 0.0);

        let pts = [v(&[0.1, 0.0]), v(&[0.1, 0.0])];
        assert!(matches!(
            build_from_few_patch(&pts, "new".into(), 1.0, 0.5, 0.5),
            Err(Error::DeltaNotPositive { .. })
        ));
    }

    #[test]
    fn from_few_patch_rejects_bad_params() {
        let pts = [v(&[5.0, 0.0])];
        assert!(build_from_few_patch(&pts, "n".into(), 0.0, 0.5, 0.5).is_err());
        assert!(build_from_few_patch(&pts, "n".into(), 1.0, 1.0, 0.5).is_err());
        assert!(build_from_few_patch(&pts, "n".into(), 1.0, 0.5, 1.5).is_err());
        assert_eq!(
            build_from_few_patch(&[v(&[0.0, 0.0])], "n".into(), 1.0, 0.5, 0.5),
            Err(Error::ZeroMean)
        );
    }

    #[test]
    fn theta_mix_grid_stays_in_interval() {
        let pts = [
            v(&[2.0, 0.1, 0.0]),
            v(&[1.9, -0.2, 0.3]),
            v(&[2.1, 0.0, -0.1]),
        ];
        for i in 0..=20 {
            let m = i as f64 / 20.0;
            let p = build_from_few_patch(&pts, "n".into(), 1.0, 0.3, m).unwrap();
            let Provenance::FromFewExamples {
                theta_lo,
                theta_hi,
                delta_cap,
                v,
                ..
            } = *p.provenance()
            else {
                unreachable!()
            };
            assert!(delta_cap > 0.0);
            assert_eq!(theta_lo, (delta_cap - v).max(0.0));
            assert!(theta_lo <= p.theta() && p.theta() <= theta_hi);
        }
    }

    #[test]
    fn apply_examples() {
        let pc = PatchedClassifier::new(ConstantLabel("A".into()))
            .with_patch(axis_patch(0.8))
            .unwrap();
        assert_eq!(pc.apply(&v(&[0.9, 0.1])).unwrap(), Label::from("new"));
        assert_eq!(pc.apply(&v(&[0.5, 0.5])).unwrap(), Label::from("A"));
        assert_eq!(pc.apply(&v(&[0.8, 0.0])).unwrap(), Label::from("new"));
        assert!(matches!(
            pc.apply(&v(&[0.8])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn later_patch_wins_on_overlap() {
        let first = axis_patch(0.0);
        let mut second = axis_patch(0.5);
        second.new_label = Label::from("second");
        let mut pc = PatchedClassifier::new(ConstantLabel("A".into()));
        pc.push(first).unwrap();
        pc.push(second).unwrap();
        assert_eq!(pc.apply(&v(&[0.7, 0.0])).unwrap(), Label::from("second"));
        assert_eq!(pc.apply(&v(&[0.2, 0.0])).unwrap(), Label::from("new"));
        assert_eq!(pc.apply(&v(&[-0.2, 0.0])).unwrap(), Label::from("A"));
    }

    #[test]
    fn patch_dimension_must_agree() {
        let mut pc = PatchedClassifier::new(ConstantLabel("A".into()));
        pc.push(axis_patch(0.1)).unwrap();
        let other = build_few_patch(&[v(&[1.0, 0.0, 0.0])], "x".into()).unwrap();
        assert!(pc.push(other).is_err());
    }

    #[test]
    fn nearest_centroid_base() {
        let base = NearestCentroid::new(vec![
            (v(&[-1.0, 0.0]), "left".into()),
            (v(&[0.0, -1.0]), "down".into()),
        ])
        .unwrap();
        let pc = PatchedClassifier::new(base)
            .with_patch(axis_patch(0.5))
            .unwrap();
        assert_eq!(pc.apply(&v(&[-0.9, 0.1])).unwrap(), Label::from("left"));
        assert_eq!(pc.apply(&v(&[0.1, -0.9])).unwrap(), Label::from("down"));
        assert_eq!(pc.apply(&v(&[0.6, -0.9])).unwrap(), Label::from("new"));
        assert!(NearestCentroid::new(vec![]).is_err());
    }

    #[test]
    fn memorization_examples() {
        let pts = [v(&[0.3, 0.9]), v(&[0.7, 0.1]), v(&[0.5, 0.5])];
        let p = build_few_patch(&pts, "new".into()).unwrap();
        assert!(memorization_check(&p, &pts));
        assert!(!memorization_check(&axis_patch(0.8), &[v(&[0.7, 0.0])]));
        let combo = pts[0].scaled(0.3).add(&pts[1].scaled(0.7)).unwrap();
        assert!(memorization_check(&p, &[combo]));
    }

    #[test]
    fn json_shape_and_round_trip() {
        let p = build_from_few_patch(
            &[v(&[2.0, 0.3]), v(&[1.8, -0.1])],
            "new".into(),
            1.0,
            0.3,
            0.5,
        )
        .unwrap();
        let json = p.to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["dim"], 2);
        assert_eq!(value["provenance"], "FromFewExamples");
        for key in ["k", "v", "delta", "delta_cap", "theta_lo", "theta_hi"] {
            assert!(value["params"].get(key).is_some(), "missing params.{key}");
        }
        let back = Patch::from_json(&json).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.theta().to_bits(), p.theta().to_bits());

        let few = build_few_patch(&[v(&[0.8, 0.1])], "one".into()).unwrap();
        let value: serde_json::Value = serde_json::from_str(&few.to_json()).unwrap();
        assert_eq!(value["provenance"], "FewExamples");
        assert!(value["params"]["v"].is_null());
        assert_eq!(Patch::from_json(&few.to_json()).unwrap(), few);
    }

    #[test]
    fn json_rejects_invalid_patches() {
        let bad_norm = r#"{"dim":2,"direction":[1.0,1.0],"theta":0.5,"new_label":"x","provenance":"FewExamples","params":{"k":1,"v":null,"delta":null,"delta_cap":null,"theta_lo":null,"theta_hi":null}}"#;
        assert!(Patch::from_json(bad_norm).is_err());
        let negative_theta = r#"{"dim":2,"direction":[1.0,0.0],"theta":-0.5,"new_label":"x","provenance":"FewExamples","params":{"k":1,"v":null,"delta":null,"delta_cap":null,"theta_lo":null,"theta_hi":null}}"#;
        assert!(Patch::from_json(negative_theta).is_err());
        let wrong_dim = r#"{"dim":3,"direction":[1.0,0.0],"theta":0.5,"new_label":"x","provenance":"FewExamples","params":{"k":1,"v":null,"delta":null,"delta_cap":null,"theta_lo":null,"theta_hi":null}}"#;
        assert!(Patch::from_json(wrong_dim).is_err());
        let theta_outside = r#"{"dim":1,"direction":[1.0],"theta":0.9,"new_label":"x","provenance":"FromFewExamples","params":{"k":1,"v":1.0,"delta":0.5,"delta_cap":0.5,"theta_lo":0.0,"theta_hi":0.5}}"#;
        assert!(Patch::from_json(theta_outside).is_err());
    }
}
