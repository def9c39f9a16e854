//! Seeded Monte Carlo runners that estimate each probability the bounds
//! module talks about and compare the estimate with the bound.
//!
//! Every runner draws trial `t` from the sub-stream `seed.child(t)`, so the
//! result does not depend on how rayon schedules trials. Per-trial outcomes
//! are collected in trial order and reduced sequentially.
//!
//! A bound counts as violated only when the whole Wilson interval of the
//! estimate lies below it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundInputs, BoundValue};
use crate::corrector::{
    build_few_patch, build_from_few_patch, memorization_check, ConstantLabel, Label,
    PatchedClassifier,
};
use crate::error::{check_range, Error, Result};
use crate::geometry::{cap_fraction_bound, cap_fraction_exact, dot_slice, Ball, Vector};
use crate::rng::{Seed, StreamRng};
use crate::samplers::{sample_orthant, BallDistribution, Shape};
use crate::stats::{bonferroni, clopper_pearson, EstimateWithCI, DEFAULT_CONFIDENCE};

/// Smallest trial count accepted by the Monte Carlo runners.
pub const MIN_TRIALS: u64 = 1000;

/// Fresh points per trial used by the pipeline experiments unless overridden.
pub const DEFAULT_FRESH: usize = 1000;

pub const BASE_LABEL: &str = "base";
pub const NEW_LABEL: &str = "new";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Experiment {
    QuasiOrth,
    Centering,
    LearnFew,
    LearnFromFew,
    CapCheck,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::QuasiOrth => "quasi-orth",
            Experiment::Centering => "centering",
            Experiment::LearnFew => "learn-few",
            Experiment::LearnFromFew => "learn-from-few",
            Experiment::CapCheck => "cap-check",
        }
    }
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    BoundRespected,
    BoundViolated,
    BoundVacuous,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::BoundRespected => "BoundRespected",
            Verdict::BoundViolated => "BoundViolated",
            Verdict::BoundVacuous => "BoundVacuous",
        }
    }
}

/// The subset of [`BoundInputs`] an experiment actually used.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub v: Option<f64>,
    pub rho: Option<f64>,
    pub c_new: Option<f64>,
    pub r: Option<f64>,
    pub c_x: Option<f64>,
    pub delta: Option<f64>,
    pub eps: Option<f64>,
    /// Mean realized threshold for experiments that build patches.
    pub theta: Option<f64>,
    pub theta_mix: Option<f64>,
}

/// Trial-by-trial comparison for bounds that depend on a data-dependent
/// threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerTrialCheck {
    /// Trials whose bound was informative.
    pub checked: u64,
    /// Trials whose interval lay entirely below their own bound.
    pub violations: u64,
    /// Smallest `ci_high - bound.clamped` over checked trials.
    pub worst_margin: f64,
    /// Confidence of each per-trial interval.
    pub confidence: f64,
    /// Trials a lone Wilson interval at the run's confidence would flag.
    /// Informational: without a multiplicity correction this count grows
    /// with the number of trials even when every bound holds.
    pub wilson_flags: u64,
}

/// One measured event and its bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventReport {
    pub event: String,
    pub estimate: EstimateWithCI,
    pub bound: BoundValue,
    pub verdict: Verdict,
    pub per_trial: Option<PerTrialCheck>,
}

impl EventReport {
    pub fn new(
        event: impl Into<String>,
        estimate: EstimateWithCI,
        bound: BoundValue,
        per_trial: Option<PerTrialCheck>,
    ) -> Self {
        let verdict = if bound.vacuous {
            Verdict::BoundVacuous
        } else if estimate.ci_high < bound.clamped || per_trial.is_some_and(|c| c.violations > 0) {
            Verdict::BoundViolated
        } else {
            Verdict::BoundRespected
        };
        Self {
            event: event.into(),
            estimate,
            bound,
            verdict,
            per_trial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub experiment: Experiment,
    pub params: ReportParams,
    pub events: Vec<EventReport>,
}

impl TrialReport {
    pub fn event(&self, name: &str) -> Option<&EventReport> {
        self.events.iter().find(|e| e.event == name)
    }

    pub fn any_violation(&self) -> bool {
        self.events
            .iter()
            .any(|e| e.verdict == Verdict::BoundViolated)
    }
}

/// Trial count, seed and interval confidence shared by every runner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarlo {
    pub trials: u64,
    pub seed: Seed,
    pub confidence: f64,
}

impl MonteCarlo {
    pub fn new(trials: u64, seed: Seed) -> Self {
        Self {
            trials,
            seed,
            confidence: DEFAULT_CONFIDENCE,
        }
    }

    fn validate(&self) -> Result<()> {
        check_range("trials", self.trials as f64, "[1000, inf)", |t| {
            t >= MIN_TRIALS as f64
        })?;
        check_range("confidence", self.confidence, "(0, 1)", |c| {
            c > 0.0 && c < 1.0
        })
    }

    fn estimate(&self, successes: u64, trials: u64) -> EstimateWithCI {
        EstimateWithCI::wilson(successes, trials, self.confidence)
    }

    /// Runs `trial` for every index on its own sub-stream, in parallel,
    /// returning outcomes in index order.
    fn run<T, F>(&self, trial: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut StreamRng) -> T + Sync,
    {
        let seed = self.seed;
        (0..self.trials)
            .into_par_iter()
            .map(|t| trial(&mut seed.child(t).rng()))
            .collect()
    }
}

/// Geometry of a ball distribution independent of the dimension, so sweeps
/// over `n` can instantiate it anywhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub radius: f64,
    /// Distance of the centre from the origin, along the first axis.
    pub center_distance: f64,
    pub shape: Shape,
}

impl BallSpec {
    pub fn unit() -> Self {
        Self {
            radius: 1.0,
            center_distance: 0.0,
            shape: Shape::UniformBall,
        }
    }

    pub fn instantiate(&self, n: usize) -> Result<BallDistribution> {
        check_range("n", n as f64, "[1, inf)", |n| n >= 1.0)?;
        let center = Vector::along_axis(n, 0, self.center_distance);
        BallDistribution::new(Ball::new(center, self.radius)?, self.shape)
    }
}

fn check_event_params(k: usize, delta: f64, eps: f64) -> Result<()> {
    check_range("k", k as f64, "[1, inf)", |k| k >= 1.0)?;
    check_range("delta", delta, "(0, 1)", |d| d > 0.0 && d < 1.0)?;
    check_range("eps", eps, "(0, 1)", |e| e > 0.0 && e < 1.0)
}

fn draw_points(dist: &BallDistribution, k: usize, rng: &mut StreamRng, buf: &mut [f64]) {
    let n = dist.dim();
    for chunk in buf.chunks_exact_mut(n).take(k) {
        dist.sample_into(rng, chunk);
    }
}

fn params_for(dist: &BallDistribution, k: usize, delta: f64, eps: f64) -> ReportParams {
    let (c_new, rho) = dist.certified_constants();
    ReportParams {
        n: Some(dist.dim()),
        k: Some(k),
        v: Some(dist.support().radius()),
        rho: Some(rho),
        c_new: Some(c_new),
        delta: Some(delta),
        eps: Some(eps),
        ..ReportParams::default()
    }
}

/// Frequency of pairwise quasi-orthogonality (`A1`) and of it together with
/// every draw lying in the outer shell (`A1_and_A2`).
pub fn run_quasi_orthogonality(
    k: usize,
    dist: &BallDistribution,
    delta: f64,
    eps: f64,
    mc: &MonteCarlo,
) -> Result<TrialReport> {
    check_event_params(k, delta, eps)?;
    mc.validate()?;
    let n = dist.dim();
    let v = dist.support().radius();
    let center = dist.support().center().as_slice();
    let outcomes = mc.run(|rng| {
        let mut pts = vec![0.0; n * k];
        draw_points(dist, k, rng, &mut pts);
        for p in pts.chunks_exact_mut(n) {
            for (x, c) in p.iter_mut().zip(center) {
                *x -= c;
            }
        }
        let rows: Vec<&[f64]> = pts.chunks_exact(n).collect();
        let a1 = (0..k).all(|i| (i + 1..k).all(|j| dot_slice(rows[i], rows[j]).abs() <= delta * v));
        let a2 = rows
            .iter()
            .all(|p| dot_slice(p, p).sqrt() >= (1.0 - eps) * v);
        (a1, a1 && a2)
    });
    let a1 = outcomes.iter().filter(|o| o.0).count() as u64;
    let a12 = outcomes.iter().filter(|o| o.1).count() as u64;
    let (c_new, rho) = dist.certified_constants();
    Ok(TrialReport {
        experiment: Experiment::QuasiOrth,
        params: params_for(dist, k, delta, eps),
        events: vec![
            EventReport::new(
                "A1",
                mc.estimate(a1, mc.trials),
                bounds::lemma1_a1_bound(c_new, k, rho, v, delta, n),
                None,
            ),
            EventReport::new(
                "A1_and_A2",
                mc.estimate(a12, mc.trials),
                bounds::lemma1_a1a2_bound(c_new, k, rho, v, delta, eps, n),
                None,
            ),
        ],
    })
}

/// Frequency with which the squared distance from the empirical mean to the
/// centre lands in `[max(L, 0), U]` (`two_sided`) and below `U` (`upper_only`).
pub fn run_centering(
    k: usize,
    dist: &BallDistribution,
    delta: f64,
    eps: f64,
    mc: &MonteCarlo,
) -> Result<TrialReport> {
    check_event_params(k, delta, eps)?;
    mc.validate()?;
    let n = dist.dim();
    let v = dist.support().radius();
    let center = dist.support().center().as_slice();
    let (lower, upper) = bounds::lemma2_interval(k, v, delta, eps);
    let lower = lower.max(0.0);
    let outcomes = mc.run(|rng| {
        let mut pts = vec![0.0; n * k];
        draw_points(dist, k, rng, &mut pts);
        let mut mean = vec![0.0; n];
        for p in pts.chunks_exact(n) {
            for (m, x) in mean.iter_mut().zip(p) {
                *m += x;
            }
        }
        let d2: f64 = mean
            .iter()
            .zip(center)
            .map(|(m, c)| {
                let d = m / k as f64 - c;
                d * d
            })
            .sum();
        (lower <= d2 && d2 <= upper, d2 <= upper)
    });
    let two = outcomes.iter().filter(|o| o.0).count() as u64;
    let up = outcomes.iter().filter(|o| o.1).count() as u64;
    let (c_new, rho) = dist.certified_constants();
    let (two_bound, upper_bound) = bounds::lemma2_prob_bounds(c_new, k, rho, v, delta, eps, n);
    Ok(TrialReport {
        experiment: Experiment::Centering,
        params: params_for(dist, k, delta, eps),
        events: vec![
            EventReport::new("two_sided", mc.estimate(two, mc.trials), two_bound, None),
            EventReport::new("upper_only", mc.estimate(up, mc.trials), upper_bound, None),
        ],
    })
}

/// Accumulates per-trial interval-versus-bound comparisons.
///
/// The per-trial intervals are read as one family, so each is an exact
/// Clopper–Pearson interval at the Bonferroni level that keeps the
/// family-wise confidence at the run's confidence.
struct PerTrialAccumulator {
    confidence: f64,
    wilson_confidence: f64,
    check: PerTrialCheck,
    raw_sum: f64,
    count: u64,
}

impl PerTrialAccumulator {
    fn new(mc: &MonteCarlo) -> Self {
        let confidence = bonferroni(mc.confidence, mc.trials);
        Self {
            confidence,
            wilson_confidence: mc.confidence,
            check: PerTrialCheck {
                checked: 0,
                violations: 0,
                worst_margin: f64::INFINITY,
                confidence,
                wilson_flags: 0,
            },
            raw_sum: 0.0,
            count: 0,
        }
    }

    fn push(&mut self, successes: u64, trials: u64, bound: BoundValue) {
        self.raw_sum += bound.raw;
        self.count += 1;
        if bound.vacuous {
            return;
        }
        let (_, high) = clopper_pearson(successes, trials, self.confidence);
        let margin = high - bound.clamped;
        self.check.checked += 1;
        if margin < 0.0 {
            self.check.violations += 1;
        }
        self.check.worst_margin = self.check.worst_margin.min(margin);
        if EstimateWithCI::wilson(successes, trials, self.wilson_confidence).ci_high < bound.clamped
        {
            self.check.wilson_flags += 1;
        }
    }

    /// Pooled bound: the mean of the per-trial raw values, which lower-bounds
    /// the pooled probability because each trial's probability is at least
    /// its own raw bound.
    fn pooled_bound(&self) -> BoundValue {
        BoundValue::from_raw(self.raw_sum / self.count as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnFewConfig {
    pub k: usize,
    /// Distribution of ordinary inputs; must live on the unit ball.
    pub base: BallDistribution,
    /// Distribution of the new examples, folded into the nonnegative orthant.
    pub new_points: BallDistribution,
    pub fresh: usize,
}

fn check_unit_support(d: &BallDistribution) -> Result<()> {
    let s = d.support();
    if s.radius() != 1.0 || s.center().norm() != 0.0 {
        return Err(Error::OutOfRange {
            name: "base distribution support",
            value: s.radius(),
            range: "the unit ball centred at the origin",
        });
    }
    Ok(())
}

/// Memorizing patch pipeline: build a patch from `k` orthant-folded
/// examples, check it memorizes them, then measure how often fresh base
/// points keep their base label.
pub fn run_learn_few(cfg: &LearnFewConfig, mc: &MonteCarlo) -> Result<TrialReport> {
    mc.validate()?;
    check_unit_support(&cfg.base)?;
    check_range("k", cfg.k as f64, "[1, inf)", |k| k >= 1.0)?;
    check_range("fresh", cfg.fresh as f64, "[1, inf)", |f| f >= 1.0)?;
    let n = cfg.base.dim();
    if cfg.new_points.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: cfg.new_points.dim(),
        });
    }
    let base_label = Label::from(BASE_LABEL);

    struct Outcome {
        theta: f64,
        memorized: bool,
        agree: u64,
    }

    let outcomes = mc.run(|rng| -> Option<Outcome> {
        let mut buf = vec![0.0; n];
        let latents: Vec<Vector> = (0..cfg.k)
            .map(|_| {
                sample_orthant(&cfg.new_points, rng, &mut buf);
                Vector::from_raw(buf.clone())
            })
            .collect();
        let patch = build_few_patch(&latents, Label::from(NEW_LABEL)).ok()?;
        let memorized = memorization_check(&patch, &latents);
        let theta = patch.theta();
        let pc = PatchedClassifier::new(ConstantLabel(base_label.clone()))
            .with_patch(patch)
            .expect("single patch");
        let mut agree = 0;
        for _ in 0..cfg.fresh {
            cfg.base.sample_into(rng, &mut buf);
            if pc.apply_slice(&buf).expect("dimension checked") == &base_label {
                agree += 1;
            }
        }
        Some(Outcome {
            theta,
            memorized,
            agree,
        })
    });

    let (c_x, r) = cfg.base.certified_constants();
    let mut acc = PerTrialAccumulator::new(mc);
    let (mut built, mut memorized, mut agree, mut theta_sum) = (0u64, 0u64, 0u64, 0.0);
    for o in outcomes.iter().flatten() {
        built += 1;
        memorized += o.memorized as u64;
        agree += o.agree;
        theta_sum += o.theta;
        acc.push(
            o.agree,
            cfg.fresh as u64,
            bounds::pe_bound(c_x, r, o.theta, n),
        );
    }
    let excluded = mc.trials - built;

    let mut events = vec![EventReport::new(
        "hypothesis_violated",
        mc.estimate(excluded, mc.trials),
        BoundValue::from_raw(0.0),
        None,
    )];
    if built > 0 {
        events.push(EventReport::new(
            "memorization",
            mc.estimate(memorized, built),
            BoundValue::from_raw(1.0),
            None,
        ));
        events.push(EventReport::new(
            "agreement",
            mc.estimate(agree, built * cfg.fresh as u64),
            acc.pooled_bound(),
            Some(acc.check),
        ));
    }
    Ok(TrialReport {
        experiment: Experiment::LearnFew,
        params: ReportParams {
            n: Some(n),
            k: Some(cfg.k),
            v: Some(cfg.new_points.support().radius()),
            r: Some(r),
            c_x: Some(c_x),
            theta: (built > 0).then(|| theta_sum / built as f64),
            ..ReportParams::default()
        },
        events,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnFromFewConfig {
    pub k: usize,
    /// Distribution of ordinary inputs; must live on the unit ball.
    pub base: BallDistribution,
    /// Distribution of the new class.
    pub new_class: BallDistribution,
    pub delta: f64,
    pub theta_mix: f64,
    pub fresh: usize,
}

/// Generalizing patch pipeline: build a patch from `k` new-class draws, then
/// measure how often fresh new-class points get the new label (`new_label`)
/// and how often fresh base points keep the base label (`agreement`).
pub fn run_learn_from_few(cfg: &LearnFromFewConfig, mc: &MonteCarlo) -> Result<TrialReport> {
    mc.validate()?;
    check_unit_support(&cfg.base)?;
    check_range("k", cfg.k as f64, "[1, inf)", |k| k >= 1.0)?;
    check_range("delta", cfg.delta, "(0, 1)", |d| d > 0.0 && d < 1.0)?;
    check_range("theta_mix", cfg.theta_mix, "[0, 1]", |m| {
        (0.0..=1.0).contains(&m)
    })?;
    check_range("fresh", cfg.fresh as f64, "[1, inf)", |f| f >= 1.0)?;
    let n = cfg.base.dim();
    if cfg.new_class.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: cfg.new_class.dim(),
        });
    }
    let v = cfg.new_class.support().radius();
    let (c_new, rho) = cfg.new_class.certified_constants();
    let (c_x, r) = cfg.base.certified_constants();
    let base_label = Label::from(BASE_LABEL);
    let new_label = Label::from(NEW_LABEL);

    struct Outcome {
        theta: f64,
        delta_cap: f64,
        hits: u64,
        agree: u64,
    }

    let outcomes = mc.run(|rng| -> Option<Outcome> {
        let mut buf = vec![0.0; n];
        let latents: Vec<Vector> = (0..cfg.k)
            .map(|_| {
                cfg.new_class.sample_into(rng, &mut buf);
                Vector::from_raw(buf.clone())
            })
            .collect();
        let patch =
            build_from_few_patch(&latents, new_label.clone(), v, cfg.delta, cfg.theta_mix).ok()?;
        let theta = patch.theta();
        let delta_cap = match *patch.provenance() {
            crate::corrector::Provenance::FromFewExamples { delta_cap, .. } => delta_cap,
            crate::corrector::Provenance::FewExamples { .. } => unreachable!(),
        };
        let pc = PatchedClassifier::new(ConstantLabel(base_label.clone()))
            .with_patch(patch)
            .expect("single patch");
        let mut hits = 0;
        for _ in 0..cfg.fresh {
            cfg.new_class.sample_into(rng, &mut buf);
            hits += (pc.apply_slice(&buf).expect("dimension checked") == &new_label) as u64;
        }
        let mut agree = 0;
        for _ in 0..cfg.fresh {
            cfg.base.sample_into(rng, &mut buf);
            agree += (pc.apply_slice(&buf).expect("dimension checked") == &base_label) as u64;
        }
        Some(Outcome {
            theta,
            delta_cap,
            hits,
            agree,
        })
    });

    let fresh = cfg.fresh as u64;
    let mut new_acc = PerTrialAccumulator::new(mc);
    let mut agree_acc = PerTrialAccumulator::new(mc);
    let (mut built, mut hits, mut agree, mut theta_sum) = (0u64, 0u64, 0u64, 0.0);
    let (mut empty_cap_trials, mut empty_cap_agree) = (0u64, 0u64);
    for o in outcomes.iter().flatten() {
        built += 1;
        hits += o.hits;
        agree += o.agree;
        theta_sum += o.theta;
        let inputs = BoundInputs {
            n,
            k: cfg.k,
            v,
            rho,
            c_new,
            delta: cfg.delta,
            eps: 0.5,
            r,
            c_x,
            theta: o.theta,
            delta_cap: o.delta_cap,
        };
        let (p_n, p_e) = bounds::theorem2_bounds(&inputs)?;
        new_acc.push(o.hits, fresh, p_n);
        agree_acc.push(o.agree, fresh, p_e);
        if o.theta >= 1.0 {
            empty_cap_trials += 1;
            empty_cap_agree += o.agree;
        }
    }
    let excluded = mc.trials - built;

    let mut events = vec![EventReport::new(
        "delta_not_positive",
        mc.estimate(excluded, mc.trials),
        BoundValue::from_raw(0.0),
        None,
    )];
    if built > 0 {
        events.push(EventReport::new(
            "new_label",
            mc.estimate(hits, built * fresh),
            new_acc.pooled_bound(),
            Some(new_acc.check),
        ));
        events.push(EventReport::new(
            "agreement",
            mc.estimate(agree, built * fresh),
            agree_acc.pooled_bound(),
            Some(agree_acc.check),
        ));
    }
    if empty_cap_trials > 0 {
        // theta >= 1 puts the whole unit ball strictly on the base side.
        events.push(EventReport::new(
            "agreement_empty_cap",
            mc.estimate(empty_cap_agree, empty_cap_trials * fresh),
            BoundValue::from_raw(1.0),
            None,
        ));
    }
    Ok(TrialReport {
        experiment: Experiment::LearnFromFew,
        params: ReportParams {
            n: Some(n),
            k: Some(cfg.k),
            v: Some(v),
            rho: Some(rho),
            c_new: Some(c_new),
            r: Some(r),
            c_x: Some(c_x),
            delta: Some(cfg.delta),
            theta: (built > 0).then(|| theta_sum / built as f64),
            theta_mix: Some(cfg.theta_mix),
            ..ReportParams::default()
        },
        events,
    })
}

/// One line of the cap-volume table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapRow {
    pub n: usize,
    pub a: f64,
    pub exact: f64,
    pub bound: f64,
    /// `exact / bound`, or `None` where the bound is zero.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapCheck {
    pub table: Vec<CapRow>,
    /// Largest `exact / bound` over the table.
    pub max_ratio: f64,
    /// One report per dimension; the single event `cap_inequality` counts
    /// grid points where `exact <= bound + 1e-12`.
    pub reports: Vec<TrialReport>,
}

/// Tolerance on the cap inequality `exact <= bound`.
pub const CAP_TOLERANCE: f64 = 1e-12;

/// `count` evenly spaced points covering `[0, 1]`.
pub fn unit_grid(count: usize) -> Vec<f64> {
    assert!(count >= 2, "grid needs both endpoints");
    (0..count).map(|i| i as f64 / (count - 1) as f64).collect()
}

/// Compares the exact cap fraction with its closed-form bound on a grid.
pub fn run_cap_check(n_list: &[usize], a_grid: &[f64]) -> Result<CapCheck> {
    if n_list.is_empty() || a_grid.is_empty() {
        return Err(Error::EmptyInput(
            "cap check needs dimensions and grid points",
        ));
    }
    let mut table = Vec::with_capacity(n_list.len() * a_grid.len());
    let mut reports = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mut ok = 0u64;
        for &a in a_grid {
            let exact = cap_fraction_exact(n, a)?;
            let bound = cap_fraction_bound(n, a)?;
            ok += (exact <= bound + CAP_TOLERANCE) as u64;
            let ratio = (bound > 0.0).then(|| exact / bound);
            table.push(CapRow {
                n,
                a,
                exact,
                bound,
                ratio,
            });
        }
        let total = a_grid.len() as u64;
        reports.push(TrialReport {
            experiment: Experiment::CapCheck,
            params: ReportParams {
                n: Some(n),
                ..ReportParams::default()
            },
            events: vec![EventReport::new(
                "cap_inequality",
                EstimateWithCI::wilson(ok, total, DEFAULT_CONFIDENCE),
                BoundValue::from_raw(1.0),
                None,
            )],
        });
    }
    let max_ratio = table
        .iter()
        .filter_map(|r| r.ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(CapCheck {
        table,
        max_ratio,
        reports,
    })
}

/// A dimension-free experiment description that can be swept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum ExperimentSpec {
    QuasiOrth {
        n: usize,
        k: usize,
        dist: BallSpec,
        delta: f64,
        eps: f64,
    },
    Centering {
        n: usize,
        k: usize,
        dist: BallSpec,
        delta: f64,
        eps: f64,
    },
    LearnFew {
        n: usize,
        k: usize,
        new_points: BallSpec,
        fresh: usize,
    },
    LearnFromFew {
        n: usize,
        k: usize,
        new_class: BallSpec,
        delta: f64,
        theta_mix: f64,
        fresh: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    N,
    K,
    Delta,
    ThetaMix,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::N => "n",
            SweepAxis::K => "k",
            SweepAxis::Delta => "delta",
            SweepAxis::ThetaMix => "theta_mix",
        }
    }
}

impl ExperimentSpec {
    pub fn experiment(&self) -> Experiment {
        match self {
            ExperimentSpec::QuasiOrth { .. } => Experiment::QuasiOrth,
            ExperimentSpec::Centering { .. } => Experiment::Centering,
            ExperimentSpec::LearnFew { .. } => Experiment::LearnFew,
            ExperimentSpec::LearnFromFew { .. } => Experiment::LearnFromFew,
        }
    }

    pub fn run(&self, mc: &MonteCarlo) -> Result<TrialReport> {
        match *self {
            ExperimentSpec::QuasiOrth {
                n,
                k,
                dist,
                delta,
                eps,
            } => run_quasi_orthogonality(k, &dist.instantiate(n)?, delta, eps, mc),
            ExperimentSpec::Centering {
                n,
                k,
                dist,
                delta,
                eps,
            } => run_centering(k, &dist.instantiate(n)?, delta, eps, mc),
            ExperimentSpec::LearnFew {
                n,
                k,
                new_points,
                fresh,
            } => run_learn_few(
                &LearnFewConfig {
                    k,
                    base: BallSpec::unit().instantiate(n)?,
                    new_points: new_points.instantiate(n)?,
                    fresh,
                },
                mc,
            ),
            ExperimentSpec::LearnFromFew {
                n,
                k,
                new_class,
                delta,
                theta_mix,
                fresh,
            } => run_learn_from_few(
                &LearnFromFewConfig {
                    k,
                    base: BallSpec::unit().instantiate(n)?,
                    new_class: new_class.instantiate(n)?,
                    delta,
                    theta_mix,
                    fresh,
                },
                mc,
            ),
        }
    }

    /// Copy with the swept parameter replaced.
    pub fn with_axis(&self, axis: SweepAxis, value: f64) -> Result<ExperimentSpec> {
        let mut out = self.clone();
        let as_count = |name: &'static str| -> Result<usize> {
            check_range(name, value, "positive integer", |x| {
                x >= 1.0 && x.fract() == 0.0
            })?;
            Ok(value as usize)
        };
        let unsupported = || Error::OutOfRange {
            name: "axis",
            value,
            range: "an axis this experiment uses",
        };
        match (&mut out, axis) {
            (
                ExperimentSpec::QuasiOrth { n, .. }
                | ExperimentSpec::Centering { n, .. }
                | ExperimentSpec::LearnFew { n, .. }
                | ExperimentSpec::LearnFromFew { n, .. },
                SweepAxis::N,
            ) => *n = as_count("n")?,
            (
                ExperimentSpec::QuasiOrth { k, .. }
                | ExperimentSpec::Centering { k, .. }
                | ExperimentSpec::LearnFew { k, .. }
                | ExperimentSpec::LearnFromFew { k, .. },
                SweepAxis::K,
            ) => *k = as_count("k")?,
            (
                ExperimentSpec::QuasiOrth { delta, .. }
                | ExperimentSpec::Centering { delta, .. }
                | ExperimentSpec::LearnFromFew { delta, .. },
                SweepAxis::Delta,
            ) => *delta = value,
            (ExperimentSpec::LearnFromFew { theta_mix, .. }, SweepAxis::ThetaMix) => {
                *theta_mix = value
            }
            _ => return Err(unsupported()),
        }
        Ok(out)
    }
}

/// Runs `spec` once per value of `axis`, the `i`-th value on sub-stream
/// `mc.seed.child(i)`.
pub fn sweep(
    spec: &ExperimentSpec,
    axis: SweepAxis,
    values: &[f64],
    mc: &MonteCarlo,
) -> Result<Vec<TrialReport>> {
    if values.is_empty() {
        return Err(Error::EmptyInput("sweep needs at least one value"));
    }
    if let Some(w) = values.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::OutOfRange {
            name: "values",
            value: w[1],
            range: "a strictly increasing sequence",
        });
    }
    values
        .iter()
        .enumerate()
        .map(|(i, &value)| {
            let sub = MonteCarlo {
                seed: mc.seed.child(i as u64),
                ..*mc
            };
            spec.with_axis(axis, value)?.run(&sub)
        })
        .collect()
}

/// Trial counts of the default verification suite.
pub const SUITE_EVENT_TRIALS: u64 = 100_000;
pub const SUITE_PIPELINE_TRIALS: u64 = 10_000;
/// Fresh points per trial in the generalization pipeline of the suite.
pub const SUITE_FROM_FEW_FRESH: usize = 100;

/// Dimensions of the default exponential-convergence sweep.
pub const SUITE_N_SWEEP: [f64; 5] = [10.0, 20.0, 40.0, 80.0, 160.0];

/// The default verification grid: every experiment, at the parameter points
/// the acceptance tests pin down. Each entry gets its own sub-stream.
pub fn default_suite() -> Vec<SuiteEntry> {
    let unit = BallSpec::unit();
    let quasi = |n, k, delta, eps| ExperimentSpec::QuasiOrth {
        n,
        k,
        dist: unit,
        delta,
        eps,
    };
    let centering = |n, k| ExperimentSpec::Centering {
        n,
        k,
        dist: unit,
        delta: 0.5,
        eps: 0.1,
    };
    let far_ball = BallSpec {
        radius: 1.0,
        center_distance: 2.0,
        shape: Shape::UniformBall,
    };
    let from_few = |n| ExperimentSpec::LearnFromFew {
        n,
        k: 5,
        new_class: far_ball,
        delta: 0.3,
        theta_mix: 0.6,
        fresh: SUITE_FROM_FEW_FRESH,
    };
    let event = SUITE_EVENT_TRIALS;
    let pipeline = SUITE_PIPELINE_TRIALS;
    let mut suite = vec![
        SuiteEntry::Single(quasi(50, 10, 0.5, 0.1), event),
        SuiteEntry::Single(quasi(50, 1, 0.5, 0.1), event),
        SuiteEntry::Single(quasi(2, 2, 0.99, 0.9), event),
        SuiteEntry::Single(
            ExperimentSpec::QuasiOrth {
                n: 50,
                k: 5,
                dist: BallSpec {
                    radius: 1.0,
                    center_distance: 0.0,
                    shape: Shape::RadialPower { alpha: 2.0 },
                },
                delta: 0.5,
                eps: 0.1,
            },
            event,
        ),
        SuiteEntry::Sweep(
            quasi(10, 10, 0.5, 0.1),
            SweepAxis::N,
            SUITE_N_SWEEP.to_vec(),
            event,
        ),
        SuiteEntry::Single(centering(50, 10), event),
        SuiteEntry::Single(centering(100, 10), event),
        SuiteEntry::Single(centering(50, 1), event),
    ];
    for n in [10, 20, 50] {
        suite.push(SuiteEntry::Single(
            ExperimentSpec::LearnFew {
                n,
                k: 5,
                new_points: unit,
                fresh: DEFAULT_FRESH,
            },
            pipeline,
        ));
    }
    suite.push(SuiteEntry::Single(from_few(200), pipeline));
    suite.push(SuiteEntry::Single(from_few(30), pipeline));
    suite
}

#[derive(Debug, Clone, PartialEq)]
pub enum SuiteEntry {
    Single(ExperimentSpec, u64),
    Sweep(ExperimentSpec, SweepAxis, Vec<f64>, u64),
}

/// Runs the cap check and every entry of [`default_suite`].
pub fn run_default_suite(seed: Seed, confidence: f64) -> Result<Vec<TrialReport>> {
    let cap_dims: Vec<usize> = (1..=30).collect();
    let mut reports = run_cap_check(&cap_dims, &unit_grid(101))?.reports;
    for (i, entry) in default_suite().into_iter().enumerate() {
        let sub = seed.child(i as u64);
        match entry {
            SuiteEntry::Single(spec, trials) => reports.push(spec.run(&MonteCarlo {
                trials,
                seed: sub,
                confidence,
            })?),
            SuiteEntry::Sweep(spec, axis, values, trials) => reports.extend(sweep(
                &spec,
                axis,
                &values,
                &MonteCarlo {
                    trials,
                    seed: sub,
                    confidence,
                },
            )?),
        }
    }
    Ok(reports)
}
