//! Few-shot error correctors for classifiers in high dimension.
//!
//! A corrector is a stack of half-space patches `(w, theta, label)` laid over
//! a base classifier: inputs with `(w, x) >= theta` get the patch label, the
//! rest keep the base decision. This crate builds such patches from a handful
//! of examples, evaluates the closed-form probability bounds that describe
//! them, and checks those bounds against seeded Monte Carlo estimates.
//!
//! ```
//! use fewshot_core::{build_few_patch, ConstantLabel, Label, PatchedClassifier, Vector};
//!
//! let new = vec![Vector::new(vec![0.9, 0.1])?, Vector::new(vec![0.8, 0.3])?];
//! let patch = build_few_patch(&new, Label::from("cat"))?;
//! let pc = PatchedClassifier::new(ConstantLabel(Label::from("dog"))).with_patch(patch)?;
//! assert_eq!(pc.apply(&new[0])?.as_str(), "cat");
//! assert_eq!(pc.apply(&Vector::new(vec![-0.5, 0.2])?)?.as_str(), "dog");
//! # Ok::<(), fewshot_core::Error>(())
//! ```

pub mod bounds;
pub mod corrector;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod rng;
pub mod samplers;
mod special;
pub mod stats;

pub use bounds::{BoundInputs, BoundValue};
pub use corrector::{
    apply, build_few_patch, build_from_few_patch, empirical_mean, memorization_check,
    BaseClassifier, ConstantLabel, Label, NearestCentroid, Patch, PatchedClassifier, Provenance,
};
pub use error::{Error, Result};
pub use experiments::{Experiment, ExperimentSpec, MonteCarlo, SweepAxis, TrialReport, Verdict};
pub use geometry::{Ball, UnitDirection, Vector};
pub use rng::{Seed, StreamRng};
pub use samplers::{BallDistribution, Shape};
pub use stats::EstimateWithCI;

// The guide's chapters, compiled as doctests so their snippets stay correct.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/patches.md")]
    mod patches {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
