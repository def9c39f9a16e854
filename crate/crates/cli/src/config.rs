//! Argument and config-file parsing into a validated [`RunConfig`].
//!
//! Every experiment parameter can come from a flag or from a flat
//! `key = value` file passed with `--config`; flags win. Keys use the flag
//! names with `-` replaced by `_`.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fewshot_core::experiments::{BallSpec, ExperimentSpec, SweepAxis, DEFAULT_FRESH};
use fewshot_core::stats::DEFAULT_CONFIDENCE;
use fewshot_core::Shape;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "fewshot",
    version,
    about = "Seeded checks of few-shot patch bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: CommandArgs,
}

#[derive(Debug, Subcommand)]
enum CommandArgs {
    /// Pairwise quasi-orthogonality of k draws from a ball.
    QuasiOrth(Params),
    /// Distance from the empirical mean of k draws to the ball centre.
    Centering(Params),
    /// Memorizing patch built from k orthant examples; agreement on the unit ball.
    LearnFew(Params),
    /// Generalizing patch built from k draws of a new class.
    LearnFromFew(Params),
    /// Exact spherical cap fractions against their closed-form bound.
    CapCheck(Params),
    /// One experiment run once per value of a swept parameter.
    Sweep(Params),
    /// The full default verification grid.
    VerifyAll(Params),
}

/// Flags shared by all subcommands. Each is also a config-file key.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Flat `key = value` file with defaults for any flag below.
    #[arg(long, value_name = "PATH")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Root seed; required except for cap-check [range: 0..2^64)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Dimension [default: 50; learn-few 20; learn-from-few 200] [range: >= 1]
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of examples per trial [default: 10; patch experiments 5] [range: >= 1]
    #[arg(long)]
    pub k: Option<usize>,
    /// Radius of the sampled ball [default: 1] [range: > 0]
    #[arg(long)]
    pub v: Option<f64>,
    /// Distance of the ball centre from the origin along axis 1 [default: 0; learn-from-few 2] [range: finite]
    #[arg(long)]
    pub center: Option<f64>,
    /// Radial profile of the sampled ball [default: uniform-ball]
    #[arg(long, value_enum)]
    pub shape: Option<ShapeArg>,
    /// Radial exponent for --shape radial-power [default: 2] [range: >= 0]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Quasi-orthogonality level [default: 0.5; learn-from-few 0.3] [range: (0, 1)]
    #[arg(long)]
    pub delta: Option<f64>,
    /// Shell thickness [default: 0.1] [range: (0, 1)]
    #[arg(long)]
    pub eps: Option<f64>,
    /// Position of theta between its lower and upper limits [default: 0.5] [range: [0, 1]]
    #[arg(long)]
    pub theta_mix: Option<f64>,
    /// Monte Carlo trials [default: 100000; patch experiments 10000] [range: >= 1000]
    #[arg(long)]
    pub trials: Option<u64>,
    /// Fresh evaluation points per trial [default: 1000; learn-from-few 100] [range: >= 1]
    #[arg(long)]
    pub fresh: Option<usize>,
    /// Confidence of the Wilson intervals [default: 0.99] [range: (0, 1)]
    #[arg(long)]
    pub confidence: Option<f64>,
    /// Largest dimension checked by cap-check [default: 30] [range: >= 1]
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Grid points on [0, 1] for cap-check [default: 101] [range: >= 2]
    #[arg(long)]
    pub grid: Option<usize>,
    /// Experiment to sweep (required for sweep)
    #[arg(long, value_enum)]
    pub experiment: Option<SweptExperiment>,
    /// Parameter to sweep (required for sweep)
    #[arg(long, value_enum)]
    pub axis: Option<AxisArg>,
    /// Comma-separated, strictly increasing values of the swept parameter (required for sweep)
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub values: Option<Vec<f64>>,
    /// CSV output path [default: ./out/<command>-<seed>.csv]
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// JSON output path [default: ./out/<command>-<seed>.json]
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeArg {
    UniformBall,
    RadialPower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweptExperiment {
    QuasiOrth,
    Centering,
    LearnFew,
    LearnFromFew,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum AxisArg {
    N,
    K,
    Delta,
    ThetaMix,
}

impl From<AxisArg> for SweepAxis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::N => SweepAxis::N,
            AxisArg::K => SweepAxis::K,
            AxisArg::Delta => SweepAxis::Delta,
            AxisArg::ThetaMix => SweepAxis::ThetaMix,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    QuasiOrth,
    Centering,
    LearnFew,
    LearnFromFew,
    CapCheck,
    Sweep,
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::QuasiOrth => "quasi-orth",
            Command::Centering => "centering",
            Command::LearnFew => "learn-few",
            Command::LearnFromFew => "learn-from-few",
            Command::CapCheck => "cap-check",
            Command::Sweep => "sweep",
            Command::VerifyAll => "verify-all",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Command::QuasiOrth | Command::Centering => &[
                "seed",
                "n",
                "k",
                "v",
                "center",
                "shape",
                "alpha",
                "delta",
                "eps",
                "trials",
                "csv",
                "json",
                "confidence",
            ],
            Command::LearnFew => &[
                "seed",
                "n",
                "k",
                "v",
                "center",
                "shape",
                "alpha",
                "trials",
                "fresh",
                "csv",
                "json",
                "confidence",
            ],
            Command::LearnFromFew => &[
                "seed",
                "n",
                "k",
                "v",
                "center",
                "shape",
                "alpha",
                "delta",
                "theta_mix",
                "trials",
                "fresh",
                "csv",
                "json",
                "confidence",
            ],
            Command::CapCheck => &["seed", "n_max", "grid", "csv", "json"],
            Command::Sweep => &[
                "seed",
                "n",
                "k",
                "v",
                "center",
                "shape",
                "alpha",
                "delta",
                "eps",
                "theta_mix",
                "trials",
                "fresh",
                "experiment",
                "axis",
                "values",
                "csv",
                "json",
                "confidence",
            ],
            Command::VerifyAll => &["seed", "csv", "json", "confidence"],
        }
    }
}

/// What to run.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Single {
        spec: ExperimentSpec,
        trials: u64,
    },
    CapCheck {
        n_max: usize,
        grid: usize,
    },
    Sweep {
        spec: ExperimentSpec,
        axis: SweepAxis,
        values: Vec<f64>,
        trials: u64,
    },
    VerifyAll,
}

/// A fully resolved and validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub job: Job,
    pub seed: Option<u64>,
    pub confidence: f64,
    pub csv: PathBuf,
    pub json: PathBuf,
}

/// Parses `argv` (including the program name). Clap's own errors, `--help`
/// and `--version` come back as [`CliError::Clap`].
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(CliError::Clap)?;
    let (command, flags) = match cli.command {
        CommandArgs::QuasiOrth(p) => (Command::QuasiOrth, p),
        CommandArgs::Centering(p) => (Command::Centering, p),
        CommandArgs::LearnFew(p) => (Command::LearnFew, p),
        CommandArgs::LearnFromFew(p) => (Command::LearnFromFew, p),
        CommandArgs::CapCheck(p) => (Command::CapCheck, p),
        CommandArgs::Sweep(p) => (Command::Sweep, p),
        CommandArgs::VerifyAll(p) => (Command::VerifyAll, p),
    };
    let file = match &flags.config {
        Some(path) => read_config_file(path)?,
        None => Params::default(),
    };
    resolve(command, merge(flags, file))
}

fn read_config_file(path: &Path) -> Result<Params, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config file {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| {
        CliError::Usage(format!(
            "invalid config file {}: {}",
            path.display(),
            e.message()
        ))
    })
}

macro_rules! merge_fields {
    ($flags:ident, $file:ident; $($f:ident),*) => {
        Params { config: None, $($f: $flags.$f.or($file.$f)),* }
    };
}

/// Flag values take precedence over config-file values.
fn merge(flags: Params, file: Params) -> Params {
    merge_fields!(flags, file; seed, n, k, v, center, shape, alpha, delta, eps, theta_mix,
        trials, fresh, confidence, n_max, grid, experiment, axis, values, csv, json)
}

fn set_keys(p: &Params) -> BTreeSet<&'static str> {
    let mut keys = BTreeSet::new();
    let mut mark = |name: &'static str, set: bool| {
        if set {
            keys.insert(name);
        }
    };
    mark("seed", p.seed.is_some());
    mark("n", p.n.is_some());
    mark("k", p.k.is_some());
    mark("v", p.v.is_some());
    mark("center", p.center.is_some());
    mark("shape", p.shape.is_some());
    mark("alpha", p.alpha.is_some());
    mark("delta", p.delta.is_some());
    mark("eps", p.eps.is_some());
    mark("theta_mix", p.theta_mix.is_some());
    mark("trials", p.trials.is_some());
    mark("fresh", p.fresh.is_some());
    mark("confidence", p.confidence.is_some());
    mark("n_max", p.n_max.is_some());
    mark("grid", p.grid.is_some());
    mark("experiment", p.experiment.is_some());
    mark("axis", p.axis.is_some());
    mark("values", p.values.is_some());
    mark("csv", p.csv.is_some());
    mark("json", p.json.is_some());
    keys
}

fn invalid(key: &str, value: impl std::fmt::Display, range: &str) -> CliError {
    CliError::Usage(format!(
        "invalid value for `{key}`: {value} (valid range: {range})"
    ))
}

fn check_f64(
    key: &str,
    value: f64,
    range: &str,
    ok: impl Fn(f64) -> bool,
) -> Result<f64, CliError> {
    if value.is_finite() && ok(value) {
        Ok(value)
    } else {
        Err(invalid(key, value, range))
    }
}

fn at_least<T: PartialOrd + std::fmt::Display + Copy>(
    key: &str,
    value: T,
    min: T,
    range: &str,
) -> Result<T, CliError> {
    if value >= min {
        Ok(value)
    } else {
        Err(invalid(key, value, range))
    }
}

fn open_unit(key: &str, value: f64) -> Result<f64, CliError> {
    check_f64(key, value, "(0, 1)", |x| x > 0.0 && x < 1.0)
}

/// Per-experiment defaults, chosen to match the default verification grid.
struct Defaults {
    n: usize,
    k: usize,
    center: f64,
    delta: f64,
    trials: u64,
    fresh: usize,
}

fn defaults_for(e: SweptExperiment) -> Defaults {
    match e {
        SweptExperiment::QuasiOrth | SweptExperiment::Centering => Defaults {
            n: 50,
            k: 10,
            center: 0.0,
            delta: 0.5,
            trials: 100_000,
            fresh: DEFAULT_FRESH,
        },
        SweptExperiment::LearnFew => Defaults {
            n: 20,
            k: 5,
            center: 0.0,
            delta: 0.5,
            trials: 10_000,
            fresh: DEFAULT_FRESH,
        },
        SweptExperiment::LearnFromFew => Defaults {
            n: 200,
            k: 5,
            center: 2.0,
            delta: 0.3,
            trials: 10_000,
            fresh: 100,
        },
    }
}

fn build_spec(e: SweptExperiment, p: &Params) -> Result<(ExperimentSpec, u64), CliError> {
    let d = defaults_for(e);
    let n = at_least("n", p.n.unwrap_or(d.n), 1, ">= 1")?;
    let k = at_least("k", p.k.unwrap_or(d.k), 1, ">= 1")?;
    let radius = check_f64("v", p.v.unwrap_or(1.0), "> 0", |v| v > 0.0)?;
    let center_distance = check_f64("center", p.center.unwrap_or(d.center), "finite", |_| true)?;
    let shape = match p.shape.unwrap_or(ShapeArg::UniformBall) {
        ShapeArg::UniformBall => {
            if p.alpha.is_some() {
                return Err(CliError::Usage(
                    "`alpha` only applies with `shape = radial-power`".into(),
                ));
            }
            Shape::UniformBall
        }
        ShapeArg::RadialPower => Shape::RadialPower {
            alpha: check_f64("alpha", p.alpha.unwrap_or(2.0), ">= 0", |a| a >= 0.0)?,
        },
    };
    let ball = BallSpec {
        radius,
        center_distance,
        shape,
    };
    let delta = open_unit("delta", p.delta.unwrap_or(d.delta))?;
    let eps = open_unit("eps", p.eps.unwrap_or(0.1))?;
    let theta_mix = check_f64("theta_mix", p.theta_mix.unwrap_or(0.5), "[0, 1]", |m| {
        (0.0..=1.0).contains(&m)
    })?;
    let trials = at_least("trials", p.trials.unwrap_or(d.trials), 1000, ">= 1000")?;
    let fresh = at_least("fresh", p.fresh.unwrap_or(d.fresh), 1, ">= 1")?;
    let spec = match e {
        SweptExperiment::QuasiOrth => ExperimentSpec::QuasiOrth {
            n,
            k,
            dist: ball,
            delta,
            eps,
        },
        SweptExperiment::Centering => ExperimentSpec::Centering {
            n,
            k,
            dist: ball,
            delta,
            eps,
        },
        SweptExperiment::LearnFew => ExperimentSpec::LearnFew {
            n,
            k,
            new_points: ball,
            fresh,
        },
        SweptExperiment::LearnFromFew => ExperimentSpec::LearnFromFew {
            n,
            k,
            new_class: ball,
            delta,
            theta_mix,
            fresh,
        },
    };
    Ok((spec, trials))
}

fn resolve(command: Command, p: Params) -> Result<RunConfig, CliError> {
    let allowed = command.keys();
    if let Some(key) = set_keys(&p).into_iter().find(|k| !allowed.contains(k)) {
        return Err(CliError::Usage(format!(
            "`{key}` does not apply to {}; accepted keys: {}",
            command.name(),
            allowed.join(", ")
        )));
    }
    let seed = p.seed;
    if seed.is_none() && command != Command::CapCheck {
        return Err(CliError::Usage(format!(
            "`seed` is required for {}",
            command.name()
        )));
    }
    let confidence = open_unit("confidence", p.confidence.unwrap_or(DEFAULT_CONFIDENCE))?;
    let job = match command {
        Command::QuasiOrth => single(SweptExperiment::QuasiOrth, &p)?,
        Command::Centering => single(SweptExperiment::Centering, &p)?,
        Command::LearnFew => single(SweptExperiment::LearnFew, &p)?,
        Command::LearnFromFew => single(SweptExperiment::LearnFromFew, &p)?,
        Command::CapCheck => Job::CapCheck {
            n_max: at_least("n_max", p.n_max.unwrap_or(30), 1, ">= 1")?,
            grid: at_least("grid", p.grid.unwrap_or(101), 2, ">= 2")?,
        },
        Command::Sweep => {
            let experiment = p.experiment.ok_or_else(|| required("experiment"))?;
            let axis: SweepAxis = p.axis.ok_or_else(|| required("axis"))?.into();
            let values = p.values.clone().ok_or_else(|| required("values"))?;
            if values.is_empty() || values.windows(2).any(|w| w[1] <= w[0]) {
                return Err(invalid(
                    "values",
                    format!("{values:?}"),
                    "nonempty, strictly increasing",
                ));
            }
            let (spec, trials) = build_spec(experiment, &p)?;
            // Validate every swept value up front, before any trial runs.
            for &value in &values {
                spec.with_axis(axis, value).map_err(|e| {
                    CliError::Usage(format!(
                        "invalid value for `values` on axis {}: {e}",
                        axis.name()
                    ))
                })?;
                check_swept(axis, value)?;
            }
            Job::Sweep {
                spec,
                axis,
                values,
                trials,
            }
        }
        Command::VerifyAll => Job::VerifyAll,
    };
    let stem = match seed {
        Some(s) => format!("{}-{s}", command.name()),
        None => command.name().to_string(),
    };
    let out = Path::new(".").join("out");
    Ok(RunConfig {
        command,
        job,
        seed,
        confidence,
        csv: p.csv.unwrap_or_else(|| out.join(format!("{stem}.csv"))),
        json: p.json.unwrap_or_else(|| out.join(format!("{stem}.json"))),
    })
}

fn check_swept(axis: SweepAxis, value: f64) -> Result<(), CliError> {
    match axis {
        SweepAxis::Delta => open_unit("values", value).map(drop),
        SweepAxis::ThetaMix => {
            check_f64("values", value, "[0, 1]", |m| (0.0..=1.0).contains(&m)).map(drop)
        }
        SweepAxis::N | SweepAxis::K => Ok(()),
    }
}

fn single(e: SweptExperiment, p: &Params) -> Result<Job, CliError> {
    let (spec, trials) = build_spec(e, p)?;
    Ok(Job::Single { spec, trials })
}

fn required(key: &str) -> CliError {
    CliError::Usage(format!("`{key}` is required for sweep"))
}
