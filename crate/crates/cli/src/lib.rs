//! Command-line front end for the `fewshot_core` experiments.
//!
//! Exit codes: 0 when no bound is violated, 1 when some bound is, 2 on
//! usage errors, 3 when an output file cannot be written.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use fewshot_core::experiments::{self, run_cap_check, sweep, unit_grid};
use fewshot_core::{MonteCarlo, Seed, TrialReport, Verdict};

pub mod config;
pub mod report;

pub use config::{parse_config, Command, Job, RunConfig};
pub use report::{emit_report, CSV_HEADER};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "FEWSHOT_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Clap(clap::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] fewshot_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) => e.exit_code(),
            CliError::Usage(_) | CliError::Core(_) => 2,
            CliError::Output { .. } => 3,
        }
    }
}

/// Result of a successful run.
#[derive(Debug)]
pub struct Outcome {
    pub reports: Vec<TrialReport>,
    pub violations: usize,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        i32::from(self.violations > 0)
    }
}

fn summary_line(rep: &TrialReport) -> String {
    let mut line = rep.experiment.name().to_string();
    if let Some(n) = rep.params.n {
        line += &format!(" n={n}");
    }
    if let Some(k) = rep.params.k {
        line += &format!(" k={k}");
    }
    let events: Vec<String> = rep
        .events
        .iter()
        .map(|e| format!("{} {}", e.event, e.verdict.name()))
        .collect();
    format!("{line}: {}", events.join(", "))
}

/// Runs the configured job, writes both reports and prints one line per
/// completed experiment to `out`.
pub fn execute(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let mc = |trials| MonteCarlo {
        trials,
        seed: Seed::new(cfg.seed.expect("seed validated for experiment commands")),
        confidence: cfg.confidence,
    };
    let reports = match &cfg.job {
        Job::Single { spec, trials } => vec![spec.run(&mc(*trials))?],
        Job::Sweep {
            spec,
            axis,
            values,
            trials,
        } => sweep(spec, *axis, values, &mc(*trials))?,
        Job::CapCheck { n_max, grid } => {
            let dims: Vec<usize> = (1..=*n_max).collect();
            let check = run_cap_check(&dims, &unit_grid(*grid))?;
            let _ = write!(out, "{}", report::cap_table(&check.table));
            let _ = writeln!(
                out,
                "max exact/bound ratio: {}",
                report::fmt_float(check.max_ratio)
            );
            check.reports
        }
        Job::VerifyAll => experiments::run_default_suite(
            Seed::new(cfg.seed.expect("seed validated for verify-all")),
            cfg.confidence,
        )?,
    };
    for rep in &reports {
        let _ = writeln!(out, "{}", summary_line(rep));
    }
    emit_report(&reports, &cfg.csv, &cfg.json)?;
    let violations = reports
        .iter()
        .flat_map(|r| &r.events)
        .filter(|e| e.verdict == Verdict::BoundViolated)
        .count();
    let _ = writeln!(
        out,
        "wrote {} and {}; {violations} violated bound(s)",
        cfg.csv.display(),
        cfg.json.display()
    );
    Ok(Outcome {
        reports,
        violations,
    })
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => builder = builder.num_threads(n),
            _ => {
                return Err(CliError::Usage(format!(
                    "invalid value for `{THREADS_ENV}`: {raw} (valid range: positive integer)"
                )))
            }
        }
    }
    builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))
}

/// Full entry point: parse, run, report. Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = parse_config(argv).and_then(|cfg| {
        let pool = thread_pool()?;
        pool.install(|| execute(&cfg, &mut std::io::stdout().lock()))
    });
    match result {
        Ok(outcome) => outcome.exit_code(),
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            e.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
