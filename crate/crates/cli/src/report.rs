//! Flat CSV/JSON serialization of trial reports.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use fewshot_core::experiments::CapRow;
use fewshot_core::TrialReport;
use serde::Serialize;

use crate::CliError;

/// Column order of the CSV output.
pub const CSV_HEADER: &str = "experiment,n,k,v,rho,C_new,r,C_x,delta,eps,theta,theta_mix,trials,event,successes,p_hat,ci_low,ci_high,bound_raw,bound_clamped,vacuous,verdict";

/// One event of one report, flattened.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub experiment: &'static str,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub v: Option<f64>,
    pub rho: Option<f64>,
    #[serde(rename = "C_new")]
    pub c_new: Option<f64>,
    pub r: Option<f64>,
    #[serde(rename = "C_x")]
    pub c_x: Option<f64>,
    pub delta: Option<f64>,
    pub eps: Option<f64>,
    pub theta: Option<f64>,
    pub theta_mix: Option<f64>,
    pub trials: u64,
    pub event: String,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub bound_raw: f64,
    pub bound_clamped: f64,
    pub vacuous: bool,
    pub verdict: &'static str,
}

/// Flattens reports into rows sorted by `(experiment, n, k, event)`; ties
/// keep their input order.
pub fn rows(reports: &[TrialReport]) -> Vec<Row> {
    let mut rows: Vec<Row> = reports
        .iter()
        .flat_map(|rep| {
            let p = rep.params;
            rep.events.iter().map(move |e| Row {
                experiment: rep.experiment.name(),
                n: p.n,
                k: p.k,
                v: p.v,
                rho: p.rho,
                c_new: p.c_new,
                r: p.r,
                c_x: p.c_x,
                delta: p.delta,
                eps: p.eps,
                theta: p.theta,
                theta_mix: p.theta_mix,
                trials: e.estimate.trials,
                event: e.event.clone(),
                successes: e.estimate.successes,
                p_hat: e.estimate.p_hat,
                ci_low: e.estimate.ci_low,
                ci_high: e.estimate.ci_high,
                bound_raw: e.bound.raw,
                bound_clamped: e.bound.clamped,
                vacuous: e.bound.vacuous,
                verdict: e.verdict.name(),
            })
        })
        .collect();
    rows.sort_by(|a, b| {
        (a.experiment, a.n, a.k, &a.event).cmp(&(b.experiment, b.n, b.k, &b.event))
    });
    rows
}

/// 17 significant digits, exponent notation, independent of locale.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt<T>(x: Option<T>, f: impl Fn(T) -> String) -> String {
    x.map(f).unwrap_or_default()
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut out = String::with_capacity(256 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            r.experiment.to_string(),
            opt(r.n, |n| n.to_string()),
            opt(r.k, |k| k.to_string()),
            opt(r.v, fmt_float),
            opt(r.rho, fmt_float),
            opt(r.c_new, fmt_float),
            opt(r.r, fmt_float),
            opt(r.c_x, fmt_float),
            opt(r.delta, fmt_float),
            opt(r.eps, fmt_float),
            opt(r.theta, fmt_float),
            opt(r.theta_mix, fmt_float),
            r.trials.to_string(),
            r.event.clone(),
            r.successes.to_string(),
            fmt_float(r.p_hat),
            fmt_float(r.ci_low),
            fmt_float(r.ci_high),
            fmt_float(r.bound_raw),
            fmt_float(r.bound_clamped),
            r.vacuous.to_string(),
            r.verdict.to_string(),
        ];
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

/// Same records as [`to_csv`]; non-finite numbers become `null`.
pub fn to_json(rows: &[Row]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    let wrap = |source| CliError::Output {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(wrap)?;
    }
    fs::write(path, contents).map_err(wrap)
}

/// Writes the CSV and JSON forms of `reports`.
pub fn emit_report(
    reports: &[TrialReport],
    csv_path: &Path,
    json_path: &Path,
) -> Result<(), CliError> {
    let rows = rows(reports);
    write(csv_path, &to_csv(&rows))?;
    write(json_path, &to_json(&rows))
}

/// Plain-text `(n, a, exact, bound, ratio)` table.
pub fn cap_table(table: &[CapRow]) -> String {
    let mut out = String::from("n,a,exact,bound,ratio\n");
    for r in table {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            fmt_float(r.a),
            fmt_float(r.exact),
            fmt_float(r.bound),
            opt(r.ratio, fmt_float)
        );
    }
    out
}
