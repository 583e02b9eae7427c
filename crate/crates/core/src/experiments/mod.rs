//! Monte Carlo experiments comparing simulated straddling intervals and
//! contact sets with the closed forms and integral criteria.
//!
//! Replicate `i` of an experiment always uses the random streams keyed by
//! `(seed, i)`, replicates are accepted or rejected on their own path only, and
//! the first `n` accepted replicates in id order are kept. Reports therefore
//! depend on `(name, params)` alone, not on scheduling.

mod alpha_limit;
mod cover;
mod infdist;
mod straddle;

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::{LevyModel, SimConfig};

pub use alpha_limit::{local_minima, run_alpha_limit, AlphaLimitOptions};
pub use cover::{contact_fraction, run_stationarity_cover};
pub use infdist::run_infdist;
pub use straddle::{
    collect_straddle, h_report, k_laplace_report, recipe_report, run_h_experiment, run_k_laplace, run_recipe_check,
    run_t_sign, t_sign_report, StraddleRun, StraddleSample,
};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    H,
    TSign,
    KLaplace,
    Recipe,
    AlphaLimit,
    Cover,
    Infdist,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::H,
        ExperimentKind::TSign,
        ExperimentKind::KLaplace,
        ExperimentKind::Recipe,
        ExperimentKind::AlphaLimit,
        ExperimentKind::Cover,
        ExperimentKind::Infdist,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::H => "h",
            ExperimentKind::TSign => "t-sign",
            ExperimentKind::KLaplace => "k-laplace",
            ExperimentKind::Recipe => "recipe",
            ExperimentKind::AlphaLimit => "alpha-limit",
            ExperimentKind::Cover => "cover",
            ExperimentKind::Infdist => "infdist",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
                Error::param(format!("unknown experiment `{s}`; expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentParams {
    pub model: LevyModel,
    pub alpha: f64,
    pub window: f64,
    pub dt: f64,
    /// Accepted replicates (paths) wanted.
    pub n: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub theta_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alpha_grid: Vec<f64>,
}

impl ExperimentParams {
    /// Unit-variance Brownian motion with drift `beta`, `W = 20/(α - |β|)` and `Δt = 2.5e-4`.
    pub fn brownian(alpha: f64, beta: f64, n: usize, seed: u64) -> Self {
        let window = (20.0 / (alpha - beta.abs())).ceil();
        ExperimentParams {
            model: LevyModel::brownian(1.0, beta),
            alpha,
            window,
            dt: 2.5e-4,
            n,
            seed,
            theta_grid: Vec::new(),
            alpha_grid: Vec::new(),
        }
    }

    pub fn sim_config(&self, replicate: u64) -> SimConfig {
        SimConfig::new(self.window, self.dt, self.seed, replicate)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::param(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.n == 0 {
            return Err(Error::param("n must be at least 1"));
        }
        self.sim_config(0).steps_per_side()?;
        if self.theta_grid.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
            return Err(Error::param("theta grid values must be finite and >= 0"));
        }
        if self.alpha_grid.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::param("alpha grid values must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub name: String,
    pub value: f64,
    pub std_error: f64,
    pub n: u64,
}

impl Estimate {
    pub fn new(name: impl Into<String>, value: f64, std_error: f64, n: usize) -> Self {
        Estimate {
            name: name.into(),
            value,
            std_error,
            n: n as u64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Named {
    pub name: String,
    pub value: f64,
}

pub(crate) fn named(name: impl Into<String>, value: f64) -> Named {
    Named {
        name: name.into(),
        value,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    /// How `statistic` is compared with `threshold`.
    pub rule: String,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            statistic,
            threshold,
            rule: "statistic <= threshold".into(),
            pass: statistic <= threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            statistic,
            threshold,
            rule: "statistic >= threshold".into(),
            pass: statistic >= threshold,
        }
    }

    pub fn holds(name: impl Into<String>, pass: bool, rule: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            statistic: if pass { 1.0 } else { 0.0 },
            threshold: 1.0,
            rule: rule.into(),
            pass,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub attempted: u64,
    pub accepted: u64,
    /// Rejected because the quantity depends on the path near the window edge.
    pub contaminated: u64,
    /// The origin itself was a contact point.
    pub degenerate: u64,
    /// The recipe precondition failed at the stopping time.
    pub precondition: u64,
}

/// Column-oriented numeric table written as CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let csv_err = |e: csv::Error| Error::Csv {
            line: 0,
            message: e.to_string(),
        };
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string())).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub name: String,
    pub library_version: String,
    pub params: ExperimentParams,
    pub counts: Counts,
    pub estimates: Vec<Estimate>,
    pub oracle: Vec<Named>,
    pub statistics: Vec<Named>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl ExperimentReport {
    pub(crate) fn new(name: &str, params: &ExperimentParams, counts: Counts) -> Self {
        ExperimentReport {
            schema: REPORT_SCHEMA,
            name: name.to_string(),
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            params: params.clone(),
            counts,
            estimates: Vec::new(),
            oracle: Vec::new(),
            statistics: Vec::new(),
            checks: Vec::new(),
            passed: false,
        }
    }

    pub(crate) fn finish(mut self) -> Self {
        self.passed = self.checks.iter().all(|c| c.pass);
        self
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Report plus the per-replicate table and plot-ready series.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub report: ExperimentReport,
    pub raw: Table,
    pub series: Vec<Table>,
}

impl ExperimentOutput {
    /// Writes `report.json`, `raw.csv` and one `<series>.csv` per series into `dir`.
    ///
    /// `provenance` is embedded in the JSON report and written next to every CSV
    /// as `<file>.csv.json`, since CSV has no place for it.
    pub fn write_to(&self, dir: &Path, provenance: &serde_json::Value) -> Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let report_path = dir.join("report.json");
        let doc = serde_json::json!({ "provenance": provenance, "report": self.report });
        std::fs::write(&report_path, serde_json::to_string_pretty(&doc)? + "\n")?;
        written.push(report_path);
        for table in std::iter::once(&self.raw).chain(&self.series) {
            let file = if std::ptr::eq(table, &self.raw) {
                "raw.csv".to_string()
            } else {
                format!("{}.csv", table.name)
            };
            let path = dir.join(&file);
            table.write_csv(std::fs::File::create(&path)?)?;
            let side = dir.join(format!("{file}.json"));
            let meta = serde_json::json!({ "provenance": provenance, "table": table.name, "experiment": self.report.name });
            std::fs::write(&side, serde_json::to_string_pretty(&meta)? + "\n")?;
            written.push(path);
            written.push(side);
        }
        Ok(written)
    }
}

pub fn run_experiment(kind: ExperimentKind, params: &ExperimentParams) -> Result<ExperimentOutput> {
    match kind {
        ExperimentKind::H => run_h_experiment(params),
        ExperimentKind::TSign => run_t_sign(params),
        ExperimentKind::KLaplace => run_k_laplace(params),
        ExperimentKind::Recipe => run_recipe_check(params),
        ExperimentKind::AlphaLimit => run_alpha_limit(params, &AlphaLimitOptions::default()),
        ExperimentKind::Cover => run_stationarity_cover(params),
        ExperimentKind::Infdist => run_infdist(params),
    }
}

/// Outcome of one replicate.
pub(crate) enum Outcome<T> {
    Accepted(T),
    Contaminated,
    Degenerate,
    Precondition,
}

/// Runs replicates `0, 1, 2, ...` in parallel batches until `n` are accepted.
///
/// Fails when fewer than half of the first 200 or more attempts are accepted,
/// which means the window is too small for the parameters.
pub(crate) fn collect_accepted<T, F>(n: usize, f: F) -> Result<(Vec<T>, Counts)>
where
    T: Send,
    F: Fn(u64) -> Result<Outcome<T>> + Sync,
{
    const BATCH: u64 = 256;
    const MIN_FOR_RATE: u64 = 200;
    let mut kept = Vec::with_capacity(n);
    let mut counts = Counts::default();
    let mut next = 0u64;
    while kept.len() < n {
        let batch: Vec<Outcome<T>> = (next..next + BATCH).into_par_iter().map(&f).collect::<Result<_>>()?;
        next += BATCH;
        for outcome in batch {
            if kept.len() == n {
                break;
            }
            counts.attempted += 1;
            match outcome {
                Outcome::Accepted(v) => {
                    counts.accepted += 1;
                    kept.push(v);
                }
                Outcome::Contaminated => counts.contaminated += 1,
                Outcome::Degenerate => counts.degenerate += 1,
                Outcome::Precondition => counts.precondition += 1,
            }
        }
        if counts.attempted >= MIN_FOR_RATE && 2 * counts.accepted < counts.attempted {
            return Err(Error::Precondition(format!(
                "only {} of {} replicates accepted; enlarge the window (W >= 20/(alpha - |drift|) is the usual rule)",
                counts.accepted, counts.attempted
            )));
        }
    }
    Ok((kept, counts))
}

/// Points at which to tabulate an empirical CDF against its reference: sample quantiles.
pub(crate) fn quantile_grid(sorted: &[f64], points: usize) -> Vec<f64> {
    if sorted.is_empty() {
        return Vec::new();
    }
    (1..points)
        .map(|j| {
            let idx = (j * sorted.len()) / points;
            sorted[idx.min(sorted.len() - 1)]
        })
        .collect()
}

/// Empirical CDF `#{x <= v} / n` of sorted samples.
pub(crate) fn ecdf(sorted: &[f64], v: f64) -> f64 {
    sorted.partition_point(|&x| x <= v) as f64 / sorted.len() as f64
}
