use serde::{Deserialize, Serialize};

use super::{collect_accepted, ecdf, named, quantile_grid, Check, Counts, Estimate, ExperimentOutput, ExperimentParams, ExperimentReport, Outcome, Table};
use crate::error::{Error, Result};
use crate::levy::simulate_path;
use crate::minorant::{compute_minorant, default_guard, recipe_d, straddle_interval};
use crate::numeric::stats::{ks_statistic, variance_std_error, Moments};
use crate::oracle::{h_cdf, h_moments, k_cdf_zero_drift, k_quantile_zero_drift, BrownianParams, Normalized};

/// Straddling-interval quantities of one accepted replicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StraddleSample {
    pub replicate: u64,
    pub g: f64,
    pub d: f64,
    pub t: f64,
    pub s: f64,
    pub k: f64,
    pub h: f64,
    /// Recipe output, to be compared with `d`.
    pub e: f64,
}

impl StraddleSample {
    /// `E` and `D` coincide up to one grid cell.
    pub fn recipe_agrees(&self, dt: f64) -> bool {
        (self.e - self.d).abs() <= dt * (1.0 + 1e-9)
    }

    /// `G <= T <= S <= D`, each up to one grid cell.
    pub fn ordered(&self, dt: f64) -> bool {
        let slack = dt * (1.0 + 1e-9);
        self.g <= self.t + slack && self.t <= self.s + slack && self.s <= self.d + slack
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StraddleRun {
    pub params: ExperimentParams,
    pub samples: Vec<StraddleSample>,
    pub counts: Counts,
}

impl StraddleRun {
    fn column(&self, f: impl Fn(&StraddleSample) -> f64) -> Vec<f64> {
        self.samples.iter().map(f).collect()
    }

    fn raw_table(&self) -> Table {
        let mut table = Table::new("raw", &["replicate", "g", "d", "t", "s", "k", "h", "e"]);
        for s in &self.samples {
            table.push(vec![s.replicate as f64, s.g, s.d, s.t, s.s, s.k, s.h, s.e]);
        }
        table
    }
}

fn straddle_outcome(params: &ExperimentParams, replicate: u64) -> Result<Outcome<StraddleSample>> {
    let path = simulate_path(&params.model, &params.sim_config(replicate))?;
    let guard = default_guard(&path, params.alpha);
    let minorant = compute_minorant(&path, params.alpha, guard)?;
    let si = match straddle_interval(&path, &minorant) {
        Ok(si) => si,
        Err(Error::Contaminated(_)) => return Ok(Outcome::Contaminated),
        Err(e) => return Err(e),
    };
    if si.degenerate {
        return Ok(Outcome::Degenerate);
    }
    let recipe = match recipe_d(&path, params.alpha) {
        Ok(r) => r,
        Err(Error::Contaminated(_)) => return Ok(Outcome::Contaminated),
        Err(Error::Precondition(_)) => return Ok(Outcome::Precondition),
        Err(e) => return Err(e),
    };
    Ok(Outcome::Accepted(StraddleSample {
        replicate,
        g: si.g,
        d: si.d,
        t: si.t,
        s: si.s,
        k: si.k,
        h: si.h,
        e: recipe.e,
    }))
}

/// Simulates until `params.n` straddling intervals are accepted.
pub fn collect_straddle(params: &ExperimentParams) -> Result<StraddleRun> {
    params.validate()?;
    let (samples, counts) = collect_accepted(params.n, |i| straddle_outcome(params, i))?;
    Ok(StraddleRun {
        params: params.clone(),
        samples,
        counts,
    })
}

fn brownian(params: &ExperimentParams) -> Result<Normalized> {
    BrownianParams::normalized(&params.model, params.alpha)
}

/// `H` against Gamma(2, 4α): mean, variance and KS distance.
pub fn h_report(run: &StraddleRun) -> Result<ExperimentOutput> {
    let norm = brownian(&run.params)?;
    let (alpha, scale) = (norm.params.alpha, norm.height_scale);
    let h = run.column(|s| s.h);
    let moments: Moments = h.iter().copied().collect();
    let (mean0, var0) = h_moments(alpha);
    let (mean_oracle, var_oracle) = (mean0 * scale, var0 * scale * scale);
    let ks = ks_statistic(&h, |x| h_cdf(alpha, x / scale));

    let mut report = ExperimentReport::new("h", &run.params, run.counts);
    report.estimates.push(Estimate::new("mean_h", moments.mean, moments.std_error(), h.len()));
    report
        .estimates
        .push(Estimate::new("var_h", moments.variance(), variance_std_error(&h), h.len()));
    report.oracle.push(named("mean_h", mean_oracle));
    report.oracle.push(named("var_h", var_oracle));
    report.statistics.push(named("ks_h", ks));
    report
        .statistics
        .push(named("z_mean_h", (moments.mean - mean_oracle) / moments.std_error()));
    report.checks.push(Check::at_most(
        "mean_h",
        (moments.mean - mean_oracle).abs(),
        3.0 * moments.std_error() + 0.01,
    ));
    report.checks.push(Check::at_most("ks_h", ks, 0.03));

    let mut sorted = h.clone();
    sorted.sort_by(f64::total_cmp);
    let mut cdf = Table::new("h_cdf", &["h", "empirical", "oracle"]);
    for x in quantile_grid(&sorted, 100) {
        cdf.push(vec![x, ecdf(&sorted, x), h_cdf(alpha, x / scale)]);
    }
    Ok(ExperimentOutput {
        report: report.finish(),
        raw: run.raw_table(),
        series: vec![cdf],
    })
}

/// Sign of the sawtooth peak: `P{T > 0} = (α + β)/(2α)`.
pub fn t_sign_report(run: &StraddleRun) -> Result<ExperimentOutput> {
    let norm = brownian(&run.params)?;
    let n = run.samples.len();
    let positive = run.samples.iter().filter(|s| s.t > 0.0).count();
    let p_hat = positive as f64 / n as f64;
    let p = norm.params.p_t_positive();
    let se = (p * (1.0 - p) / n as f64).sqrt();

    let mut report = ExperimentReport::new("t-sign", &run.params, run.counts);
    report.estimates.push(Estimate::new(
        "p_t_positive",
        p_hat,
        (p_hat * (1.0 - p_hat) / n as f64).sqrt(),
        n,
    ));
    report.oracle.push(named("p_t_positive", p));
    report.statistics.push(named("z", (p_hat - p) / se));
    report.checks.push(Check::at_most("p_t_positive", (p_hat - p).abs(), 3.0 * se));
    Ok(ExperimentOutput {
        report: report.finish(),
        raw: run.raw_table(),
        series: Vec::new(),
    })
}

pub const DEFAULT_THETA_GRID: [f64; 4] = [0.5, 1.0, 2.0, 4.0];
/// Equal-probability bins used for the `K` histogram at zero drift.
pub const K_BINS: usize = 20;

/// `E[e^{-θK}]` on the θ grid and, at zero drift, the binned law of `K`.
pub fn k_laplace_report(run: &StraddleRun) -> Result<ExperimentOutput> {
    let params = &run.params;
    let norm = brownian(params)?;
    let bp = norm.params;
    let theta_grid: Vec<f64> = if params.theta_grid.is_empty() {
        DEFAULT_THETA_GRID.to_vec()
    } else {
        params.theta_grid.clone()
    };
    let k = run.column(|s| s.k);
    let mut report = ExperimentReport::new("k-laplace", params, run.counts);
    let mut curve = Table::new("k_laplace", &["theta", "empirical", "std_error", "oracle"]);

    for &theta in &theta_grid {
        let m: Moments = k.iter().map(|&x| (-theta * x).exp()).collect();
        let oracle = bp.k_laplace(theta)?;
        report
            .estimates
            .push(Estimate::new(format!("laplace_k[{theta}]"), m.mean, m.std_error(), k.len()));
        report.oracle.push(named(format!("laplace_k[{theta}]"), oracle));
        let allowance = (3.0 * m.std_error()).max(0.02 * oracle);
        report
            .checks
            .push(Check::at_most(format!("laplace_k[{theta}]"), (m.mean - oracle).abs(), allowance));
        curve.push(vec![theta, m.mean, m.std_error(), oracle]);
    }
    report
        .checks
        .push(Check::at_most("laplace_k[0]", (bp.k_laplace(0.0)? - 1.0).abs(), 1e-12));
    let short = k.iter().filter(|&&x| x < params.dt * (1.0 - 1e-9)).count();
    report
        .checks
        .push(Check::at_most("k_at_least_dt", short as f64, 0.0));

    let mut series = vec![curve];
    if bp.beta == 0.0 {
        let (sup, table) = k_bins(&k, bp.alpha)?;
        report.statistics.push(named("k_bins_sup", sup));
        report
            .statistics
            .push(named("ks_k", ks_statistic(&k, |x| k_cdf_zero_drift(bp.alpha, x).unwrap_or(f64::NAN))));
        report.checks.push(Check::at_most("k_bins_sup", sup, 0.02));
        series.push(table);
    }
    Ok(ExperimentOutput {
        report: report.finish(),
        raw: run.raw_table(),
        series,
    })
}

/// Empirical CDF at the oracle's `j/K_BINS` quantiles; returns the largest deviation.
fn k_bins(k: &[f64], alpha: f64) -> Result<(f64, Table)> {
    let mut sorted = k.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut table = Table::new("k_bins", &["lower", "upper", "empirical_mass", "oracle_mass", "empirical_cdf", "oracle_cdf"]);
    let mut sup = 0.0_f64;
    let mut lower = 0.0;
    let mut prev_cdf = 0.0;
    for j in 1..=K_BINS {
        let p = j as f64 / K_BINS as f64;
        let upper = if j == K_BINS {
            f64::INFINITY
        } else {
            k_quantile_zero_drift(alpha, p)?
        };
        let cdf = if j == K_BINS { 1.0 } else { ecdf(&sorted, upper) };
        sup = sup.max((cdf - p).abs());
        table.push(vec![lower, upper, cdf - prev_cdf, 1.0 / K_BINS as f64, cdf, p]);
        lower = upper;
        prev_cdf = cdf;
    }
    Ok((sup, table))
}

/// Recipe output `E` equals `D`, and `G <= T <= S <= D`.
pub fn recipe_report(run: &StraddleRun) -> Result<ExperimentOutput> {
    let n = run.samples.len();
    let dt = run.params.dt;
    let agree = run.samples.iter().filter(|s| s.recipe_agrees(dt)).count();
    let ordered = run.samples.iter().filter(|s| s.ordered(dt)).count();
    let mut report = ExperimentReport::new("recipe", &run.params, run.counts);
    for (name, count) in [("recipe_e_equals_d", agree), ("order_g_t_s_d", ordered)] {
        let frac = count as f64 / n as f64;
        report.estimates.push(Estimate::new(name, frac, (frac * (1.0 - frac) / n as f64).sqrt(), n));
        report.checks.push(Check::at_least(name, frac, 0.999));
    }
    let mismatch: Vec<f64> = run.samples.iter().map(|s| (s.e - s.d).abs()).collect();
    report
        .statistics
        .push(named("max_abs_e_minus_d", mismatch.iter().copied().fold(0.0, f64::max)));
    Ok(ExperimentOutput {
        report: report.finish(),
        raw: run.raw_table(),
        series: Vec::new(),
    })
}

pub fn run_h_experiment(params: &ExperimentParams) -> Result<ExperimentOutput> {
    brownian(params)?;
    h_report(&collect_straddle(params)?)
}

pub fn run_t_sign(params: &ExperimentParams) -> Result<ExperimentOutput> {
    brownian(params)?;
    t_sign_report(&collect_straddle(params)?)
}

pub fn run_k_laplace(params: &ExperimentParams) -> Result<ExperimentOutput> {
    brownian(params)?;
    k_laplace_report(&collect_straddle(params)?)
}

/// The recipe check runs for any model; jump paths can hit the precondition.
pub fn run_recipe_check(params: &ExperimentParams) -> Result<ExperimentOutput> {
    recipe_report(&collect_straddle(params)?)
}
