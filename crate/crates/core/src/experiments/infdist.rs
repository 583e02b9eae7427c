use super::{collect_accepted, named, quantile_grid, ecdf, Check, Estimate, ExperimentOutput, ExperimentParams, ExperimentReport, Outcome, Table};
use crate::error::Result;
use crate::levy::{simulate_side, Side};
use crate::numeric::special::exp_cdf;
use crate::numeric::stats::{ks_statistic, Moments};
use crate::oracle::BrownianParams;
use crate::path::CadlagPath;

/// Fraction of the window next to its far edge in which a minimiser is rejected.
const EDGE_FRACTION: f64 = 0.1;

/// `-inf` of `w(t) + sign·α·t` over the grid, or `None` if it is attained near the far edge.
fn side_infimum(path: &CadlagPath, alpha: f64, side: Side, window: f64) -> Option<f64> {
    let sign = match side {
        Side::Positive => 1.0,
        Side::Negative => -1.0,
    };
    let times = path.times();
    let (mut best, mut at) = (f64::INFINITY, 0.0);
    for (i, &t) in times.iter().enumerate() {
        let v = path.lower(i) + sign * alpha * t;
        if v < best {
            best = v;
            at = t;
        }
    }
    (at.abs() <= (1.0 - EDGE_FRACTION) * window).then_some(-best)
}

/// Validates the simulator and window against the exponential laws
/// `-inf_{t<=0}(X_t - αt) ~ Exp(2(α-β)/σ²)` and `-inf_{t>=0}(X_t + αt) ~ Exp(2(α+β)/σ²)`.
pub fn run_infdist(params: &ExperimentParams) -> Result<ExperimentOutput> {
    params.validate()?;
    let norm = BrownianParams::normalized(&params.model, params.alpha)?;
    let (neg_rate, pos_rate) = norm.params.neg_inf_exp_rates();
    let (neg_rate, pos_rate) = (neg_rate / norm.height_scale, pos_rate / norm.height_scale);

    let (pairs, counts) = collect_accepted(params.n, |i| {
        let cfg = params.sim_config(i);
        let neg = simulate_side(&params.model, &cfg, Side::Negative)?;
        let pos = simulate_side(&params.model, &cfg, Side::Positive)?;
        Ok(
            match (
                side_infimum(&neg, params.alpha, Side::Negative, params.window),
                side_infimum(&pos, params.alpha, Side::Positive, params.window),
            ) {
                (Some(a), Some(b)) => Outcome::Accepted((i, a, b)),
                _ => Outcome::Contaminated,
            },
        )
    })?;

    let mut report = ExperimentReport::new("infdist", params, counts);
    let mut series = Vec::new();
    let mut raw = Table::new("raw", &["replicate", "negative_side", "positive_side"]);
    for &(i, a, b) in &pairs {
        raw.push(vec![i as f64, a, b]);
    }
    for (label, rate, column) in [("negative_side", neg_rate, 1), ("positive_side", pos_rate, 2)] {
        let samples: Vec<f64> = pairs
            .iter()
            .map(|p| if column == 1 { p.1 } else { p.2 })
            .collect();
        let m: Moments = samples.iter().copied().collect();
        let ks = ks_statistic(&samples, |x| exp_cdf(x, rate));
        report
            .estimates
            .push(Estimate::new(format!("mean_{label}"), m.mean, m.std_error(), samples.len()));
        report.oracle.push(named(format!("mean_{label}"), 1.0 / rate));
        report.statistics.push(named(format!("ks_{label}"), ks));
        report.checks.push(Check::at_most(format!("ks_{label}"), ks, 0.02));

        let mut sorted = samples;
        sorted.sort_by(f64::total_cmp);
        let mut cdf = Table::new(format!("cdf_{label}"), &["x", "empirical", "oracle"]);
        for x in quantile_grid(&sorted, 100) {
            cdf.push(vec![x, ecdf(&sorted, x), exp_cdf(x, rate)]);
        }
        series.push(cdf);
    }
    Ok(ExperimentOutput {
        report: report.finish(),
        raw,
        series,
    })
}
