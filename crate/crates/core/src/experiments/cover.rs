use super::{collect_accepted, named, Check, Estimate, ExperimentOutput, ExperimentParams, ExperimentReport, Outcome, Table};
use crate::criteria::p_k_zero;
use crate::error::Result;
use crate::levy::simulate_path;
use crate::minorant::{compute_minorant, default_guard};
use crate::numeric::stats::Moments;
use crate::path::CadlagPath;

/// Half-width of the core as a fraction of `W`. A wide margin keeps contamination rare,
/// since rejecting contaminated paths would favour paths with many contacts.
pub const CORE_FRACTION: f64 = 0.25;

/// Fraction of `[-half_width, half_width]` covered by the contact set of the
/// path interpolated linearly inside each cell, or `None` when the core touches
/// a contaminated point.
///
/// Within a cell the path is `f(t) = c + s(t - t_i)` and the minorant is the
/// smaller of the two cones through the scan apexes, so the contact part of
/// the cell is an interval obtained from two linear inequalities. For
/// bounded-variation paths simulated with jumps on the grid this is the exact
/// contact measure.
pub fn contact_fraction(path: &CadlagPath, alpha: f64, half_width: f64) -> Result<Option<f64>> {
    let result = compute_minorant(path, alpha, default_guard(path, alpha))?;
    let t = path.times();
    let w = path.lower_values();
    let mut covered = 0.0;
    let mut length = 0.0;
    for i in 0..path.len() - 1 {
        let (a, b) = (t[i].max(-half_width), t[i + 1].min(half_width));
        if a >= b {
            continue;
        }
        if result.contaminated[i] || result.contaminated[i + 1] {
            return Ok(None);
        }
        let dt = t[i + 1] - t[i];
        let c = path.values()[i];
        let c_end = path.left_values()[i + 1].unwrap_or(path.values()[i + 1]);
        let slope = (c_end - c) / dt;
        let apex = result.argmin_left[i];
        let forward = w[apex] + alpha * (t[i] - t[apex]);
        let apex = result.argmin_right[i + 1];
        let backward = w[apex] + alpha * (t[apex] - t[i + 1]);
        // (α - s)(u - t_i) >= c - forward and (α + s)(t_{i+1} - u) >= c_end - backward.
        let (mut lo, mut hi) = (a, b);
        for (coef, rhs, from_left) in [(alpha - slope, c - forward, true), (alpha + slope, c_end - backward, false)] {
            // coef * x >= rhs, with x the distance from the cell end the cone starts at.
            if coef == 0.0 {
                if rhs > 0.0 {
                    hi = lo;
                }
                continue;
            }
            let x = rhs / coef;
            match (coef > 0.0, from_left) {
                (true, true) => lo = lo.max(t[i] + x),
                (true, false) => hi = hi.min(t[i + 1] - x),
                (false, true) => hi = hi.min(t[i] + x),
                (false, false) => lo = lo.max(t[i + 1] - x),
            }
        }
        covered += (hi - lo).max(0.0);
        length += b - a;
    }
    Ok(Some(covered / length))
}

/// Time fraction of the core covered by the contact set, against `P{K = 0}`.
///
/// By stationarity of the contact set, the expected covered fraction of any
/// interval equals `P{0 ∈ Z}`. The same paths are also scanned at slope `2α`,
/// where the fraction can only grow.
pub fn run_stationarity_cover(params: &ExperimentParams) -> Result<ExperimentOutput> {
    params.validate()?;
    let oracle = p_k_zero(&params.model, params.alpha)?;
    let half = CORE_FRACTION * params.window;
    let (pairs, counts) = collect_accepted(params.n, |i| {
        let path = simulate_path(&params.model, &params.sim_config(i))?;
        let base = contact_fraction(&path, params.alpha, half)?;
        let doubled = contact_fraction(&path, 2.0 * params.alpha, half)?;
        Ok(match (base, doubled) {
            (Some(a), Some(b)) => Outcome::Accepted((i, a, b)),
            _ => Outcome::Contaminated,
        })
    })?;

    let base: Moments = pairs.iter().map(|p| p.1).collect();
    let doubled: Moments = pairs.iter().map(|p| p.2).collect();
    let monotone = pairs.iter().filter(|p| p.2 >= p.1).count();

    let mut report = ExperimentReport::new("cover", params, counts);
    report
        .estimates
        .push(Estimate::new("contact_fraction", base.mean, base.std_error(), pairs.len()));
    report.estimates.push(Estimate::new(
        "contact_fraction_double_alpha",
        doubled.mean,
        doubled.std_error(),
        pairs.len(),
    ));
    report.oracle.push(named("p_k_zero", oracle.value));
    report
        .statistics
        .push(named("z", (base.mean - oracle.value) / base.std_error()));
    report.checks.push(Check::at_most(
        "contact_fraction",
        (base.mean - oracle.value).abs(),
        3.0 * base.std_error(),
    ));
    report
        .checks
        .push(Check::at_most("double_alpha_monotone_failures", (pairs.len() - monotone) as f64, 0.0));

    let mut raw = Table::new("raw", &["replicate", "fraction", "fraction_double_alpha"]);
    for (i, a, b) in pairs {
        raw.push(vec![i as f64, a, b]);
    }
    Ok(ExperimentOutput {
        report: report.finish(),
        raw,
        series: Vec::new(),
    })
}
