use rayon::prelude::*;

use super::{named, Check, Counts, Estimate, ExperimentOutput, ExperimentParams, ExperimentReport, Table};
use crate::error::{Error, Result};
use crate::levy::simulate_path;
use crate::minorant::{compute_minorant, default_guard, MinorantResult};
use crate::path::CadlagPath;

pub const DEFAULT_ALPHA_GRID: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaLimitOptions {
    /// Local minima within `|t| <= core_fraction * W` are examined.
    pub core_fraction: f64,
    /// The inclusion check at the large slope `params.alpha` runs on a skeleton
    /// of the path whose spacing `Δ` satisfies `alpha * sqrt(Δ) >= coarse_c`.
    pub coarse_c: f64,
}

impl Default for AlphaLimitOptions {
    fn default() -> Self {
        AlphaLimitOptions {
            core_fraction: 0.5,
            coarse_c: 6.0,
        }
    }
}

/// Indices of strict local minima of `w = min(f, f-)`, excluding the endpoints.
pub fn local_minima(path: &CadlagPath) -> Vec<usize> {
    let w = path.lower_values();
    (1..w.len().saturating_sub(1))
        .filter(|&i| w[i] < w[i - 1] && w[i] < w[i + 1])
        .collect()
}

/// Every `step`-th sample counted from the origin, keeping the origin.
fn skeleton(path: &CadlagPath, step: usize) -> Result<CadlagPath> {
    let origin = path
        .origin_index()
        .ok_or_else(|| Error::InvalidPath("the grid has no sample at t = 0".into()))?;
    let keep: Vec<usize> = (origin % step..path.len()).step_by(step).collect();
    CadlagPath::new(
        keep.iter().map(|&i| path.times()[i]).collect(),
        keep.iter().map(|&i| path.values()[i]).collect(),
        keep.iter().map(|&i| path.left_values()[i]).collect(),
    )
}

/// Distance in grid steps from each of `from` to the nearest index flagged in `targets`.
fn nearest_contact_steps(targets: &[bool], from: &[usize]) -> Vec<Option<usize>> {
    let n = targets.len();
    let mut prev = vec![None; n];
    let mut last = None;
    for i in 0..n {
        if targets[i] {
            last = Some(i);
        }
        prev[i] = last;
    }
    let mut next = vec![None; n];
    let mut last = None;
    for i in (0..n).rev() {
        if targets[i] {
            last = Some(i);
        }
        next[i] = last;
    }
    from.iter()
        .map(|&i| match (prev[i], next[i]) {
            (Some(p), Some(q)) => Some((i - p).min(q - i)),
            (Some(p), None) => Some(i - p),
            (None, Some(q)) => Some(q - i),
            (None, None) => None,
        })
        .collect()
}

#[derive(Debug, Clone, Default)]
struct Acc {
    /// Per alpha: histogram of local-minimum to contact distances in steps.
    hist: Vec<Vec<u64>>,
    /// Per alpha: histogram of contact to local-minimum distances in steps.
    reverse_hist: Vec<Vec<u64>>,
    /// Per alpha: local minima that are themselves contacts.
    minima_in_contact: Vec<u64>,
    minima: u64,
    nesting_violations: u64,
    coarse_minima: u64,
    coarse_failures: u64,
    rows: Vec<Vec<f64>>,
}

impl Acc {
    fn merge(mut self, other: Acc) -> Acc {
        if self.hist.is_empty() {
            return other;
        }
        if other.hist.is_empty() {
            return self;
        }
        for (a, b) in self.hist.iter_mut().zip(other.hist).chain(self.reverse_hist.iter_mut().zip(other.reverse_hist)) {
            add_hist(a, &b);
        }
        for (a, b) in self.minima_in_contact.iter_mut().zip(other.minima_in_contact) {
            *a += b;
        }
        self.minima += other.minima;
        self.nesting_violations += other.nesting_violations;
        self.coarse_minima += other.coarse_minima;
        self.coarse_failures += other.coarse_failures;
        self.rows.extend(other.rows);
        self
    }
}

fn add_hist(a: &mut Vec<u64>, b: &[u64]) {
    if a.len() < b.len() {
        a.resize(b.len(), 0);
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

fn bump(hist: &mut Vec<u64>, d: usize) {
    if hist.len() <= d {
        hist.resize(d + 1, 0);
    }
    hist[d] += 1;
}

fn in_core(path: &CadlagPath, i: usize, half_width: f64) -> bool {
    path.times()[i].abs() <= half_width
}

fn usable_contacts(result: &MinorantResult) -> Vec<bool> {
    result
        .contact_mask
        .iter()
        .zip(&result.contaminated)
        .map(|(&c, &bad)| c && !bad)
        .collect()
}

fn path_stats(params: &ExperimentParams, alphas: &[f64], step: usize, opts: &AlphaLimitOptions, replicate: u64) -> Result<Acc> {
    let path = simulate_path(&params.model, &params.sim_config(replicate))?;
    let core = opts.core_fraction * params.window;
    let all_minima = local_minima(&path);
    let mut is_minimum = vec![false; path.len()];
    for &i in &all_minima {
        is_minimum[i] = true;
    }
    let minima: Vec<usize> = all_minima.into_iter().filter(|&i| in_core(&path, i, core)).collect();

    let mut acc = Acc {
        hist: vec![Vec::new(); alphas.len()],
        reverse_hist: vec![Vec::new(); alphas.len()],
        minima_in_contact: vec![0; alphas.len()],
        minima: minima.len() as u64,
        ..Acc::default()
    };
    let mut previous: Option<Vec<bool>> = None;
    let mut row = vec![replicate as f64];
    for (k, &alpha) in alphas.iter().enumerate() {
        let result = compute_minorant(&path, alpha, default_guard(&path, alpha))?;
        if let Some(prev) = &previous {
            acc.nesting_violations += prev
                .iter()
                .zip(&result.contact_mask)
                .filter(|(&a, &b)| a && !b)
                .count() as u64;
        }
        let usable = usable_contacts(&result);
        for d in nearest_contact_steps(&usable, &minima).into_iter().flatten() {
            bump(&mut acc.hist[k], d);
            if d == 0 {
                acc.minima_in_contact[k] += 1;
            }
        }
        let contacts: Vec<usize> = (0..path.len()).filter(|&i| usable[i] && in_core(&path, i, core)).collect();
        for d in nearest_contact_steps(&is_minimum, &contacts).into_iter().flatten() {
            bump(&mut acc.reverse_hist[k], d);
        }
        row.push(result.contact_count() as f64);
        previous = Some(result.contact_mask);
    }

    let coarse = skeleton(&path, step)?;
    let result = compute_minorant(&coarse, params.alpha, default_guard(&coarse, params.alpha))?;
    for i in local_minima(&coarse) {
        if in_core(&coarse, i, core) && !result.contaminated[i] {
            acc.coarse_minima += 1;
            if !result.contact_mask[i] {
                acc.coarse_failures += 1;
            }
        }
    }
    row.extend([acc.nesting_violations as f64, acc.coarse_failures as f64]);
    acc.rows.push(row);
    Ok(acc)
}

fn hist_median(hist: &[u64]) -> f64 {
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return f64::NAN;
    }
    let rank = (total - 1) / 2;
    let mut seen = 0;
    for (d, &c) in hist.iter().enumerate() {
        seen += c;
        if seen > rank {
            return d as f64;
        }
    }
    unreachable!()
}

fn hist_mean_se(hist: &[u64]) -> (f64, f64, u64) {
    let n: u64 = hist.iter().sum();
    let nf = n as f64;
    let mean = hist.iter().enumerate().map(|(d, &c)| d as f64 * c as f64).sum::<f64>() / nf;
    let var = hist
        .iter()
        .enumerate()
        .map(|(d, &c)| (d as f64 - mean).powi(2) * c as f64)
        .sum::<f64>()
        / (nf - 1.0);
    (mean, (var / nf).sqrt(), n)
}

/// Contact sets grow with `α` towards the strict local minima.
///
/// On each path the contact sets for the slopes in `params.alpha_grid` and for
/// `params.alpha` must be nested, the median distance from a local minimum in
/// the core to the nearest contact must strictly decrease along the grid, and
/// at the large slope `params.alpha` every strict local minimum of a coarse
/// skeleton of the path must be a contact.
pub fn run_alpha_limit(params: &ExperimentParams, opts: &AlphaLimitOptions) -> Result<ExperimentOutput> {
    params.validate()?;
    let mut alphas: Vec<f64> = if params.alpha_grid.is_empty() {
        DEFAULT_ALPHA_GRID.to_vec()
    } else {
        params.alpha_grid.clone()
    };
    if alphas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::param("alpha grid must be strictly increasing"));
    }
    if !(params.alpha > *alphas.last().unwrap()) {
        return Err(Error::param("alpha must exceed every value of the alpha grid"));
    }
    let grid_len = alphas.len();
    alphas.push(params.alpha);
    let step = ((opts.coarse_c / params.alpha).powi(2) / params.dt).ceil().max(1.0) as usize;

    let acc = (0..params.n as u64)
        .into_par_iter()
        .map(|i| path_stats(params, &alphas, step, opts, i))
        .try_reduce(Acc::default, |a, b| Ok(a.merge(b)))?;

    let mut rows = acc.rows;
    rows.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let counts = Counts {
        attempted: params.n as u64,
        accepted: params.n as u64,
        ..Counts::default()
    };
    let mut report = ExperimentReport::new("alpha-limit", params, counts);
    let mut series = Table::new("alpha_limit", &["alpha", "median_steps", "median_distance", "mean_distance", "local_min_contact_fraction"]);
    let mut medians = Vec::new();
    for (k, &alpha) in alphas.iter().enumerate() {
        let median = hist_median(&acc.hist[k]) * params.dt;
        let (mean, se, n) = hist_mean_se(&acc.hist[k]);
        let frac = acc.minima_in_contact[k] as f64 / acc.minima as f64;
        report
            .estimates
            .push(Estimate::new(format!("mean_distance[{alpha}]"), mean * params.dt, se * params.dt, n as usize));
        report.statistics.push(named(format!("median_distance[{alpha}]"), median));
        report.statistics.push(named(format!("local_min_contact_fraction[{alpha}]"), frac));
        report.statistics.push(named(
            format!("median_contact_to_local_min[{alpha}]"),
            hist_median(&acc.reverse_hist[k]) * params.dt,
        ));
        series.push(vec![alpha, median / params.dt, median, mean * params.dt, frac]);
        if k < grid_len {
            medians.push(median);
        }
    }
    let coarse_dt = step as f64 * params.dt;
    report.statistics.push(named("local_minima", acc.minima as f64));
    report.statistics.push(named("coarse_dt", coarse_dt));
    report.statistics.push(named("coarse_local_minima", acc.coarse_minima as f64));

    report
        .checks
        .push(Check::at_most("nesting_violations", acc.nesting_violations as f64, 0.0));
    report.checks.push(Check::holds(
        "median_distance_decreasing",
        medians.windows(2).all(|w| w[1] < w[0]),
        "median distance strictly decreases along the alpha grid",
    ));
    report
        .checks
        .push(Check::at_most("large_alpha_inclusion_failures", acc.coarse_failures as f64, 0.0));

    let mut raw_columns = vec!["replicate".to_string()];
    raw_columns.extend(alphas.iter().map(|a| format!("contacts[{a}]")));
    raw_columns.extend(["nesting_violations".to_string(), "coarse_failures".to_string()]);
    let raw = Table {
        name: "raw".into(),
        columns: raw_columns,
        rows,
    };
    Ok(ExperimentOutput {
        report: report.finish(),
        raw,
        series: vec![series],
    })
}
