//! End-to-end acceptance suite: fourteen numbered criteria, each combining
//! simulation, the minorant engine, closed forms and integral criteria.
//!
//! Sample sizes depend on the [`Profile`]; tolerances do not. Reference values
//! live in [`References`] so that a tampered value can be shown to fail the
//! criterion that depends on it.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::criteria::{integral_test_default, p_k_zero, vigon_identity, Verdict};
use crate::error::{Error, Result};
use crate::experiments::{
    collect_straddle, h_report, k_laplace_report, recipe_report, run_alpha_limit, run_experiment, run_infdist,
    run_stationarity_cover, t_sign_report, AlphaLimitOptions, ExperimentKind, ExperimentOutput, ExperimentParams,
    StraddleRun,
};
use crate::levy::{FnMarginal, JumpLaw, LevyModel};
use crate::minorant::compute_minorant;
use crate::numeric::quad::{integrate, Tolerance};
use crate::numeric::special::norm_cdf;
use crate::oracle::{h_moments, k_density_zero_drift, lambda_density_zero_drift, total_mass, BrownianParams};
use crate::path::CadlagPath;

pub const CRITERIA: [(u32, &str); 14] = [
    (1, "envelope-oracle"),
    (2, "h-distribution"),
    (3, "t-sign"),
    (4, "k-laplace"),
    (5, "k-density"),
    (6, "consistency-web"),
    (7, "size-biasing"),
    (8, "recipe-ordering"),
    (9, "monotone-nesting"),
    (10, "alpha-limit"),
    (11, "integral-criteria"),
    (12, "vigon-identity"),
    (13, "pipeline-validator"),
    (14, "determinism"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Quick,
    Full,
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Profile::Quick),
            "full" => Ok(Profile::Full),
            other => Err(Error::param(format!("unknown profile `{other}`; expected quick or full"))),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Quick => "quick",
            Profile::Full => "full",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sizes {
    pub envelope_paths: usize,
    pub straddle: usize,
    pub recipe: usize,
    pub alpha_paths: usize,
    pub cover: usize,
    pub infdist: usize,
    pub determinism: usize,
}

impl Profile {
    pub fn sizes(self) -> Sizes {
        match self {
            Profile::Full => Sizes {
                envelope_paths: 1000,
                straddle: 20_000,
                recipe: 10_000,
                alpha_paths: 1000,
                cover: 10_000,
                infdist: 10_000,
                determinism: 40,
            },
            Profile::Quick => Sizes {
                envelope_paths: 300,
                straddle: 5_000,
                recipe: 5_000,
                alpha_paths: 200,
                cover: 4_000,
                infdist: 4_000,
                determinism: 10,
            },
        }
    }
}

/// Reference values the criteria compare against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct References {
    /// `E[H]` for `α = 1.5`, `β = 0.5`.
    pub h_mean: f64,
    /// `P{T > 0}` for `α = 2`, `β = 1`.
    pub t_positive: f64,
    /// `E[e^{-K}]` for `α = 1`, `β = 0`, to five digits.
    pub k_laplace_theta1: f64,
    /// `∫_0^1 t⁻¹ P{|B_t| <= t} dt`.
    pub finint_bm: f64,
    /// `P{K = 0}` for compound Poisson with rate 1, jumps ±1, no drift, `α = 0.5`.
    pub p_k_zero_cp: f64,
    /// Time side of the Fourier identity, BM, `q = 1`: `β = 0` on `[-1, 1]` and `β = 0.5` on `[0, 1]`.
    pub vigon_bm: [f64; 2],
}

impl Default for References {
    fn default() -> Self {
        References {
            h_mean: 1.0 / 3.0,
            t_positive: 0.75,
            k_laplace_theta1: 0.30941,
            finint_bm: 1.514_463_718_175_674_2,
            p_k_zero_cp: 0.196_158_710_775_574,
            vigon_bm: [1.316_957_896_924_816_8, std::f64::consts::LN_2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {:<20} {}  ({:.1}s) {}",
            self.id,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.seconds,
            self.detail
        )
    }
}

/// Seed shared by every simulation in the suite.
pub const SUITE_SEED: u64 = 20_240_611;

pub struct Suite {
    pub profile: Profile,
    pub references: References,
    zero_drift: OnceLock<std::result::Result<StraddleRun, String>>,
    alpha_limit: OnceLock<std::result::Result<ExperimentOutput, String>>,
}

impl Suite {
    pub fn new(profile: Profile) -> Self {
        Suite::with_references(profile, References::default())
    }

    pub fn with_references(profile: Profile, references: References) -> Self {
        Suite {
            profile,
            references,
            zero_drift: OnceLock::new(),
            alpha_limit: OnceLock::new(),
        }
    }

    fn sizes(&self) -> Sizes {
        self.profile.sizes()
    }

    pub fn run_all(&self) -> Vec<CriterionResult> {
        CRITERIA.iter().map(|&(id, _)| self.run(id)).collect()
    }

    /// Runs one criterion; errors are reported as failures with their message.
    pub fn run(&self, id: u32) -> CriterionResult {
        let name = CRITERIA
            .iter()
            .find(|c| c.0 == id)
            .map(|c| c.1)
            .unwrap_or("unknown")
            .to_string();
        let start = Instant::now();
        let outcome = match id {
            1 => self.envelope_oracle(),
            2 => self.h_distribution(),
            3 => self.t_sign(),
            4 => self.k_laplace(),
            5 => self.k_density(),
            6 => self.consistency_web(),
            7 => self.size_biasing(),
            8 => self.recipe_ordering(),
            9 => self.monotone_nesting(),
            10 => self.alpha_limit_criterion(),
            11 => self.integral_criteria(),
            12 => self.vigon(),
            13 => self.pipeline_validator(),
            14 => self.determinism(),
            _ => Err(Error::param(format!("no criterion with id {id}"))),
        };
        let (pass, detail) = match outcome {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        CriterionResult {
            id,
            name,
            pass,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        }
    }

    fn zero_drift_run(&self) -> Result<&StraddleRun> {
        self.zero_drift
            .get_or_init(|| {
                let params = ExperimentParams::brownian(1.0, 0.0, self.sizes().straddle, SUITE_SEED);
                collect_straddle(&params).map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(|e| Error::Numerical(e.clone()))
    }

    fn alpha_limit_run(&self) -> Result<&ExperimentOutput> {
        self.alpha_limit
            .get_or_init(|| {
                let params = alpha_limit_params(self.sizes().alpha_paths);
                run_alpha_limit(&params, &AlphaLimitOptions::default()).map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(|e| Error::Numerical(e.clone()))
    }

    fn envelope_oracle(&self) -> Result<(bool, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
        let mut worst = 0.0_f64;
        let mut mask_mismatches = 0usize;
        for _ in 0..self.sizes().envelope_paths {
            let path = random_path(&mut rng, 512)?;
            let alpha = rng.random_range(0.05..5.0);
            let fast = compute_minorant(&path, alpha, 0.0)?;
            let slow = brute_force_minorant(&path, alpha);
            let w = path.lower_values();
            for i in 0..path.len() {
                worst = worst.max((fast.m[i] - slow[i]).abs());
                if fast.contact_mask[i] != (w[i] - slow[i] <= fast.tol) {
                    mask_mismatches += 1;
                }
            }
        }
        let millis = million_point_millis()?;
        let pass = worst <= 1e-12 && mask_mismatches == 0 && millis <= 100.0;
        Ok((
            pass,
            format!("max |scan - brute| = {worst:.2e} (<= 1e-12), contact mismatches = {mask_mismatches}, n = 1e6 in {millis:.1} ms (<= 100)"),
        ))
    }

    fn h_distribution(&self) -> Result<(bool, String)> {
        let params = ExperimentParams {
            window: 20.0,
            ..ExperimentParams::brownian(1.5, 0.5, self.sizes().straddle, SUITE_SEED)
        };
        let out = h_report(&collect_straddle(&params)?)?;
        let mean = estimate(&out, "mean_h")?;
        let (oracle_mean, _) = h_moments(1.5);
        let se = out.report.estimates[0].std_error;
        let mean_ok = (mean - self.references.h_mean).abs() <= 3.0 * se + 0.01;
        let ks = statistic(&out, "ks_h")?;
        let pass = mean_ok && ks <= 0.03 && (oracle_mean - self.references.h_mean).abs() <= 1e-12;
        Ok((
            pass,
            format!(
                "mean H = {mean:.5} (SE {se:.5}) vs {:.5}, allowance {:.5}; KS = {ks:.4} (<= 0.03)",
                self.references.h_mean,
                3.0 * se + 0.01
            ),
        ))
    }

    fn t_sign(&self) -> Result<(bool, String)> {
        let params = ExperimentParams {
            window: 20.0,
            ..ExperimentParams::brownian(2.0, 1.0, self.sizes().straddle, SUITE_SEED)
        };
        let out = t_sign_report(&collect_straddle(&params)?)?;
        let p_hat = estimate(&out, "p_t_positive")?;
        let p = self.references.t_positive;
        let n = self.sizes().straddle as f64;
        let se = (p * (1.0 - p) / n).sqrt();
        let oracle = BrownianParams::new(2.0, 1.0)?.p_t_positive();
        let pass = (p_hat - p).abs() <= 3.0 * se && (oracle - p).abs() <= 1e-12;
        Ok((pass, format!("P(T > 0) = {p_hat:.4} vs {p}, 3 SE = {:.4}", 3.0 * se)))
    }

    fn k_laplace(&self) -> Result<(bool, String)> {
        let out = k_laplace_report(self.zero_drift_run()?)?;
        let bp = BrownianParams::new(1.0, 0.0)?;
        let closed = bp.k_laplace(1.0)?;
        // Independent evaluation: integrate e^{-κ} against the density.
        let by_density = total_mass(|k| (-k).exp() * k_density_zero_drift(1.0, k).unwrap_or(f64::NAN))?;
        let reproduced = (closed - by_density).abs() <= 1e-8 && (closed - self.references.k_laplace_theta1).abs() <= 1e-5;
        let mut pass = reproduced;
        let mut parts = Vec::new();
        for theta in [0.5, 1.0, 2.0, 4.0] {
            let check = out
                .report
                .check(&format!("laplace_k[{theta}]"))
                .ok_or_else(|| Error::Numerical(format!("missing check for theta = {theta}")))?;
            pass &= check.pass;
            parts.push(format!("θ={theta}: |diff| {:.4} <= {:.4}", check.statistic, check.threshold));
        }
        for name in ["laplace_k[0]", "k_at_least_dt"] {
            pass &= out.report.check(name).is_some_and(|c| c.pass);
        }
        Ok((
            pass,
            format!(
                "{}; oracle(1) = {closed:.8}, by density {by_density:.8}",
                parts.join(", ")
            ),
        ))
    }

    fn k_density(&self) -> Result<(bool, String)> {
        let mass = total_mass(|k| k_density_zero_drift(1.0, k).unwrap_or(f64::NAN))?;
        let out = k_laplace_report(self.zero_drift_run()?)?;
        let sup = statistic(&out, "k_bins_sup")?;
        let pass = (mass - 1.0).abs() <= 1e-8 && sup <= 0.02;
        Ok((
            pass,
            format!("density mass - 1 = {:.1e} (<= 1e-8); binned sup = {sup:.4} (<= 0.02)", mass - 1.0),
        ))
    }

    fn consistency_web(&self) -> Result<(bool, String)> {
        let mut worst = 0.0_f64;
        for (alpha, beta) in [(1.0, 0.0), (1.3, 0.4), (2.0, -1.2)] {
            let bp = BrownianParams::new(alpha, beta)?;
            for theta in [0.5, 1.0, 2.0] {
                let ratio = bp.lambda_ratio(theta)?;
                let integral = integrate(
                    |s| bp.k_laplace(s).unwrap_or(f64::NAN),
                    0.0,
                    theta,
                    Tolerance::new(1e-14, 1e-13),
                )?
                .value;
                let product = theta * bp.s_laplace(theta)? * bp.ttilde_laplace(theta)?;
                worst = worst.max((ratio - integral).abs()).max((ratio - product).abs());
            }
        }
        Ok((worst <= 1e-8, format!("max disagreement {worst:.2e} (<= 1e-8)")))
    }

    fn size_biasing(&self) -> Result<(bool, String)> {
        let mut ratios = Vec::new();
        for x in [0.5, 1.0, 2.0] {
            ratios.push(x * lambda_density_zero_drift(1.0, x)? / k_density_zero_drift(1.0, x)?);
        }
        let spread = ratios.iter().fold(0.0_f64, |m, r| m.max((r - ratios[0]).abs() / ratios[0]));
        Ok((
            spread <= 1e-8,
            format!("x Λ(x)/k(x) = {:.10}, relative spread {spread:.1e} (<= 1e-8)", ratios[0]),
        ))
    }

    fn recipe_ordering(&self) -> Result<(bool, String)> {
        let run = self.zero_drift_run()?;
        let n = self.sizes().recipe.min(run.samples.len());
        let subset = StraddleRun {
            params: ExperimentParams { n, ..run.params.clone() },
            samples: run.samples[..n].to_vec(),
            counts: run.counts,
        };
        let out = recipe_report(&subset)?;
        let agree = estimate(&out, "recipe_e_equals_d")?;
        let ordered = estimate(&out, "order_g_t_s_d")?;
        Ok((
            out.report.passed,
            format!("|e - D| <= Δt in {:.4}%, G <= T <= S <= D in {:.4}% of {n}", 100.0 * agree, 100.0 * ordered),
        ))
    }

    fn monotone_nesting(&self) -> Result<(bool, String)> {
        let out = self.alpha_limit_run()?;
        let check = out
            .report
            .check("nesting_violations")
            .ok_or_else(|| Error::Numerical("missing nesting check".into()))?;
        Ok((
            check.pass,
            format!("{} violations over {} paths, alpha in {{1,2,4,8,16,64}}", check.statistic, out.report.params.n),
        ))
    }

    fn alpha_limit_criterion(&self) -> Result<(bool, String)> {
        let out = self.alpha_limit_run()?;
        let decreasing = out.report.check("median_distance_decreasing").is_some_and(|c| c.pass);
        let inclusion = out
            .report
            .check("large_alpha_inclusion_failures")
            .ok_or_else(|| Error::Numerical("missing inclusion check".into()))?;
        let medians: Vec<String> = out.series[0]
            .rows
            .iter()
            .map(|r| format!("{}:{}", r[0], r[1]))
            .collect();
        Ok((
            decreasing && inclusion.pass,
            format!(
                "median steps to contact {}; α=64 misses {} of {} local minima",
                medians.join(" "),
                inclusion.statistic,
                statistic(out, "coarse_local_minima")?
            ),
        ))
    }

    fn integral_criteria(&self) -> Result<(bool, String)> {
        let bm = LevyModel::brownian(1.0, 0.0);
        let verdict = integral_test_default(&bm, -1.0, 1.0)?;
        // t = u²: dt/t = 2 du/u.
        let direct = integrate(
            |u: f64| if u == 0.0 { 2.0 * std::f64::consts::FRAC_2_SQRT_PI / std::f64::consts::SQRT_2 } else { 2.0 * (2.0 * norm_cdf(u) - 1.0) / u },
            0.0,
            1.0,
            Tolerance::new(1e-14, 1e-14),
        )?
        .value;
        let bm_ok = verdict.verdict == Verdict::Converged
            && (verdict.estimate - self.references.finint_bm).abs() <= 1e-3
            && (direct - self.references.finint_bm).abs() <= 1e-9;

        let stub = FnMarginal(|_t: f64, a: f64, b: f64| if a < b { 0.5 } else { 0.0 });
        let stub_ok = integral_test_default(&stub, -1.0, 1.0)?.verdict == Verdict::Diverged;

        let cp = cover_params(self.sizes().cover);
        let oracle = p_k_zero(&cp.model, cp.alpha)?.value;
        let cover = run_stationarity_cover(&cp)?;
        let fraction = &cover.report.estimates[0];
        let cover_ok = (oracle - self.references.p_k_zero_cp).abs() <= 1e-9
            && (fraction.value - self.references.p_k_zero_cp).abs() <= 3.0 * fraction.std_error;
        Ok((
            bm_ok && stub_ok && cover_ok,
            format!(
                "BM estimate {:.6} vs {:.6} (direct {direct:.10}); stub diverged: {stub_ok}; coverage {:.5} (SE {:.5}) vs P(K=0) {oracle:.5}",
                verdict.estimate, self.references.finint_bm, fraction.value, fraction.std_error
            ),
        ))
    }

    fn vigon(&self) -> Result<(bool, String)> {
        let mut pass = true;
        let mut parts = Vec::new();
        for (k, (beta, a, b)) in [(0.0, -1.0, 1.0), (0.5, 0.0, 1.0)].into_iter().enumerate() {
            let report = vigon_identity(&LevyModel::brownian(1.0, beta), 1.0, a, b)?;
            pass &= report.abs_diff <= 1e-3 && (report.lhs - self.references.vigon_bm[k]).abs() <= 1e-6;
            parts.push(format!("β={beta}: lhs {:.8} rhs {:.8}", report.lhs, report.rhs));
        }
        Ok((pass, parts.join("; ")))
    }

    fn pipeline_validator(&self) -> Result<(bool, String)> {
        let out = run_infdist(&infdist_params(self.sizes().infdist))?;
        let neg = statistic(&out, "ks_negative_side")?;
        let pos = statistic(&out, "ks_positive_side")?;
        Ok((
            neg <= 0.02,
            format!("KS(-inf_(t<=0)(X_t - αt), Exp(2)) = {neg:.4} (<= 0.02); positive side {pos:.4}"),
        ))
    }

    fn determinism(&self) -> Result<(bool, String)> {
        let n = self.sizes().determinism;
        let mut differing = Vec::new();
        for kind in ExperimentKind::ALL {
            let params = determinism_params(kind, n);
            let first = fingerprint(&run_experiment(kind, &params)?)?;
            let second = fingerprint(&run_experiment(kind, &params)?)?;
            if first != second {
                differing.push(kind.name());
            }
        }
        Ok((
            differing.is_empty(),
            if differing.is_empty() {
                format!("{} experiments reproduced byte for byte", ExperimentKind::ALL.len())
            } else {
                format!("outputs differ for {}", differing.join(", "))
            },
        ))
    }
}

fn estimate(out: &ExperimentOutput, name: &str) -> Result<f64> {
    out.report
        .estimates
        .iter()
        .find(|e| e.name == name)
        .map(|e| e.value)
        .ok_or_else(|| Error::Numerical(format!("report has no estimate `{name}`")))
}

fn statistic(out: &ExperimentOutput, name: &str) -> Result<f64> {
    out.report
        .statistics
        .iter()
        .find(|e| e.name == name)
        .map(|e| e.value)
        .ok_or_else(|| Error::Numerical(format!("report has no statistic `{name}`")))
}

/// Report JSON and every table as CSV, concatenated.
fn fingerprint(out: &ExperimentOutput) -> Result<Vec<u8>> {
    let mut bytes = out.report.to_json()?.into_bytes();
    for table in std::iter::once(&out.raw).chain(&out.series) {
        table.write_csv(&mut bytes)?;
    }
    Ok(bytes)
}

pub fn alpha_limit_params(n: usize) -> ExperimentParams {
    ExperimentParams {
        alpha: 64.0,
        alpha_grid: vec![1.0, 2.0, 4.0, 8.0, 16.0],
        ..ExperimentParams::brownian(1.0, 0.0, n, SUITE_SEED)
    }
}

pub fn cover_params(n: usize) -> ExperimentParams {
    ExperimentParams {
        model: LevyModel::compound_poisson(
            0.0,
            0.0,
            1.0,
            JumpLaw::TwoPoint {
                up: 1.0,
                down: -1.0,
                p_up: 0.5,
            },
        ),
        alpha: 0.5,
        window: 80.0,
        dt: 2e-3,
        n,
        seed: SUITE_SEED,
        theta_grid: Vec::new(),
        alpha_grid: Vec::new(),
    }
}

pub fn infdist_params(n: usize) -> ExperimentParams {
    ExperimentParams {
        window: 16.0,
        dt: 5e-5,
        ..ExperimentParams::brownian(1.0, 0.0, n, SUITE_SEED)
    }
}

/// Small configurations used to check reproducibility of every experiment.
pub fn determinism_params(kind: ExperimentKind, n: usize) -> ExperimentParams {
    let base = ExperimentParams {
        window: 10.0,
        dt: 1e-3,
        ..ExperimentParams::brownian(1.0, 0.3, n, SUITE_SEED)
    };
    match kind {
        ExperimentKind::AlphaLimit => ExperimentParams {
            window: 10.0,
            dt: 1e-3,
            ..alpha_limit_params(n.div_ceil(4))
        },
        ExperimentKind::Cover => ExperimentParams {
            window: 40.0,
            dt: 1e-2,
            ..cover_params(n)
        },
        _ => base,
    }
}

/// `m_i = min_j w_j + α |t_i - t_j|` by direct O(n²) evaluation.
pub fn brute_force_minorant(path: &CadlagPath, alpha: f64) -> Vec<f64> {
    let t = path.times();
    let w = path.lower_values();
    (0..path.len())
        .map(|i| {
            (0..path.len())
                .map(|j| if j <= i { w[j] + alpha * (t[i] - t[j]) } else { w[j] + alpha * (t[j] - t[i]) })
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Random càdlàg grid path with up to `max_len` points: irregular times,
/// Gaussian increments and occasional jumps of either sign.
pub fn random_path<R: Rng>(rng: &mut R, max_len: usize) -> Result<CadlagPath> {
    let n = rng.random_range(2..=max_len);
    let mut times = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    let mut left = Vec::with_capacity(n);
    let mut t = rng.random_range(-5.0..0.0);
    let mut x = rng.random_range(-1.0..1.0);
    for i in 0..n {
        if i > 0 {
            t += rng.random_range(1e-3..0.1);
            x += rng.random_range(-0.3..0.3);
        }
        let jump = if i > 0 && rng.random_bool(0.15) {
            rng.random_range(-2.0..2.0)
        } else {
            0.0
        };
        let before = x;
        x += jump;
        times.push(t);
        values.push(x);
        left.push((jump != 0.0).then_some(before));
    }
    CadlagPath::new(times, values, left)
}

/// Best of five timings of the minorant of a 10⁶-point path.
pub fn million_point_millis() -> Result<f64> {
    let n = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    let mut x = 0.0;
    let times: Vec<f64> = (0..n).map(|k| k as f64 * 1e-6).collect();
    let values: Vec<f64> = (0..n)
        .map(|_| {
            x += rng.random_range(-1e-3..1e-3);
            x
        })
        .collect();
    let path = CadlagPath::continuous(times, values)?;
    let mut best = f64::INFINITY;
    for _ in 0..5 {
        let start = Instant::now();
        let result = compute_minorant(&path, 1.0, 0.0)?;
        best = best.min(start.elapsed().as_secs_f64() * 1e3);
        std::hint::black_box(result);
    }
    Ok(best)
}
