//! Interval probabilities `P{X_t ∈ [at, bt]}` of one-dimensional marginals.
//!
//! Closed forms are used wherever the family allows: Gaussian, Poisson
//! mixtures over the jump count (two-point, Gaussian and Laplace jumps) and
//! the self-similar stable law. The remaining combinations (Brownian part plus
//! Laplace or stable jumps) go through Gil-Pelaez inversion of the
//! characteristic function.

use num_complex::Complex64;
use statrs::function::beta::beta_reg;
use statrs::function::gamma::{gamma_ur, ln_gamma};

use super::model::{JumpLaw, JumpSpec, LevyModel};
use crate::error::{Error, Result};
use crate::numeric::quad::{integrate, Tolerance};
use crate::numeric::special::norm_interval;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbEstimate {
    pub value: f64,
    /// Bound on quadrature and truncation error.
    pub abs_error: f64,
}

impl ProbEstimate {
    fn exact(value: f64) -> Self {
        ProbEstimate { value, abs_error: 0.0 }
    }
}

/// Source of the marginal probabilities fed to the integral criteria.
pub trait IntervalProbability: Sync {
    /// `P{X_t ∈ [a t, b t]}`; `a` may be `-∞` and `b` may be `+∞`.
    fn interval_prob(&self, t: f64, a: f64, b: f64) -> Result<ProbEstimate>;
}

/// Wraps a closure `(t, a, b) -> probability`, mainly for constructed test models.
pub struct FnMarginal<F>(pub F);

impl<F: Fn(f64, f64, f64) -> f64 + Sync> IntervalProbability for FnMarginal<F> {
    fn interval_prob(&self, t: f64, a: f64, b: f64) -> Result<ProbEstimate> {
        check_args(t, a, b)?;
        Ok(ProbEstimate::exact((self.0)(t, a, b)))
    }
}

fn check_args(t: f64, a: f64, b: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param(format!("t must be positive and finite, got {t}")));
    }
    if a.is_nan() || b.is_nan() || a > b {
        return Err(Error::param(format!("need a <= b, got a = {a}, b = {b}")));
    }
    Ok(())
}

const POISSON_SPAN: f64 = 12.0;
const NEGLIGIBLE: f64 = 1e-18;

/// Range of counts carrying all but a negligible part of the Poisson(μ) mass.
fn poisson_range(mu: f64) -> (u64, u64) {
    let spread = POISSON_SPAN * mu.sqrt() + POISSON_SPAN;
    let lo = (mu - spread).max(0.0).floor() as u64;
    let hi = (mu + spread + 10.0).ceil() as u64;
    (lo, hi)
}

fn ln_poisson(n: u64, mu: f64) -> f64 {
    if mu == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -mu + n as f64 * mu.ln() - ln_gamma(n as f64 + 1.0)
}

fn indicator(lo: f64, x: f64, hi: f64) -> f64 {
    if lo <= x && x <= hi {
        1.0
    } else {
        0.0
    }
}

/// `P{k_lo <= K <= k_hi}` for `K ~ Binomial(n, p)`.
fn binomial_range(n: u64, p: f64, k_lo: u64, k_hi: u64) -> f64 {
    if k_lo > k_hi || k_lo > n {
        return 0.0;
    }
    let k_hi = k_hi.min(n);
    let cdf = |k: u64| -> f64 {
        if k >= n {
            1.0
        } else if p <= 0.0 {
            1.0
        } else if p >= 1.0 {
            0.0
        } else {
            beta_reg((n - k) as f64, k as f64 + 1.0, 1.0 - p)
        }
    };
    let below = if k_lo == 0 { 0.0 } else { cdf(k_lo - 1) };
    (cdf(k_hi) - below).max(0.0)
}

/// Mixture weights `w_k`, `k < n`, with `P{S_n > x} = Σ w_k Q(k+1, r x)` for
/// `x >= 0`, where `S_n` is a sum of `n` Laplace(r) variables and `Q` the
/// regularised upper incomplete gamma function. The weights sum to 1/2.
pub(crate) fn laplace_sum_weights(n: u64) -> Vec<f64> {
    let nf = n as f64;
    let ln2 = std::f64::consts::LN_2;
    (0..n)
        .map(|k| {
            let kf = k as f64;
            (ln_gamma(2.0 * nf - 1.0 - kf) - ln_gamma(nf - kf) + kf * ln2 - (2.0 * nf - 1.0) * ln2 - ln_gamma(nf))
                .exp()
        })
        .collect()
}

fn laplace_sum_cdf(weights: &[f64], rate: f64, x: f64) -> f64 {
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    let tail: f64 = weights
        .iter()
        .enumerate()
        .map(|(k, w)| w * gamma_ur(k as f64 + 1.0, rate * x.abs()))
        .sum();
    if x >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// `F(x) - 1/2 = -(1/π) ∫_0^∞ Im[e^{-iux} φ(u)] / u du`, integrated in chunks
/// of a few oscillation periods up to `u_max`.
fn gil_pelaez_centered<P: Fn(f64) -> Complex64>(phi: &P, x: f64, u_max: f64) -> Result<ProbEstimate> {
    if x == f64::INFINITY {
        return Ok(ProbEstimate::exact(0.5));
    }
    if x == f64::NEG_INFINITY {
        return Ok(ProbEstimate::exact(-0.5));
    }
    let periods = x.abs() * u_max / std::f64::consts::TAU;
    let chunks = (periods / 4.0).ceil().max(1.0) as usize;
    let width = u_max / chunks as f64;
    let integrand = |u: f64| (Complex64::from_polar(1.0, -u * x) * phi(u)).im / u;
    let tol = Tolerance::new(1e-13, 1e-12).with_max_intervals(400);
    let mut value = 0.0;
    let mut err = 0.0;
    for c in 0..chunks {
        let r = integrate(integrand, c as f64 * width, (c + 1) as f64 * width, tol)?;
        value += r.value;
        err += r.abs_error;
    }
    Ok(ProbEstimate {
        value: -value / std::f64::consts::PI,
        abs_error: err / std::f64::consts::PI + 1e-14,
    })
}

/// Standard symmetric stable law with `E[e^{iuZ}] = e^{-|u|^index}`: returns `F(x) - 1/2`.
fn stable_centered_cdf(index: f64, x: f64) -> Result<ProbEstimate> {
    const ASYMPTOTIC_FROM: f64 = 1e3;
    if x.is_infinite() {
        return Ok(ProbEstimate::exact(0.5f64.copysign(x)));
    }
    if x.abs() > ASYMPTOTIC_FROM {
        // P{Z > x} ~ Γ(index) sin(π index / 2) / π · x^{-index}
        let c = statrs::function::gamma::gamma(index) * (std::f64::consts::FRAC_PI_2 * index).sin() / std::f64::consts::PI;
        let tail = c * x.abs().powf(-index);
        return Ok(ProbEstimate {
            value: (0.5 - tail).copysign(x),
            abs_error: tail * tail + x.abs().powf(-2.0 * index),
        });
    }
    let u_max = 42f64.powf(1.0 / index);
    gil_pelaez_centered(&|u: f64| Complex64::new((-u.powf(index)).exp(), 0.0), x, u_max)
}

impl IntervalProbability for LevyModel {
    fn interval_prob(&self, t: f64, a: f64, b: f64) -> Result<ProbEstimate> {
        check_args(t, a, b)?;
        self.validate()?;
        // Work with X_t - drift·t over [lo, hi].
        let shift = self.drift * t;
        let lo = a * t - shift;
        let hi = b * t - shift;
        let s = (self.sigma2 * t).sqrt();

        let gaussian = |mean: f64, sd: f64| -> f64 {
            if sd > 0.0 {
                norm_interval((lo - mean) / sd, (hi - mean) / sd)
            } else {
                indicator(lo, mean, hi)
            }
        };

        match self.jumps {
            JumpSpec::None {} => Ok(ProbEstimate::exact(gaussian(0.0, s))),
            JumpSpec::CompoundPoisson { rate, law } => {
                let mu = rate * t;
                let (n_lo, n_hi) = poisson_range(mu);
                match law {
                    JumpLaw::TwoPoint { up, down, p_up } => {
                        let mut total = 0.0;
                        for n in n_lo..=n_hi {
                            let wn = ln_poisson(n, mu).exp();
                            if wn < NEGLIGIBLE {
                                continue;
                            }
                            let nf = n as f64;
                            let cond = if s == 0.0 {
                                let step = up - down;
                                if step == 0.0 {
                                    indicator(lo, nf * down, hi)
                                } else {
                                    let (k_a, k_b) = ((lo - nf * down) / step, (hi - nf * down) / step);
                                    let (k_min, k_max) = if step > 0.0 { (k_a, k_b) } else { (k_b, k_a) };
                                    let k_lo = k_min.ceil().max(0.0);
                                    let k_hi = k_max.floor().min(nf);
                                    if k_lo > k_hi {
                                        0.0
                                    } else {
                                        binomial_range(n, p_up, k_lo as u64, k_hi as u64)
                                    }
                                }
                            } else {
                                let mut acc = 0.0;
                                for k in 0..=n {
                                    let kf = k as f64;
                                    let ln_b = ln_gamma(nf + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(nf - kf + 1.0)
                                        + if k > 0 { kf * p_up.ln() } else { 0.0 }
                                        + if k < n { (nf - kf) * (1.0 - p_up).ln() } else { 0.0 };
                                    let wb = ln_b.exp();
                                    if wb < NEGLIGIBLE {
                                        continue;
                                    }
                                    acc += wb * gaussian(kf * up + (nf - kf) * down, s);
                                }
                                acc
                            };
                            total += wn * cond;
                        }
                        Ok(ProbEstimate {
                            value: total.clamp(0.0, 1.0),
                            abs_error: 1e-14,
                        })
                    }
                    JumpLaw::Gaussian { mean, std } => {
                        let mut total = 0.0;
                        for n in n_lo..=n_hi {
                            let wn = ln_poisson(n, mu).exp();
                            if wn < NEGLIGIBLE {
                                continue;
                            }
                            let nf = n as f64;
                            total += wn * gaussian(nf * mean, (s * s + nf * std * std).sqrt());
                        }
                        Ok(ProbEstimate {
                            value: total.clamp(0.0, 1.0),
                            abs_error: 1e-14,
                        })
                    }
                    JumpLaw::ExponentialSymmetric { rate: r } if s == 0.0 => {
                        let mut total = 0.0;
                        for n in n_lo..=n_hi {
                            let wn = ln_poisson(n, mu).exp();
                            if wn < NEGLIGIBLE {
                                continue;
                            }
                            let cond = if n == 0 {
                                indicator(lo, 0.0, hi)
                            } else {
                                let w = laplace_sum_weights(n);
                                laplace_sum_cdf(&w, r, hi) - laplace_sum_cdf(&w, r, lo)
                            };
                            total += wn * cond;
                        }
                        Ok(ProbEstimate {
                            value: total.clamp(0.0, 1.0),
                            abs_error: 1e-12,
                        })
                    }
                    JumpLaw::ExponentialSymmetric { .. } => self.inverted(t, lo, hi),
                }
            }
            JumpSpec::SymmetricStable { index, scale } if s == 0.0 => {
                let zeta = (scale * t).powf(1.0 / index);
                let upper = stable_centered_cdf(index, hi / zeta)?;
                let lower = stable_centered_cdf(index, lo / zeta)?;
                Ok(ProbEstimate {
                    value: (upper.value - lower.value).clamp(0.0, 1.0),
                    abs_error: upper.abs_error + lower.abs_error,
                })
            }
            JumpSpec::SymmetricStable { .. } => self.inverted(t, lo, hi),
        }
    }
}

impl LevyModel {
    /// Gil-Pelaez inversion for models with a Brownian part, centered at the drift.
    fn inverted(&self, t: f64, lo: f64, hi: f64) -> Result<ProbEstimate> {
        debug_assert!(self.sigma2 > 0.0);
        let drift = self.drift;
        let phi = |u: f64| -> Complex64 { self.char_fn(t, u) * Complex64::from_polar(1.0, -u * drift * t) };
        let u_max = (2.0 * 42.0 / (t * self.sigma2)).sqrt();
        let upper = gil_pelaez_centered(&phi, hi, u_max)?;
        let lower = gil_pelaez_centered(&phi, lo, u_max)?;
        let value = upper.value - lower.value;
        let abs_error = upper.abs_error + lower.abs_error;
        if !(-1e-6..=1.0 + 1e-6).contains(&value) {
            return Err(Error::Numerical(format!(
                "characteristic-function inversion returned {value} on [{lo}, {hi}] at t = {t}"
            )));
        }
        Ok(ProbEstimate {
            value: value.clamp(0.0, 1.0),
            abs_error,
        })
    }
}
