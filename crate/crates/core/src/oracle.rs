//! Closed-form laws of the straddling interval for Brownian motion with drift.
//!
//! Everything here assumes unit variance, `X_t = B_t + βt` with `|β| < α`.
//! A general `σ` is handled by [`BrownianParams::normalized`]: dividing the
//! path by `σ` turns the slope `α` into `α/σ` and the drift into `β/σ`, leaves
//! all times (`G`, `D`, `T`, `K`, `S`) unchanged and scales heights (`H`) by `σ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::{JumpSpec, LevyModel};
use crate::numeric::quad::{integrate, integrate_to_infinity, Tolerance};
use crate::numeric::special::{gamma2_cdf, norm_cdf, SQRT_2PI};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrownianParams {
    pub alpha: f64,
    pub beta: f64,
}

/// Unit-variance parameters together with the factor that maps heights back.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalized {
    pub params: BrownianParams,
    pub height_scale: f64,
}

impl BrownianParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::param(format!("alpha must be positive, got {alpha}")));
        }
        if !(beta.abs() < alpha) {
            return Err(Error::param(format!("need |beta| < alpha, got alpha = {alpha}, beta = {beta}")));
        }
        Ok(BrownianParams { alpha, beta })
    }

    /// Reduces Brownian motion with variance `sigma2` and drift `model.drift` to the unit-variance case.
    pub fn normalized(model: &LevyModel, alpha: f64) -> Result<Normalized> {
        model.validate()?;
        if !matches!(model.jumps, JumpSpec::None {}) || model.sigma2 <= 0.0 {
            return Err(Error::param("the Brownian oracle needs sigma2 > 0 and no jumps"));
        }
        let sigma = model.sigma();
        Ok(Normalized {
            params: BrownianParams::new(alpha / sigma, model.drift / sigma)?,
            height_scale: sigma,
        })
    }

    fn minus(&self) -> f64 {
        self.alpha - self.beta
    }

    fn plus(&self) -> f64 {
        self.alpha + self.beta
    }

    /// `E[e^{-θK}]`.
    pub fn k_laplace(&self, theta: f64) -> Result<f64> {
        nonnegative(theta)?;
        Ok(self.k_laplace_complex(Complex64::new(theta, 0.0)).re)
    }

    /// Analytic continuation of [`Self::k_laplace`] (principal square roots).
    pub fn k_laplace_complex(&self, z: Complex64) -> Complex64 {
        let (a, b) = (self.alpha, self.beta);
        let sp = (2.0 * z + self.plus().powi(2)).sqrt();
        let sm = (2.0 * z + self.minus().powi(2)).sqrt();
        let denom = sp + sm + 2.0 * a;
        8.0 * a * (a * a - b * b) * (sp.inv() + sm.inv()) / (denom * denom)
    }

    /// `∫(1 - e^{-θx}) Λ(dx) / ∫ x Λ(dx)`.
    pub fn lambda_ratio(&self, theta: f64) -> Result<f64> {
        nonnegative(theta)?;
        let (a, b) = (self.alpha, self.beta);
        let lm = (2.0 * theta + self.minus().powi(2)).sqrt() + self.minus();
        let lp = (2.0 * theta + self.plus().powi(2)).sqrt() + self.plus();
        Ok(4.0 * (a * a - b * b) * theta / (lm * lp))
    }

    /// `E[e^{-θT}]` for `θ` in `[-(α-β)²/2, (α+β)²/2]`.
    ///
    /// The textbook expression has a removable `1/θ` singularity; this form
    /// is algebraically identical and loses no digits near zero.
    pub fn t_laplace(&self, theta: f64) -> Result<f64> {
        let (a, b) = (self.alpha, self.beta);
        let (lo, hi) = (-0.5 * self.minus().powi(2), 0.5 * self.plus().powi(2));
        if !(lo..=hi).contains(&theta) {
            return Err(Error::domain(format!("theta = {theta} outside [{lo}, {hi}]")));
        }
        let s1 = (self.minus().powi(2) + 2.0 * theta).sqrt();
        let s2 = (self.plus().powi(2) - 2.0 * theta).sqrt();
        let x = s2 + 3.0 * a - b;
        let y = s1 + 3.0 * a + b;
        let bracket = 4.0 + 4.0 * b * (1.0 / (s1 + self.minus()) - 1.0 / (s2 + self.plus()));
        Ok(8.0 * a * (a * a - b * b) * bracket / ((s1 + s2) * x * y))
    }

    pub fn p_t_positive(&self) -> f64 {
        0.5 * (1.0 + self.beta / self.alpha)
    }

    /// `E[e^{-θS}]`.
    pub fn s_laplace(&self, theta: f64) -> Result<f64> {
        nonnegative(theta)?;
        let m = self.minus();
        Ok(2.0 * m / ((2.0 * theta + m * m).sqrt() + m))
    }

    /// `E[e^{-θT̃}]`.
    pub fn ttilde_laplace(&self, theta: f64) -> Result<f64> {
        nonnegative(theta)?;
        let p = self.plus();
        Ok(2.0 * p / ((2.0 * theta + p * p).sqrt() + p))
    }

    /// Exponential rates of `-inf_{t<=0}(X_t - αt)` and `-inf_{t>=0}(X_t + αt)`.
    pub fn neg_inf_exp_rates(&self) -> (f64, f64) {
        (2.0 * self.minus(), 2.0 * self.plus())
    }

    /// `∫ f⁻(ξ, h) e^{-θξ} dξ` for `h <= 0`.
    pub fn f_minus_laplace(&self, theta: f64, h: f64) -> Result<f64> {
        nonnegative(theta)?;
        if !(h <= 0.0) {
            return Err(Error::domain(format!("h must be <= 0, got {h}")));
        }
        let m = self.minus();
        Ok(2.0 * m * (h * ((2.0 * theta + m * m).sqrt() + m)).exp())
    }
}

fn nonnegative(theta: f64) -> Result<()> {
    if theta >= 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("theta must be finite and >= 0, got {theta}")))
    }
}

fn positive_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("alpha must be positive, got {alpha}")))
    }
}

/// Density of `K` when `β = 0`.
pub fn k_density_zero_drift(alpha: f64, kappa: f64) -> Result<f64> {
    positive_alpha(alpha)?;
    if !(kappa > 0.0) {
        return Err(Error::domain(format!("kappa must be positive, got {kappa}")));
    }
    let r = kappa.sqrt();
    let a = alpha;
    Ok(4.0 * a.powi(3) / SQRT_2PI * r * (-0.5 * a * a * kappa).exp() - 4.0 * a.powi(4) * kappa * norm_cdf(-a * r))
}

/// `P{K <= κ}` when `β = 0`, by quadrature of the density.
pub fn k_cdf_zero_drift(alpha: f64, kappa: f64) -> Result<f64> {
    positive_alpha(alpha)?;
    if kappa <= 0.0 {
        return Ok(0.0);
    }
    // Substitute κ = u² to remove the square-root behaviour at the origin.
    let r = integrate(
        |u| 2.0 * u * k_density_zero_drift(alpha, u * u).unwrap_or(0.0),
        0.0,
        kappa.sqrt(),
        Tolerance::new(1e-14, 1e-13),
    )?;
    Ok(r.value.clamp(0.0, 1.0))
}

/// Inverse of [`k_cdf_zero_drift`] by bisection.
pub fn k_quantile_zero_drift(alpha: f64, p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::domain(format!("probability must lie in [0, 1), got {p}")));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0 / (alpha * alpha);
    while k_cdf_zero_drift(alpha, hi)? < p {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if k_cdf_zero_drift(alpha, mid)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Normalised Lévy-measure density `Λ(dx)/Λ(ℝ₊)` when `β = 0`.
pub fn lambda_density_zero_drift(alpha: f64, x: f64) -> Result<f64> {
    positive_alpha(alpha)?;
    if !(x > 0.0) {
        return Err(Error::domain(format!("x must be positive, got {x}")));
    }
    let a = alpha;
    Ok(2.0 * a / SQRT_2PI * x.powf(-0.5) * (-0.5 * a * a * x).exp() - 2.0 * a * a * norm_cdf(-a * x.sqrt()))
}

/// The variant with `2α/√(2π)` multiplying both terms. It is kept only to show
/// that it is not a probability density (total mass below one).
pub fn lambda_density_bracketed(alpha: f64, x: f64) -> Result<f64> {
    positive_alpha(alpha)?;
    if !(x > 0.0) {
        return Err(Error::domain(format!("x must be positive, got {x}")));
    }
    let a = alpha;
    Ok(2.0 * a / SQRT_2PI * (x.powf(-0.5) * (-0.5 * a * a * x).exp() - 2.0 * a * a * norm_cdf(-a * x.sqrt())))
}

/// Gamma(2, 4α) density of `H`.
pub fn h_density(alpha: f64, h: f64) -> Result<f64> {
    positive_alpha(alpha)?;
    if !(h >= 0.0) {
        return Err(Error::domain(format!("h must be >= 0, got {h}")));
    }
    let rate = 4.0 * alpha;
    Ok(rate * rate * h * (-rate * h).exp())
}

pub fn h_cdf(alpha: f64, h: f64) -> f64 {
    gamma2_cdf(h, 4.0 * alpha)
}

/// `(mean, variance)` of `H`.
pub fn h_moments(alpha: f64) -> (f64, f64) {
    (1.0 / (2.0 * alpha), 1.0 / (8.0 * alpha * alpha))
}

/// `f(ξ, h)` for `β = 0`: density in `ξ > 0` of the time at which the minimum
/// `h < 0` is attained, jointly with that minimum.
pub fn f_density_zero_drift(xi: f64, h: f64, alpha: f64) -> Result<f64> {
    positive_alpha(alpha)?;
    if !(xi > 0.0) || !(h < 0.0) {
        return Err(Error::domain(format!("need xi > 0 and h < 0, got xi = {xi}, h = {h}")));
    }
    Ok(-2.0 * alpha * h / (SQRT_2PI * xi.powf(1.5)) * (-(alpha * xi - h).powi(2) / (2.0 * xi)).exp())
}

/// Fixed-Talbot numerical inversion of a Laplace transform at `t > 0`.
///
/// With `m = 32` nodes the relative accuracy in double precision is about
/// 1e-6 for transforms analytic off the negative real axis; callers rely on 1e-3.
pub fn talbot_inverse<F: Fn(Complex64) -> Complex64>(transform: F, t: f64, m: usize) -> Result<f64> {
    if !(t > 0.0) || m < 2 {
        return Err(Error::param("Talbot inversion needs t > 0 and at least two nodes"));
    }
    let mf = m as f64;
    let r = 2.0 * mf / (5.0 * t);
    let mut sum = 0.5 * (transform(Complex64::new(r, 0.0)) * (r * t).exp()).re;
    for k in 1..m {
        let th = k as f64 * std::f64::consts::PI / mf;
        let cot = th.cos() / th.sin();
        let delta = Complex64::new(r * th * cot, r * th);
        let gamma = Complex64::new(1.0, th * (1.0 + cot * cot) - cot);
        sum += ((delta * t).exp() * transform(delta) * gamma).re;
    }
    let value = r / mf * sum;
    if !value.is_finite() {
        return Err(Error::Numerical(format!("Talbot inversion at t = {t} is not finite")));
    }
    Ok(value)
}

/// `∫_0^∞ density` for a density on the positive half-line with at worst an
/// `x^{-1/2}` singularity at zero (handled by `x = u²`).
pub fn total_mass<F: Fn(f64) -> f64>(density: F) -> Result<f64> {
    let r = integrate_to_infinity(|u| 2.0 * u * density(u * u), 0.0, Tolerance::new(1e-13, 1e-13).with_max_intervals(4000))?;
    Ok(r.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(BrownianParams::new(1.0, 0.99).is_ok());
        assert!(BrownianParams::new(1.0, 1.0).is_err());
        assert!(BrownianParams::new(0.0, 0.0).is_err());
    }

    #[test]
    fn k_laplace_reference_value() {
        let p = BrownianParams::new(1.0, 0.0).unwrap();
        assert_eq!(p.k_laplace(0.0).unwrap(), 1.0);
        // 16/√3 / (2√3 + 2)², evaluated independently in extended precision.
        assert!((p.k_laplace(1.0).unwrap() - 0.309_401_076_758_503_1).abs() < 1e-15);
        assert!(p.k_laplace(-1.0).is_err());
        let mut last = 1.0;
        for theta in [0.1, 1.0, 10.0, 1e3, 1e6] {
            let v = p.k_laplace(theta).unwrap();
            assert!(v < last && v > 0.0);
            last = v;
        }
    }

    #[test]
    fn drift_sign_symmetry() {
        let p = BrownianParams::new(2.0, 0.7).unwrap();
        let q = BrownianParams::new(2.0, -0.7).unwrap();
        for theta in [0.2, 1.0, 5.0] {
            assert!((p.k_laplace(theta).unwrap() - q.k_laplace(theta).unwrap()).abs() < 1e-15);
        }
        assert!((p.p_t_positive() + q.p_t_positive() - 1.0).abs() < 1e-15);
        assert_eq!(BrownianParams::new(2.0, 1.0).unwrap().p_t_positive(), 0.75);
    }

    #[test]
    fn t_laplace_matches_raw_formula_and_limit() {
        let p = BrownianParams::new(1.5, 0.5).unwrap();
        let (a, b) = (1.5f64, 0.5f64);
        for theta in [-0.4, 0.3, 1.7] {
            let raw = 8.0 * a * (a * a - b * b) / theta
                * (1.0 / (((a + b) * (a + b) - 2.0 * theta).sqrt() + 3.0 * a - b)
                    - 1.0 / (((a - b) * (a - b) + 2.0 * theta).sqrt() + 3.0 * a + b));
            assert!((p.t_laplace(theta).unwrap() - raw).abs() < 1e-13);
        }
        assert!((p.t_laplace(0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((p.t_laplace(1e-9).unwrap() - 1.0).abs() < 1e-8);
        assert!(p.t_laplace(2.1).is_err());
        assert!(p.t_laplace(-0.6).is_err());
    }

    #[test]
    fn h_law() {
        assert_eq!(h_moments(1.0), (0.5, 0.125));
        assert!(h_density(1.0, -0.1).is_err());
        let mass = integrate_to_infinity(|h| h_density(2.0, h).unwrap(), 0.0, Tolerance::default()).unwrap();
        assert!((mass.value - 1.0).abs() < 1e-12);
        assert!((h_cdf(1.0, 0.5) - (1.0 - 3.0 * (-2.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn k_density_shape() {
        assert!(k_density_zero_drift(1.0, 0.0).is_err());
        assert!(k_density_zero_drift(1.0, 1e-12).unwrap() < 1e-5);
        assert!(k_density_zero_drift(1.0, 60.0).unwrap().abs() < 1e-10);
        let med = k_quantile_zero_drift(1.3, 0.5).unwrap();
        assert!((k_cdf_zero_drift(1.3, med).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn talbot_recovers_exponential() {
        let v = talbot_inverse(|z| 1.0 / (z + 2.0), 0.7, 32).unwrap();
        assert!((v - (-1.4f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn normalization_rescales_slope_and_drift() {
        let n = BrownianParams::normalized(&LevyModel::brownian(4.0, 1.0), 3.0).unwrap();
        assert_eq!(n.params, BrownianParams { alpha: 1.5, beta: 0.5 });
        assert_eq!(n.height_scale, 2.0);
        assert!(BrownianParams::normalized(&LevyModel::brownian(1.0, 2.0), 1.0).is_err());
    }

    #[test]
    fn f_density_nonnegative() {
        for xi in [0.01, 0.5, 3.0] {
            for h in [-2.0, -0.1] {
                assert!(f_density_zero_drift(xi, h, 1.0).unwrap() >= 0.0);
            }
        }
        assert!(f_density_zero_drift(1.0, 0.0, 1.0).is_err());
    }
}
