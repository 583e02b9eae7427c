use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Jump distribution of a compound Poisson component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum JumpLaw {
    /// `up` with probability `p_up`, otherwise `down`.
    TwoPoint { up: f64, down: f64, p_up: f64 },
    Gaussian { mean: f64, std: f64 },
    /// Laplace law with density `(rate / 2) e^{-rate |x|}`.
    ExponentialSymmetric { rate: f64 },
}

impl JumpLaw {
    pub fn mean(&self) -> f64 {
        match *self {
            JumpLaw::TwoPoint { up, down, p_up } => p_up * up + (1.0 - p_up) * down,
            JumpLaw::Gaussian { mean, .. } => mean,
            JumpLaw::ExponentialSymmetric { .. } => 0.0,
        }
    }

    /// Characteristic function `E[e^{iθJ}]`.
    pub fn char_fn(&self, theta: f64) -> Complex64 {
        match *self {
            JumpLaw::TwoPoint { up, down, p_up } => {
                Complex64::from_polar(p_up, theta * up) + Complex64::from_polar(1.0 - p_up, theta * down)
            }
            JumpLaw::Gaussian { mean, std } => {
                Complex64::from_polar((-0.5 * std * std * theta * theta).exp(), theta * mean)
            }
            JumpLaw::ExponentialSymmetric { rate } => Complex64::new(1.0 / (1.0 + (theta / rate).powi(2)), 0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            JumpLaw::TwoPoint { up, down, p_up } => {
                if !(up.is_finite() && down.is_finite()) {
                    return Err(Error::param("two-point jump sizes must be finite"));
                }
                if !(0.0..=1.0).contains(&p_up) {
                    return Err(Error::param(format!("p_up must lie in [0, 1], got {p_up}")));
                }
            }
            JumpLaw::Gaussian { mean, std } => {
                if !(mean.is_finite() && std.is_finite() && std >= 0.0) {
                    return Err(Error::param("Gaussian jump law needs a finite mean and std >= 0"));
                }
            }
            JumpLaw::ExponentialSymmetric { rate } => {
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(Error::param(format!("Laplace jump rate must be positive, got {rate}")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum JumpSpec {
    // A braced variant so that stray fields next to the tag are rejected.
    None {},
    CompoundPoisson { rate: f64, law: JumpLaw },
    /// Symmetric stable part with `E[e^{iθX_1}] = exp(-scale |θ|^index)`.
    SymmetricStable { index: f64, scale: f64 },
}

/// A Lévy process `X_t = drift·t + σ B_t + J_t`.
///
/// For compound Poisson jumps `J` is the plain (uncompensated) sum of jumps,
/// so `drift` is the bounded-variation drift coefficient when `sigma2 = 0`.
/// The stable part is symmetric and needs no compensation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevyModel {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<u32>,
    pub sigma2: f64,
    pub drift: f64,
    #[serde(default)]
    pub jumps: JumpSpec,
}

impl Default for JumpSpec {
    fn default() -> Self {
        JumpSpec::None {}
    }
}

impl LevyModel {
    pub fn brownian(sigma2: f64, drift: f64) -> Self {
        LevyModel {
            schema: None,
            sigma2,
            drift,
            jumps: JumpSpec::None {},
        }
    }

    pub fn compound_poisson(sigma2: f64, drift: f64, rate: f64, law: JumpLaw) -> Self {
        LevyModel {
            schema: None,
            sigma2,
            drift,
            jumps: JumpSpec::CompoundPoisson { rate, law },
        }
    }

    pub fn symmetric_stable(drift: f64, index: f64, scale: f64) -> Self {
        LevyModel {
            schema: None,
            sigma2: 0.0,
            drift,
            jumps: JumpSpec::SymmetricStable { index, scale },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: LevyModel = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(schema) = self.schema {
            if schema != 1 {
                return Err(Error::param(format!("unsupported model schema {schema}")));
            }
        }
        if !(self.sigma2 >= 0.0 && self.sigma2.is_finite()) {
            return Err(Error::param(format!("sigma2 must be finite and >= 0, got {}", self.sigma2)));
        }
        if !self.drift.is_finite() {
            return Err(Error::param("drift must be finite"));
        }
        match self.jumps {
            JumpSpec::None {} => {}
            JumpSpec::CompoundPoisson { rate, law } => {
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(Error::param(format!("compound Poisson rate must be positive, got {rate}")));
                }
                law.validate()?;
            }
            JumpSpec::SymmetricStable { index, scale } => {
                if !(index > 1.0 && index < 2.0) {
                    return Err(Error::param(format!("stable index must lie in (1, 2), got {index}")));
                }
                if !(scale > 0.0 && scale.is_finite()) {
                    return Err(Error::param(format!("stable scale must be positive, got {scale}")));
                }
            }
        }
        Ok(())
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    /// `E[X_1]`.
    pub fn mean(&self) -> f64 {
        match self.jumps {
            JumpSpec::CompoundPoisson { rate, law } => self.drift + rate * law.mean(),
            JumpSpec::None {} | JumpSpec::SymmetricStable { .. } => self.drift,
        }
    }

    /// Characteristic exponent: `E[e^{iθX_t}] = e^{-tΨ(θ)}`.
    pub fn psi(&self, theta: f64) -> Complex64 {
        let base = Complex64::new(0.5 * self.sigma2 * theta * theta, -self.drift * theta);
        match self.jumps {
            JumpSpec::None {} => base,
            JumpSpec::CompoundPoisson { rate, law } => base + rate * (1.0 - law.char_fn(theta)),
            JumpSpec::SymmetricStable { index, scale } => base + scale * theta.abs().powf(index),
        }
    }

    pub fn char_fn(&self, t: f64, theta: f64) -> Complex64 {
        (-t * self.psi(theta)).exp()
    }

    pub fn is_pure_drift(&self) -> bool {
        self.sigma2 == 0.0 && matches!(self.jumps, JumpSpec::None {})
    }

    pub fn has_bounded_variation(&self) -> bool {
        self.sigma2 == 0.0 && !matches!(self.jumps, JumpSpec::SymmetricStable { .. })
    }

    /// Total mass of the Lévy measure.
    pub fn jump_intensity(&self) -> f64 {
        match self.jumps {
            JumpSpec::None {} => 0.0,
            JumpSpec::CompoundPoisson { rate, .. } => rate,
            JumpSpec::SymmetricStable { .. } => f64::INFINITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_examples() {
        assert_eq!(LevyModel::brownian(1.0, 0.7).mean(), 0.7);
        let sym = LevyModel::compound_poisson(0.0, 0.3, 2.0, JumpLaw::TwoPoint { up: 1.0, down: -1.0, p_up: 0.5 });
        assert_eq!(sym.mean(), 0.3);
        let skew = LevyModel::compound_poisson(0.0, 0.0, 2.0, JumpLaw::TwoPoint { up: 1.0, down: -1.0, p_up: 0.75 });
        assert!((skew.mean() - 1.0).abs() < 1e-15);
        assert_eq!(LevyModel::symmetric_stable(-0.2, 1.5, 1.0).mean(), -0.2);
    }

    #[test]
    fn psi_examples() {
        let bm = LevyModel::brownian(1.0, 0.0);
        assert_eq!(bm.psi(1.0), Complex64::new(0.5, 0.0));
        let drifted = LevyModel::brownian(1.0, 1.0);
        assert_eq!(drifted.psi(2.0), Complex64::new(2.0, -2.0));
        let cp = LevyModel::compound_poisson(0.0, 0.0, 1.0, JumpLaw::TwoPoint { up: 1.0, down: -1.0, p_up: 0.5 });
        let v = cp.psi(std::f64::consts::PI);
        assert!((v.re - 2.0).abs() < 1e-15 && v.im.abs() < 1e-15);
    }

    #[test]
    fn json_schema_and_unknown_fields() {
        let m = LevyModel::from_json(
            r#"{"schema":1,"sigma2":0,"drift":0.1,"jumps":{"type":"compound_poisson","rate":1,"law":{"type":"two_point","up":1,"down":-1,"p_up":0.5}}}"#,
        )
        .unwrap();
        assert_eq!(m.jump_intensity(), 1.0);
        assert!(LevyModel::from_json(r#"{"sigma2":1,"drift":0}"#).is_ok());
        assert!(LevyModel::from_json(r#"{"sigma2":1,"drift":0,"colour":"red"}"#).is_err());
        assert!(LevyModel::from_json(r#"{"sigma2":1,"drift":0,"jumps":{"type":"none","x":1}}"#).is_err());
        assert!(LevyModel::from_json(r#"{"schema":2,"sigma2":1,"drift":0}"#).is_err());
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(LevyModel::brownian(-1.0, 0.0).validate().is_err());
        assert!(LevyModel::symmetric_stable(0.0, 2.0, 1.0).validate().is_err());
        assert!(LevyModel::symmetric_stable(0.0, 1.0, 1.0).validate().is_err());
        let law = JumpLaw::Gaussian { mean: 0.0, std: 1.0 };
        assert!(LevyModel::compound_poisson(0.0, 0.0, 0.0, law).validate().is_err());
    }
}
