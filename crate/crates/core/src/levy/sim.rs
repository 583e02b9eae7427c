//! Two-sided Lévy paths on the uniform grid `{kΔt : |k| <= W/Δt}`.
//!
//! Each side of the origin is driven by its own increment streams. The
//! negative half is `X_{-u} = -X'_u` for an independent copy `X'`, which in
//! forward time means the forward increment over the cell `(-jΔt, -(j-1)Δt]`
//! is the `j`-th increment of `X'`. Compound Poisson jumps are drawn at exact
//! event times and snapped to the right endpoint of their cell, with the
//! pre-jump value stored as the left limit.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::model::{JumpLaw, JumpSpec, LevyModel};
use super::rng::{stream, Channel, Side};
use crate::error::{Error, Result};
use crate::path::CadlagPath;

/// Upper bound on grid cells per side.
pub const MAX_STEPS_PER_SIDE: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub window: f64,
    pub dt: f64,
    pub seed: u64,
    pub replicate: u64,
}

impl SimConfig {
    pub fn new(window: f64, dt: f64, seed: u64, replicate: u64) -> Self {
        SimConfig {
            window,
            dt,
            seed,
            replicate,
        }
    }

    pub fn with_replicate(self, replicate: u64) -> Self {
        SimConfig { replicate, ..self }
    }

    /// Number of cells on each side of the origin.
    pub fn steps_per_side(&self) -> Result<usize> {
        if !(self.window > 0.0 && self.window.is_finite()) {
            return Err(Error::param(format!("window must be positive, got {}", self.window)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::param(format!("dt must be positive, got {}", self.dt)));
        }
        let ratio = self.window / self.dt;
        if ratio > MAX_STEPS_PER_SIDE as f64 {
            return Err(Error::param(format!(
                "window / dt = {ratio:.3e} exceeds the cap of {MAX_STEPS_PER_SIDE} steps per side"
            )));
        }
        let n = ratio.round();
        if n < 1.0 || (n - ratio).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::param(format!(
                "window {} is not an integer multiple of dt {}",
                self.window, self.dt
            )));
        }
        Ok(n as usize)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedPath {
    pub path: CadlagPath,
    /// Number of jump events drawn (before snapping merges events sharing a cell).
    pub jump_events: usize,
}

struct SideDraw {
    /// Total increment of cell `j` at index `j - 1`.
    total: Vec<f64>,
    /// Jump part of the same increments; empty when the model has no jumps.
    jumps: Vec<f64>,
    events: usize,
}

fn draw_jump<R: Rng>(law: &JumpLaw, rng: &mut R) -> f64 {
    match *law {
        JumpLaw::TwoPoint { up, down, p_up } => {
            if rng.random::<f64>() < p_up {
                up
            } else {
                down
            }
        }
        JumpLaw::Gaussian { mean, std } => mean + std * rng.sample::<f64, _>(StandardNormal),
        JumpLaw::ExponentialSymmetric { rate } => {
            let magnitude: f64 = rng.sample::<f64, _>(Exp1) / rate;
            if rng.random::<bool>() {
                magnitude
            } else {
                -magnitude
            }
        }
    }
}

/// Chambers–Mallows–Stuck draw with `E[e^{iθX}] = e^{-|θ|^index}`.
pub(crate) fn symmetric_stable_variate<R: Rng>(index: f64, rng: &mut R) -> f64 {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let v = (rng.random::<f64>() - 0.5) * std::f64::consts::PI;
    let v = v.clamp(-half_pi + 1e-15, half_pi - 1e-15);
    let e: f64 = rng.sample(Exp1);
    (index * v).sin() / v.cos().powf(1.0 / index) * (((1.0 - index) * v).cos() / e).powf((1.0 - index) / index)
}

fn draw_side(model: &LevyModel, cfg: &SimConfig, n: usize, side: Side) -> SideDraw {
    let dt = cfg.dt;
    let mut total = vec![model.drift * dt; n];

    if model.sigma2 > 0.0 {
        let sd = (model.sigma2 * dt).sqrt();
        let mut rng = stream(cfg.seed, cfg.replicate, side, Channel::Gaussian);
        let normal = Normal::new(0.0, sd).expect("finite positive sd");
        for x in total.iter_mut() {
            *x += normal.sample(&mut rng);
        }
    }

    let mut jumps = Vec::new();
    let mut events = 0;
    match model.jumps {
        JumpSpec::None {} => {}
        JumpSpec::CompoundPoisson { rate, law } => {
            jumps = vec![0.0; n];
            let mut rng = stream(cfg.seed, cfg.replicate, side, Channel::Jumps);
            let horizon = n as f64 * dt;
            let mut clock = 0.0;
            loop {
                clock += rng.sample::<f64, _>(Exp1) / rate;
                if clock > horizon {
                    break;
                }
                let cell = ((clock / dt).ceil() as usize).clamp(1, n);
                jumps[cell - 1] += draw_jump(&law, &mut rng);
                events += 1;
            }
            for (x, j) in total.iter_mut().zip(&jumps) {
                *x += j;
            }
        }
        JumpSpec::SymmetricStable { index, scale } => {
            let mut rng = stream(cfg.seed, cfg.replicate, side, Channel::Stable);
            let step_scale = (scale * dt).powf(1.0 / index);
            for x in total.iter_mut() {
                *x += step_scale * symmetric_stable_variate(index, &mut rng);
            }
        }
    }
    SideDraw { total, jumps, events }
}

fn left_limit(value: f64, jump: f64) -> Option<f64> {
    let left = value - jump;
    (jump != 0.0 && left != value).then_some(left)
}

/// Simulates the path on `[-W, W]` with `X_0 = 0`.
pub fn simulate_path(model: &LevyModel, cfg: &SimConfig) -> Result<CadlagPath> {
    Ok(simulate_path_detailed(model, cfg)?.path)
}

pub fn simulate_path_detailed(model: &LevyModel, cfg: &SimConfig) -> Result<SimulatedPath> {
    model.validate()?;
    let n = cfg.steps_per_side()?;
    let pos = draw_side(model, cfg, n, Side::Positive);
    let neg = draw_side(model, cfg, n, Side::Negative);

    let len = 2 * n + 1;
    let times: Vec<f64> = (0..len).map(|k| (k as f64 - n as f64) * cfg.dt).collect();
    let mut values = vec![0.0; len];
    let mut left_values = vec![None; len];

    for j in 1..=n {
        let i = n + j;
        values[i] = values[i - 1] + pos.total[j - 1];
        if !pos.jumps.is_empty() {
            left_values[i] = left_limit(values[i], pos.jumps[j - 1]);
        }
    }
    for j in 1..=n {
        let right = n - j + 1;
        values[right - 1] = values[right] - neg.total[j - 1];
        if !neg.jumps.is_empty() {
            left_values[right] = left_limit(values[right], neg.jumps[j - 1]);
        }
    }

    let path = CadlagPath::new(times, values, left_values)?;
    Ok(SimulatedPath {
        path,
        jump_events: pos.events + neg.events,
    })
}

/// One half of [`simulate_path`]: `[-W, 0]` or `[0, W]`, sample-for-sample identical to it.
pub fn simulate_side(model: &LevyModel, cfg: &SimConfig, side: Side) -> Result<CadlagPath> {
    model.validate()?;
    let n = cfg.steps_per_side()?;
    let draw = draw_side(model, cfg, n, side);
    let mut values = vec![0.0; n + 1];
    let mut left_values = vec![None; n + 1];
    let times: Vec<f64>;
    match side {
        Side::Positive => {
            times = (0..=n).map(|k| k as f64 * cfg.dt).collect();
            for j in 1..=n {
                values[j] = values[j - 1] + draw.total[j - 1];
                if !draw.jumps.is_empty() {
                    left_values[j] = left_limit(values[j], draw.jumps[j - 1]);
                }
            }
        }
        Side::Negative => {
            times = (0..=n).map(|k| (k as f64 - n as f64) * cfg.dt).collect();
            for j in 1..=n {
                let right = n - j + 1;
                values[right - 1] = values[right] - draw.total[j - 1];
                if !draw.jumps.is_empty() {
                    left_values[right] = left_limit(values[right], draw.jumps[j - 1]);
                }
            }
        }
    }
    CadlagPath::new(times, values, left_values)
}
