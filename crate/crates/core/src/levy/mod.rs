//! Lévy models, seeded two-sided path simulation and marginal probabilities.

pub mod marginal;
pub mod model;
pub mod rng;
pub mod sim;

pub use marginal::{FnMarginal, IntervalProbability, ProbEstimate};
pub use model::{JumpLaw, JumpSpec, LevyModel};
pub use rng::{stream, Channel, Side};
pub use sim::{simulate_path, simulate_path_detailed, simulate_side, SimConfig, SimulatedPath, MAX_STEPS_PER_SIDE};
