//! Lipschitz minorants of sampled càdlàg paths and the Lévy-process machinery
//! around them.
//!
//! The α-Lipschitz minorant of `f` is `m(t) = inf_s { f(s) ∧ f(s-) + α|t - s| }`.
//! On a sampled path it is computed exactly by one forward and one backward
//! scan. Around that core the crate provides seeded two-sided Lévy path
//! simulation, closed-form Brownian distributions of the straddling
//! interval, integral criteria for the contact set, and a Monte Carlo harness
//! comparing the two.

pub mod acceptance;
pub mod criteria;
pub mod error;
pub mod experiments;
pub mod levy;
pub mod minorant;
pub mod numeric;
pub mod oracle;
pub mod path;

pub use error::{Error, Result};
pub use minorant::{
    compute_minorant, compute_minorant_with_tol, default_guard, extract_contact_set, recipe_d, sawtooth_check,
    straddle_interval, MinorantResult, Recipe, SawtoothReport, StraddleInterval,
};
pub use path::CadlagPath;
