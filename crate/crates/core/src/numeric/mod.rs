//! Quadrature, special functions and summary statistics shared by the other modules.

pub mod quad;
pub mod special;
pub mod stats;

pub use quad::{integrate, integrate_to_infinity, Integral, Tolerance};
pub use special::{norm_cdf, norm_interval, norm_pdf};
