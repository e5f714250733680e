//! Quadrature on spheres, sampled functions and their norms.

mod function;
mod grid;
mod norms;
mod polar;

pub use function::{cap_indicator, north_pole, GridFunction};
pub use grid::{pairwise_sum, SphereGrid};
pub use norms::{weighted_lorentz, weighted_lp, LorentzIndex};
pub use polar::PolarRule;
