//! Special functions: gamma ratios, Jacobi polynomials, Bessel functions and
//! Gauss rules.

pub mod bessel;
pub mod gamma;
pub mod gauss;
pub mod jacobi;

pub use bessel::{bessel_j, bessel_j_scaled};
pub use gamma::{ln_gamma, log_gamma_ratio, sphere_area};
pub use gauss::{composite_gl, composite_nodes, gauss_jacobi_symmetric, gauss_legendre, gl16, GaussRule};
pub use jacobi::{jacobi_at_one, jacobi_eval, JacobiParams, JacobiRecurrence};
