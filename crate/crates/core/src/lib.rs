pub mod error;
pub mod specfun;
pub mod sphere;
pub mod zonal;
pub mod projection;
pub mod exponents;
pub mod witnesses;
pub mod normlab;
pub mod carleman;
pub mod stereo;
pub mod oscphase;
pub mod acceptance;

pub use error::{Error, Result};
pub mod cli;
