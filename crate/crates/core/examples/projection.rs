//! Apply H_n on a grid and check it reproduces harmonics of degree n.

use std::sync::Arc;

use num_complex::Complex64;
use projlab::projection::{random_harmonic, Projector};
use projlab::sphere::SphereGrid;
use rand::SeedableRng;

fn main() -> projlab::error::Result<()> {
    let grid = Arc::new(SphereGrid::build(2, 24)?);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let y6 = random_harmonic(&grid, 6, &mut rng);
    let y9 = random_harmonic(&grid, 9, &mut rng);
    let f = y6.axpy(Complex64::new(1.0, 0.0), &y9)?;
    let h6 = Projector::new(grid.clone(), 6)?;
    let err = h6.project(&f)?.axpy(Complex64::new(-1.0, 0.0), &y6)?.lp_norm(2.0)?;
    println!("‖H_6(Y_6 + Y_9) − Y_6‖₂ = {err:.3e}  (‖Y_6‖₂ = {:.3})", y6.lp_norm(2.0)?);
    Ok(())
}
