//! Witness lower bounds against n^γ at a T1 point.

use projlab::exponents::{gamma_exponent, ExponentPoint};
use projlab::normlab::{best_family, fit_exponent};
use projlab::witnesses::WitnessFamily;

fn main() -> projlab::error::Result<()> {
    let (d, pt) = (3, ExponentPoint::new(0.6, 0.3)?);
    let mut rows = Vec::new();
    for n in [32, 64, 128, 256] {
        let (fam, r) = best_family(d, n, pt, &WitnessFamily::ALL)?;
        println!("n={n:4} {fam:>8} {r:.5}");
        rows.push((n as f64, r));
    }
    let fit = fit_exponent(&rows)?;
    println!("slope {:.4}, γ = {:.4}", fit.slope, gamma_exponent(d, pt));
    Ok(())
}
