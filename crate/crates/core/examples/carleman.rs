//! Weighted inequality for the conjugated operator, uniform in τ.

use projlab::carleman::{default_shifted_taus, resonant_witness, uniformity_sweep};

fn main() -> projlab::error::Result<()> {
    let (d, p, q) = (3, 1.2, 6.0);
    let taus: Vec<f64> = default_shifted_taus().iter().map(|t| t + d as f64 / q).collect();
    for row in uniformity_sweep(d, p, q, &taus, 0.25, 1.0 / 32.0, 11)? {
        println!("τ={:7.3} ratio {:.5} worst mode {}", row.tau, row.ratio, row.worst_mode);
    }
    let (dist, ratio) = resonant_witness(d, p, q, 4, 1.0 / 32.0)?;
    println!("near resonance: dist {dist:.3e}, ratio {ratio:.3}");
    Ok(())
}
