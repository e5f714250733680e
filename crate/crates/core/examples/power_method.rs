//! Nonlinear power iteration for ‖H_n‖_{p→q}, compared with the witnesses.

use projlab::exponents::ExponentPoint;
use projlab::normlab::{lower_bound_norm, power_method_detailed, PowerOptions};
use projlab::witnesses::WitnessFamily;

fn main() -> projlab::error::Result<()> {
    let pt = ExponentPoint::new(0.9, 0.1)?;
    for n in [32, 64, 128] {
        let r = power_method_detailed(2, n, pt, PowerOptions::default(), 7)?;
        let w = lower_bound_norm(2, n, pt, &WitnessFamily::ALL)?;
        println!("n={n:3} power {:.5} ({} after {} its)  witness {w:.5}", r.ratio, r.start, r.iterations);
    }
    Ok(())
}
