//! Regions and growth exponents over the (1/p, 1/q) triangle.

use projlab::exponents::{classify_region, gamma_exponent, sharp_range_status, CriticalPoints, ExponentPoint};

fn main() -> projlab::error::Result<()> {
    for d in [2, 3] {
        let c = CriticalPoints::new(d);
        println!("d={d}: P={:?} R={:?} S={:?} Q={:?}", c.p, c.r, c.s, c.q);
        for (x, y) in [(0.6, 0.3), (0.9, 0.1), (0.3, 0.05), (0.95, 0.7)] {
            let pt = ExponentPoint::new(x, y)?;
            println!(
                "  ({x}, {y}): {} γ = {:.4} {:?}",
                classify_region(d, pt)?,
                gamma_exponent(d, pt),
                sharp_range_status(d, pt)
            );
        }
    }
    Ok(())
}
