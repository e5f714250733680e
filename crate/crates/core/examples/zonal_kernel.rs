//! Zonal kernel, its Bessel approximation and the Mehler–Heine limit.

use projlab::zonal::{fw_scaled_error, kernel_sup_bound, mehler_heine_constant, mehler_heine_sup_error, zonal_eval};

fn main() -> projlab::error::Result<()> {
    for d in [2, 3, 4] {
        let z = zonal_eval(d, 40, 0.3, true)?;
        let sup = kernel_sup_bound(d, 40)?;
        println!("d={d}: κZ_40(0.3) = {z:.6e}, sup bound {sup:?}");
    }
    for n in [64, 128, 256] {
        println!("n={n}: N·fw error (d=2) = {:.4}", fw_scaled_error(2, n, 200)?);
    }
    let c = mehler_heine_constant(3)?;
    for n in [128, 256, 512] {
        println!("n={n}: Mehler–Heine sup error (d=3, c={c:.6}) = {:.3e}", mehler_heine_sup_error(3, n)?);
    }
    Ok(())
}
