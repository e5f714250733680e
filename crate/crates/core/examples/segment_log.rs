//! Log growth of the normalised norm at the critical point S.

use projlab::acceptance::segment_log_scan;

fn main() -> projlab::error::Result<()> {
    let (rows, slope) = segment_log_scan(&[32, 64, 128, 256, 512])?;
    for (n, v) in rows {
        println!("n={n:4} ‖H_n‖/n^γ ≥ {v:.5}");
    }
    println!("slope against ln n: {slope:.4}");
    Ok(())
}
