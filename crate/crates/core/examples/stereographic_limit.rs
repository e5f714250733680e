//! Blown-up pairings ⟨H_n F, G⟩ converging to the extension-operator pairing.

use projlab::stereo::{bank_pairs, fit_limit_constant, limit_constant_predicted, limit_deviations};

fn main() -> projlab::error::Result<()> {
    let pairs = bank_pairs();
    let c = fit_limit_constant(2, 256, &pairs)?;
    println!("c̃ = {c:.6} (predicted {:.6})", limit_constant_predicted(2)?);
    let ns = [32, 64, 128, 256];
    let dev = limit_deviations(2, &ns, c, &pairs)?;
    for (k, row) in dev.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.2e}")).collect();
        println!("pair {k}: {}", cells.join(" "));
    }
    Ok(())
}
