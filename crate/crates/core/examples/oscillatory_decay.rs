//! Curvature condition for the limiting phase and decay of T_λ^ε.

use projlab::exponents::ExponentPoint;
use projlab::oscphase::{cs_condition_check, oscillatory_bank, sphere_phase, t_lambda_eps_decay, EPS0};

fn main() -> projlab::error::Result<()> {
    let rep = cs_condition_check(&sphere_phase(0.2), &[0.1, 0.05], &[0.05], 1e-4)?;
    println!("rank {} eigenvalues {:?} elliptic {}", rep.rank, rep.hessian_eigs, rep.elliptic(1e-6));
    let pt = ExponentPoint::new(0.5, 0.125)?;
    for fit in t_lambda_eps_decay(2, EPS0, &[32.0, 64.0, 128.0], pt, &oscillatory_bank())? {
        println!("slope {:.4} (−d/q = −0.25)", fit.slope);
    }
    Ok(())
}
