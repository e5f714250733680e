use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use projlab::exponents::{gamma_exponent, ExponentPoint};
use projlab::projection::Projector;
use projlab::sphere::{GridFunction, SphereGrid};
use projlab::stereo::{mu_inverse_scaled, mu_jacobian, mu_jacobian_fd, mu_map, stereographic_projection};

proptest! {
    #[test]
    fn mu_lands_on_scaled_sphere(n in 1.0f64..200.0, x in prop::collection::vec(-50.0f64..50.0, 2..4)) {
        let p = mu_map(n, &x);
        let r = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((r - n).abs() <= 1e-12 * n);
        let back = stereographic_projection(n, &p).unwrap();
        let xi: Vec<f64> = p.iter().map(|v| v / n).collect();
        let inv = mu_inverse_scaled(n, &xi);
        for k in 0..x.len() {
            prop_assert!((back[k] - x[k]).abs() <= 1e-9 * (1.0 + x[k].abs()));
            prop_assert!((inv[k] - x[k]).abs() <= 1e-9 * (1.0 + x[k].abs()));
        }
        prop_assert_eq!(back[x.len()], -n);
    }

    #[test]
    fn jacobian_matches_gram(n in 2.0f64..50.0, x in prop::collection::vec(-10.0f64..10.0, 2..4)) {
        let exact = mu_jacobian(n, &x);
        prop_assert!((mu_jacobian_fd(n, &x, 1e-5) - exact).abs() <= 1e-6 * exact);
    }

    #[test]
    fn exponent_is_duality_invariant(x in 0.0f64..=1.0, t in 0.0f64..=1.0, d in 2usize..6) {
        let pt = ExponentPoint::new(x, x * t).unwrap();
        prop_assert!((gamma_exponent(d, pt) - gamma_exponent(d, pt.dual())).abs() < 1e-12);
    }
}

#[test]
fn projection_is_idempotent_and_self_adjoint() {
    let grid = Arc::new(SphereGrid::build(2, 14).unwrap());
    let f = GridFunction::from_fn(grid.clone(), |p| Complex64::new(p[0] * p[1].exp(), (3.0 * p[2]).sin()));
    let g = GridFunction::from_real_fn(grid.clone(), |p| (p[0] - 0.3).abs() + p[2]);
    for n in [0, 3, 7, 12] {
        let h = Projector::new(grid.clone(), n).unwrap();
        let hf = h.project(&f).unwrap();
        let again = h.project(&hf).unwrap();
        let drift = again.axpy(Complex64::new(-1.0, 0.0), &hf).unwrap().lp_norm(2.0).unwrap();
        assert!(drift < 1e-11 * (1.0 + hf.lp_norm(2.0).unwrap()), "n={n} drift {drift}");
        let lhs = hf.inner(&g).unwrap();
        let rhs = f.inner(&h.project(&g).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-11 * (1.0 + lhs.norm()), "n={n}");
    }
}
