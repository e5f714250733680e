//! Bessel functions of the first kind `J_ν(r)` for real `ν ≥ 0`, `r ≥ 0`.
//!
//! Three regimes: the ascending series for small arguments, the Hankel
//! asymptotic expansion for large arguments, and Bessel's integral in
//! between.

use std::f64::consts::PI;

use super::gamma::ln_gamma;
use super::gauss::composite_gl;
use crate::error::{domain, Result};

/// Below this argument the ascending series is used unconditionally.
const SERIES_LIMIT: f64 = 6.0;
/// The Hankel expansion is used once `r ≥ max(HANKEL_FLOOR, ν²)`.
const HANKEL_FLOOR: f64 = 25.0;

/// `J_ν(r)`.
pub fn bessel_j(nu: f64, r: f64) -> Result<f64> {
    check(nu, r)?;
    if r == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    Ok(if r <= SERIES_LIMIT || r * r / 4.0 <= nu + 1.0 {
        series(nu, r) * (nu * (r / 2.0).ln() - ln_gamma(nu + 1.0)?).exp()
    } else if r >= HANKEL_FLOOR.max(nu * nu) {
        hankel(nu, r)
    } else {
        integral(nu, r)
    })
}

/// `r^{−ν} J_ν(r)`, continuous at `r = 0` with value `2^{−ν} / Γ(ν+1)`.
pub fn bessel_j_scaled(nu: f64, r: f64) -> Result<f64> {
    check(nu, r)?;
    if r <= SERIES_LIMIT || r * r / 4.0 <= nu + 1.0 {
        let pre = (-nu * std::f64::consts::LN_2 - ln_gamma(nu + 1.0)?).exp();
        Ok(pre * series(nu, r))
    } else {
        Ok(bessel_j(nu, r)? * r.powf(-nu))
    }
}

fn check(nu: f64, r: f64) -> Result<()> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return domain(format!("Bessel order must be finite and non-negative, got {nu}"));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return domain(format!("Bessel argument must be finite and non-negative, got {r}"));
    }
    Ok(())
}

/// `Σ_k (−r²/4)^k Γ(ν+1) / (k! Γ(k+ν+1))`.
fn series(nu: f64, r: f64) -> f64 {
    let q = -r * r / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() && kf > r {
            break;
        }
    }
    sum
}

fn hankel(nu: f64, r: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0 * r);
        if a.abs() >= last || a == 0.0 {
            break;
        }
        last = a.abs();
        // Terms alternate P, Q, with signs + − − + + − − ...
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * a;
        } else {
            p += sign * a;
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let chi = r - (nu / 2.0 + 0.25) * PI;
    (2.0 / (PI * r)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn integral(nu: f64, r: f64) -> f64 {
    let panels = ((nu + r) * PI / 8.0).ceil() as usize + 2;
    let first = composite_gl(0.0, PI, panels, |t| (nu * t - r * t.sin()).cos()) / PI;
    let s = (nu * PI).sin();
    if s.abs() < 1e-15 {
        return first;
    }
    // Cut the decaying tail where the exponent reaches −40.
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while r * hi.sinh() + nu * hi < 40.0 {
        hi *= 2.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if r * mid.sinh() + nu * mid < 40.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let second = composite_gl(0.0, hi, 8, |u| (-r * u.sinh() - nu * u).exp());
    first - s / PI * second
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn j_half(r: f64) -> f64 {
        (2.0 / (PI * r)).sqrt() * r.sin()
    }

    fn j_three_halves(r: f64) -> f64 {
        (2.0 / (PI * r)).sqrt() * (r.sin() / r - r.cos())
    }

    #[test]
    fn reference_values() {
        let cases = [
            (0.0, 1.0, 0.765_197_686_557_966_6),
            (1.0, 1.0, 0.440_050_585_744_933_5),
            (0.0, 10.0, -0.245_935_764_451_348_3),
            (0.0, 20.0, 0.167_024_664_340_583_2),
            (1.0, 20.0, 0.066_833_124_175_850_05),
        ];
        for (nu, r, want) in cases {
            let got = bessel_j(nu, r).unwrap();
            assert!((got - want).abs() < 1e-13, "J_{nu}({r}) = {got}, want {want}");
        }
    }

    #[test]
    fn half_integer_closed_forms_all_regimes() {
        for r in [0.1, 1.0, 5.0, 11.9, 12.5, 17.0, 24.9, 25.1, 60.0, 500.0, 4000.0] {
            assert!((bessel_j(0.5, r).unwrap() - j_half(r)).abs() < 1e-13, "r={r}");
            assert!((bessel_j(1.5, r).unwrap() - j_three_halves(r)).abs() < 1e-13, "r={r}");
        }
    }

    #[test]
    fn high_order_near_turning_point() {
        // Spherical Bessel upward recurrence is stable for r > order.
        let r = 40.0;
        let mut jm = (2.0 / (PI * r)).sqrt() * r.sin();
        let mut j = j_three_halves(r);
        let mut order = 1.5;
        while order < 20.4 {
            let next = 2.0 * order / r * j - jm;
            jm = j;
            j = next;
            order += 1.0;
        }
        let got = bessel_j(20.5, r).unwrap();
        assert!((got - j).abs() < 1e-12, "{got} vs {j}");
    }

    #[test]
    fn scaled_limit_at_origin() {
        assert!((bessel_j_scaled(0.5, 0.0).unwrap() - (2.0 / PI).sqrt()).abs() < 4e-15);
        assert!((bessel_j_scaled(1.0, 0.0).unwrap() - 0.5).abs() < 4e-15);
        assert!((bessel_j_scaled(1.0, 30.0).unwrap() * 30.0 - bessel_j(1.0, 30.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(bessel_j(-0.5, 1.0).is_err());
        assert!(bessel_j(0.5, -1.0).is_err());
        assert!(bessel_j(0.5, f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn three_term_recurrence(nu in 1.0f64..6.0, r in 0.5f64..80.0) {
            let lhs = bessel_j(nu - 1.0, r).unwrap() + bessel_j(nu + 1.0, r).unwrap();
            let rhs = 2.0 * nu / r * bessel_j(nu, r).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-11 * (1.0 + 2.0 * nu / r));
        }
    }
}
