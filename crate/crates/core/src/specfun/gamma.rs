//! Log-space gamma arithmetic.
//!
//! Normalising constants such as `C(d, n)` overflow in linear space once the
//! degree reaches a few hundred, so every gamma quotient is formed as a
//! difference of logarithms.

use crate::error::{domain, Result};

/// Stirling correction coefficients `B_{2k} / (2k (2k - 1))`.
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
];

/// Arguments are shifted up to at least this value before the Stirling
/// series is applied; at 16 the truncated series is below 1e-19.
const SHIFT_FLOOR: f64 = 16.0;

fn stirling_tail(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut acc = 0.0;
    for c in STIRLING {
        acc += c * pow;
        pow *= inv2;
    }
    acc
}

/// Natural log of `Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("ln_gamma requires a positive finite argument, got {x}"));
    }
    let mut shifted = x;
    let mut prod = 1.0;
    while shifted < SHIFT_FLOOR {
        prod *= shifted;
        shifted += 1.0;
    }
    let log_prod = prod.ln();
    let s = shifted;
    let value = (s - 0.5) * s.ln() - s + 0.5 * (2.0 * std::f64::consts::PI).ln() + stirling_tail(s);
    Ok(value - log_prod)
}

/// `ln Γ(a) − ln Γ(b)` evaluated without forming either logarithm on its own,
/// so that nearby large arguments do not cancel catastrophically.
pub fn log_gamma_ratio(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return domain(format!("log_gamma_ratio requires positive arguments, got ({a}, {b})"));
    }
    let lo = a.min(b);
    let shift = if lo < SHIFT_FLOOR { (SHIFT_FLOOR - lo).ceil() as usize } else { 0 };
    let mut ratio = 1.0;
    for j in 0..shift {
        let j = j as f64;
        ratio *= (a + j) / (b + j);
    }
    let correction = ratio.ln();
    let big_a = a + shift as f64;
    let big_b = b + shift as f64;
    let diff = big_a - big_b;
    let main = (big_a - 0.5) * (diff / big_b).ln_1p() + diff * (big_b.ln() - 1.0);
    Ok(main + stirling_tail(big_a) - stirling_tail(big_b) - correction)
}

/// Surface measure of the unit sphere `S^d ⊂ R^{d+1}`.
pub fn sphere_area(d: usize) -> f64 {
    let half = (d as f64 + 1.0) / 2.0;
    let lg = ln_gamma(half).expect("positive argument");
    2.0 * std::f64::consts::PI.powf(half) * (-lg).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ln_factorial(n: u64) -> f64 {
        (1..=n).map(|k| (k as f64).ln()).sum()
    }

    #[test]
    fn unit_arguments_cancel() {
        assert_eq!(log_gamma_ratio(1.0, 1.0).unwrap(), 0.0);
        assert!(ln_gamma(1.0).unwrap().abs() < 1e-14);
        assert!(ln_gamma(2.0).unwrap().abs() < 1e-14);
    }

    #[test]
    fn half_integer_closed_form() {
        let got = log_gamma_ratio(0.5, 1.0).unwrap();
        let want = PI.sqrt().ln();
        assert!((got - want).abs() <= 1e-12 * want.abs());
        // Γ(k + 1/2) = (2k)! √π / (4^k k!)
        for k in [3_u64, 10, 40, 120] {
            let want = ln_factorial(2 * k) + 0.5 * PI.ln() - (k as f64) * 4f64.ln() - ln_factorial(k);
            let got = ln_gamma(k as f64 + 0.5).unwrap();
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "k={k}");
        }
    }

    #[test]
    fn integer_ratio_matches_factorials() {
        for (a, b) in [(5_u64, 3_u64), (101, 99), (2050, 2047), (7, 30)] {
            let want = ln_factorial(a - 1) - ln_factorial(b - 1);
            let got = log_gamma_ratio(a as f64, b as f64).unwrap();
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "{a} {b}: {got} vs {want}");
        }
    }

    #[test]
    fn ratio_drives_kernel_growth() {
        // Γ(d+n−1)/Γ(n+d/2) ~ n^{d/2−1} for d = 3.
        let (d, n) = (3.0, 100.0);
        let r = log_gamma_ratio(d + n - 1.0, n + d / 2.0).unwrap();
        let lead = (d / 2.0 - 1.0) * f64::ln(n);
        assert!((r - lead).abs() < 0.02, "{r} vs {lead}");
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0 * PI).abs() < 1e-13);
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-12);
        assert!((sphere_area(4) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(ln_gamma(0.0).is_err());
        assert!(log_gamma_ratio(-1.0, 2.0).is_err());
        assert!(log_gamma_ratio(1.0, f64::NAN).is_err());
    }
}
