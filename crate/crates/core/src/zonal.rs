//! The zonal kernel `Z_n(t) = C(d,n) P_n^{(ν,ν)}(t)`, `ν = (d−2)/2`, its
//! one-term Bessel approximation, and the small-angle (Mehler–Heine) limit.

use std::sync::OnceLock;

use crate::error::{domain, Error, Result};
use crate::specfun::{bessel_j, bessel_j_scaled, ln_gamma, log_gamma_ratio, sphere_area, JacobiParams, JacobiRecurrence};

/// Half the sphere dimension minus one, the Jacobi parameter of `Z_n` on `S^d`.
pub fn jacobi_order(d: usize) -> f64 {
    (d as f64 - 2.0) / 2.0
}

/// `N = n + (d − 1)/2`.
pub fn shifted_degree(d: usize, n: usize) -> f64 {
    n as f64 + (d as f64 - 1.0) / 2.0
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return domain(format!("sphere dimension must be at least 2, got {d}"));
    }
    Ok(())
}

/// `ln C(d, n)` with
/// `C(d,n) = (2n/(d−1) + 1) Γ(d/2) Γ(d+n−1) / (Γ(d−1) Γ(n+d/2))`.
pub fn ln_zonal_constant(d: usize, n: usize) -> Result<f64> {
    check_dim(d)?;
    let (df, nf) = (d as f64, n as f64);
    Ok((2.0 * nf / (df - 1.0) + 1.0).ln() + ln_gamma(df / 2.0)? - ln_gamma(df - 1.0)?
        + log_gamma_ratio(df + nf - 1.0, nf + df / 2.0)?)
}

pub fn zonal_constant(d: usize, n: usize) -> Result<f64> {
    Ok(ln_zonal_constant(d, n)?.exp())
}

/// Reproducing-kernel normalisation for the unnormalised surface measure,
/// `κ(d) = 1/σ(S^d)`.
pub fn kappa_closed_form(d: usize) -> f64 {
    1.0 / sphere_area(d)
}

/// `t ↦ scale · P_n^{(ν,ν)}(t)` with precomputed recurrence.
#[derive(Debug, Clone)]
pub struct ZonalKernel {
    d: usize,
    n: usize,
    scale: f64,
    rec: JacobiRecurrence,
}

impl ZonalKernel {
    /// Uncalibrated `Z_n`.
    pub fn new(d: usize, n: usize) -> Result<Self> {
        Self::with_scale(d, n, 1.0)
    }

    /// `κ·Z_n`, the kernel that reproduces degree-`n` harmonics under the
    /// unnormalised measure.
    pub fn calibrated(d: usize, n: usize, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) {
            return domain(format!("calibration constant must be positive, got {kappa}"));
        }
        Self::with_scale(d, n, kappa)
    }

    fn with_scale(d: usize, n: usize, factor: f64) -> Result<Self> {
        let c = zonal_constant(d, n)?;
        let rec = JacobiRecurrence::new(JacobiParams::symmetric(n, jacobi_order(d))?);
        Ok(Self { d, n, scale: c * factor, rec })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Value at `t`; `t` is clamped to `[−1, 1]` to absorb roundoff in inner
    /// products of unit vectors.
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        self.scale * self.rec.eval(t.clamp(-1.0, 1.0))
    }
}

/// `Z_n(t)`, optionally times `κ(d)`.
pub fn zonal_eval(d: usize, n: usize, t: f64, calibrated: bool) -> Result<f64> {
    if !t.is_finite() || t.abs() > 1.0 {
        return domain(format!("zonal kernel argument must lie in [-1, 1], got {t}"));
    }
    let k = if calibrated {
        ZonalKernel::calibrated(d, n, kappa_closed_form(d))?
    } else {
        ZonalKernel::new(d, n)?
    };
    Ok(k.eval(t))
}

/// Common prefactor `Γ(n+ν+1)/n! · (sin θ / 2)^{−ν} (θ / sin θ)^{1/2} N^{−ν}`.
fn fw_prefactor(nu: f64, n: usize, theta: f64) -> Result<f64> {
    let big_n = n as f64 + nu + 0.5;
    let ln = log_gamma_ratio(n as f64 + nu + 1.0, n as f64 + 1.0)? - nu * (theta.sin() / 2.0).ln()
        + 0.5 * (theta / theta.sin()).ln()
        - nu * big_n.ln();
    Ok(ln.exp())
}

fn fw_check(d: usize, theta: f64, m: usize) -> Result<()> {
    check_dim(d)?;
    if m == 0 {
        return domain("the expansion needs at least one term");
    }
    if m > 1 {
        return Err(Error::Unsupported(format!(
            "only the leading Bessel term is available in closed form (asked for {m})"
        )));
    }
    if !(theta > 0.0 && theta <= std::f64::consts::PI - 0.05) {
        return domain(format!("angle must lie in (0, π − 0.05], got {theta}"));
    }
    Ok(())
}

/// Leading-term Bessel approximation of `P_n^{(ν,ν)}(cos θ)`.
pub fn frenzen_wong_main(d: usize, n: usize, theta: f64, m: usize) -> Result<f64> {
    fw_check(d, theta, m)?;
    let nu = jacobi_order(d);
    let big_n = n as f64 + nu + 0.5;
    Ok(fw_prefactor(nu, n, theta)? * bessel_j(nu, big_n * theta)?)
}

/// Error of the one-term approximation divided by its oscillation envelope
/// (the prefactor times `√(2/(πNθ))`), so that zeros of `P_n` do not
/// inflate the ratio.
pub fn fw_relative_error(d: usize, n: usize, theta: f64) -> Result<f64> {
    fw_check(d, theta, 1)?;
    let nu = jacobi_order(d);
    let big_n = n as f64 + nu + 0.5;
    let pre = fw_prefactor(nu, n, theta)?;
    let exact = JacobiRecurrence::new(JacobiParams::symmetric(n, nu)?).eval(theta.cos());
    let approx = pre * bessel_j(nu, big_n * theta)?;
    let envelope = pre * (2.0 / (std::f64::consts::PI * big_n * theta)).sqrt();
    Ok((exact - approx).abs() / envelope)
}

/// `N · max_θ` of [`fw_relative_error`] over `samples` equispaced angles in
/// `[10/N, π/2]`.
pub fn fw_scaled_error(d: usize, n: usize, samples: usize) -> Result<f64> {
    let big_n = shifted_degree(d, n);
    let lo = 10.0 / big_n;
    let hi = std::f64::consts::FRAC_PI_2;
    if lo >= hi {
        return domain(format!("degree {n} too small for the angular window"));
    }
    let samples = samples.max(2);
    let mut worst = 0.0_f64;
    for k in 0..samples {
        let theta = lo + (hi - lo) * k as f64 / (samples - 1) as f64;
        worst = worst.max(fw_relative_error(d, n, theta)?);
    }
    Ok(big_n * worst)
}

/// Degree at which the small-angle constant is fitted.
pub const MEHLER_HEINE_FIT_DEGREE: usize = 4096;

/// Closed-form small-angle constant `2^{d/2} Γ(d/2) / Γ(d)`; only used to
/// sanity-check the fitted value.
pub fn mehler_heine_constant_closed_form(d: usize) -> f64 {
    let df = d as f64;
    (df / 2.0 * std::f64::consts::LN_2 + ln_gamma(df / 2.0).unwrap() - ln_gamma(df).unwrap()).exp()
}

fn mh_lhs(kernel: &ZonalKernel, r: f64) -> f64 {
    let n = kernel.n() as f64;
    kernel.eval((r / n).cos()) * n.powf(1.0 - kernel.d() as f64)
}

/// Least-squares constant matching `n^{1−d} Z_n(cos(r/n))` to
/// `r^{−ν} J_ν(r)` over `r ∈ [0.5, 8]` at `n = 4096`, computed once per `d`.
pub fn mehler_heine_constant(d: usize) -> Result<f64> {
    check_dim(d)?;
    if d > 4 {
        return Err(Error::Unsupported(format!("small-angle constant cached for d ≤ 4, got {d}")));
    }
    static CACHE: [OnceLock<f64>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let cell = &CACHE[d - 2];
    if let Some(c) = cell.get() {
        return Ok(*c);
    }
    let kernel = ZonalKernel::new(d, MEHLER_HEINE_FIT_DEGREE)?;
    let nu = jacobi_order(d);
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..=150 {
        let r = 0.5 + 7.5 * k as f64 / 150.0;
        let b = bessel_j_scaled(nu, r)?;
        num += mh_lhs(&kernel, r) * b;
        den += b * b;
    }
    Ok(*cell.get_or_init(|| num / den))
}

/// `(n^{1−d} Z_n(cos(r/n)), c_d r^{−ν} J_ν(r))`.
pub fn mehler_heine(d: usize, n: usize, r: f64) -> Result<(f64, f64)> {
    if !(r > 0.0) || r > n as f64 / 2.0 {
        return domain(format!("radius must lie in (0, n/2], got {r}"));
    }
    let c = mehler_heine_constant(d)?;
    let kernel = ZonalKernel::new(d, n)?;
    Ok((mh_lhs(&kernel, r), c * bessel_j_scaled(jacobi_order(d), r)?))
}

/// `sup_{r ∈ [0.5, 8]} |lhs − rhs|` on a 200-point grid.
pub fn mehler_heine_sup_error(d: usize, n: usize) -> Result<f64> {
    let c = mehler_heine_constant(d)?;
    let kernel = ZonalKernel::new(d, n)?;
    let nu = jacobi_order(d);
    let mut worst = 0.0_f64;
    for k in 0..200 {
        let r = 0.5 + 7.5 * k as f64 / 199.0;
        worst = worst.max((mh_lhs(&kernel, r) - c * bessel_j_scaled(nu, r)?).abs());
    }
    Ok(worst)
}

/// Result of [`kernel_sup_bound`].
#[derive(Debug, Clone, Copy)]
pub struct SupBound {
    /// `max |Z_n| / n^{d−1}`.
    pub ratio: f64,
    /// Where the maximum is attained.
    pub argmax_t: f64,
}

/// Maximum of `|Z_n(cos θ)|` over `16n + 1` equispaced angles, scaled by
/// `n^{1−d}`.
pub fn kernel_sup_bound(d: usize, n: usize) -> Result<SupBound> {
    if n == 0 {
        return domain("kernel sup bound needs n ≥ 1");
    }
    let kernel = ZonalKernel::new(d, n)?;
    let m = 16 * n;
    let mut best = SupBound { ratio: 0.0, argmax_t: 1.0 };
    for k in 0..=m {
        let t = (std::f64::consts::PI * k as f64 / m as f64).cos();
        let v = kernel.eval(t).abs();
        if v > best.ratio {
            best = SupBound { ratio: v, argmax_t: t };
        }
    }
    best.ratio /= (n as f64).powf(d as f64 - 1.0);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::jacobi_eval;
    use proptest::prelude::*;

    #[test]
    fn degree_zero_is_one() {
        for d in 2..=4 {
            assert!((zonal_eval(d, 0, 0.4, false).unwrap() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn value_at_one_is_space_dimension() {
        // dim H_n(S^2) = 2n+1, dim H_n(S^3) = (n+1)².
        for n in [1, 5, 40] {
            let z2 = zonal_eval(2, n, 1.0, false).unwrap();
            let z3 = zonal_eval(3, n, 1.0, false).unwrap();
            assert!((z2 - (2 * n + 1) as f64).abs() < 1e-9 * z2);
            assert!((z3 - ((n + 1) * (n + 1)) as f64).abs() < 1e-9 * z3);
        }
    }

    #[test]
    fn composition_with_jacobi() {
        let t = 0.3f64.cos();
        let want = zonal_constant(2, 10).unwrap() * jacobi_eval(JacobiParams::symmetric(10, 0.0).unwrap(), t).unwrap();
        assert!((zonal_eval(2, 10, t, false).unwrap() - want).abs() < 1e-13 * want.abs());
        assert!(zonal_eval(2, 10, 1.5, false).is_err());
    }

    #[test]
    fn constant_growth() {
        // Fit ln C = ln A + (3/2) ln n over [32, 128] for d = 3.
        let ns = [32usize, 48, 64, 96, 128];
        let ln_a: f64 = ns
            .iter()
            .map(|&n| ln_zonal_constant(3, n).unwrap() - 1.5 * (n as f64).ln())
            .sum::<f64>()
            / ns.len() as f64;
        let c64 = zonal_constant(3, 64).unwrap();
        let model = ln_a.exp() * 64f64.powf(1.5);
        assert!((c64 / model - 1.0).abs() < 0.05);
    }

    #[test]
    fn leading_term_accuracy() {
        let p = JacobiRecurrence::new(JacobiParams::symmetric(64, 0.0).unwrap()).eval(std::f64::consts::FRAC_PI_4.cos());
        let fw = frenzen_wong_main(2, 64, std::f64::consts::FRAC_PI_4, 1).unwrap();
        assert!((fw - p).abs() <= 0.05 * p.abs());
        assert!(matches!(frenzen_wong_main(2, 64, 0.5, 2), Err(Error::Unsupported(_))));
        assert!(frenzen_wong_main(2, 64, 3.13, 1).is_err());
    }

    #[test]
    fn leading_term_exact_for_half_order() {
        for n in [32, 128, 512] {
            let e = fw_scaled_error(3, n, 200).unwrap();
            assert!(e < 1e-9, "n={n} e={e}");
        }
    }

    #[test]
    fn leading_term_remainder_scales_inversely() {
        for d in [2, 4] {
            let errs: Vec<f64> = [32, 64, 128, 256, 512].iter().map(|&n| fw_scaled_error(d, n, 400).unwrap()).collect();
            let max = errs.iter().cloned().fold(0.0, f64::max);
            let min = errs.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(max / min <= 2.0, "d={d} {errs:?}");
        }
    }

    #[test]
    fn small_angle_limit_matches_leading_term() {
        // At θ = r/N the one-term expansion and the small-angle limit agree to O(1/n).
        let (d, n) = (2, 512);
        let r = 3.0;
        let big_n = shifted_degree(d, n);
        let theta = r / big_n;
        let fw = frenzen_wong_main(d, n, theta, 1).unwrap() * zonal_constant(d, n).unwrap();
        let (_, rhs) = mehler_heine(d, n, r).unwrap();
        let lhs = fw * (n as f64).powf(1.0 - d as f64);
        assert!((lhs - rhs).abs() < 0.02 * rhs.abs().max(0.1));
    }

    #[test]
    fn small_angle_constant() {
        for d in 2..=4 {
            let c = mehler_heine_constant(d).unwrap();
            let want = mehler_heine_constant_closed_form(d);
            assert!((c / want - 1.0).abs() < 1e-2, "d={d}: {c} vs {want}");
        }
    }

    #[test]
    fn small_angle_tolerance_and_rate() {
        for (d, r) in [(2usize, 1.0), (3, 3.0)] {
            let (lhs, rhs) = mehler_heine(d, 512, r).unwrap();
            assert!((lhs - rhs).abs() <= 0.01 * rhs.abs() + 0.01);
        }
        for d in [2, 3] {
            let e256 = mehler_heine_sup_error(d, 256).unwrap();
            let e512 = mehler_heine_sup_error(d, 512).unwrap();
            assert!(e256 / e512 >= 1.5);
        }
        assert!(mehler_heine(2, 64, 0.0).is_err());
    }

    #[test]
    fn sup_bound_attained_at_pole() {
        let ratios: Vec<f64> = [16, 32, 64, 128, 256].iter().map(|&n| kernel_sup_bound(2, n).unwrap().ratio).collect();
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min <= 2.0);
        let a = kernel_sup_bound(3, 64).unwrap();
        let b = kernel_sup_bound(3, 128).unwrap();
        assert!(b.ratio / a.ratio <= 2.0 && a.ratio / b.ratio <= 2.0);
        assert_eq!(b.argmax_t, 1.0);
    }

    proptest! {
        #[test]
        fn parity(d in 2usize..=4, n in 0usize..200, t in -1.0f64..1.0) {
            let a = zonal_eval(d, n, -t, false).unwrap();
            let b = zonal_eval(d, n, t, false).unwrap();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((a - sign * b).abs() <= 1e-10 * b.abs().max(1.0));
        }
    }
}
