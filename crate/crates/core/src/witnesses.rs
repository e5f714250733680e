//! Test functions that certify lower bounds for `‖H_n‖_{p,q}`, and their
//! predicted growth exponents.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::exponents::ExponentPoint;
use crate::specfun::{composite_nodes, ln_gamma, sphere_area, JacobiParams, JacobiRecurrence};
use crate::sphere::{GridFunction, PolarRule, SphereGrid};
use crate::zonal::{jacobi_order, shifted_degree};

/// Default smallness constant for cap radii and phase windows.
pub const DEFAULT_C: f64 = 0.125;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WitnessFamily {
    /// `P_n^{(ν,ν)}(ξ·e)`.
    Zonal,
    /// Indicator of the shells where `Z_n(ξ·e)` has a fixed sign,
    /// `N/12 ≤ k ≤ N/6`.
    OscSet,
    /// `(η_1 + iη_2)^n`, concentrated on a great circle.
    Beam,
    /// Indicator of the polar cap of radius `c/N`.
    Cap,
    /// `θ^{−(d+1)/2}` on every positive shell `1 ≤ k ≤ N/6`; the weight makes
    /// each dyadic range of `θ` contribute equally at the endpoint `S`.
    Shells,
}

impl WitnessFamily {
    pub const ALL: [WitnessFamily; 5] =
        [WitnessFamily::Zonal, WitnessFamily::OscSet, WitnessFamily::Beam, WitnessFamily::Cap, WitnessFamily::Shells];

    pub fn is_zonal(&self) -> bool {
        !matches!(self, WitnessFamily::Beam)
    }
}

impl fmt::Display for WitnessFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessFamily::Zonal => "ZONAL",
            WitnessFamily::OscSet => "OSC_SET",
            WitnessFamily::Beam => "BEAM",
            WitnessFamily::Cap => "CAP",
            WitnessFamily::Shells => "SHELLS",
        })
    }
}

impl FromStr for WitnessFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "ZONAL" => Ok(Self::Zonal),
            "OSC_SET" | "OSCSET" => Ok(Self::OscSet),
            "BEAM" => Ok(Self::Beam),
            "CAP" => Ok(Self::Cap),
            "SHELLS" => Ok(Self::Shells),
            other => Err(Error::Config(format!("unknown witness family '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessSpec {
    pub family: WitnessFamily,
    pub d: usize,
    pub n: usize,
    pub c: f64,
}

impl WitnessSpec {
    pub fn new(family: WitnessFamily, d: usize, n: usize, c: f64) -> Result<Self> {
        if n < 8 {
            return domain(format!("witness degree must be at least 8, got {n}"));
        }
        if !(c > 0.0 && c <= 0.25) {
            return domain(format!("smallness constant must lie in (0, 1/4], got {c}"));
        }
        if d < 2 {
            return domain(format!("dimension must be at least 2, got {d}"));
        }
        Ok(Self { family, d, n, c })
    }

    pub fn big_n(&self) -> f64 {
        shifted_degree(self.d, self.n)
    }

    fn shell_range(&self) -> (usize, usize) {
        let big_n = self.big_n();
        match self.family {
            WitnessFamily::OscSet => ((big_n / 12.0).ceil() as usize, (big_n / 6.0).floor() as usize),
            _ => (1, (big_n / 6.0).floor() as usize),
        }
    }

    /// `θ`-interval of shell `k`.
    fn shell(&self, k: usize) -> (f64, f64) {
        let big_n = self.big_n();
        let shift = (self.d as f64 - 1.0) * PI / 4.0;
        let lo = (2.0 * PI * k as f64 + shift) / big_n;
        (lo, lo + PI / (4.0 * big_n))
    }

    /// Jumps of the zonal profile in `θ`.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.family {
            WitnessFamily::Cap => vec![self.c / self.big_n()],
            WitnessFamily::OscSet | WitnessFamily::Shells => {
                let (a, b) = self.shell_range();
                (a..=b).flat_map(|k| {
                    let (lo, hi) = self.shell(k);
                    [lo, hi]
                })
                .collect()
            }
            _ => Vec::new(),
        }
    }

    /// Profile `F(θ)` of a zonal family; `None` for the beam.
    pub fn profile(&self) -> Option<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
        let spec = *self;
        match self.family {
            WitnessFamily::Beam => None,
            WitnessFamily::Zonal => {
                let rec = JacobiRecurrence::new(JacobiParams::symmetric(self.n, jacobi_order(self.d)).ok()?);
                Some(Box::new(move |t: f64| rec.eval(t.cos())))
            }
            WitnessFamily::Cap => {
                let rho = self.c / self.big_n();
                Some(Box::new(move |t: f64| if t <= rho { 1.0 } else { 0.0 }))
            }
            WitnessFamily::OscSet | WitnessFamily::Shells => {
                let (a, b) = self.shell_range();
                let big_n = self.big_n();
                let shift = (self.d as f64 - 1.0) * PI / 4.0;
                let weight = (self.d as f64 + 1.0) / 2.0;
                Some(Box::new(move |t: f64| {
                    let phase = big_n * t - shift;
                    let k = (phase / (2.0 * PI)).floor();
                    let inside = k >= a as f64 && k <= b as f64 && phase - 2.0 * PI * k <= PI / 4.0;
                    match (inside, spec.family) {
                        (false, _) => 0.0,
                        (true, WitnessFamily::Shells) => t.powf(-weight),
                        (true, _) => 1.0,
                    }
                }))
            }
        }
    }

    /// Polar rule resolving both the kernel oscillation and the profile jumps.
    pub fn polar_rule(&self) -> Result<PolarRule> {
        PolarRule::for_degree(self.d, self.n, &self.breakpoints())
    }

    pub fn min_resolution(&self) -> usize {
        match self.family {
            WitnessFamily::OscSet | WitnessFamily::Cap | WitnessFamily::Shells => 4 * self.n,
            _ => self.n + 2,
        }
    }
}

/// Samples the witness on a grid after checking the grid resolves it.
pub fn make_witness(spec: &WitnessSpec, grid: Arc<SphereGrid>) -> Result<GridFunction> {
    if grid.d() != spec.d {
        return Err(Error::Usage(format!("witness for d = {} on a grid with d = {}", spec.d, grid.d())));
    }
    if grid.res() < spec.min_resolution() {
        return Err(Error::Resolution(format!(
            "{} witness at n = {} needs polar resolution ≥ {}, got {}",
            spec.family,
            spec.n,
            spec.min_resolution(),
            grid.res()
        )));
    }
    let f = sample_witness(spec, grid);
    if f.values().iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
        return Err(Error::Resolution(format!("{} witness support contains no grid node", spec.family)));
    }
    Ok(f)
}

/// Samples without resolution checks.
pub(crate) fn sample_witness(spec: &WitnessSpec, grid: Arc<SphereGrid>) -> GridFunction {
    let d = spec.d;
    match spec.profile() {
        None => {
            let n = spec.n as u32;
            GridFunction::from_fn(grid, |x| Complex64::new(x[0], x[1]).powu(n))
        }
        Some(f) => GridFunction::from_real_fn(grid, |x| f(x[d].clamp(-1.0, 1.0).acos())),
    }
}

/// Growth exponent in `n` of `‖H_n f‖_q / ‖f‖_p` for the family, up to
/// logarithms.
pub fn predicted_lower_slope(family: WitnessFamily, d: usize, pt: ExponentPoint) -> Result<f64> {
    let df = d as f64;
    let (x, y) = (pt.x, pt.y);
    let osc = (df - 1.0) / 2.0 - df * y;
    match family {
        WitnessFamily::OscSet => Ok(osc),
        WitnessFamily::Beam => Ok((df - 1.0) / 2.0 * (x - y)),
        WitnessFamily::Cap => Ok((df * (x - y) - 1.0).max(df * x - (df + 1.0) / 2.0)),
        WitnessFamily::Shells => Ok(osc - ((df + 1.0) / 2.0 - df * x).max(0.0)),
        WitnessFamily::Zonal => {
            let crit = (df - 1.0) / (2.0 * df);
            if x > crit && crit > y {
                Ok(osc)
            } else {
                domain(format!("zonal witness certifies only x > {crit} > y, got ({x}, {y})"))
            }
        }
    }
}

/// `‖(η_1 + iη_2)^n‖_{L^p(S^d)}` in closed form:
/// `(π σ(S^{d−2}) B((np+2)/2, (d−1)/2))^{1/p}`.
pub fn beam_norm_closed_form(d: usize, n: usize, p: f64) -> f64 {
    if p.is_infinite() {
        return 1.0;
    }
    let a = (n as f64 * p + 2.0) / 2.0;
    let b = (d as f64 - 1.0) / 2.0;
    let ln_beta = ln_gamma(a).unwrap() + ln_gamma(b).unwrap() - ln_gamma(a + b).unwrap();
    let ln = (PI * sphere_area(d - 2)).ln() + ln_beta;
    (ln / p).exp()
}

/// The same norm by quadrature in the angle `α` from the great circle:
/// `2π σ(S^{d−2}) ∫_0^{π/2} cos^{np+1} α sin^{d−2} α dα`.
pub fn beam_norm_quadrature(d: usize, n: usize, p: f64) -> f64 {
    if p.is_infinite() {
        return 1.0;
    }
    let e = n as f64 * p + 1.0;
    let width = (1.0 / e.sqrt()).min(0.05);
    let (xs, ws) = composite_nodes(&[0.0, PI / 2.0], width);
    let integral: f64 = xs
        .iter()
        .zip(&ws)
        .map(|(&a, &w)| w * a.cos().powf(e) * a.sin().powi(d as i32 - 2))
        .sum();
    (2.0 * PI * sphere_area(d - 2) * integral).powf(1.0 / p)
}

/// Branch of the integral asymptotics selected by the parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SzegoRegime {
    /// `n^{αp − 2μ − 2}`.
    Growth,
    /// `n^{−p/2} log n`.
    Log,
    /// `n^{−p/2}`.
    Flat,
}

/// `∫_0^1 (1−t)^μ |P_n^{(α,β)}(t)|^p dt` by adaptive Gauss–Legendre in
/// `θ = arccos t`, and the regime predicted by the sign of
/// `2μ − ((2α+1)p/2 − 2)`.
pub fn szego_integral(n: usize, alpha: f64, beta: f64, mu: f64, p: f64) -> Result<(f64, SzegoRegime)> {
    if !(mu > -1.0) {
        return domain(format!("weight exponent must exceed −1, got {mu}"));
    }
    if !(p > 0.0) {
        return domain(format!("power must be positive, got {p}"));
    }
    let rec = JacobiRecurrence::new(JacobiParams::new(n, alpha, beta)?);
    let integrand = |th: f64| {
        let s = (th / 2.0).sin();
        (2.0 * s * s).powf(mu) * rec.eval(th.cos()).abs().powf(p) * th.sin()
    };
    let big_n = n as f64 + (alpha + beta + 1.0) / 2.0;
    let width = PI / (4.0 * big_n.max(1.0));
    // Geometric grading towards θ = 0 absorbs the (1−t)^μ endpoint factor.
    let mut breaks = vec![0.0];
    breaks.extend((0..30).rev().map(|j| width * 0.5f64.powi(j)));
    let panels = (PI / 2.0 / width).ceil() as usize;
    breaks.extend((2..=panels).map(|k| (k as f64 * width).min(PI / 2.0)));
    breaks.dedup();
    let mut total = 0.0;
    for w in breaks.windows(2) {
        total += adaptive_gl(&integrand, w[0], w[1], 1e-12, 20);
    }
    let lhs = 2.0 * mu;
    let rhs = (2.0 * alpha + 1.0) / 2.0 * p - 2.0;
    let regime = if (lhs - rhs).abs() <= 1e-12 {
        SzegoRegime::Log
    } else if lhs < rhs {
        SzegoRegime::Growth
    } else {
        SzegoRegime::Flat
    };
    Ok((total, regime))
}

fn adaptive_gl(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
    let whole = crate::specfun::composite_gl(a, b, 1, f);
    let halves = crate::specfun::composite_gl(a, b, 2, f);
    if depth == 0 || (whole - halves).abs() <= tol * halves.abs().max(1e-300) {
        return halves;
    }
    let m = 0.5 * (a + b);
    adaptive_gl(f, a, m, tol, depth - 1) + adaptive_gl(f, m, b, tol, depth - 1)
}
