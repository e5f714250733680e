//! Conjugated Laplacian in logarithmic polar coordinates and its explicit
//! inverse, mode by mode over spherical harmonics on `S^{d−1}`.
//!
//! After `r = e^{−t}` and the weight substitution the operator on the
//! degree-`n` component is
//! `L_n = (∂_t − τ̃ + n)(∂_t − τ̃ − n − d + 2)`, `τ̃ = τ − d/q`.

use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::specfun::gauss_legendre;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sphere::SphereGrid;
use crate::zonal::ZonalKernel;

/// Uniform grid on `[−T, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub half_width: f64,
    pub step: f64,
    pub len: usize,
}

impl TimeGrid {
    pub fn new(half_width: f64, step: f64) -> Result<Self> {
        if !(half_width > 0.0 && step > 0.0 && step < half_width) {
            return domain(format!("bad time grid: T = {half_width}, step = {step}"));
        }
        let cells = (2.0 * half_width / step).round() as usize;
        Ok(Self { half_width, step: 2.0 * half_width / cells as f64, len: cells + 1 })
    }

    pub fn t(&self, k: usize) -> f64 {
        -self.half_width + k as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|k| self.t(k)).collect()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.len).map(|k| f(self.t(k))).collect()
    }

    /// Trapezoid weights.
    pub fn weights(&self) -> Vec<f64> {
        let mut w = vec![self.step; self.len];
        w[0] *= 0.5;
        w[self.len - 1] *= 0.5;
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarlemanConfig {
    pub d: usize,
    pub tau: f64,
    pub p: f64,
    pub q: f64,
    pub dist_floor: f64,
    pub time: TimeGrid,
}

/// Default time step.
pub const DEFAULT_STEP: f64 = 1.0 / 64.0;

/// Distance from `x` to the nearest integer.
pub fn dist_to_integers(x: f64) -> f64 {
    (x - x.round()).abs()
}

impl CarlemanConfig {
    /// Time domain `[−T, T]` with `T = 12 / dist_floor`.
    pub fn new(d: usize, tau: f64, p: f64, q: f64, dist_floor: f64) -> Result<Self> {
        Self::with_step(d, tau, p, q, dist_floor, DEFAULT_STEP)
    }

    pub fn with_step(d: usize, tau: f64, p: f64, q: f64, dist_floor: f64, step: f64) -> Result<Self> {
        if d < 3 {
            return Err(Error::Config(format!("the Carleman setting needs d ≥ 3, got {d}")));
        }
        if !(p >= 1.0 && q >= p) {
            return Err(Error::Config(format!("need 1 ≤ p ≤ q, got p = {p}, q = {q}")));
        }
        if (1.0 / p - 1.0 / q - 2.0 / d as f64).abs() > 1e-12 {
            return Err(Error::Config(format!("1/p − 1/q must equal 2/d, got {}", 1.0 / p - 1.0 / q)));
        }
        if !(dist_floor > 0.0) {
            return Err(Error::Config("dist_floor must be positive".into()));
        }
        let dist = dist_to_integers(tau - d as f64 / q);
        if dist < dist_floor - 1e-12 {
            return Err(Error::Conditioning(format!(
                "τ = {tau} lies within {dist} of ℤ + d/q, below the floor {dist_floor}"
            )));
        }
        let time = TimeGrid::new(12.0 / dist_floor, step)?;
        Ok(Self { d, tau, p, q, dist_floor, time })
    }

    /// Config fixed by `τ̃` instead of `τ`.
    pub fn from_shifted(d: usize, tau_tilde: f64, p: f64, q: f64, dist_floor: f64, step: f64) -> Result<Self> {
        Self::with_step(d, tau_tilde + d as f64 / q, p, q, dist_floor, step)
    }

    pub fn tau_tilde(&self) -> f64 {
        self.tau - self.d as f64 / self.q
    }

    /// Roots `(τ̃ − n, τ̃ + n + d − 2)` of the mode-`n` symbol.
    pub fn mode_roots(&self, n: usize) -> (f64, f64) {
        let tt = self.tau_tilde();
        (tt - n as f64, tt + n as f64 + self.d as f64 - 2.0)
    }
}

/// `P(t) = t² − (2τ + d − 2)t + τ(τ + d − 2)`.
pub fn conjugated_polynomial(cfg: &CarlemanConfig, t: f64) -> f64 {
    let (tau, d) = (cfg.tau, cfg.d as f64);
    t * t - (2.0 * tau + d - 2.0) * t + tau * (tau + d - 2.0)
}

/// One spherical-harmonic component `h_n(t) g_n(ω)`.
#[derive(Debug, Clone)]
pub struct Mode {
    pub n: usize,
    pub profile: Vec<f64>,
    /// Degree-`n` harmonic sampled on the `S^{d−1}` grid.
    pub harmonic: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct CarlemanProfile {
    pub sphere: Arc<SphereGrid>,
    pub modes: Vec<Mode>,
}

impl CarlemanProfile {
    pub fn new(sphere: Arc<SphereGrid>, modes: Vec<Mode>) -> Result<Self> {
        for m in &modes {
            if m.harmonic.len() != sphere.len() {
                return Err(Error::Usage(format!("harmonic of mode {} has the wrong length", m.n)));
            }
        }
        Ok(Self { sphere, modes })
    }

    fn map_modes(&self, mut f: impl FnMut(&Mode) -> Result<Vec<f64>>) -> Result<Self> {
        let modes = self
            .modes
            .iter()
            .map(|m| Ok(Mode { n: m.n, profile: f(m)?, harmonic: m.harmonic.clone() }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { sphere: self.sphere.clone(), modes })
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map_modes(|m| Ok(m.profile.iter().map(|v| c * v).collect())).unwrap()
    }

    /// Mode-wise difference `self − other`; modes must line up.
    pub fn difference(&self, other: &CarlemanProfile) -> Result<Self> {
        if self.modes.len() != other.modes.len() || self.modes.iter().zip(&other.modes).any(|(a, b)| a.n != b.n) {
            return Err(Error::Usage("profiles carry different modes".into()));
        }
        let mut k = 0;
        self.map_modes(|m| {
            let o = &other.modes[k].profile;
            k += 1;
            Ok(m.profile.iter().zip(o).map(|(a, b)| a - b).collect())
        })
    }

    /// `(∫∫ |u|^r dω dt)^{1/r}`, trapezoid in `t`.
    pub fn mixed_norm(&self, time: &TimeGrid, r: f64) -> f64 {
        let tw = time.weights();
        let sw = self.sphere.weights();
        let mut acc = 0.0;
        let mut column = vec![0.0; self.sphere.len()];
        for k in 0..time.len {
            if self.modes.iter().all(|m| m.profile[k] == 0.0) {
                continue;
            }
            column.iter_mut().for_each(|c| *c = 0.0);
            for m in &self.modes {
                let h = m.profile[k];
                if h != 0.0 {
                    for (c, g) in column.iter_mut().zip(&m.harmonic) {
                        *c += h * g;
                    }
                }
            }
            let s: f64 = column.iter().zip(sw).map(|(c, w)| w * c.abs().powf(r)).sum();
            acc += tw[k] * s;
        }
        acc.powf(1.0 / r)
    }
}

/// Fourth-order first and second differences, one-sided near the ends.
fn derivatives(f: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = f.len();
    assert!(n >= 6, "difference stencils need at least 6 points");
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for k in 2..n - 2 {
        d1[k] = (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]) / (12.0 * h);
        d2[k] = (-f[k - 2] + 16.0 * f[k - 1] - 30.0 * f[k] + 16.0 * f[k + 1] - f[k + 2]) / (12.0 * h * h);
    }
    let first0 = |g: &dyn Fn(usize) -> f64| (-25.0 * g(0) + 48.0 * g(1) - 36.0 * g(2) + 16.0 * g(3) - 3.0 * g(4)) / (12.0 * h);
    let first1 = |g: &dyn Fn(usize) -> f64| (-3.0 * g(0) - 10.0 * g(1) + 18.0 * g(2) - 6.0 * g(3) + g(4)) / (12.0 * h);
    let second0 = |g: &dyn Fn(usize) -> f64| {
        (45.0 * g(0) - 154.0 * g(1) + 214.0 * g(2) - 156.0 * g(3) + 61.0 * g(4) - 10.0 * g(5)) / (12.0 * h * h)
    };
    let second1 =
        |g: &dyn Fn(usize) -> f64| (10.0 * g(0) - 15.0 * g(1) - 4.0 * g(2) + 14.0 * g(3) - 6.0 * g(4) + g(5)) / (12.0 * h * h);
    let fwd = |j: usize| f[j];
    let bwd = |j: usize| f[n - 1 - j];
    d1[0] = first0(&fwd);
    d1[1] = first1(&fwd);
    d1[n - 1] = -first0(&bwd);
    d1[n - 2] = -first1(&bwd);
    d2[0] = second0(&fwd);
    d2[1] = second1(&fwd);
    d2[n - 1] = second0(&bwd);
    d2[n - 2] = second1(&bwd);
    (d1, d2)
}

/// `f' + α f`.
pub fn apply_first_order(alpha: f64, f: &[f64], step: f64) -> Vec<f64> {
    let (d1, _) = derivatives(f, step);
    d1.iter().zip(f).map(|(a, b)| a + alpha * b).collect()
}

/// `h'' − (a + b) h' + a b h`, the product of `(∂_t − a)` and `(∂_t − b)`.
pub fn apply_mode(a: f64, b: f64, h: &[f64], step: f64) -> Vec<f64> {
    let (d1, d2) = derivatives(h, step);
    (0..h.len()).map(|k| d2[k] - (a + b) * d1[k] + a * b * h[k]).collect()
}

fn check_support(profile: &[f64], n: usize) -> Result<()> {
    let peak = profile.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let len = profile.len();
    let edge = profile[..2].iter().chain(&profile[len - 2..]).fold(0.0f64, |m, v| m.max(v.abs()));
    if edge > 1e-2 * peak {
        return Err(Error::Truncation(format!(
            "mode {n} reaches the end of the time window ({edge:.3e} against peak {peak:.3e})"
        )));
    }
    Ok(())
}

/// Applies the conjugated operator mode by mode.
pub fn apply_l(cfg: &CarlemanConfig, u: &CarlemanProfile) -> Result<CarlemanProfile> {
    u.map_modes(|m| {
        check_support(&m.profile, m.n)?;
        let (a, b) = cfg.mode_roots(m.n);
        Ok(apply_mode(a, b, &m.profile, cfg.time.step))
    })
}

/// Cell weights of the fourth-order exponential integrator.
struct ExpWeights {
    decay: f64,
    /// Stencils at offsets {0,1,2,3}, {−1,0,1,2} and {−2,−1,0,1}.
    first: [f64; 4],
    interior: [f64; 4],
    last: [f64; 4],
}

impl ExpWeights {
    fn new(alpha: f64, h: f64) -> Self {
        let rule = gauss_legendre(8).expect("fixed order");
        let stencil = |offsets: [f64; 4]| -> [f64; 4] {
            let mut w = [0.0; 4];
            for (x, wx) in rule.nodes.iter().zip(&rule.weights) {
                let s = 0.5 * (x + 1.0);
                let kernel = (-alpha * h * (1.0 - s)).exp() * 0.5 * h * wx;
                for j in 0..4 {
                    let mut l = 1.0;
                    for i in 0..4 {
                        if i != j {
                            l *= (s - offsets[i]) / (offsets[j] - offsets[i]);
                        }
                    }
                    w[j] += kernel * l;
                }
            }
            w
        };
        Self {
            decay: (-alpha * h).exp(),
            first: stencil([0.0, 1.0, 2.0, 3.0]),
            interior: stencil([-1.0, 0.0, 1.0, 2.0]),
            last: stencil([-2.0, -1.0, 0.0, 1.0]),
        }
    }
}

/// `∫_{−T}^t e^{−α(t−s)} f(s) ds` for `α > 0`.
fn causal(alpha: f64, f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let w = ExpWeights::new(alpha, h);
    let mut y = vec![0.0; n];
    for k in 0..n - 1 {
        let (start, ws) = if k == 0 {
            (0, &w.first)
        } else if k + 2 >= n {
            (k - 2, &w.last)
        } else {
            (k - 1, &w.interior)
        };
        let inc: f64 = (0..4).map(|j| ws[j] * f[start + j]).sum();
        y[k + 1] = w.decay * y[k] + inc;
    }
    y
}

/// `∫_t^T e^{−λ(s−t)} f(s) ds` for `λ > 0`.
fn anticausal(lambda: f64, f: &[f64], h: f64) -> Vec<f64> {
    let rev: Vec<f64> = f.iter().rev().copied().collect();
    let mut y = causal(lambda, &rev, h);
    y.reverse();
    y
}

/// Solves `y' + α y = f` with decay away from the support: the forward
/// causal integral for `α > 0`, minus the backward one for `α < 0`.
pub fn first_order_resolvent(alpha: f64, f: &[f64], step: f64, dist_floor: f64) -> Result<Vec<f64>> {
    if alpha.abs() < dist_floor {
        return Err(Error::Conditioning(format!("|α| = {} is below the floor {dist_floor}", alpha.abs())));
    }
    if f.len() < 4 {
        return domain("resolvent needs at least 4 grid points");
    }
    if alpha > 0.0 {
        Ok(causal(alpha, f, step))
    } else {
        Ok(anticausal(-alpha, f, step).into_iter().map(|v| -v).collect())
    }
}

fn check_mode(cfg: &CarlemanConfig, n: usize) -> Result<(f64, f64)> {
    let (a, b) = cfg.mode_roots(n);
    let gap = a.abs().min(b.abs());
    if gap < cfg.dist_floor - 1e-12 {
        return Err(Error::Conditioning(format!("mode n = {n} is within {gap} of resonance")));
    }
    Ok((a, b))
}

/// Inverse on one mode as the composition of two first-order resolvents.
pub fn inverse_mode_factored(cfg: &CarlemanConfig, n: usize, u: &[f64]) -> Result<Vec<f64>> {
    let (a, b) = check_mode(cfg, n)?;
    let h = cfg.time.step;
    let inner = first_order_resolvent(-b, u, h, cfg.dist_floor)?;
    first_order_resolvent(-a, &inner, h, cfg.dist_floor)
}

/// Which explicit kernel terms act on a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelBranch {
    /// Degree zero, `1/((D − τ̃)(D − τ̃ − d + 2))`.
    I0,
    /// `n > τ̃`: forward kernel `e^{−(n−τ̃)(t−s)}`.
    I1,
    /// `0 < n < τ̃`: backward kernel `e^{−(n−τ̃)(t−s)}`.
    I2,
    /// `n < −τ̃ − d + 2`: forward kernel `e^{(τ̃+n+d−2)(t−s)}`.
    I3,
    /// `n > −τ̃ − d + 2`: backward kernel `e^{(τ̃+n+d−2)(t−s)}`.
    I4,
}

/// The two kernel terms active on mode `n` (the first from the root
/// `τ̃ − n`, the second from `τ̃ + n + d − 2`); degree zero reports
/// [`KernelBranch::I0`] first.
pub fn branches(cfg: &CarlemanConfig, n: usize) -> (KernelBranch, KernelBranch) {
    let (a, b) = cfg.mode_roots(n);
    let first = if n == 0 {
        KernelBranch::I0
    } else if a < 0.0 {
        KernelBranch::I1
    } else {
        KernelBranch::I2
    };
    let second = if b < 0.0 { KernelBranch::I3 } else { KernelBranch::I4 };
    (first, second)
}

/// Inverse on one mode as the partial-fraction sum of explicit one-sided
/// kernels, weighted by `±1/(2n + d − 2)`.
pub fn inverse_mode_partial_fractions(cfg: &CarlemanConfig, n: usize, u: &[f64]) -> Result<Vec<f64>> {
    let (a, b) = check_mode(cfg, n)?;
    let h = cfg.time.step;
    let c = 1.0 / (2.0 * n as f64 + cfg.d as f64 - 2.0);
    // Root a = τ̃ − n carries −c, root b = τ̃ + n + d − 2 carries +c.
    let first: Vec<f64> = if a < 0.0 {
        causal(-a, u, h).into_iter().map(|v| -c * v).collect()
    } else {
        anticausal(a, u, h).into_iter().map(|v| c * v).collect()
    };
    let second: Vec<f64> = if b < 0.0 {
        causal(-b, u, h).into_iter().map(|v| c * v).collect()
    } else {
        anticausal(b, u, h).into_iter().map(|v| -c * v).collect()
    };
    Ok(first.iter().zip(&second).map(|(x, y)| x + y).collect())
}

/// Inverse of the conjugated operator, mode by mode (factored form).
pub fn inverse_l(cfg: &CarlemanConfig, u: &CarlemanProfile) -> Result<CarlemanProfile> {
    u.map_modes(|m| inverse_mode_factored(cfg, m.n, &m.profile))
}

/// Same inverse through the explicit kernel sum.
pub fn inverse_l_partial_fractions(cfg: &CarlemanConfig, u: &CarlemanProfile) -> Result<CarlemanProfile> {
    u.map_modes(|m| inverse_mode_partial_fractions(cfg, m.n, &m.profile))
}

/// `‖u‖_{L^q(dt dω)} / ‖L u‖_{L^p(dt dω)}`.
pub fn carleman_ratio(cfg: &CarlemanConfig, u: &CarlemanProfile) -> Result<f64> {
    let lu = apply_l(cfg, u)?;
    let den = lu.mixed_norm(&cfg.time, cfg.p);
    if !(den > 0.0) {
        return Err(Error::Degenerate("L u vanishes".into()));
    }
    Ok(u.mixed_norm(&cfg.time, cfg.q) / den)
}

/// `L²` operator norm of the mode-`n` inverse, by power iteration with
/// time reversal as the adjoint.
pub fn inverse_mode_norm(cfg: &CarlemanConfig, n: usize, iters: usize) -> Result<f64> {
    let len = cfg.time.len;
    let w = cfg.time.weights();
    let norm = |v: &[f64]| v.iter().zip(&w).map(|(x, w)| w * x * x).sum::<f64>().sqrt();
    let mut v: Vec<f64> = cfg.time.sample(|t| (-(t / cfg.time.half_width * 3.0).powi(2)).exp());
    let mut est = 0.0;
    for _ in 0..iters {
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let y = inverse_mode_factored(cfg, n, &v)?;
        est = norm(&y);
        let mut rev: Vec<f64> = y.into_iter().rev().collect();
        rev = inverse_mode_factored(cfg, n, &rev)?;
        rev.reverse();
        v = rev;
        debug_assert_eq!(v.len(), len);
    }
    Ok(est)
}

/// Both sides of the weighted Laplacian inequality in `R^d` for
/// `u(x) = |x|^{τ̃} h(−ln|x|) g(x/|x|)`, `g` of degree `n`, returned as the
/// ratio `‖|x|^{−τ}u‖_q / ‖|x|^{−τ}Δu‖_p` computed two ways: radially in
/// `r` with differences in `r`, and in the logarithmic variable `t`.
pub fn weight_form_check(
    cfg: &CarlemanConfig,
    h: impl Fn(f64) -> f64,
    n: usize,
    g: &[f64],
    sphere: &SphereGrid,
) -> Result<(f64, f64)> {
    let time = cfg.time;
    let ht = time.sample(&h);
    if ht[ht.len() - 1].abs() > 0.0 || ht[ht.len() - 2].abs() > 0.0 {
        return domain("profile support reaches the origin");
    }
    check_support(&ht, n)?;
    let (d, tau, tt) = (cfg.d as f64, cfg.tau, cfg.tau_tilde());
    let g_norm = |r: f64| -> f64 {
        g.iter().zip(sphere.weights()).map(|(v, w)| w * v.abs().powf(r)).sum::<f64>().powf(1.0 / r)
    };
    let eig = n as f64 * (n as f64 + d - 2.0);

    // Route through r: support of h in t maps to an annulus.
    let support: Vec<f64> = time.points().into_iter().zip(&ht).filter(|(_, v)| **v != 0.0).map(|(t, _)| t).collect();
    let (t_lo, t_hi) = (support[0] - time.step, support[support.len() - 1] + time.step);
    let (r_lo, r_hi) = ((-t_hi).exp(), (-t_lo).exp());
    let cells = 20_000;
    let dr = (r_hi - r_lo) / cells as f64;
    let r: Vec<f64> = (0..=cells).map(|k| r_lo + k as f64 * dr).collect();
    let v: Vec<f64> = r.iter().map(|&r| r.powf(tt) * h(-r.ln())).collect();
    let (v1, v2) = derivatives(&v, dr);
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..r.len() {
        let wk = if k == 0 || k == cells { 0.5 * dr } else { dr };
        let rk = r[k];
        let lap = v2[k] + (d - 1.0) / rk * v1[k] - eig / (rk * rk) * v[k];
        let jac = rk.powf(d - 1.0);
        num += wk * jac * (rk.powf(-tau) * v[k]).abs().powf(cfg.q);
        den += wk * jac * (rk.powf(-tau) * lap).abs().powf(cfg.p);
    }
    let radial = num.powf(1.0 / cfg.q) * g_norm(cfg.q) / (den.powf(1.0 / cfg.p) * g_norm(cfg.p));

    // Route through t with the mode operator.
    let (a, b) = cfg.mode_roots(n);
    let lh = apply_mode(a, b, &ht, time.step);
    let tw = time.weights();
    let lp = |vals: &[f64], r: f64| vals.iter().zip(&tw).map(|(v, w)| w * v.abs().powf(r)).sum::<f64>().powf(1.0 / r);
    let logarithmic = lp(&ht, cfg.q) * g_norm(cfg.q) / (lp(&lh, cfg.p) * g_norm(cfg.p));
    Ok((radial, logarithmic))
}

/// Smooth compactly supported profile `(1 − ((t−c)/w)²)^8`.
pub fn bump(center: f64, width: f64) -> impl Fn(f64) -> f64 + Copy {
    move |t| {
        let x = (t - center) / width;
        if x.abs() < 1.0 {
            (1.0 - x * x).powi(8)
        } else {
            0.0
        }
    }
}

/// Bump centres and widths of the fixed test bank.
pub const BANK_BUMPS: [(f64, f64); 5] = [(-3.0, 1.5), (-1.0, 2.0), (0.0, 3.0), (1.5, 2.5), (3.0, 4.0)];

/// Highest harmonic degree in the test bank.
pub const BANK_MAX_DEGREE: usize = 10;

/// `Re (ω_1 + i ω_2)^n` on a sphere grid.
pub fn real_beam(sphere: &SphereGrid, n: usize) -> Vec<f64> {
    sphere.nodes().map(|x| Complex64::new(x[0], x[1]).powu(n as u32).re).collect()
}

/// Four harmonic configurations, each a list of `(degree, samples)`:
/// one zonal mode, one beam, and two seeded random mixtures of zonal
/// translates over degrees `0..=10` and `5..=10`.
pub fn bank_harmonics(sphere: &SphereGrid, seed: u64) -> Result<Vec<Vec<(usize, Vec<f64>)>>> {
    let dim = sphere.d();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let translate = |n: usize, rng: &mut ChaCha8Rng| -> Result<Vec<f64>> {
        let k = ZonalKernel::new(dim, n)?;
        let mut axis: Vec<f64> = (0..=dim).map(|_| rng.gen::<f64>() - 0.5).collect();
        let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
        axis.iter_mut().for_each(|a| *a /= norm);
        let coeff = rng.gen::<f64>() + 0.5;
        Ok(sphere
            .nodes()
            .map(|x| coeff * k.eval(x.iter().zip(&axis).map(|(a, b)| a * b).sum::<f64>()) / k.eval(1.0))
            .collect())
    };
    let zonal = ZonalKernel::new(dim, 3)?;
    let mut configs = vec![
        vec![(3, sphere.nodes().map(|x| zonal.eval(x[dim]) / zonal.eval(1.0)).collect())],
        vec![(7, real_beam(sphere, 7))],
    ];
    for lo in [0, 5] {
        let mut modes = Vec::new();
        for n in lo..=BANK_MAX_DEGREE {
            modes.push((n, translate(n, &mut rng)?));
        }
        configs.push(modes);
    }
    Ok(configs)
}

/// The 20-function bank: every bump against every harmonic configuration.
pub fn test_bank(sphere: Arc<SphereGrid>, time: &TimeGrid, seed: u64) -> Result<Vec<CarlemanProfile>> {
    let harmonics = bank_harmonics(&sphere, seed)?;
    let mut bank = Vec::new();
    for &(c, w) in &BANK_BUMPS {
        let h = time.sample(bump(c, w));
        for config in &harmonics {
            let modes = config.iter().map(|(n, g)| Mode { n: *n, profile: h.clone(), harmonic: g.clone() }).collect();
            bank.push(CarlemanProfile::new(sphere.clone(), modes)?);
        }
    }
    Ok(bank)
}

/// One row of a `τ` sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub tau: f64,
    /// Largest ratio over the bank.
    pub ratio: f64,
    /// Degree closest to resonance in the maximizing bank function.
    pub worst_mode: usize,
}

/// Largest [`carleman_ratio`] over the bank at each `τ`.
pub fn uniformity_sweep(
    d: usize,
    p: f64,
    q: f64,
    taus: &[f64],
    dist_floor: f64,
    step: f64,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let sphere = Arc::new(SphereGrid::build(d - 1, 16)?);
    let mut rows = Vec::new();
    for &tau in taus {
        let cfg = CarlemanConfig::with_step(d, tau, p, q, dist_floor, step)?;
        let bank = test_bank(sphere.clone(), &cfg.time, seed)?;
        let mut best = SweepRow { tau, ratio: 0.0, worst_mode: 0 };
        for u in &bank {
            let r = carleman_ratio(&cfg, u)?;
            if r > best.ratio {
                let worst = u
                    .modes
                    .iter()
                    .map(|m| {
                        let (a, b) = cfg.mode_roots(m.n);
                        (m.n, a.abs().min(b.abs()))
                    })
                    .min_by(|x, y| x.1.total_cmp(&y.1))
                    .map_or(0, |m| m.0);
                best = SweepRow { tau, ratio: r, worst_mode: worst };
            }
        }
        rows.push(best);
    }
    Ok(rows)
}

/// Twenty values of `τ̃` at distance at least `1/4` from the integers,
/// `k + {1/4, 1/2, 3/4}` for `k = 0, 1, …`.
pub fn default_shifted_taus() -> Vec<f64> {
    (0..7).flat_map(|k| [0.25, 0.5, 0.75].map(|f| k as f64 + f)).take(20).collect()
}

/// Resonant witness: `τ̃ = n + 1/2` and `u = h ⊗ Re(ω_1 + iω_2)^n`.
/// Returns the measured ratio and `‖g‖_q / (n ‖g‖_p)`.
pub fn resonant_witness(d: usize, p: f64, q: f64, n: usize, step: f64) -> Result<(f64, f64)> {
    let cfg = CarlemanConfig::from_shifted(d, n as f64 + 0.5, p, q, 0.25, step)?;
    let sphere = Arc::new(SphereGrid::build(d - 1, (n + 8).max(16))?);
    let g = real_beam(&sphere, n);
    let w = sphere.weights();
    let norm = |r: f64| g.iter().zip(w).map(|(v, w)| w * v.abs().powf(r)).sum::<f64>().powf(1.0 / r);
    let predicted = norm(q) / (n as f64 * norm(p));
    let u = CarlemanProfile::new(sphere, vec![Mode { n, profile: cfg.time.sample(bump(1.25, 0.75)), harmonic: g }])?;
    Ok((carleman_ratio(&cfg, &u)?, predicted))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: f64 = 1.2;
    const Q: f64 = 6.0;

    fn cfg(tau_tilde: f64) -> CarlemanConfig {
        CarlemanConfig::from_shifted(3, tau_tilde, P, Q, 0.25, 1.0 / 128.0).unwrap()
    }

    fn rel(a: &[f64], b: &[f64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
        let den: f64 = b.iter().map(|y| y * y).sum();
        (num / den).sqrt()
    }

    #[test]
    fn polynomial_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let tau = rng.gen_range(-4.0..4.0);
            let c = CarlemanConfig { tau, ..cfg(0.5) };
            let d = 3.0;
            assert!(conjugated_polynomial(&c, tau).abs() < 1e-12);
            assert!(conjugated_polynomial(&c, tau + d - 2.0).abs() < 1e-12);
            let t = rng.gen_range(-3.0..3.0);
            let expanded = (t - tau) * (t - tau - d + 2.0);
            assert!((conjugated_polynomial(&c, t) - expanded).abs() < 1e-12);
        }
        let c = CarlemanConfig::with_step(3, 0.75, P, Q, 0.25, 0.1).unwrap();
        let c0 = CarlemanConfig { tau: 0.0, ..c };
        assert_eq!(conjugated_polynomial(&c0, 0.0), 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(matches!(CarlemanConfig::new(2, 0.0, 1.0, 2.0, 0.25), Err(Error::Config(_))));
        assert!(matches!(CarlemanConfig::new(3, 1.0, 1.2, 5.0, 0.25), Err(Error::Config(_))));
        // τ = d/q is resonant.
        assert!(matches!(CarlemanConfig::new(3, 0.5, P, Q, 0.25), Err(Error::Conditioning(_))));
        let c = CarlemanConfig::new(3, 1.0, P, Q, 0.25).unwrap();
        assert_eq!(c.time.half_width, 48.0);
    }

    #[test]
    fn first_factor_kernel() {
        // (∂_t − τ̃ + n) annihilates e^{(τ̃−n)t}.
        let c = cfg(3.5);
        let (a, _) = c.mode_roots(2);
        let e = c.time.sample(|t| if t.abs() < 3.0 { (a * t).exp() } else { 0.0 });
        let out = apply_first_order(-a, &e, c.time.step);
        let peak = e.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 0..c.time.len {
            if c.time.t(k).abs() < 2.9 {
                assert!(out[k].abs() <= 1e-6 * peak);
            }
        }
    }

    #[test]
    fn quadratics_are_exact() {
        let c = cfg(1.5);
        let h = c.time.sample(|t| 2.0 - t + 0.5 * t * t);
        let (a, b) = c.mode_roots(3);
        let out = apply_mode(a, b, &h, c.time.step);
        for (k, v) in out.iter().enumerate() {
            let t = c.time.t(k);
            let want = 1.0 - (a + b) * (t - 1.0) + a * b * (2.0 - t + 0.5 * t * t);
            assert!((v - want).abs() <= 1e-10 * want.abs().max(1.0), "{k}: {v} vs {want}");
        }
    }

    #[test]
    fn spectral_factorization() {
        let c = cfg(2.25);
        let h = c.time.sample(bump(1.0, 3.0));
        for n in 0..=10 {
            let (a, b) = c.mode_roots(n);
            let direct = apply_mode(a, b, &h, c.time.step);
            let inner = apply_first_order(-b, &h, c.time.step);
            let composed = apply_first_order(-a, &inner, c.time.step);
            assert!(rel(&composed, &direct) < 1e-8, "n={n}: {}", rel(&composed, &direct));
        }
    }

    #[test]
    fn resolvent_properties() {
        let c = cfg(0.5);
        let h = c.time.step;
        assert!(first_order_resolvent(1.0, &vec![0.0; 100], h, 0.25).unwrap().iter().all(|v| *v == 0.0));
        assert!(matches!(first_order_resolvent(0.1, &vec![0.0; 100], h, 0.25), Err(Error::Conditioning(_))));
        let f = c.time.sample(bump(0.0, 2.0));
        for alpha in [0.3, -0.3, 2.0, -7.5] {
            let y = first_order_resolvent(alpha, &f, h, 0.25).unwrap();
            let back = apply_first_order(alpha, &y, h);
            let interior: Vec<usize> = (0..c.time.len).filter(|&k| c.time.t(k).abs() < 20.0).collect();
            let num: f64 = interior.iter().map(|&k| (back[k] - f[k]).powi(2)).sum();
            let den: f64 = interior.iter().map(|&k| f[k].powi(2)).sum();
            assert!((num / den).sqrt() < 1e-6, "α={alpha}: {}", (num / den).sqrt());
        }
        let y = first_order_resolvent(0.5, &f, h, 0.25).unwrap();
        assert!(y.iter().all(|v| *v >= -1e-14));
        let k1 = ((5.0 + c.time.half_width) / h).round() as usize;
        let k2 = ((10.0 + c.time.half_width) / h).round() as usize;
        assert!((y[k2] / y[k1] - (-0.5f64 * 5.0).exp()).abs() < 1e-10);
    }

    fn single_mode(n: usize, h: Vec<f64>) -> CarlemanProfile {
        let s = Arc::new(SphereGrid::build(2, 12).unwrap());
        let k = ZonalKernel::new(2, n).unwrap();
        let g = s.nodes().map(|x| k.eval(x[2])).collect();
        CarlemanProfile::new(s, vec![Mode { n, profile: h, harmonic: g }]).unwrap()
    }

    #[test]
    fn round_trip_and_partial_fractions() {
        for tt in [-6.5, -0.5, 0.25, 3.75, 12.5] {
            let c = cfg(tt);
            let h = c.time.sample(bump(-1.0, 2.5));
            for n in 0..=10 {
                let inv = inverse_mode_factored(&c, n, &h).unwrap();
                let pf = inverse_mode_partial_fractions(&c, n, &h).unwrap();
                assert!(rel(&pf, &inv) < 1e-8, "τ̃={tt} n={n}: {}", rel(&pf, &inv));
                let (a, b) = c.mode_roots(n);
                let back = apply_mode(a, b, &inv, c.time.step);
                assert!(rel(&back, &h) < 1e-6, "τ̃={tt} n={n}: {}", rel(&back, &h));
            }
        }
    }

    #[test]
    fn branch_structure() {
        let c = cfg(2.5);
        assert_eq!(branches(&c, 0), (KernelBranch::I0, KernelBranch::I4));
        assert_eq!(branches(&c, 1), (KernelBranch::I2, KernelBranch::I4));
        assert_eq!(branches(&c, 5), (KernelBranch::I1, KernelBranch::I4));
        let c = cfg(-6.5);
        assert_eq!(branches(&c, 3), (KernelBranch::I1, KernelBranch::I3));
        let c = cfg(0.25);
        let h = c.time.sample(bump(0.0, 1.0));
        let inv = inverse_mode_factored(&c, 4, &h).unwrap();
        let k_left = ((-3.0 + c.time.half_width) / c.time.step) as usize;
        let k_right = ((3.0 + c.time.half_width) / c.time.step) as usize;
        // I1 is causal (tail to the right), I4 anticausal (tail to the left).
        assert!(inv[k_left].abs() > 0.0 && inv[k_right].abs() > 0.0);
    }

    #[test]
    fn mode_diagonal() {
        let c = cfg(1.25);
        let s = Arc::new(SphereGrid::build(2, 12).unwrap());
        let modes: Vec<Mode> = [1usize, 4]
            .iter()
            .map(|&n| {
                let k = ZonalKernel::new(2, n).unwrap();
                Mode { n, profile: c.time.sample(bump(n as f64, 2.0)), harmonic: s.nodes().map(|x| k.eval(x[0])).collect() }
            })
            .collect();
        let u = CarlemanProfile::new(s, modes).unwrap();
        let inv = inverse_l(&c, &u).unwrap();
        for (m, im) in u.modes.iter().zip(&inv.modes) {
            let alone = inverse_mode_factored(&c, m.n, &m.profile).unwrap();
            assert!(rel(&im.profile, &alone) <= 1e-12);
        }
        let resonant = CarlemanConfig { tau: 4.0 + 3.0 / Q, ..c };
        assert!(matches!(inverse_l(&resonant, &u), Err(Error::Conditioning(_))));
    }

    #[test]
    fn near_resonance_rejected() {
        let c = CarlemanConfig { tau: 4.0 + 3.0 / Q + 0.1, ..cfg(0.5) };
        assert!(matches!(inverse_mode_factored(&c, 4, &vec![0.0; 64]), Err(Error::Conditioning(m)) if m.contains("n = 4")));
    }

    #[test]
    fn truncation_signal() {
        let c = cfg(0.5);
        let h = c.time.sample(|t| (-t * t / 4000.0).exp());
        let u = single_mode(2, h);
        assert!(matches!(apply_l(&c, &u), Err(Error::Truncation(_))));
    }

    #[test]
    fn ratio_homogeneous() {
        let c = cfg(2.5);
        let u = single_mode(3, c.time.sample(bump(0.0, 2.0)));
        let r1 = carleman_ratio(&c, &u).unwrap();
        let r2 = carleman_ratio(&c, &u.scaled(2.0)).unwrap();
        assert!((r1 - r2).abs() < 1e-12 * r1);
        let zero = u.scaled(0.0);
        assert!(matches!(carleman_ratio(&c, &zero), Err(Error::Degenerate(_))));
    }

    #[test]
    fn conditioning_blows_up_like_inverse_distance() {
        let n = 3;
        let pts: Vec<(f64, f64)> = [0.25, 0.125, 0.0625, 0.03125]
            .iter()
            .map(|&delta| {
                let c = CarlemanConfig::from_shifted(3, n as f64 + delta, P, Q, delta, 1.0 / 16.0).unwrap();
                (delta, inverse_mode_norm(&c, n, 30).unwrap())
            })
            .collect();
        let fit = crate::normlab::fit_exponent(&pts).unwrap();
        assert!((fit.slope + 1.0).abs() <= 0.1, "{}", fit.slope);
    }

    #[test]
    fn weight_form_agrees() {
        let s = SphereGrid::build(2, 16).unwrap();
        for (tt, n) in [(0.25, 0usize), (1.5, 2), (3.25, 5)] {
            let c = CarlemanConfig::from_shifted(3, tt, P, Q, 0.25, 1.0 / 256.0).unwrap();
            let k = ZonalKernel::new(2, n).unwrap();
            let g: Vec<f64> = s.nodes().map(|x| k.eval(x[2])).collect();
            let (a, b) = c_ratio(&c, &g, n, &s);
            assert!((a / b - 1.0).abs() < 0.02, "τ̃={tt} n={n}: {a} vs {b}");
        }
        fn c_ratio(c: &CarlemanConfig, g: &[f64], n: usize, s: &SphereGrid) -> (f64, f64) {
            weight_form_check(c, bump(0.5, 1.5), n, g, s).unwrap()
        }
        let c = cfg(0.5);
        assert!(weight_form_check(&c, |t| (-t * t).exp() + 1.0, 0, &vec![1.0; s.len()], &s).is_err());
    }

    #[test]
    fn radial_laplacian_oracle() {
        // τ = 0 and constant g: |x|^{−τ}Δ|x|^τ v = v'' + (d−1)/r v' in r,
        // and e^{2t}(v_tt − (d−2) v_t) in t = −ln r.
        let c = CarlemanConfig::with_step(3, 0.75, P, Q, 0.25, 1.0 / 256.0).unwrap();
        let c0 = CarlemanConfig { tau: 0.0, ..c };
        let v = |r: f64| (-(r - 1.0).powi(2) * 8.0).exp();
        for r in [0.6, 0.9, 1.3] {
            let exact_r = {
                let e = v(r);
                let d1 = -16.0 * (r - 1.0) * e;
                let d2 = (256.0 * (r - 1.0).powi(2) - 16.0) * e;
                d2 + 2.0 / r * d1
            };
            let t = -f64::ln(r);
            let k = ((t + c0.time.half_width) / c0.time.step).round() as usize;
            let tk = c0.time.t(k);
            let ht = c0.time.sample(|s| v((-s).exp()));
            let (a, b) = (0.0, 1.0); // roots of P when τ = 0, d = 3
            let lt = apply_mode(a, b, &ht, c0.time.step);
            let got = (2.0 * tk).exp() * lt[k];
            let want = {
                let r = (-tk).exp();
                let e = v(r);
                let d1 = -16.0 * (r - 1.0) * e;
                let d2 = (256.0 * (r - 1.0).powi(2) - 16.0) * e;
                d2 + 2.0 / r * d1
            };
            assert!((got - want).abs() < 1e-6 * want.abs().max(1.0), "r={r}: {got} vs {want} ({exact_r})");
            assert!(conjugated_polynomial(&c0, 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn bank_shape() {
        let s = Arc::new(SphereGrid::build(2, 16).unwrap());
        let c = cfg(0.5);
        let bank = test_bank(s, &c.time, 11).unwrap();
        assert_eq!(bank.len(), 20);
        assert!(bank.iter().all(|u| u.modes.iter().all(|m| m.n <= BANK_MAX_DEGREE)));
        assert_eq!(default_shifted_taus().len(), 20);
        assert!(default_shifted_taus().iter().all(|t| dist_to_integers(*t) >= 0.25));
    }

    #[test]
    fn uniform_in_tau() {
        let taus: Vec<f64> = default_shifted_taus().iter().map(|t| t + 3.0 / Q).collect();
        let rows = uniformity_sweep(3, P, Q, &taus, 0.25, 1.0 / 32.0, 11).unwrap();
        let hi = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
        let lo = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        assert!(lo > 0.0 && hi / lo <= 10.0, "{rows:?}");
    }

    #[test]
    fn resonant_witness_tracks_projection_ratio() {
        let q: Vec<f64> = [8, 16, 32]
            .iter()
            .map(|&n| {
                let (measured, predicted) = resonant_witness(3, P, Q, n, 1.0 / 64.0).unwrap();
                measured / predicted
            })
            .collect();
        let hi = q.iter().cloned().fold(0.0, f64::max);
        let lo = q.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(hi / lo <= 4.0, "{q:?}");
    }
}
