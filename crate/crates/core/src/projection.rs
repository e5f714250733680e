//! The projector `H_n f(ζ) = κ ∫ Z_n(ξ·ζ) f(ξ) dσ(ξ)` on product grids, its
//! calibration, and the Funk–Hecke shortcut for zonal inputs.
//!
//! On a product grid `ξ·ζ = A + B cos(φ − φ')`, where `A`, `B` depend only on
//! the two rings. The kernel between two rings is therefore a cosine
//! polynomial of degree `n` in the azimuth difference; its coefficients are
//! tabulated once and the projection becomes an FFT along each ring followed
//! by a ring-to-ring matrix product per azimuthal frequency.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rustfft::{Fft, FftPlanner};

use crate::error::{domain, Error, Result};
use crate::sphere::{GridFunction, PolarRule, SphereGrid};
use crate::zonal::{kappa_closed_form, ZonalKernel};

/// Largest kernel table, in `f64` entries, that a projector may allocate.
pub const MAX_TABLE_ENTRIES: usize = 60_000_000;

/// Cosine coefficients of the ring-to-ring kernel for every ring pair.
#[derive(Debug, Clone)]
pub struct ZonalKernelTable {
    n: usize,
    rings: usize,
    /// Pair `(p, q)` with `p ≤ q` occupies `[(q(q+1)/2 + p)·(n+1), …+n+1)`.
    coeffs: Vec<f64>,
}

impl ZonalKernelTable {
    fn build(grid: &SphereGrid, kernel: &ZonalKernel) -> Result<Self> {
        let n = kernel.n();
        let rings = grid.ring_count();
        let pairs = rings * (rings + 1) / 2;
        let entries = pairs
            .checked_mul(n + 1)
            .filter(|&e| e <= MAX_TABLE_ENTRIES)
            .ok_or_else(|| {
                Error::Resolution(format!(
                    "kernel table for {rings} rings at degree {n} exceeds {MAX_TABLE_ENTRIES} entries"
                ))
            })?;
        let cosines: Vec<Vec<(f64, f64)>> = (0..rings)
            .map(|p| grid.ring_cosines(p).into_iter().map(|t| (t, (1.0 - t * t).max(0.0).sqrt())).collect())
            .collect();
        let az_w = std::f64::consts::PI / grid.res() as f64;
        let mut coeffs = vec![0.0; entries];
        let len = 2 * n.max(1);
        let fft = FftPlanner::<f64>::new().plan_fft_forward(len);
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let cos_nodes: Vec<f64> = (0..=n).map(|j| (std::f64::consts::PI * j as f64 / n.max(1) as f64).cos()).collect();
        for q in 0..rings {
            for p in 0..=q {
                let (mut a, mut b) = (0.0, 1.0);
                for ((tp, sp), (tq, sq)) in cosines[p].iter().zip(&cosines[q]) {
                    a = tp * tq + sp * sq * a;
                    b *= sp * sq;
                }
                let out = &mut coeffs[(q * (q + 1) / 2 + p) * (n + 1)..][..n + 1];
                if n == 0 {
                    out[0] = az_w * kernel.eval(a + b);
                    continue;
                }
                for j in 0..=n {
                    buf[j] = Complex64::new(kernel.eval(a + b * cos_nodes[j]), 0.0);
                }
                for j in 1..n {
                    buf[len - j] = buf[j];
                }
                fft.process_with_scratch(&mut buf, &mut scratch);
                // DCT-I: K(Δ) = Σ_m a_m cos(mΔ); exponential coefficients
                // are a_0 and a_m / 2.
                out[0] = az_w * buf[0].re / (2.0 * n as f64);
                for m in 1..n {
                    out[m] = az_w * buf[m].re / (2.0 * n as f64);
                }
                out[n] = az_w * buf[n].re / (4.0 * n as f64);
            }
        }
        Ok(Self { n, rings, coeffs })
    }

    #[inline]
    fn pair(&self, p: usize, q: usize) -> &[f64] {
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        &self.coeffs[(hi * (hi + 1) / 2 + lo) * (self.n + 1)..][..self.n + 1]
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn rings(&self) -> usize {
        self.rings
    }
}

/// `H_n^d` on a fixed grid.
pub struct Projector {
    n: usize,
    kappa: f64,
    grid: Arc<SphereGrid>,
    table: ZonalKernelTable,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Projector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Projector")
            .field("d", &self.grid.d())
            .field("n", &self.n)
            .field("kappa", &self.kappa)
            .field("res", &self.grid.res())
            .finish()
    }
}

impl Projector {
    /// Calibrates `κ` on the grid and tabulates the kernel.
    pub fn new(grid: Arc<SphereGrid>, n: usize) -> Result<Self> {
        let kappa = calibrate(&grid)?;
        Self::with_kappa(grid, n, kappa)
    }

    pub fn with_kappa(grid: Arc<SphereGrid>, n: usize, kappa: f64) -> Result<Self> {
        if grid.res() < n + 2 {
            return Err(Error::Resolution(format!(
                "polar resolution {} is below n + 2 = {}",
                grid.res(),
                n + 2
            )));
        }
        let kernel = ZonalKernel::calibrated(grid.d(), n, kappa)?;
        let table = ZonalKernelTable::build(&grid, &kernel)?;
        let mut planner = FftPlanner::new();
        let len = grid.azimuth_count();
        Ok(Self {
            n,
            kappa,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
            grid,
            table,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.grid.d()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn table(&self) -> &ZonalKernelTable {
        &self.table
    }

    /// `H_n f` at every grid node.
    pub fn project(&self, f: &GridFunction) -> Result<GridFunction> {
        if !Arc::ptr_eq(f.grid(), &self.grid) {
            return Err(Error::Usage("input function lives on a different grid".into()));
        }
        let values = self.apply(f.values());
        GridFunction::new(self.grid.clone(), values)
    }

    /// Raw projection of node values laid out as the grid orders them.
    pub fn apply(&self, values: &[Complex64]) -> Vec<Complex64> {
        let rings = self.grid.ring_count();
        let len = self.grid.azimuth_count();
        let n = self.n;
        let width = 2 * n + 1;
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.forward.get_inplace_scratch_len().max(self.inverse.get_inplace_scratch_len())];
        // Frequencies −n..=n of each ring, pre-multiplied by the ring weight.
        let mut spectra = vec![Complex64::new(0.0, 0.0); rings * width];
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        for p in 0..rings {
            buf.copy_from_slice(&values[p * len..(p + 1) * len]);
            self.forward.process_with_scratch(&mut buf, &mut scratch);
            let w = self.grid.ring_weight(p);
            let row = &mut spectra[p * width..(p + 1) * width];
            row[n] = buf[0] * w;
            for m in 1..=n {
                row[n + m] = buf[m] * w;
                row[n - m] = buf[len - m] * w;
            }
        }
        let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
        let mut acc = vec![Complex64::new(0.0, 0.0); width];
        for q in 0..rings {
            acc.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
            for p in 0..rings {
                let t = self.table.pair(p, q);
                let row = &spectra[p * width..(p + 1) * width];
                acc[n] += row[n] * t[0];
                for m in 1..=n {
                    acc[n + m] += row[n + m] * t[m];
                    acc[n - m] += row[n - m] * t[m];
                }
            }
            buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
            buf[0] = acc[n];
            for m in 1..=n {
                buf[m] = acc[n + m];
                buf[len - m] = acc[n - m];
            }
            self.inverse.process_with_scratch(&mut buf, &mut scratch);
            out[q * len..(q + 1) * len].copy_from_slice(&buf);
        }
        out
    }
}

/// `κ ∫ Z_n(ξ·ζ) f(ξ) dσ(ξ)` by a direct sum over all nodes; `O(M)` per
/// output point, independent of the tabulated path.
pub fn project_direct_at(kernel: &ZonalKernel, kappa: f64, f: &GridFunction, zeta: &[f64]) -> Complex64 {
    let grid = f.grid();
    let mut acc = Complex64::new(0.0, 0.0);
    for ((x, w), v) in grid.nodes().zip(grid.weights()).zip(f.values()) {
        let dot: f64 = x.iter().zip(zeta).map(|(a, b)| a * b).sum();
        acc += v * (w * kernel.eval(dot));
    }
    acc * kappa
}

fn degree_test_function(d: usize, k: usize) -> impl Fn(&[f64]) -> f64 {
    // Harmonic polynomials of degree 0, 1, 2 in R^{d+1}.
    move |x: &[f64]| match k {
        0 => 1.0,
        1 => 0.6 * x[0] - 0.3 * x[1] + 0.74 * x[d],
        _ => x[0] * x[d] + 0.5 * (x[1] * x[1] - x[d] * x[d]),
    }
}

fn uncalibrated_response(grid: &Arc<SphereGrid>, k: usize, zeta: &[f64]) -> Result<f64> {
    let d = grid.d();
    let g = GridFunction::from_real_fn(grid.clone(), degree_test_function(d, k));
    let kernel = ZonalKernel::new(d, k)?;
    Ok(project_direct_at(&kernel, 1.0, &g, zeta).re)
}

/// `κ` fixed by requiring a degree-`k` harmonic to be reproduced at a probe
/// node.
pub fn calibrate_with_degree(grid: &Arc<SphereGrid>, k: usize) -> Result<f64> {
    if k > 2 {
        return domain("calibration harmonics are available for degrees 0, 1, 2");
    }
    let d = grid.d();
    let g = degree_test_function(d, k);
    let probe = (0..grid.len())
        .max_by(|&a, &b| g(grid.node(a)).abs().total_cmp(&g(grid.node(b)).abs()))
        .expect("grid is non-empty");
    let zeta = grid.node(probe).to_vec();
    let response = uncalibrated_response(grid, k, &zeta)?;
    if response.abs() < 1e-300 {
        return Err(Error::Calibration("vanishing calibration response".into()));
    }
    Ok(g(&zeta) / response)
}

/// Calibrates on a degree-1 harmonic, then checks that the same `κ`
/// reproduces degrees 0, 1 and 2 at several nodes to `1e−8`.
pub fn calibrate(grid: &Arc<SphereGrid>) -> Result<f64> {
    let kappa = calibrate_with_degree(grid, 1)?;
    if !(kappa > 0.0) {
        return Err(Error::Calibration(format!("non-positive calibration constant {kappa}")));
    }
    let d = grid.d();
    let probes = [0, grid.len() / 3, grid.len() / 2 + 1, grid.len() - 1];
    for k in 0..=2 {
        let g = degree_test_function(d, k);
        for &i in &probes {
            let zeta = grid.node(i).to_vec();
            let got = kappa * uncalibrated_response(grid, k, &zeta)?;
            let want = g(&zeta);
            if (got - want).abs() > 1e-8 * want.abs().max(1.0) {
                return Err(Error::Calibration(format!(
                    "degree {k} not reproduced at node {i}: {got} vs {want}"
                )));
            }
        }
    }
    Ok(kappa)
}

/// `‖H_n f‖_q / ‖f‖_p`.
pub fn project_pair_norm_ratio(proj: &Projector, f: &GridFunction, p: f64, q: f64) -> Result<f64> {
    let den = f.lp_norm(p)?;
    if den == 0.0 {
        return domain("zero input has no norm ratio");
    }
    Ok(proj.project(f)?.lp_norm(q)? / den)
}

/// Projection of a zonal function `F(θ)`, `θ = arccos(ξ·e)`, sampled on a
/// polar rule. By Funk–Hecke the output is `μ Z_n(cos θ)/Z_n(1)` with
/// `μ = κ ∫ Z_n(ξ·e) F dσ`.
#[derive(Debug, Clone)]
pub struct ZonalProjection {
    /// `H_n f` at the rule nodes.
    pub values: Vec<f64>,
    /// `H_n f(e)`.
    pub at_pole: f64,
}

pub fn project_zonal(d: usize, n: usize, rule: &PolarRule, profile: &[f64]) -> Result<ZonalProjection> {
    if rule.d() != d || profile.len() != rule.len() {
        return Err(Error::Usage("profile does not match the polar rule".into()));
    }
    let kernel = ZonalKernel::calibrated(d, n, kappa_closed_form(d))?;
    let z: Vec<f64> = rule.theta().iter().map(|t| kernel.eval(t.cos())).collect();
    let mu: f64 = z.iter().zip(profile).zip(rule.weights()).map(|((a, b), w)| a * b * w).sum();
    let z1 = kernel.eval(1.0);
    Ok(ZonalProjection { values: z.iter().map(|v| mu * v / z1).collect(), at_pole: mu })
}

/// `‖H_n f‖_q / ‖f‖_p` for a zonal `f`.
pub fn zonal_pair_norm_ratio(d: usize, n: usize, rule: &PolarRule, profile: &[f64], p: f64, q: f64) -> Result<f64> {
    let den = rule.lp_norm(profile, p)?;
    if den == 0.0 {
        return domain("zero input has no norm ratio");
    }
    let out = project_zonal(d, n, rule, profile)?;
    Ok(rule.lp_norm(&out.values, q)? / den)
}

/// Random element of `H_m` built from zonal translates `Z_m(ξ·a_j)`.
pub fn random_harmonic(g: &Arc<SphereGrid>, m: usize, rng: &mut impl Rng) -> GridFunction {
    let d = g.d();
    let k = ZonalKernel::new(d, m).unwrap();
    let centres: Vec<(Vec<f64>, Complex64)> = (0..3)
        .map(|_| {
            let v: Vec<f64> = (0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            (v.iter().map(|a| a / r).collect(), Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        })
        .collect();
    GridFunction::from_fn(g.clone(), |x| {
        centres
            .iter()
            .map(|(a, c)| c * k.eval(x.iter().zip(a).map(|(p, q)| p * q).sum()))
            .sum()
    })
}
