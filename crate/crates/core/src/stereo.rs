//! Stereographic blow-up of the south pole of `n S^d` and the limit of the
//! projection pairing to the Fourier extension operator on `S^{d−1}`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::projection::project_zonal;
use crate::specfun::{composite_nodes, gauss_legendre, sphere_area};
use crate::sphere::PolarRule;
use crate::zonal::{kappa_closed_form, mehler_heine_constant, ZonalKernel};

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// `μ_n(x) = (4n²x, n(|x|² − 4n²)) / (|x|² + 4n²)`, a point of `n S^d`.
pub fn mu_map(n: f64, x: &[f64]) -> Vec<f64> {
    let r2 = norm2(x);
    let den = r2 + 4.0 * n * n;
    let mut out: Vec<f64> = x.iter().map(|v| 4.0 * n * n * v / den).collect();
    out.push(n * (r2 - 4.0 * n * n) / den);
    out
}

/// Projection of `P ∈ n S^d` from the north pole `n e_{d+1}` onto the plane
/// `x_{d+1} = −n`; returns the full point `(x, −n)`.
pub fn stereographic_projection(n: f64, point: &[f64]) -> Result<Vec<f64>> {
    let d = point.len() - 1;
    let gap = n - point[d];
    if !(gap > 0.0) {
        return domain("the north pole has no stereographic image");
    }
    let mut out: Vec<f64> = point[..d].iter().map(|v| 2.0 * n * v / gap).collect();
    out.push(-n);
    Ok(out)
}

/// Inverse of [`mu_map`] applied to `n ξ`, `ξ ∈ S^d`.
pub fn mu_inverse_scaled(n: f64, xi: &[f64]) -> Vec<f64> {
    let d = xi.len() - 1;
    xi[..d].iter().map(|v| 2.0 * n * v / (1.0 - xi[d])).collect()
}

/// Surface density `(|x|²/(4n²) + 1)^{−d}` of `μ_n`.
pub fn mu_jacobian(n: f64, x: &[f64]) -> f64 {
    (norm2(x) / (4.0 * n * n) + 1.0).powi(-(x.len() as i32))
}

/// `√det(Dμᵀ Dμ)` with central differences.
pub fn mu_jacobian_fd(n: f64, x: &[f64], step: f64) -> f64 {
    let d = x.len();
    let mut jac = DMatrix::<f64>::zeros(d + 1, d);
    for j in 0..d {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += step;
        xm[j] -= step;
        let (fp, fm) = (mu_map(n, &xp), mu_map(n, &xm));
        for i in 0..=d {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * step);
        }
    }
    (jac.transpose() * &jac).determinant().sqrt()
}

/// `E f(x) = ∫_{S^{d−1}} e^{i x·η} f̂(η) dσ(η)` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionSample {
    pub x: Vec<f64>,
    pub value: Complex64,
}

/// Nodes and weights on `S^{d−1}`, `d ∈ {2, 3}`, exact for trigonometric /
/// spherical polynomials well past degree `band`.
fn direction_rule(d: usize, band: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    match d {
        2 => {
            let m = 2 * band + 16;
            Ok((0..m)
                .map(|k| {
                    let a = 2.0 * PI * k as f64 / m as f64;
                    (vec![a.cos(), a.sin()], 2.0 * PI / m as f64)
                })
                .collect())
        }
        3 => {
            let rule = gauss_legendre(band + 8)?;
            let m = 2 * band + 16;
            let mut out = Vec::new();
            for (z, wz) in rule.nodes.iter().zip(&rule.weights) {
                let s = (1.0 - z * z).sqrt();
                for k in 0..m {
                    let a = 2.0 * PI * k as f64 / m as f64;
                    out.push((vec![s * a.cos(), s * a.sin(), *z], wz * 2.0 * PI / m as f64));
                }
            }
            Ok(out)
        }
        _ => Err(Error::Unsupported(format!("extension quadrature for d = {d}"))),
    }
}

/// Quadrature of the extension integral at each point.
pub fn extension_apply(
    d: usize,
    fhat: impl Fn(&[f64]) -> Complex64,
    points: &[Vec<f64>],
) -> Result<Vec<ExtensionSample>> {
    let reach = points.iter().map(|p| norm2(p).sqrt()).fold(0.0, f64::max);
    let rule = direction_rule(d, reach.ceil() as usize + 8)?;
    let weights: Vec<(Complex64, &Vec<f64>, f64)> = rule.iter().map(|(eta, w)| (fhat(eta), eta, *w)).collect();
    Ok(points
        .iter()
        .map(|x| {
            let value = weights
                .iter()
                .map(|(f, eta, w)| {
                    let phase: f64 = x.iter().zip(eta.iter()).map(|(a, b)| a * b).sum();
                    f * Complex64::from_polar(*w, phase)
                })
                .sum();
            ExtensionSample { x: x.clone(), value }
        })
        .collect())
}

/// Centred Gaussian `exp(−|x|²/(2s²))` or a shifted one.
#[derive(Debug, Clone, PartialEq)]
pub struct Gaussian {
    pub center: Vec<f64>,
    pub width: f64,
}

impl Gaussian {
    pub fn new(center: Vec<f64>, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return domain("Gaussian width must be positive");
        }
        Ok(Self { center, width })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().zip(&self.center).map(|(a, b)| (a - b).powi(2)).sum();
        (-r2 / (2.0 * self.width * self.width)).exp()
    }

    /// `∫ g(x) e^{−i x·ξ} dx`.
    pub fn fourier(&self, xi: &[f64]) -> Complex64 {
        let d = self.center.len() as f64;
        let s2 = self.width * self.width;
        let amp = (2.0 * PI * s2).powf(d / 2.0) * (-0.5 * s2 * norm2(xi)).exp();
        let phase: f64 = -xi.iter().zip(&self.center).map(|(a, b)| a * b).sum::<f64>();
        Complex64::from_polar(amp, phase)
    }

    fn is_centred(&self) -> bool {
        self.center.iter().all(|c| *c == 0.0)
    }
}

/// Fixed bank: three centred widths for `f`, three unit-width centres for
/// `g` (`d = 2`).
pub fn gaussian_bank() -> (Vec<Gaussian>, Vec<Gaussian>) {
    let fs = [0.7, 1.0, 1.4].iter().map(|&s| Gaussian::new(vec![0.0, 0.0], s).unwrap()).collect();
    let gs = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.5]]
        .iter()
        .map(|c| Gaussian::new(c.to_vec(), 1.0).unwrap())
        .collect();
    (fs, gs)
}

/// Tensor rule on the box `center ± 8 width` in `R^d`.
fn box_rule(g: &Gaussian) -> Vec<(Vec<f64>, f64)> {
    let half = 8.0 * g.width;
    let mut pts: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
    for c in &g.center {
        let (xs, ws) = composite_nodes(&[c - half, c + half], 0.5);
        pts = pts
            .into_iter()
            .flat_map(|(p, w)| {
                xs.iter().zip(&ws).map(move |(x, wx)| {
                    let mut q = p.clone();
                    q.push(*x);
                    (q, w * wx)
                }).collect::<Vec<_>>()
            })
            .collect();
    }
    pts
}

/// `I_n = n^{d+1} ⟨H_n F, G⟩` with `F = f ∘ μ_n^{−1}(n ·)`, `G` likewise.
/// `f` must be centred so that `F` is zonal about the south pole and
/// `H_n F` follows from Funk–Hecke; `G` is integrated after pulling back
/// to `R^d`.
pub fn i_n_integral(d: usize, n: usize, f: &Gaussian, g: &Gaussian) -> Result<f64> {
    if f.center.len() != d || g.center.len() != d {
        return Err(Error::Usage("Gaussian dimension does not match d".into()));
    }
    if !f.is_centred() {
        return Err(Error::Unsupported("the first Gaussian must be centred".into()));
    }
    if n < 1 {
        return domain("degree must be positive");
    }
    let nf = n as f64;
    // θ measured from the south pole; |x| = 2n tan(θ/2).
    let theta_max = 2.0 * (12.0 * f.width / (2.0 * nf)).atan();
    let rule = PolarRule::for_degree(d, n, &[theta_max])?;
    if rule.theta().iter().filter(|t| **t <= theta_max).count() < 32 {
        return Err(Error::Resolution(format!("polar rule under-resolves the pulled-back profile at n = {n}")));
    }
    let s2 = f.width * f.width;
    let profile = rule.sample(|t| {
        if t > theta_max {
            0.0
        } else {
            let r = 2.0 * nf * (t / 2.0).tan();
            (-r * r / (2.0 * s2)).exp()
        }
    });
    let mu = project_zonal(d, n, &rule, &profile)?.at_pole;
    let kernel = ZonalKernel::new(d, n)?;
    let scale = mu / kernel.eval(1.0);
    // ∫ H_n F · G dσ = n^{−d} ∫ H_n F(μ(y)/n) g(y) J(y) dy.
    let mut acc = 0.0;
    for (y, w) in box_rule(g) {
        let r2 = norm2(&y);
        let t = (4.0 * nf * nf - r2) / (r2 + 4.0 * nf * nf);
        acc += w * scale * kernel.eval(t) * g.eval(&y) * mu_jacobian(nf, &y);
    }
    Ok(nf * acc)
}

/// `⟨E f, g⟩ = ∫ E f(y) g(y) dy` by quadrature of the extension at the
/// box nodes of `g`.
pub fn extension_pairing(d: usize, f: &Gaussian, g: &Gaussian) -> Result<Complex64> {
    let rule = box_rule(g);
    let points: Vec<Vec<f64>> = rule.iter().map(|(y, _)| y.clone()).collect();
    let samples = extension_apply(d, |eta| f.fourier(eta), &points)?;
    Ok(samples.iter().zip(&rule).map(|(s, (y, w))| s.value * (w * g.eval(y))).sum())
}

/// `c̃ = κ c_d (2π)^{−d/2}` from the Mehler–Heine constant.
pub fn limit_constant_predicted(d: usize) -> Result<f64> {
    Ok(kappa_closed_form(d) * mehler_heine_constant(d)? * (2.0 * PI).powf(-(d as f64) / 2.0))
}

/// Least-squares `c̃` matching `I_n` to `⟨E f, g⟩` over the bank at one
/// degree.
pub fn fit_limit_constant(d: usize, n: usize, pairs: &[(Gaussian, Gaussian)]) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for (f, g) in pairs {
        let i_n = i_n_integral(d, n, f, g)?;
        let e = extension_pairing(d, f, g)?.re;
        num += i_n * e;
        den += e * e;
    }
    if den == 0.0 {
        return Err(Error::Degenerate("extension pairings vanish on the bank".into()));
    }
    Ok(num / den)
}

/// Degree at which `c̃` is fitted.
pub const LIMIT_FIT_DEGREE: usize = 512;

/// Deviations `|I_n − c̃ ⟨E f, g⟩|` for each pair and degree.
pub fn limit_deviations(d: usize, ns: &[usize], c_tilde: f64, pairs: &[(Gaussian, Gaussian)]) -> Result<Vec<Vec<f64>>> {
    pairs
        .iter()
        .map(|(f, g)| {
            let e = extension_pairing(d, f, g)?.re;
            ns.iter().map(|&n| Ok((i_n_integral(d, n, f, g)? - c_tilde * e).abs())).collect()
        })
        .collect()
}

/// All nine bank pairs.
pub fn bank_pairs() -> Vec<(Gaussian, Gaussian)> {
    let (fs, gs) = gaussian_bank();
    fs.iter().flat_map(|f| gs.iter().map(move |g| (f.clone(), g.clone()))).collect()
}

/// Total mass `σ(S^{d−1})` reached by the extension at the origin.
pub fn extension_at_origin(d: usize) -> f64 {
    sphere_area(d - 1)
}
