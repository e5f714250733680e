//! Phase functions `ψ_ε`, `Φ_ε`, the rank/curvature condition for
//! oscillatory integral operators, and measured decay of `T_λ^ε`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::exponents::ExponentPoint;
use crate::normlab::{fit_exponent, ScalingFit};
use crate::specfun::composite_nodes;

/// Largest ε used by the scans.
pub const EPS0: f64 = 1.0 / 16.0;

/// `ψ_ε(θ) = ε^{−1} arccos(1 − ε²θ)`.
pub fn psi_eps(eps: f64, theta: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return domain("ε must be positive");
    }
    let s = eps * eps * theta;
    if !(0.0..=2.0).contains(&s) {
        return domain(format!("arccos argument 1 − {s} out of range"));
    }
    // arccos(1 − s) = 2 asin(√(s/2)) keeps full precision for small s.
    Ok(2.0 * (s / 2.0).sqrt().min(1.0).asin() / eps)
}

/// Limit profile `√2 θ^{1/2}`.
pub fn psi_limit(theta: f64) -> f64 {
    (2.0 * theta).sqrt()
}

/// `Φ_ε(x, y)`, which tends to `|x − y|`.
pub fn phi_eps(eps: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    if !(eps > 0.0) {
        return domain("ε must be positive");
    }
    let e2 = eps * eps;
    let (x2, y2): (f64, f64) = (x.iter().map(|v| v * v).sum(), y.iter().map(|v| v * v).sum());
    let rad = (1.0 - e2 * x2) * (1.0 - e2 * y2);
    if !(rad >= 0.0) || e2 * x2 > 1.0 || e2 * y2 > 1.0 {
        return domain("ε|x| or ε|y| exceeds 1");
    }
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    // 1 − arg written without cancellation.
    let mu = (x2 + y2 - e2 * x2 * y2) / (1.0 + rad.sqrt()) - dot;
    let gap = e2 * mu;
    if gap <= 0.0 {
        return Ok(0.0);
    }
    // arccos(1 − g) = 2 asin(√(g/2)).
    Ok(2.0 * (gap / 2.0).sqrt().min(1.0).asin() / eps)
}

fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
}

/// Probe set `(x, y)` pairs with `|x − y| ∈ [2^{−3}, 2^3]` at a fixed ε.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProbe {
    pub epsilon: f64,
    pub pairs: Vec<(Vec<f64>, Vec<f64>)>,
}

impl PhaseProbe {
    pub fn new(epsilon: f64, pairs: Vec<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= EPS0) {
            return domain(format!("ε = {epsilon} outside (0, {EPS0}]"));
        }
        for (x, y) in &pairs {
            let r = distance(x, y);
            if !(0.125..=8.0).contains(&r) {
                return domain(format!("probe separation {r} outside [1/8, 8]"));
            }
        }
        Ok(Self { epsilon, pairs })
    }

    /// Deterministic probe set in `R^d`, points in the ball of radius 4.
    pub fn standard(epsilon: f64, d: usize, count: usize) -> Result<Self> {
        let mut pairs = Vec::with_capacity(count);
        let mut k = 0usize;
        while pairs.len() < count {
            k += 1;
            let x: Vec<f64> = (0..d).map(|i| 3.0 * ((k * (2 * i + 3)) as f64 * 0.618_033_988_7).fract() - 1.5).collect();
            let y: Vec<f64> = (0..d).map(|i| 3.0 * ((k * (2 * i + 5)) as f64 * 0.414_213_562_4).fract() - 1.5).collect();
            let r = distance(&x, &y);
            if (0.125..=8.0).contains(&r) {
                pairs.push((x, y));
            }
        }
        Self::new(epsilon, pairs)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(epsilon, self.pairs.clone())
    }

    /// `sup |Φ_ε − |x − y|| / ε` over the probe set.
    pub fn value_constant(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (x, y) in &self.pairs {
            worst = worst.max((phi_eps(self.epsilon, x, y)? - distance(x, y)).abs());
        }
        Ok(worst / self.epsilon)
    }

    /// `sup |∇_x Φ_ε − (x − y)/|x − y|| / ε`, gradient by central differences.
    pub fn gradient_constant(&self, h: f64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (x, y) in &self.pairs {
            let r = distance(x, y);
            for i in 0..x.len() {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let g = (phi_eps(self.epsilon, &xp, y)? - phi_eps(self.epsilon, &xm, y)?) / (2.0 * h);
                worst = worst.max((g - (x[i] - y[i]) / r).abs());
            }
        }
        Ok(worst / self.epsilon)
    }
}

/// `sup_{θ ∈ [2^{−8}, 2^8]} |D^k(ψ_ε − √2 θ^{1/2})| / ε` for `k = 0, 1, 2`,
/// derivatives as divided differences on a geometric θ grid.
pub fn psi_convergence_constants(eps: f64, samples: usize) -> Result<[f64; 3]> {
    if samples < 8 {
        return Err(Error::Usage("need at least 8 samples".into()));
    }
    let lo = (2f64).powi(-8).ln();
    let hi = (2f64).powi(8).ln();
    let thetas: Vec<f64> = (0..samples).map(|k| (lo + (hi - lo) * k as f64 / (samples - 1) as f64).exp()).collect();
    let mut rem = Vec::with_capacity(samples);
    for &t in &thetas {
        rem.push(psi_eps(eps, t)? - psi_limit(t));
    }
    let d1: Vec<f64> = (0..samples - 1).map(|k| (rem[k + 1] - rem[k]) / (thetas[k + 1] - thetas[k])).collect();
    let d2: Vec<f64> = (0..samples - 2)
        .map(|k| 2.0 * (d1[k + 1] - d1[k]) / (thetas[k + 2] - thetas[k]))
        .collect();
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs())) / eps;
    Ok([sup(&rem), sup(&d1), sup(&d2)])
}

/// Outcome of the rank and curvature test for a phase `ψ(x, z)`,
/// `x ∈ R^d`, `z ∈ R^{d−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsReport {
    pub rank_ok: bool,
    pub rank: usize,
    pub mixed_hessian: DMatrix<f64>,
    pub null_direction: DVector<f64>,
    /// Eigenvalues of `∂_z² (v · ∇_x ψ)`, ascending, with `v` oriented so
    /// that their sum is nonnegative.
    pub hessian_eigs: Vec<f64>,
}

impl CsReport {
    /// All curvatures nonzero and of one sign.
    pub fn elliptic(&self, tol: f64) -> bool {
        let pos = self.hessian_eigs.iter().all(|e| *e > tol);
        let neg = self.hessian_eigs.iter().all(|e| *e < -tol);
        pos || neg
    }
}

fn shifted(base: &[f64], i: usize, by: f64) -> Vec<f64> {
    let mut v = base.to_vec();
    v[i] += by;
    v
}

fn mixed_at(phase: &dyn Fn(&[f64], &[f64]) -> f64, x: &[f64], z: &[f64], h: f64) -> DMatrix<f64> {
    let (d, m) = (x.len(), z.len());
    DMatrix::from_fn(d, m, |i, j| {
        let xp = shifted(x, i, h);
        let xm = shifted(x, i, -h);
        let zp = shifted(z, j, h);
        let zm = shifted(z, j, -h);
        (phase(&xp, &zp) - phase(&xp, &zm) - phase(&xm, &zp) + phase(&xm, &zm)) / (4.0 * h * h)
    })
}

fn directional_gradient(phase: &dyn Fn(&[f64], &[f64]) -> f64, x: &[f64], z: &[f64], v: &DVector<f64>, h: f64) -> f64 {
    (0..x.len())
        .map(|i| v[i] * (phase(&shifted(x, i, h), z) - phase(&shifted(x, i, -h), z)) / (2.0 * h))
        .sum()
}

fn z_hessian(g: &dyn Fn(&[f64]) -> f64, z: &[f64], h: f64) -> DMatrix<f64> {
    let m = z.len();
    let g0 = g(z);
    DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            (g(&shifted(z, i, h)) - 2.0 * g0 + g(&shifted(z, i, -h))) / (h * h)
        } else {
            let pp = shifted(&shifted(z, i, h), j, h);
            let pm = shifted(&shifted(z, i, h), j, -h);
            let mp = shifted(&shifted(z, i, -h), j, h);
            let mm = shifted(&shifted(z, i, -h), j, -h);
            (g(&pp) - g(&pm) - g(&mp) + g(&mm)) / (4.0 * h * h)
        }
    })
}

/// Finite-difference check of the rank condition on `∂_z ∂_x ψ` and of the
/// curvature of `z ↦ v · ∇_x ψ` along the null direction `v`. The mixed
/// Hessian uses step `h`; the curvature, a third derivative, uses `100 h`;
/// both are Richardson-extrapolated.
pub fn cs_condition_check(phase: &dyn Fn(&[f64], &[f64]) -> f64, x0: &[f64], z0: &[f64], h: f64) -> Result<CsReport> {
    let d = x0.len();
    if z0.len() + 1 != d || d < 2 {
        return Err(Error::Usage(format!("need x ∈ R^d and z ∈ R^(d−1), got {} and {}", d, z0.len())));
    }
    if !(1e-7..=1e-3).contains(&h) {
        return Err(Error::StepSize(format!("step {h} outside [1e-7, 1e-3]")));
    }
    let coarse = mixed_at(phase, x0, z0, 2.0 * h);
    let fine = mixed_at(phase, x0, z0, h);
    let mixed = (&fine * 4.0 - &coarse) / 3.0;
    let scale = mixed.norm();
    if !scale.is_finite() || scale == 0.0 {
        return Err(Error::StepSize("mixed Hessian vanishes or is not finite".into()));
    }
    if (&fine - &coarse).norm() > 1e-3 * scale {
        return Err(Error::StepSize("mixed Hessian unstable under step halving".into()));
    }
    let sv = mixed.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    let rank = sv.iter().filter(|s| **s > 1e-6 * top).count();
    let gram = &mixed * mixed.transpose();
    let eig = SymmetricEigen::new(gram);
    let (k, _) = eig.eigenvalues.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, e)| if *e < acc.1 { (i, *e) } else { acc });
    let mut v: DVector<f64> = eig.eigenvectors.column(k).into_owned();
    let big = 100.0 * h;
    let g = |z: &[f64]| directional_gradient(phase, x0, z, &v, h);
    let hb = z_hessian(&g, z0, big);
    let hs = z_hessian(&g, z0, big / 2.0);
    let mut curv = (&hs * 4.0 - &hb) / 3.0;
    let cscale = curv.norm().max(1e-300);
    if !cscale.is_finite() || (&hs - &hb).norm() > 0.05 * cscale {
        return Err(Error::StepSize("curvature unstable under step halving".into()));
    }
    curv = (&curv + curv.transpose()) / 2.0;
    let mut eigs: Vec<f64> = SymmetricEigen::new(curv).eigenvalues.iter().cloned().collect();
    if eigs.iter().sum::<f64>() < 0.0 {
        v = -v;
        eigs.iter_mut().for_each(|e| *e = -*e);
    }
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(CsReport { rank_ok: rank == d - 1, rank, mixed_hessian: mixed, null_direction: v, hessian_eigs: eigs })
}

/// `arccos φ_u(x̄, v, ȳ)` with `φ_u = x̄·ȳ + v√(1 − |ȳ|² − u²) + u√(1 − |x̄|² − v²)`;
/// `x = (x̄, v)`, `z = ȳ`.
pub fn sphere_phase(u: f64) -> impl Fn(&[f64], &[f64]) -> f64 {
    move |x: &[f64], z: &[f64]| {
        let d = x.len();
        let (xb, v) = (&x[..d - 1], x[d - 1]);
        let dot: f64 = xb.iter().zip(z).map(|(a, b)| a * b).sum();
        let x2: f64 = xb.iter().map(|a| a * a).sum::<f64>() + v * v;
        let z2: f64 = z.iter().map(|a| a * a).sum();
        (dot + v * (1.0 - z2 - u * u).sqrt() + u * (1.0 - x2).sqrt()).acos()
    }
}

/// `√(|x̄ − z|² + (x_d − y_d)²)`, the distance phase with `y_d` frozen.
pub fn distance_phase(y_d: f64) -> impl Fn(&[f64], &[f64]) -> f64 {
    move |x: &[f64], z: &[f64]| {
        let d = x.len();
        let s: f64 = x[..d - 1].iter().zip(z).map(|(a, b)| (a - b).powi(2)).sum();
        (s + (x[d - 1] - y_d).powi(2)).sqrt()
    }
}

/// Focused input `f(y) = b(y) e^{−iλ Φ_ε(x0, y)}`, `b` a bump of radius
/// `radius` about `y0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FocusedInput {
    pub x0: [f64; 2],
    pub y0: [f64; 2],
    pub radius: f64,
}

impl FocusedInput {
    fn bump(&self, y: &[f64]) -> f64 {
        let s = ((y[0] - self.y0[0]).powi(2) + (y[1] - self.y0[1]).powi(2)) / (self.radius * self.radius);
        if s >= 1.0 {
            0.0
        } else {
            (1.0 - s).powi(4)
        }
    }
}

/// Three focused inputs with `|x0 − y0| = 1`.
pub fn oscillatory_bank() -> Vec<FocusedInput> {
    vec![
        FocusedInput { x0: [1.0, 0.0], y0: [0.0, 0.0], radius: 0.25 },
        FocusedInput { x0: [0.6, 0.8], y0: [0.0, 0.0], radius: 0.2 },
        FocusedInput { x0: [0.3, 1.0], y0: [0.3, 0.0], radius: 0.3 },
    ]
}

/// Amplitude supported in `1/4 ≤ |x − y| ≤ 4`.
pub fn amplitude(x: &[f64], y: &[f64]) -> f64 {
    let r = distance(x, y);
    let s = ((r - 2.125) / 1.875).powi(2);
    if s >= 1.0 {
        0.0
    } else {
        (1.0 - s).powi(4)
    }
}

/// Half-width, in units of `1/λ`, of the output window about `x0`.
pub const WINDOW: f64 = 2.0;

/// `‖T_λ^ε f‖_{L^q(B)} / ‖f‖_p` with `B = x0 + [−K/λ, K/λ]²`.
pub fn t_lambda_eps_ratio(eps: f64, lambda: f64, pt: ExponentPoint, input: &FocusedInput) -> Result<f64> {
    if !(lambda >= 1.0) {
        return domain("λ must be at least 1");
    }
    let (p, q) = (pt.p(), pt.q());
    if !p.is_finite() || !q.is_finite() {
        return Err(Error::Unsupported("p or q infinite".into()));
    }
    let r = input.radius;
    let (sx, sw) = composite_nodes(&[-WINDOW, WINDOW], 2.0);
    let max_gap = sx.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max) / lambda;
    if max_gap > 0.25 / lambda {
        return Err(Error::Resolution(format!("x-grid step {max_gap} exceeds 1/(4λ)")));
    }
    let y_panel = 0.25;
    let reach = WINDOW * std::f64::consts::SQRT_2 / lambda;
    let min_sep = (distance(&input.x0, &input.y0) - r - reach).max(0.25);
    // |∇_y (Φ(x, y) − Φ(x0, y))| ≲ min(2, 2|x − x0| / |x − y|).
    let swing = lambda * (2.0f64).min(2.0 * reach / min_sep) * y_panel;
    if swing > 4.0 * std::f64::consts::PI {
        return Err(Error::Resolution(format!("phase swing {swing} per y panel")));
    }
    let (y1, w1) = composite_nodes(&[input.y0[0] - r, input.y0[0] + r], y_panel);
    let (y2, w2) = composite_nodes(&[input.y0[1] - r, input.y0[1] + r], y_panel);
    let mut ys = Vec::new();
    let mut fp = 0.0;
    for (a, wa) in y1.iter().zip(&w1) {
        for (b, wb) in y2.iter().zip(&w2) {
            let y = [*a, *b];
            let bump = input.bump(&y);
            if bump > 0.0 {
                fp += wa * wb * bump.powf(p);
                ys.push((y, wa * wb * bump, phi_eps(eps, &input.x0, &y)?));
            }
        }
    }
    let mut tq = 0.0;
    for (s1, ws1) in sx.iter().zip(&sw) {
        for (s2, ws2) in sx.iter().zip(&sw) {
            let x = [input.x0[0] + s1 / lambda, input.x0[1] + s2 / lambda];
            let mut acc = Complex64::new(0.0, 0.0);
            for (y, w, base) in &ys {
                let phase = lambda * (phi_eps(eps, &x, y)? - base);
                acc += Complex64::from_polar(w * amplitude(&x, y), phase);
            }
            tq += ws1 * ws2 * acc.norm().powf(q);
        }
    }
    let tq = (tq / (lambda * lambda)).powf(1.0 / q);
    Ok(tq / fp.powf(1.0 / p))
}

/// Log-log fit of the windowed ratio against λ for each input of the bank.
pub fn t_lambda_eps_decay(d: usize, eps: f64, lambdas: &[f64], pt: ExponentPoint, bank: &[FocusedInput]) -> Result<Vec<ScalingFit>> {
    if d != 2 {
        return Err(Error::Unsupported(format!("T_λ^ε decay only at d = 2, got {d}")));
    }
    if !(eps > 0.0 && eps <= EPS0) {
        return domain(format!("ε = {eps} outside (0, {EPS0}]"));
    }
    bank.iter()
        .map(|input| {
            let pts = lambdas
                .iter()
                .map(|&l| Ok((l, t_lambda_eps_ratio(eps, l, pt, input)?)))
                .collect::<Result<Vec<_>>>()?;
            fit_exponent(&pts)
        })
        .collect()
}

/// Whether `(1/p, 1/q)` satisfies `(d+1)/q ≤ (d−1)(1 − 1/p)` and `q > 2(d+2)/d`.
pub fn decay_admissible(d: usize, pt: ExponentPoint) -> bool {
    let df = d as f64;
    (df + 1.0) * pt.y <= (df - 1.0) * (1.0 - pt.x) + 1e-12 && pt.y < df / (2.0 * (df + 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_domain_and_limit() {
        assert!(matches!(psi_eps(1.0, 3.0), Err(Error::Domain(_))));
        assert!(matches!(psi_eps(0.0, 1.0), Err(Error::Domain(_))));
        for eps in [1e-2, 1e-3, 1e-4] {
            assert!((psi_eps(eps, 1.0).unwrap() - 2f64.sqrt()).abs() <= 2.0 * eps);
        }
    }

    #[test]
    fn psi_constants_do_not_grow() {
        let mut prev = psi_convergence_constants(EPS0, 400).unwrap();
        for k in 1..5 {
            let cur = psi_convergence_constants(EPS0 / 2f64.powi(k), 400).unwrap();
            for j in 0..3 {
                assert!(cur[j] <= 1.1 * prev[j], "order {j}: {cur:?} vs {prev:?}");
            }
            prev = cur;
        }
    }

    #[test]
    fn phi_symmetry_and_limit() {
        let probe = PhaseProbe::standard(EPS0, 2, 40).unwrap();
        for (x, y) in &probe.pairs {
            let a = phi_eps(0.05, x, y).unwrap();
            let b = phi_eps(0.05, y, x).unwrap();
            assert!((a - b).abs() < 1e-13);
        }
        let mut prev = (probe.value_constant().unwrap(), probe.gradient_constant(1e-6).unwrap());
        for k in 1..4 {
            let p = probe.with_epsilon(EPS0 / 2f64.powi(k)).unwrap();
            let cur = (p.value_constant().unwrap(), p.gradient_constant(1e-6).unwrap());
            assert!(cur.0 <= 1.1 * prev.0 && cur.1 <= 1.1 * prev.1, "{cur:?} vs {prev:?}");
            prev = cur;
        }
        assert!(matches!(phi_eps(0.5, &[3.0, 0.0], &[0.0, 0.0]), Err(Error::Domain(_))));
        assert!(PhaseProbe::new(0.01, vec![(vec![0.0], vec![0.01])]).is_err());
        assert!(PhaseProbe::new(0.5, vec![]).is_err());
    }

    #[test]
    fn sphere_phase_curvature() {
        for d in [2usize, 3, 4] {
            for u in [-0.7, -0.3, 0.0, 0.25, 0.6, 0.74] {
                let ph = sphere_phase(u);
                let rep = cs_condition_check(&ph, &vec![0.0; d], &vec![0.0; d - 1], 1e-4).unwrap();
                assert!(rep.rank_ok, "rank {} at d={d} u={u}", rep.rank);
                let want = 1.0 / (1.0 - u * u);
                for e in &rep.hessian_eigs {
                    assert!((e - want).abs() < 1e-4 && (e / want - 1.0).abs() < 1e-3, "{e} vs {want}");
                }
                let m = -1.0 / (1.0 - u * u).sqrt();
                for i in 0..d {
                    for j in 0..d - 1 {
                        let w = if i == j { m } else { 0.0 };
                        assert!((rep.mixed_hessian[(i, j)] - w).abs() < 1e-6);
                    }
                }
                assert!(rep.null_direction[d - 1].abs() > 1.0 - 1e-8);
            }
        }
    }

    #[test]
    fn distance_phase_is_elliptic() {
        for d in [2usize, 3] {
            let yd = 0.0;
            let x: Vec<f64> = (0..d).map(|i| if i + 1 == d { 1.0 / (4.0 * d as f64) } else { 0.3 + 0.1 * i as f64 }).collect();
            let z: Vec<f64> = (0..d - 1).map(|i| -0.1 * i as f64).collect();
            let ph = distance_phase(yd);
            let rep = cs_condition_check(&ph, &x, &z, 1e-4).unwrap();
            assert!(rep.rank_ok && rep.elliptic(1e-6));
            let mut w: Vec<f64> = x.iter().zip(z.iter().chain([yd].iter())).map(|(a, b)| a - b).collect();
            let r = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            w.iter_mut().for_each(|v| *v /= r);
            let mut want = vec![1.0 / (r * r); d - 2];
            want.push(w[d - 1] * w[d - 1] / (r * r));
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (a, b) in rep.hessian_eigs.iter().zip(&want) {
                assert!((a / b - 1.0).abs() < 1e-3, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn step_errors() {
        let ph = sphere_phase(0.2);
        assert!(matches!(cs_condition_check(&ph, &[0.0, 0.0], &[0.0], 1.0), Err(Error::StepSize(_))));
        assert!(matches!(cs_condition_check(&ph, &[0.0, 0.0], &[0.0, 0.0], 1e-4), Err(Error::Usage(_))));
    }

    #[test]
    fn admissibility() {
        assert!(!decay_admissible(2, ExponentPoint::new(0.75, 0.25).unwrap()));
        assert!(decay_admissible(2, ExponentPoint::new(0.5, 0.125).unwrap()));
    }

    #[test]
    fn decay_rate_small_scan() {
        let pt = ExponentPoint::new(0.5, 0.125).unwrap();
        let bank = &oscillatory_bank()[..1];
        let fits = t_lambda_eps_decay(2, EPS0, &[32.0, 64.0, 128.0], pt, bank).unwrap();
        assert!((fits[0].slope + 0.25).abs() < 0.1, "{}", fits[0].slope);
        assert!(t_lambda_eps_ratio(EPS0, 1.0, pt, &bank[0]).unwrap().is_finite());
        assert!(t_lambda_eps_decay(3, EPS0, &[16.0], pt, bank).is_err());
    }
}
