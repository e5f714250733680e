//! Gauss quadrature rules.

use std::sync::OnceLock;

use super::gamma::log_gamma_ratio;
use super::jacobi::{JacobiParams, JacobiRecurrence};
use crate::error::{domain, Result};

/// Nodes and weights on `[-1, 1]`, nodes ascending.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_k f(x_k)` on `[-1, 1]`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Gauss–Jacobi rule for the weight `(1 − t²)^α` with `m` nodes.
pub fn gauss_jacobi_symmetric(m: usize, alpha: f64) -> Result<GaussRule> {
    if m == 0 {
        return domain("a Gauss rule needs at least one node");
    }
    let params = JacobiParams::symmetric(m, alpha)?;
    let rec = JacobiRecurrence::new(params);
    let mf = m as f64;
    let log_const = 2.0 * log_gamma_ratio(mf + alpha + 1.0, mf + 2.0 * alpha + 1.0)?
        + log_gamma_ratio(mf + 2.0 * alpha + 1.0, mf + 1.0)?
        + (2.0 * alpha + 1.0) * std::f64::consts::LN_2;
    let half = m / 2;
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    // Roots come in ± pairs; solve for the positive half only.
    for k in 1..=m.div_ceil(2) {
        let mut theta = (k as f64 - 0.25 + alpha / 2.0) * std::f64::consts::PI / (mf + alpha + 0.5);
        if m % 2 == 1 && k == m.div_ceil(2) {
            theta = std::f64::consts::FRAC_PI_2;
        } else {
            // Newton in the angle keeps 1 − t² accurate near the endpoints.
            for it in 0..100 {
                let (p, dp) = rec.eval_with_derivative(theta.cos());
                let step = p / (-theta.sin() * dp);
                theta -= step;
                if step.abs() < 1e-15 * theta.abs().max(1e-3) && it > 0 {
                    break;
                }
            }
        }
        let t = theta.cos();
        let sin2 = theta.sin().powi(2);
        let (_, dp) = rec.eval_with_derivative(t);
        let w = (log_const - sin2.ln() - 2.0 * dp.abs().ln()).exp();
        nodes[m - k] = t;
        weights[m - k] = w;
        nodes[k - 1] = -t;
        weights[k - 1] = w;
    }
    if m % 2 == 1 {
        nodes[half] = 0.0;
    }
    Ok(GaussRule { nodes, weights })
}

/// Gauss–Legendre rule with `m` nodes.
pub fn gauss_legendre(m: usize) -> Result<GaussRule> {
    gauss_jacobi_symmetric(m, 0.0)
}

/// Shared 16-point Gauss–Legendre rule.
pub fn gl16() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16).expect("16-point rule"))
}

/// Composite 16-point Gauss–Legendre integral of `f` over `[a, b]` split into
/// `panels` equal pieces.
pub fn composite_gl(a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let rule = gl16();
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let mut s = 0.0;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            s += w * f(mid + 0.5 * h * x);
        }
        acc += 0.5 * h * s;
    }
    acc
}

/// Nodes and weights of a composite 16-point rule over consecutive
/// breakpoints, each interval cut into panels no wider than `max_width`.
pub fn composite_nodes(breaks: &[f64], max_width: f64) -> (Vec<f64>, Vec<f64>) {
    let rule = gl16();
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if !(b > a) {
            continue;
        }
        let panels = ((b - a) / max_width).ceil().max(1.0) as usize;
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                xs.push(mid + 0.5 * h * x);
                ws.push(0.5 * h * w);
            }
        }
    }
    (xs, ws)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::ln_gamma;

    fn beta_sym(alpha: f64) -> f64 {
        // ∫_{-1}^{1} (1 − t²)^α dt = 2^{2α+1} Γ(α+1)² / Γ(2α+2)
        ((2.0 * alpha + 1.0) * std::f64::consts::LN_2 + 2.0 * ln_gamma(alpha + 1.0).unwrap()
            - ln_gamma(2.0 * alpha + 2.0).unwrap())
        .exp()
    }

    #[test]
    fn weight_sums_and_distinct_nodes() {
        for alpha in [0.0, 0.5, 1.0] {
            for m in [1, 2, 3, 7, 16, 64, 255, 1024, 2048] {
                let r = gauss_jacobi_symmetric(m, alpha).unwrap();
                let s: f64 = r.weights.iter().sum();
                assert!((s - beta_sym(alpha)).abs() < 1e-12, "m={m} a={alpha} sum={s}");
                for w in r.nodes.windows(2) {
                    assert!(w[1] > w[0], "nodes not increasing for m={m}");
                }
                assert!(r.nodes[0] > -1.0 && r.nodes[m - 1] < 1.0);
            }
        }
    }

    #[test]
    fn exact_for_polynomials() {
        // ∫ t^{2j} (1−t²)^α dt = B(j+½, α+1)
        for alpha in [0.0, 0.5, 1.0] {
            let m = 9;
            let r = gauss_jacobi_symmetric(m, alpha).unwrap();
            for j in 0..m {
                let want = (ln_gamma(j as f64 + 0.5).unwrap() + ln_gamma(alpha + 1.0).unwrap()
                    - ln_gamma(j as f64 + alpha + 1.5).unwrap())
                .exp();
                let got = r.integrate(|t| t.powi(2 * j as i32));
                assert!((got - want).abs() < 1e-13 * want.max(1.0), "a={alpha} j={j}");
            }
        }
    }

    #[test]
    fn composite_integrates_oscillation() {
        let v = composite_gl(0.0, std::f64::consts::PI, 20, |x| (40.0 * x).cos() * x);
        // ∫_0^π x cos(40x) dx = (cos 40π − 1)/1600 = 0
        assert!(v.abs() < 1e-13);
        let (xs, ws) = composite_nodes(&[0.0, 0.3, 1.0], 0.1);
        let s: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x * x).sum();
        assert!((s - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_empty_rule() {
        assert!(gauss_legendre(0).is_err());
    }
}
