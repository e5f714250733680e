//! One-dimensional quadrature for zonal functions `F(ξ·e)` on `S^d`.

use crate::error::{domain, Result};
use crate::specfun::{composite_nodes, sphere_area};

use super::norms::{weighted_lorentz, weighted_lp, LorentzIndex};

/// Composite rule in the polar angle `θ ∈ [0, π]` whose weights carry the
/// surface factor `σ(S^{d−1}) sin^{d−1} θ`.
#[derive(Debug, Clone)]
pub struct PolarRule {
    d: usize,
    theta: Vec<f64>,
    weights: Vec<f64>,
}

impl PolarRule {
    /// `breaks` are extra breakpoints in `(0, π)` (jumps of the integrand);
    /// panels are no wider than `max_width`.
    pub fn new(d: usize, breaks: &[f64], max_width: f64) -> Result<Self> {
        if d < 1 {
            return domain("polar rules need d ≥ 1");
        }
        if !(max_width > 0.0) {
            return domain("panel width must be positive");
        }
        let mut pts: Vec<f64> = vec![0.0, std::f64::consts::PI];
        pts.extend(breaks.iter().copied().filter(|&b| b > 0.0 && b < std::f64::consts::PI));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let (theta, raw) = composite_nodes(&pts, max_width);
        let area = sphere_area(d - 1);
        let weights = theta
            .iter()
            .zip(raw)
            .map(|(&t, w)| w * area * t.sin().powi(d as i32 - 1))
            .collect();
        Ok(Self { d, theta, weights })
    }

    /// Rule resolving oscillation at degree `n` (eight panels per period).
    pub fn for_degree(d: usize, n: usize, breaks: &[f64]) -> Result<Self> {
        let big_n = n as f64 + (d as f64 - 1.0) / 2.0;
        Self::new(d, breaks, std::f64::consts::PI / (4.0 * big_n.max(1.0)))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn sample(&self, mut f: impl FnMut(f64) -> f64) -> Vec<f64> {
        self.theta.iter().map(|&t| f(t)).collect()
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    pub fn lp_norm(&self, values: &[f64], p: f64) -> Result<f64> {
        let m: Vec<f64> = values.iter().map(|v| v.abs()).collect();
        weighted_lp(&m, &self.weights, p)
    }

    pub fn lorentz_norm(&self, values: &[f64], idx: LorentzIndex) -> f64 {
        let m: Vec<f64> = values.iter().map(|v| v.abs()).collect();
        weighted_lorentz(&m, &self.weights, idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_mass() {
        for d in 2..=4 {
            let r = PolarRule::new(d, &[0.3, 1.0], 0.2).unwrap();
            let total: f64 = r.weights().iter().sum();
            assert!((total - sphere_area(d)).abs() < 1e-12 * sphere_area(d));
        }
    }

    #[test]
    fn cap_measure_exact_with_breakpoint() {
        let rho = 0.37;
        let r = PolarRule::new(2, &[rho], 0.1).unwrap();
        let ind = r.sample(|t| if t <= rho { 1.0 } else { 0.0 });
        let want = 2.0 * std::f64::consts::PI * (1.0 - rho.cos());
        assert!((r.integrate(&ind) - want).abs() < 1e-13);
    }
}
