//! `L^p` and Lorentz functionals of sampled functions with quadrature weights.

use super::grid::pairwise_sum;
use crate::error::{domain, Result};

/// Lorentz exponents `(r, s)`; either may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzIndex {
    r: f64,
    s: f64,
}

impl LorentzIndex {
    pub fn new(r: f64, s: f64) -> Result<Self> {
        if !(r > 0.0) || !(s > 0.0) {
            return domain(format!("Lorentz exponents must be positive, got ({r}, {s})"));
        }
        if r.is_infinite() && s.is_finite() {
            return domain("L^{∞,s} with finite s is trivial; use s = ∞");
        }
        Ok(Self { r, s })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

/// `(Σ w_i |f_i|^p)^{1/p}`, or `max |f_i|` for `p = ∞`.
pub fn weighted_lp(moduli: &[f64], weights: &[f64], p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return domain(format!("L^p exponent must be at least 1, got {p}"));
    }
    if p.is_infinite() {
        return Ok(moduli.iter().fold(0.0, |m, &v| m.max(v)));
    }
    let scale = moduli.iter().fold(0.0_f64, |m, &v| m.max(v));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let terms: Vec<f64> = moduli
        .iter()
        .zip(weights)
        .map(|(&v, &w)| w * (v / scale).powf(p))
        .collect();
    Ok(scale * pairwise_sum(&terms).powf(1.0 / p))
}

/// Lorentz functional of the weighted decreasing rearrangement,
///
/// `‖f‖_{r,s} = ((s/r) ∫_0^∞ (t^{1/r} f*(t))^s dt/t)^{1/s}`,
///
/// integrated exactly on each step of `f*`. With this normalisation
/// `‖f‖_{r,r} = ‖f‖_r` and indicators have norm `|E|^{1/r}` for every `s`.
pub fn weighted_lorentz(moduli: &[f64], weights: &[f64], idx: LorentzIndex) -> f64 {
    let mut order: Vec<usize> = (0..moduli.len()).filter(|&i| moduli[i] > 0.0).collect();
    order.sort_by(|&a, &b| moduli[b].total_cmp(&moduli[a]).then(a.cmp(&b)));
    let (r, s) = (idx.r, idx.s);
    if r.is_infinite() {
        return order.first().map_or(0.0, |&i| moduli[i]);
    }
    let mut cum = 0.0;
    if s.is_infinite() {
        let mut best = 0.0_f64;
        for &i in &order {
            cum += weights[i];
            best = best.max(cum.powf(1.0 / r) * moduli[i]);
        }
        return best;
    }
    let scale = order.first().map_or(0.0, |&i| moduli[i]);
    if scale == 0.0 {
        return 0.0;
    }
    let e = s / r;
    let mut prev = 0.0;
    let mut terms = Vec::with_capacity(order.len());
    for &i in &order {
        cum += weights[i];
        let next = cum.powf(e);
        terms.push((next - prev) * (moduli[i] / scale).powf(s));
        prev = next;
    }
    scale * pairwise_sum(&terms).powf(1.0 / s)
}
