//! Jacobi polynomials `P_n^{(α,β)}` by upward three-term recurrence.

use crate::error::{domain, Result};

/// Degree and parameters of a Jacobi polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    n: usize,
    alpha: f64,
    beta: f64,
}

impl JacobiParams {
    pub fn new(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0 && beta > -1.0) {
            return domain(format!("Jacobi parameters must exceed -1, got ({alpha}, {beta})"));
        }
        Ok(Self { n, alpha, beta })
    }

    /// Gegenbauer-type parameters `α = β = ν`.
    pub fn symmetric(n: usize, nu: f64) -> Result<Self> {
        Self::new(n, nu, nu)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Evaluates `P_n^{(α,β)}(t)` for `|t| ≤ 1`.
pub fn jacobi_eval(params: JacobiParams, t: f64) -> Result<f64> {
    if !t.is_finite() || t.abs() > 1.0 {
        return domain(format!("Jacobi argument must lie in [-1, 1], got {t}"));
    }
    Ok(JacobiRecurrence::new(params).eval(t))
}

/// Precomputed recurrence coefficients for repeated evaluation at one degree.
///
/// For `k ≥ 1`:
/// `P_{k+1} = (c1_k t + c2_k) P_k − c3_k P_{k−1}`.
#[derive(Debug, Clone)]
pub struct JacobiRecurrence {
    params: JacobiParams,
    c1: Vec<f64>,
    c2: Vec<f64>,
    c3: Vec<f64>,
}

impl JacobiRecurrence {
    pub fn new(params: JacobiParams) -> Self {
        let JacobiParams { n, alpha: a, beta: b } = params;
        let steps = n.saturating_sub(1);
        let mut c1 = Vec::with_capacity(steps);
        let mut c2 = Vec::with_capacity(steps);
        let mut c3 = Vec::with_capacity(steps);
        for k in 1..n {
            let k = k as f64;
            let s = 2.0 * k + a + b;
            let a0 = 2.0 * (k + 1.0) * (k + a + b + 1.0) * s;
            c1.push((s + 1.0) * (s + 2.0) * s / a0);
            c2.push((s + 1.0) * (a * a - b * b) / a0);
            c3.push(2.0 * (k + a) * (k + b) * (s + 2.0) / a0);
        }
        Self { params, c1, c2, c3 }
    }

    pub fn params(&self) -> JacobiParams {
        self.params
    }

    /// `P_n(t)`; no domain check.
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        self.eval_pair(t).0
    }

    /// `(P_n(t), P_{n−1}(t))`, with `P_{−1} = 0`.
    #[inline]
    pub fn eval_pair(&self, t: f64) -> (f64, f64) {
        let JacobiParams { n, alpha: a, beta: b } = self.params;
        if n == 0 {
            return (1.0, 0.0);
        }
        let p1 = if a == b {
            (a + 1.0) * t
        } else {
            (a + 1.0) + (a + b + 2.0) * (t - 1.0) / 2.0
        };
        let mut prev = 1.0;
        let mut cur = p1;
        for k in 0..self.c1.len() {
            let next = (self.c1[k] * t + self.c2[k]) * cur - self.c3[k] * prev;
            prev = cur;
            cur = next;
        }
        (cur, prev)
    }

    /// `(P_n(t), P_n'(t))` for `|t| < 1`.
    pub fn eval_with_derivative(&self, t: f64) -> (f64, f64) {
        let JacobiParams { n, alpha: a, beta: b } = self.params;
        if n == 0 {
            return (1.0, 0.0);
        }
        let (p, q) = self.eval_pair(t);
        let nf = n as f64;
        let s = 2.0 * nf + a + b;
        let dp = (nf * ((a - b) - s * t) * p + 2.0 * (nf + a) * (nf + b) * q) / (s * (1.0 - t * t));
        (p, dp)
    }
}

/// `P_n^{(α,β)}(1) = Γ(n+α+1) / (Γ(α+1) n!)`.
pub fn jacobi_at_one(n: usize, alpha: f64) -> f64 {
    let lg = super::gamma::log_gamma_ratio(n as f64 + alpha + 1.0, alpha + 1.0).unwrap()
        - super::gamma::ln_gamma(n as f64 + 1.0).unwrap();
    lg.exp()
}
