use std::io::Write;

use crate::error::{Error, Result};
use crate::specfun::{gauss_jacobi_symmetric, GaussRule};

/// Product quadrature on `S^d ⊂ R^{d+1}`.
///
/// A point is written recursively as `ξ = (√(1−t²) ξ', t)` with `ξ' ∈ S^{d−1}`,
/// down to `S^1 = (cos φ, sin φ)`. The cosine at level `k` (sphere `S^k`)
/// carries the weight `(1−t²)^{(k−2)/2}` and is discretised by a Gauss–Jacobi
/// rule with `res` nodes; the azimuth uses `2·res` equispaced nodes. The rule
/// integrates every polynomial of degree `≤ 2·res − 1` exactly.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    d: usize,
    res: usize,
    /// `levels[k − 2]` is the rule for the cosine at level `k`.
    levels: Vec<GaussRule>,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

impl SphereGrid {
    pub fn build(d: usize, res: usize) -> Result<Self> {
        if !(2..=4).contains(&d) {
            return Err(Error::Config(format!("sphere dimension must be 2, 3 or 4, got {d}")));
        }
        if res < 4 {
            return Err(Error::Config(format!("polar resolution must be at least 4, got {res}")));
        }
        let levels = (2..=d)
            .map(|k| gauss_jacobi_symmetric(res, (k as f64 - 2.0) / 2.0))
            .collect::<Result<Vec<_>>>()?;
        let n_az = 2 * res;
        let n_polar = res.pow(d as u32 - 1);
        let total = n_polar * n_az;
        let dim = d + 1;
        let mut coords = vec![0.0; total * dim];
        let mut weights = vec![0.0; total];
        let az_w = std::f64::consts::PI / res as f64;
        let mut idx = vec![0usize; d - 1];
        for p in 0..n_polar {
            decompose(p, res, &mut idx);
            let mut pw = az_w;
            for (lvl, &i) in idx.iter().enumerate() {
                pw *= levels[lvl].weights[i];
            }
            for j in 0..n_az {
                let phi = az_w * j as f64;
                let node = p * n_az + j;
                let x = &mut coords[node * dim..(node + 1) * dim];
                x[0] = phi.cos();
                x[1] = phi.sin();
                for (lvl, &i) in idx.iter().enumerate() {
                    let t = levels[lvl].nodes[i];
                    let s = (1.0 - t * t).sqrt();
                    let k = lvl + 2;
                    for c in x.iter_mut().take(k) {
                        *c *= s;
                    }
                    x[k] = t;
                }
                weights[node] = pw;
            }
        }
        Ok(Self { d, res, levels, coords, weights })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn res(&self) -> usize {
        self.res
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Ambient dimension `d + 1`.
    pub fn ambient(&self) -> usize {
        self.d + 1
    }

    pub fn node(&self, i: usize) -> &[f64] {
        let dim = self.d + 1;
        &self.coords[i * dim..(i + 1) * dim]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d + 1)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    pub fn azimuth_count(&self) -> usize {
        2 * self.res
    }

    /// Number of distinct polar multi-indices (rings).
    pub fn ring_count(&self) -> usize {
        self.res.pow(self.d as u32 - 1)
    }

    /// Product of the polar weights of ring `p` (azimuth weight excluded).
    pub fn ring_weight(&self, p: usize) -> f64 {
        let mut idx = vec![0usize; self.d - 1];
        decompose(p, self.res, &mut idx);
        idx.iter().enumerate().map(|(lvl, &i)| self.levels[lvl].weights[i]).product()
    }

    /// Cosines `t_k` of ring `p`, ordered by level `k = 2..=d`.
    pub fn ring_cosines(&self, p: usize) -> Vec<f64> {
        let mut idx = vec![0usize; self.d - 1];
        decompose(p, self.res, &mut idx);
        idx.iter().enumerate().map(|(lvl, &i)| self.levels[lvl].nodes[i]).collect()
    }

    /// Writes `(x_0, …, x_d, weight)` rows with a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let header: Vec<String> = (0..=self.d).map(|k| format!("x{k}")).collect();
        writeln!(out, "{},weight", header.join(","))?;
        for (x, w) in self.nodes().zip(&self.weights) {
            let row: Vec<String> = x.iter().map(|v| format!("{v:.17e}")).collect();
            writeln!(out, "{},{w:.17e}", row.join(","))?;
        }
        Ok(())
    }
}

fn decompose(mut p: usize, res: usize, idx: &mut [usize]) {
    for slot in idx.iter_mut() {
        *slot = p % res;
        p /= res;
    }
}

/// Pairwise summation with a fixed split order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 64 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
