use std::io::{BufRead, Write};
use std::sync::Arc;

use num_complex::Complex64;

use super::grid::{pairwise_sum, SphereGrid};
use super::norms::{weighted_lorentz, weighted_lp, LorentzIndex};
use crate::error::{domain, Error, Result};

/// Complex samples at the nodes of a [`SphereGrid`].
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<SphereGrid>,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Arc<SphereGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Usage(format!(
                "{} values supplied for a grid with {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return domain("grid function values must be finite");
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<SphereGrid>) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self { grid, values }
    }

    pub fn from_fn(grid: Arc<SphereGrid>, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let values = grid.nodes().map(&mut f).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: Arc<SphereGrid>, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid)
    }

    fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        weighted_lp(&self.moduli(), self.grid.weights(), p)
    }

    pub fn lorentz_norm(&self, idx: LorentzIndex) -> f64 {
        weighted_lorentz(&self.moduli(), self.grid.weights(), idx)
    }

    /// `Σ w_i f_i conj(g_i)`.
    pub fn inner(&self, other: &GridFunction) -> Result<Complex64> {
        self.check_grid(other)?;
        let w = self.grid.weights();
        let prods: Vec<Complex64> = self
            .values
            .iter()
            .zip(&other.values)
            .zip(w)
            .map(|((a, b), &w)| a * b.conj() * w)
            .collect();
        let re: Vec<f64> = prods.iter().map(|c| c.re).collect();
        let im: Vec<f64> = prods.iter().map(|c| c.im).collect();
        Ok(Complex64::new(pairwise_sum(&re), pairwise_sum(&im)))
    }

    pub fn scaled(&self, c: Complex64) -> GridFunction {
        let values = self.values.iter().map(|v| v * c).collect();
        Self { grid: self.grid.clone(), values }
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: Complex64, other: &GridFunction) -> Result<GridFunction> {
        self.check_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect();
        Ok(Self { grid: self.grid.clone(), values })
    }

    pub(crate) fn check_grid(&self, other: &GridFunction) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::Usage("grid functions live on different grids".into()))
        }
    }

    /// CSV rows `(index, re, im)` with a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "index,re,im")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(out, "{i},{:.17e},{:.17e}", v.re, v.im)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(grid: Arc<SphereGrid>, input: R) -> Result<Self> {
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        let mut seen = vec![false; grid.len()];
        let mut lines = input.lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        if header.trim() != "index,re,im" {
            return Err(Error::Format("expected header 'index,re,im'".into()));
        }
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad = || Error::Format(format!("malformed row {}: {line}", lineno + 2));
            if fields.len() != 3 {
                return Err(bad());
            }
            let i: usize = fields[0].parse().map_err(|_| bad())?;
            let re: f64 = fields[1].parse().map_err(|_| bad())?;
            let im: f64 = fields[2].parse().map_err(|_| bad())?;
            if i >= values.len() || seen[i] {
                return Err(bad());
            }
            seen[i] = true;
            values[i] = Complex64::new(re, im);
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Format("grid function CSV does not cover every node".into()));
        }
        Self::new(grid, values)
    }
}

/// Indicator of the geodesic cap `{ξ : arccos(ξ·center) ≤ ρ}`.
pub fn cap_indicator(grid: Arc<SphereGrid>, center: &[f64], rho: f64) -> Result<GridFunction> {
    if !(rho > 0.0 && rho <= std::f64::consts::PI) {
        return domain(format!("cap radius must lie in (0, π], got {rho}"));
    }
    if center.len() != grid.ambient() {
        return Err(Error::Usage("cap centre has the wrong dimension".into()));
    }
    let norm = center.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return domain("cap centre must be a unit vector");
    }
    let cos_rho = rho.cos();
    Ok(GridFunction::from_real_fn(grid, |x| {
        let dot: f64 = x.iter().zip(center).map(|(a, b)| a * b).sum();
        if rho >= std::f64::consts::PI || dot >= cos_rho {
            1.0
        } else {
            0.0
        }
    }))
}

/// `e_{d+1}`, the north pole of `S^d`.
pub fn north_pole(d: usize) -> Vec<f64> {
    let mut e = vec![0.0; d + 1];
    e[d] = 1.0;
    e
}
