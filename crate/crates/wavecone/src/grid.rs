//! Periodic grids on the unit torus `[0,1)^d` and fields sampled on them.
//!
//! Points are stored row-major (last axis fastest); a field keeps its
//! `dim` components contiguous per point. Fourier coefficients use the
//! same layout, with axis index `i` standing for the frequency
//! `i` if `i < n/2`, else `i − n`, so `ζ ∈ {−n/2, …, n/2−1}^d`.

use std::sync::Arc;

use nalgebra::{Complex, DVector};
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

pub type C64 = Complex<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusGrid {
    d: usize,
    n: usize,
}

impl TorusGrid {
    /// `n` must be a power of two and at least 8.
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Grid("dimension must be >= 1".into()));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Grid(format!("n = {n} must be a power of two >= 8")));
        }
        if n.checked_pow(d as u32).is_none_or(|len| len > 1 << 26) {
            return Err(Error::Grid(format!("{n}^{d} points is too many")));
        }
        Ok(Self { d, n })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Volume of one cell, the rectangle-rule weight.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.d as i32)
    }

    pub fn axis_indices(&self, idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.d];
        let mut r = idx;
        for a in (0..self.d).rev() {
            out[a] = r % self.n;
            r /= self.n;
        }
        out
    }

    pub fn index_of(&self, axis_indices: &[usize]) -> usize {
        axis_indices.iter().fold(0, |acc, &i| acc * self.n + i % self.n)
    }

    /// Index of the lattice point at integer offset `offset` (taken mod n).
    pub fn index_wrapped(&self, offset: &[i64]) -> usize {
        let n = self.n as i64;
        offset.iter().fold(0, |acc, &i| acc * self.n + i.rem_euclid(n) as usize)
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.axis_indices(idx).into_iter().map(|i| i as f64 / self.n as f64).collect()
    }

    /// Signed frequency of one axis index.
    pub fn signed(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    pub fn freq(&self, idx: usize) -> Vec<f64> {
        self.axis_indices(idx).into_iter().map(|i| self.signed(i) as f64).collect()
    }

    pub fn freq_int(&self, idx: usize) -> Vec<i64> {
        self.axis_indices(idx).into_iter().map(|i| self.signed(i)).collect()
    }
}

/// `dim`-component complex samples on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusField {
    grid: TorusGrid,
    dim: usize,
    values: Vec<C64>,
}

/// Fourier coefficients `f̂(ζ) = N^{-1} Σ_x f(x) e^{−2πi x·ζ}`, so a single
/// mode `v e^{2πi x·ζ₀}` has coefficient `v` at `ζ₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    grid: TorusGrid,
    dim: usize,
    coeffs: Vec<C64>,
}

impl TorusField {
    pub fn zeros(grid: TorusGrid, dim: usize) -> Self {
        Self { grid, dim, values: vec![C64::new(0.0, 0.0); grid.len() * dim] }
    }

    pub fn from_values(grid: TorusGrid, dim: usize, values: Vec<C64>) -> Result<Self> {
        if dim == 0 || values.len() != grid.len() * dim {
            return Err(Error::Grid(format!(
                "expected {} values for {} points x {dim} components, got {}",
                grid.len() * dim,
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Core(wavecone_core::Error::NonFinite("field values".into())));
        }
        Ok(Self { grid, dim, values })
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn(grid: TorusGrid, dim: usize, mut f: impl FnMut(&[f64]) -> Vec<C64>) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len() * dim);
        for idx in 0..grid.len() {
            let v = f(&grid.point(idx));
            if v.len() != dim {
                return Err(Error::Grid(format!("sampler returned {} components, expected {dim}", v.len())));
            }
            values.extend(v);
        }
        Self::from_values(grid, dim, values)
    }

    pub fn from_real_fn(grid: TorusGrid, dim: usize, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Result<Self> {
        Self::from_fn(grid, dim, |x| f(x).into_iter().map(|v| C64::new(v, 0.0)).collect())
    }

    /// `v e^{2πi x·ζ₀}`.
    pub fn single_mode(grid: TorusGrid, zeta: &[i64], v: &[C64]) -> Result<Self> {
        if zeta.len() != grid.d() {
            return Err(Error::Grid("frequency has the wrong dimension".into()));
        }
        Self::from_fn(grid, v.len(), |x| {
            let phase: f64 = x.iter().zip(zeta).map(|(x, &z)| x * z as f64).sum::<f64>() * std::f64::consts::TAU;
            let e = C64::from_polar(1.0, phase);
            v.iter().map(|c| c * e).collect()
        })
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn at(&self, idx: usize) -> &[C64] {
        &self.values[idx * self.dim..(idx + 1) * self.dim]
    }

    pub fn at_mut(&mut self, idx: usize) -> &mut [C64] {
        &mut self.values[idx * self.dim..(idx + 1) * self.dim]
    }

    /// Real parts at one point.
    pub fn real_at(&self, idx: usize) -> DVector<f64> {
        DVector::from_iterator(self.dim, self.at(idx).iter().map(|z| z.re))
    }

    /// Euclidean modulus of the value at a point.
    pub fn modulus_at(&self, idx: usize) -> f64 {
        self.at(idx).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        (0..self.grid.len()).fold(0.0, |m, i| m.max(self.modulus_at(i)))
    }

    /// Drops imaginary parts.
    pub fn real_part(&self) -> Self {
        Self { grid: self.grid, dim: self.dim, values: self.values.iter().map(|z| C64::new(z.re, 0.0)).collect() }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { grid: self.grid, dim: self.dim, values: self.values.iter().map(|z| z * c).collect() }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.dim != other.dim {
            return Err(Error::Grid("fields live on different grids or have different dimensions".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self { grid: self.grid, dim: self.dim, values })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// Component-wise mean over the torus.
    pub fn mean(&self) -> Vec<C64> {
        let mut m = vec![C64::new(0.0, 0.0); self.dim];
        for idx in 0..self.grid.len() {
            for (acc, v) in m.iter_mut().zip(self.at(idx)) {
                *acc += v;
            }
        }
        let n = self.grid.len() as f64;
        m.into_iter().map(|z| z / n).collect()
    }

    pub fn spectrum(&self) -> Spectrum {
        let mut coeffs = self.values.clone();
        fft_nd(self.grid, self.dim, &mut coeffs, false);
        let s = 1.0 / self.grid.len() as f64;
        for c in &mut coeffs {
            *c *= s;
        }
        Spectrum { grid: self.grid, dim: self.dim, coeffs }
    }

    /// Rectangle-rule `(∫|f|^q)^{1/q}` over the whole torus, `|·|`
    /// Euclidean over components.
    pub fn lq_norm(&self, q: f64) -> f64 {
        self.lq_norm_where(q, |_| true)
    }

    /// Rectangle-rule `L^q` norm restricted to grid points where `keep` holds.
    pub fn lq_norm_where(&self, q: f64, keep: impl Fn(&[f64]) -> bool) -> f64 {
        let w = self.grid.cell_volume();
        let mut acc = 0.0;
        let mut max: f64 = 0.0;
        for idx in 0..self.grid.len() {
            if !keep(&self.grid.point(idx)) {
                continue;
            }
            let m = self.modulus_at(idx);
            if q.is_infinite() {
                max = max.max(m);
            } else {
                acc += m.powf(q) * w;
            }
        }
        if q.is_infinite() {
            max
        } else {
            acc.powf(1.0 / q)
        }
    }

    /// `∫|f|` over points where `keep` holds.
    pub fn l1_where(&self, keep: impl Fn(&[f64]) -> bool) -> f64 {
        self.lq_norm_where(1.0, keep)
    }

    /// Mean-square norm, `(∫|f|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.lq_norm(2.0)
    }

    /// Whether the spectrum is conjugate-symmetric, i.e. the field is real.
    pub fn is_real(&self, tol: f64) -> bool {
        self.max_imag() <= tol * self.max_abs().max(1.0)
    }
}

impl Spectrum {
    pub fn zeros(grid: TorusGrid, dim: usize) -> Self {
        Self { grid, dim, coeffs: vec![C64::new(0.0, 0.0); grid.len() * dim] }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, idx: usize) -> &[C64] {
        &self.coeffs[idx * self.dim..(idx + 1) * self.dim]
    }

    pub fn at_mut(&mut self, idx: usize) -> &mut [C64] {
        &mut self.coeffs[idx * self.dim..(idx + 1) * self.dim]
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// `(Σ_ζ |f̂(ζ)|²)^{1/2}`, equal to the `L²` norm by Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn to_field(&self) -> TorusField {
        let mut values = self.coeffs.clone();
        fft_nd(self.grid, self.dim, &mut values, true);
        TorusField { grid: self.grid, dim: self.dim, values }
    }
}

/// Unnormalized d-dimensional DFT, one axis at a time, in place.
fn fft_nd(grid: TorusGrid, dim: usize, data: &mut [C64], inverse: bool) {
    let n = grid.n();
    let len = grid.len();
    let mut planner = FftPlanner::new();
    let plan: Arc<dyn Fft<f64>> = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    let mut comp = vec![C64::new(0.0, 0.0); len];
    let mut line = vec![C64::new(0.0, 0.0); n];
    let mut scratch = vec![C64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
    for c in 0..dim {
        for (i, v) in comp.iter_mut().enumerate() {
            *v = data[i * dim + c];
        }
        for axis in 0..grid.d() {
            let stride = n.pow((grid.d() - 1 - axis) as u32);
            for start in 0..len {
                // Visit each line once, from its first element.
                if !(start / stride).is_multiple_of(n) {
                    continue;
                }
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = comp[start + k * stride];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    comp[start + k * stride] = *v;
                }
            }
        }
        for (i, v) in comp.iter().enumerate() {
            data[i * dim + c] = *v;
        }
    }
}
