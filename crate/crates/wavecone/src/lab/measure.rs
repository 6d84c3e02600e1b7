//! Vector measures on the torus: a grid density plus point atoms, the
//! quartic-bump mollifier and polar (cone) diagnostics.

use nalgebra::DVector;
use wavecone_core::cone::ConeSpec;

use crate::grid::{Spectrum, TorusField, TorusGrid, C64};
use crate::lab::SubBox;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    /// Location in `[0,1)^d`.
    pub location: Vec<f64>,
    pub weight: Vec<f64>,
}

/// `μ = f dx + Σ w_i δ_{x_i}` with `V = R^dim`.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    grid: TorusGrid,
    dim: usize,
    density: Option<TorusField>,
    atoms: Vec<Atom>,
    support_box: SubBox,
}

impl DiscreteMeasure {
    pub fn new(grid: TorusGrid, dim: usize, density: Option<TorusField>, atoms: Vec<Atom>) -> Result<Self> {
        if let Some(f) = &density {
            if f.grid() != grid || f.dim() != dim {
                return Err(Error::Grid("density does not match the measure's grid".into()));
            }
            if !f.is_real(1e-12) {
                return Err(Error::Precondition("densities must be real".into()));
            }
        }
        for a in &atoms {
            if a.location.len() != grid.d() || a.weight.len() != dim {
                return Err(Error::Grid("atom has the wrong location or weight dimension".into()));
            }
            if a.location.iter().chain(&a.weight).any(|v| !v.is_finite()) {
                return Err(Error::Core(wavecone_core::Error::NonFinite("atom".into())));
            }
        }
        Ok(Self { grid, dim, density: density.map(|f| f.real_part()), atoms, support_box: SubBox::default() })
    }

    pub fn zero(grid: TorusGrid, dim: usize) -> Self {
        Self { grid, dim, density: None, atoms: Vec::new(), support_box: SubBox::default() }
    }

    pub fn from_density(density: TorusField) -> Result<Self> {
        Self::new(density.grid(), density.dim(), Some(density), Vec::new())
    }

    pub fn from_atoms(grid: TorusGrid, dim: usize, atoms: Vec<Atom>) -> Result<Self> {
        Self::new(grid, dim, None, atoms)
    }

    pub fn with_support_box(mut self, b: SubBox) -> Self {
        self.support_box = b;
        self
    }

    /// Same atoms on another grid; densities cannot be moved.
    pub fn regrid(&self, grid: TorusGrid) -> Result<Self> {
        if self.density.is_some() {
            return Err(Error::Precondition("only purely atomic measures can be moved to another grid".into()));
        }
        Ok(Self { grid, ..self.clone() })
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn density(&self) -> Option<&TorusField> {
        self.density.as_ref()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn support_box(&self) -> SubBox {
        self.support_box
    }

    /// `|μ|(Ω) = ∫|f| + Σ|w_i|`.
    pub fn total_variation(&self) -> f64 {
        let dens = self.density.as_ref().map_or(0.0, |f| f.lq_norm(1.0));
        let atoms: f64 = self.atoms.iter().map(|a| a.weight.iter().map(|w| w * w).sum::<f64>().sqrt()).sum();
        dens + atoms
    }

    /// Total mass `μ(Ω) ∈ V`.
    pub fn mass(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        if let Some(f) = &self.density {
            let w = self.grid.cell_volume();
            for idx in 0..self.grid.len() {
                for (acc, v) in m.iter_mut().zip(f.at(idx)) {
                    *acc += v.re * w;
                }
            }
        }
        for a in &self.atoms {
            for (acc, v) in m.iter_mut().zip(&a.weight) {
                *acc += v;
            }
        }
        m
    }

    /// Polar vectors `dμ/d|μ|` of every nonzero density sample and atom.
    pub fn polars(&self) -> Vec<DVector<f64>> {
        let mut out = Vec::new();
        if let Some(f) = &self.density {
            for idx in 0..self.grid.len() {
                let v = f.real_at(idx);
                if v.norm() > 0.0 {
                    out.push(v.normalize());
                }
            }
        }
        for a in &self.atoms {
            let v = DVector::from_column_slice(&a.weight);
            if v.norm() > 0.0 {
                out.push(v.normalize());
            }
        }
        out
    }
}

/// Shortest periodic displacement between two torus points, per axis.
fn periodic_delta(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| (a - b + 0.5).rem_euclid(1.0) - 0.5).collect()
}

/// Quartic bump `(1 − |x|²/t²)²` on `|x| < t`, unnormalized.
pub fn bump(x: &[f64], t: f64) -> f64 {
    let r2 = x.iter().map(|v| v * v).sum::<f64>() / (t * t);
    if r2 >= 1.0 {
        0.0
    } else {
        (1.0 - r2).powi(2)
    }
}

/// `ρ_t(x − center)` on the grid, normalized to unit discrete mass.
fn bump_field(grid: TorusGrid, center: &[f64], t: f64) -> Vec<f64> {
    let mut vals: Vec<f64> = (0..grid.len()).map(|idx| bump(&periodic_delta(&grid.point(idx), center), t)).collect();
    let mass: f64 = vals.iter().sum::<f64>() * grid.cell_volume();
    for v in &mut vals {
        *v /= mass;
    }
    vals
}

/// `μ_t = μ ⋆ ρ_t` with the quartic-bump mollifier of radius `t`. Mass is
/// preserved exactly (up to rounding) since the discrete kernel is
/// normalized, and every value is a nonnegative combination of polar
/// vectors of `μ`.
pub fn mollify(mu: &DiscreteMeasure, t: f64) -> Result<TorusField> {
    let grid = mu.grid();
    let h = grid.spacing();
    if t.is_nan() || t < 2.0 * h - 1e-15 || t >= 0.5 {
        return Err(Error::Precondition(format!(
            "mollification scale t = {t} must satisfy 2h = {} <= t < 1/2",
            2.0 * h
        )));
    }
    let dim = mu.dim();
    let mut out = TorusField::zeros(grid, dim);
    if let Some(f) = mu.density() {
        let rho = bump_field(grid, &vec![0.0; grid.d()], t);
        let rho = TorusField::from_values(grid, 1, rho.into_iter().map(|v| C64::new(v, 0.0)).collect())?;
        let rs = rho.spectrum();
        let fs = f.spectrum();
        // Discrete convolution Σ_y ρ(x−y) f(y) hᵈ has coefficients ρ̂ f̂.
        let mut conv = Spectrum::zeros(grid, dim);
        for idx in 0..grid.len() {
            let r = rs.at(idx)[0];
            for (slot, v) in conv.at_mut(idx).iter_mut().zip(fs.at(idx)) {
                *slot = r * v;
            }
        }
        out = conv.to_field().real_part();
    }
    for a in mu.atoms() {
        let rho = bump_field(grid, &a.location, t);
        for (idx, r) in rho.iter().enumerate() {
            if *r == 0.0 {
                continue;
            }
            for (slot, w) in out.at_mut(idx).iter_mut().zip(&a.weight) {
                *slot += C64::new(r * w, 0.0);
            }
        }
    }
    Ok(out)
}

/// Mollifies and checks that the result stays in `cone` whenever all polar
/// vectors of `μ` do.
pub fn mollify_in_cone(mu: &DiscreteMeasure, t: f64, cone: &ConeSpec, tol: f64) -> Result<(TorusField, bool)> {
    let f = mollify(mu, t)?;
    let ok = polar_diagnostics(&f, cone)?.max_dist <= tol;
    Ok((f, ok))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolarDiagnostics {
    /// `sup_x dist(f(x)/|f(x)|, K)`.
    pub max_dist: f64,
    /// `∫ dist(f(x), K) dx`.
    pub l1_dist: f64,
    /// `sup |P₁ f| / |P₀ f|`, `P₀` the projection onto `L`, `P₁ = 1 − P₀`.
    pub m_inf: f64,
}

/// Values below this fraction of `max |f|` are FFT round-off, not polar
/// information, and are skipped by [`polar_diagnostics`].
pub const NOISE_FLOOR: f64 = 1e-12;

/// Cone diagnostics of the real part of `f`, over points where `|f|` is
/// above the noise floor.
pub fn polar_diagnostics(f: &TorusField, cone: &ConeSpec) -> Result<PolarDiagnostics> {
    if f.dim() != cone.dim() {
        return Err(Error::Grid("field and cone live in different spaces".into()));
    }
    let w = f.grid().cell_volume();
    let floor = NOISE_FLOOR * f.max_abs();
    let mut out = PolarDiagnostics { max_dist: 0.0, l1_dist: 0.0, m_inf: 0.0 };
    for idx in 0..f.grid().len() {
        let v = f.real_at(idx);
        let n = v.norm();
        if n == 0.0 || n <= floor {
            continue;
        }
        let dist = cone.distance(&v);
        out.l1_dist += dist * w;
        out.max_dist = out.max_dist.max(dist / n);
        let p0 = cone.subspace().project(&v);
        let p1 = (&v - &p0).norm();
        let ratio = if p0.norm() > 0.0 { p1 / p0.norm() } else if p1 > 0.0 { f64::INFINITY } else { 0.0 };
        out.m_inf = out.m_inf.max(ratio);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_displacement_wraps() {
        let d = periodic_delta(&[0.95, 0.1], &[0.05, 0.9]);
        assert!((d[0] + 0.1).abs() < 1e-12 && (d[1] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn atom_mass_is_preserved() {
        let g = TorusGrid::new(2, 64).unwrap();
        let mu = DiscreteMeasure::from_atoms(g, 2, vec![Atom { location: vec![0.5, 0.5], weight: vec![1.0, -2.0] }]).unwrap();
        let f = mollify(&mu, 0.125).unwrap();
        let m = f.mean();
        assert!((m[0].re - 1.0).abs() < 1e-12 && (m[1].re + 2.0).abs() < 1e-12);
        assert!(mollify(&mu, 0.01).is_err());
    }
}
