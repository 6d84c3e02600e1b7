//! Oscillating simple laminates `u_j(x) = B₀ + δ P φ(j x·ξ)` with the
//! 1-periodic square wave `φ = 1_{[0,1/2)}` and `P ∈ ker A(ξ)`. They are
//! `A`-free, converge weak* to `B₀ + δP/2`, and stay at fixed `L¹`
//! distance `δ|P|/2` from that limit.

use nalgebra::DVector;
use wavecone_core::operator::OperatorSpec;

use crate::grid::{TorusField, TorusGrid};
use crate::lab::SubBox;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct LaminateSpec {
    /// Integer lamination direction.
    pub xi: Vec<i64>,
    pub p: Vec<f64>,
    pub b0: Vec<f64>,
    pub delta: f64,
}

impl LaminateSpec {
    pub fn midpoint(&self) -> Vec<f64> {
        self.b0.iter().zip(&self.p).map(|(b, p)| b + 0.5 * self.delta * p).collect()
    }

    fn check(&self, op: &OperatorSpec) -> Result<()> {
        if self.xi.len() != op.d() || self.p.len() != op.dim_v() || self.b0.len() != op.dim_v() {
            return Err(Error::Precondition("laminate data does not match the operator's dimensions".into()));
        }
        if self.xi.iter().all(|&x| x == 0) {
            return Err(Error::Precondition("lamination direction must be nonzero".into()));
        }
        let xi: Vec<f64> = self.xi.iter().map(|&v| v as f64).collect();
        let a = op.reduced_symbol(&xi)?;
        let p = DVector::from_column_slice(&self.p);
        let scale = a.norm().max(1.0) * p.norm().max(f64::MIN_POSITIVE);
        let res = (&a * &p).norm();
        if res > 1e-10 * scale {
            return Err(Error::Gate(format!(
                "amplitude is not in ker A(xi): |A(xi)P| = {res:.3e}, so the laminate is not A-free"
            )));
        }
        Ok(())
    }
}

fn square_wave(s: f64) -> f64 {
    if s.rem_euclid(1.0) < 0.5 {
        1.0
    } else {
        0.0
    }
}

/// `u_j` sampled at cell midpoints `x + h/2`, avoiding the jump set.
pub fn laminate(op: &OperatorSpec, spec: &LaminateSpec, j: u32, grid: TorusGrid) -> Result<TorusField> {
    spec.check(op)?;
    if grid.d() != op.d() {
        return Err(Error::Grid("grid dimension differs from the operator's".into()));
    }
    let top = spec.xi.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) * j as u64;
    if j == 0 || top as usize > grid.n() / 4 {
        return Err(Error::Precondition(format!(
            "j*|xi|_inf = {top} must be positive and at most n/4 = {}",
            grid.n() / 4
        )));
    }
    let half = 0.5 * grid.spacing();
    TorusField::from_real_fn(grid, op.dim_v(), |x| {
        let phase: f64 = x.iter().zip(&spec.xi).map(|(xi, k)| (xi + half) * *k as f64).sum::<f64>() * j as f64;
        let w = spec.delta * square_wave(phase);
        spec.b0.iter().zip(&spec.p).map(|(b, p)| b + w * p).collect()
    })
}

/// `‖A u‖ / ‖u − ū‖` measured spectrally with the symbol normalized by
/// `|ζ|^k`, so the result is scale free.
pub fn a_free_residual(op: &OperatorSpec, u: &TorusField) -> Result<f64> {
    let s = u.spectrum();
    let grid = u.grid();
    let (mut num, mut den) = (0.0, 0.0);
    for idx in 0..grid.len() {
        let zeta = grid.freq(idx);
        let n2: f64 = zeta.iter().map(|v| v * v).sum();
        if n2 == 0.0 {
            continue;
        }
        let unit: Vec<f64> = zeta.iter().map(|v| v / n2.sqrt()).collect();
        let a = op.reduced_symbol(&unit)?;
        let c = s.at(idx);
        let re = DVector::from_iterator(c.len(), c.iter().map(|v| v.re));
        let im = DVector::from_iterator(c.len(), c.iter().map(|v| v.im));
        num += (&a * re).norm_squared() + (&a * im).norm_squared();
        den += c.iter().map(|v| v.norm_sqr()).sum::<f64>();
    }
    Ok(if den == 0.0 { 0.0 } else { (num / den).sqrt() })
}

pub type TestFn = Box<dyn Fn(&[f64]) -> f64>;

/// Fixed trigonometric test functions `1, cos 2πx_i, sin 2πx_i`, each
/// restricted to `Ω′`.
pub fn localized_tests(d: usize) -> Vec<TestFn> {
    let mut out: Vec<TestFn> = vec![Box::new(|_| 1.0)];
    for i in 0..d {
        out.push(Box::new(move |x: &[f64]| (2.0 * std::f64::consts::PI * x[i]).cos()));
        out.push(Box::new(move |x: &[f64]| (2.0 * std::f64::consts::PI * x[i]).sin()));
    }
    out
}

/// `∫_{Ω′} ψ u` for each test function, flattened as `[test][component]`.
pub fn pairings(u: &TorusField, omega: SubBox) -> Vec<f64> {
    let grid = u.grid();
    let tests = localized_tests(grid.d());
    let w = grid.cell_volume();
    let mut out = vec![0.0; tests.len() * u.dim()];
    for idx in 0..grid.len() {
        let x = grid.point(idx);
        if !omega.contains(&x) {
            continue;
        }
        for (t, psi) in tests.iter().enumerate() {
            let pv = psi(&x) * w;
            for (c, v) in u.at(idx).iter().enumerate() {
                out[t * u.dim() + c] += pv * v.re;
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaminateRow {
    pub j: u32,
    /// Largest `|∫_{Ω′} ψ (u_j − B_mid)|` over the test functions.
    pub pairing_error: f64,
    /// `∫ |u_j − B_mid|` over the whole torus.
    pub l1_to_midpoint: f64,
    pub a_free_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaminateReport {
    pub midpoint: Vec<f64>,
    pub rows: Vec<LaminateRow>,
    /// Least-squares slope of `−log(pairing_error)` against `log j`.
    pub rate: f64,
}

pub fn laminate_sequence(op: &OperatorSpec, spec: &LaminateSpec, js: &[u32], grid: TorusGrid, omega: SubBox) -> Result<LaminateReport> {
    let mid = spec.midpoint();
    let mid_field = TorusField::from_real_fn(grid, mid.len(), |_| mid.clone())?;
    let mid_pair = pairings(&mid_field, omega);
    let mut rows = Vec::with_capacity(js.len());
    for &j in js {
        let u = laminate(op, spec, j, grid)?;
        let pair = pairings(&u, omega);
        let pairing_error = pair.iter().zip(&mid_pair).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let l1_to_midpoint = u.sub(&mid_field)?.lq_norm(1.0);
        rows.push(LaminateRow { j, pairing_error, l1_to_midpoint, a_free_residual: a_free_residual(op, &u)? });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.pairing_error > 0.0)
        .map(|r| ((r.j as f64).ln(), -r.pairing_error.ln()))
        .collect();
    Ok(LaminateReport { midpoint: mid, rows, rate: slope(&pts) })
}

pub(crate) fn slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
