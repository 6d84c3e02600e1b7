//! Fourier multipliers on the torus: operators, Bessel and Riesz
//! potentials, the generalized Laplacian solver `(Id + Δ_B)u = f`, its
//! Neumann-perturbed variant, the A-representative `u_A = F^{-1}(π û)` and
//! the kernel `K_A` with `u_A = K_A ⋆ A u`.
//!
//! Frequencies are the integer lattice `ζ`; full symbols are evaluated at
//! `ζ` and carry `(2πi)^k`, i.e. `∂_j ↔ 2πiζ_j`.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use wavecone_core::cone;
use wavecone_core::linalg;
use wavecone_core::operator::full_factor;
use wavecone_core::{MultiIndex, OperatorSpec, DEFAULT_RANK_TOL};

use crate::grid::{Spectrum, TorusField, TorusGrid, C64};
use crate::{Error, Result};

/// What a multiplier does at `ζ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum ZeroMode {
    Identity,
    Zero,
    Custom(DMatrix<C64>),
}

type SymbolFn<'a> = Box<dyn Fn(&[f64]) -> DMatrix<C64> + 'a>;

/// `ζ ↦ m(ζ)`, a `dim_out × dim_in` complex matrix for `ζ ≠ 0`.
pub struct Multiplier<'a> {
    dim_in: usize,
    dim_out: usize,
    eval: SymbolFn<'a>,
    zero_mode: ZeroMode,
}

impl<'a> Multiplier<'a> {
    pub fn new(
        dim_in: usize,
        dim_out: usize,
        zero_mode: ZeroMode,
        eval: impl Fn(&[f64]) -> DMatrix<C64> + 'a,
    ) -> Result<Self> {
        match &zero_mode {
            ZeroMode::Identity if dim_in != dim_out => {
                return Err(Error::Precondition("identity zero mode needs a square multiplier".into()))
            }
            ZeroMode::Custom(m) if m.shape() != (dim_out, dim_in) => {
                return Err(Error::Precondition("custom zero-mode matrix has the wrong shape".into()))
            }
            _ => {}
        }
        Ok(Self { dim_in, dim_out, eval: Box::new(eval), zero_mode })
    }

    /// `m(ζ) id` for a scalar symbol.
    pub fn scalar(dim: usize, zero_mode: ZeroMode, f: impl Fn(&[f64]) -> C64 + 'a) -> Self {
        Self::new(dim, dim, zero_mode, move |z| DMatrix::identity(dim, dim) * f(z)).expect("square")
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn zero_mode_matrix(&self) -> DMatrix<C64> {
        match &self.zero_mode {
            ZeroMode::Identity => DMatrix::identity(self.dim_out, self.dim_in),
            ZeroMode::Zero => DMatrix::zeros(self.dim_out, self.dim_in),
            ZeroMode::Custom(m) => m.clone(),
        }
    }

    pub fn eval(&self, zeta: &[f64]) -> DMatrix<C64> {
        if zeta.iter().all(|&z| z == 0.0) {
            return self.zero_mode_matrix();
        }
        (self.eval)(zeta)
    }

    /// `ζ ↦ outer(ζ) · self(ζ)`, zero modes multiplied likewise.
    pub fn then(self, outer: Multiplier<'a>) -> Result<Multiplier<'a>> {
        if outer.dim_in != self.dim_out {
            return Err(Error::Precondition("multiplier dimensions do not chain".into()));
        }
        let zero = outer.zero_mode_matrix() * self.zero_mode_matrix();
        let (dim_in, dim_out) = (self.dim_in, outer.dim_out);
        Multiplier::new(dim_in, dim_out, ZeroMode::Custom(zero), move |z| (outer.eval)(z) * (self.eval)(z))
    }
}

/// Multiplies each Fourier coefficient by `m(ζ)`.
pub fn apply_multiplier_spectrum(s: &Spectrum, m: &Multiplier) -> Result<Spectrum> {
    if s.dim() != m.dim_in() {
        return Err(Error::Grid(format!("field has {} components, multiplier expects {}", s.dim(), m.dim_in())));
    }
    let grid = s.grid();
    let mut out = Spectrum::zeros(grid, m.dim_out());
    for idx in 0..grid.len() {
        let zeta = grid.freq(idx);
        let mat = m.eval(&zeta);
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteMultiplier(zeta));
        }
        let input = s.at(idx);
        for (i, slot) in out.at_mut(idx).iter_mut().enumerate() {
            *slot = (0..m.dim_in()).map(|j| mat[(i, j)] * input[j]).sum();
        }
    }
    Ok(out)
}

/// `T[f] = F^{-1}[m f̂]`.
pub fn apply_multiplier(f: &TorusField, m: &Multiplier) -> Result<TorusField> {
    Ok(apply_multiplier_spectrum(&f.spectrum(), m)?.to_field())
}

fn check_grid(op: &OperatorSpec, grid: TorusGrid) -> Result<()> {
    if op.d() != grid.d() {
        return Err(Error::Grid(format!("operator has d = {}, grid has d = {}", op.d(), grid.d())));
    }
    Ok(())
}

/// Full symbol `(2πi)^k Σ A_α ζ^α`.
pub fn full_symbol(op: &OperatorSpec, zeta: &[f64]) -> DMatrix<C64> {
    let f = full_factor(op.order());
    op.reduced_symbol(zeta).expect("frequency matches operator").map(|v| f * v)
}

pub fn operator_multiplier(op: &OperatorSpec) -> Multiplier<'_> {
    Multiplier::new(op.dim_v(), op.dim_w(), ZeroMode::Zero, move |z| full_symbol(op, z)).expect("zero mode")
}

/// `A u` with derivatives taken spectrally.
pub fn apply_operator(op: &OperatorSpec, f: &TorusField) -> Result<TorusField> {
    check_grid(op, f.grid())?;
    apply_multiplier(f, &operator_multiplier(op))
}

/// `∂^α f`, componentwise.
pub fn derivative(f: &TorusField, alpha: &MultiIndex) -> Result<TorusField> {
    if alpha.dim() != f.grid().d() {
        return Err(Error::Grid("multi-index dimension differs from grid".into()));
    }
    let k = alpha.modulus();
    let m = Multiplier::scalar(f.dim(), ZeroMode::Zero, |z| full_factor(k) * alpha.monomial(z));
    apply_multiplier(f, &m)
}

fn two_pi_norm_sq(zeta: &[f64]) -> f64 {
    zeta.iter().map(|z| (TAU * z).powi(2)).sum()
}

/// `(1 + |2πζ|²)^{s/2}`; identity at the zero mode.
pub fn bessel_multiplier<'a>(dim: usize, s: f64) -> Multiplier<'a> {
    Multiplier::scalar(dim, ZeroMode::Identity, move |z| C64::new((1.0 + two_pi_norm_sq(z)).powf(s / 2.0), 0.0))
}

/// Bessel-potential norm `‖F^{-1}[(1 + |2πζ|²)^{s/2} f̂]‖_{L^q}`; negative `s`
/// gives the negative-order proxy.
pub fn bessel_norm(f: &TorusField, s: f64, q: f64) -> Result<f64> {
    bessel_norm_where(f, s, q, |_| true)
}

/// As [`bessel_norm`], with the `L^q` quadrature restricted to `keep`.
pub fn bessel_norm_where(f: &TorusField, s: f64, q: f64, keep: impl Fn(&[f64]) -> bool) -> Result<f64> {
    if !(q > 1.0 && q.is_finite()) || !s.is_finite() {
        return Err(Error::Precondition(format!("Bessel norm needs 1 < q < ∞ and finite s (got q = {q}, s = {s})")));
    }
    let g = if s == 0.0 { f.clone() } else { apply_multiplier(f, &bessel_multiplier(f.dim(), s))? };
    Ok(g.lq_norm_where(q, keep))
}

/// `I_s f = F^{-1}[|2πζ|^{-s} f̂]`, with the mean removed.
pub fn riesz_potential(f: &TorusField, s: f64) -> Result<TorusField> {
    let d = f.grid().d() as f64;
    if !(s > 0.0 && s < d) {
        return Err(Error::Precondition(format!("Riesz order s = {s} must lie in (0, {d})")));
    }
    let m = Multiplier::scalar(f.dim(), ZeroMode::Zero, move |z| C64::new(two_pi_norm_sq(z).powf(-s / 2.0), 0.0));
    apply_multiplier(f, &m)
}

/// Full symbol of `Id + Δ_B`: `I + B(ζ)^* B(ζ) = I + (2π)^{2k} B_redᵀ B_red`.
fn laplace_plus_identity(op: &OperatorSpec, zeta: &[f64]) -> DMatrix<f64> {
    let b = op.reduced_symbol(zeta).expect("frequency matches operator");
    let n = op.dim_v();
    DMatrix::identity(n, n) + b.transpose() * b * TAU.powi(2 * op.order() as i32)
}

/// `(Id + Δ_B) u`.
pub fn apply_laplace_plus_identity(op: &OperatorSpec, u: &TorusField) -> Result<TorusField> {
    check_grid(op, u.grid())?;
    let m = Multiplier::new(op.dim_v(), op.dim_v(), ZeroMode::Identity, |z| {
        laplace_plus_identity(op, z).map(|v| C64::new(v, 0.0))
    })?;
    apply_multiplier(u, &m)
}

/// Solves `(Id + Δ_B) u = f` mode by mode with `(I + B(ζ)^*B(ζ))^{-1}`.
pub fn solve_laplace(op: &OperatorSpec, f: &TorusField) -> Result<TorusField> {
    check_grid(op, f.grid())?;
    if f.dim() != op.dim_v() {
        return Err(Error::Grid(format!("right-hand side has {} components, operator domain {}", f.dim(), op.dim_v())));
    }
    let m = Multiplier::new(op.dim_v(), op.dim_v(), ZeroMode::Identity, |z| {
        // I + PSD is symmetric positive definite.
        let inv = laplace_plus_identity(op, z).cholesky().expect("I + BᵀB is positive definite").inverse();
        inv.map(|v| C64::new(v, 0.0))
    })?;
    apply_multiplier(f, &m)
}

/// `‖(Id + Δ_B)u − f‖₂ / ‖f‖₂`.
pub fn laplace_residual(op: &OperatorSpec, u: &TorusField, f: &TorusField) -> Result<f64> {
    let r = apply_laplace_plus_identity(op, u)?.sub(f)?;
    Ok(r.l2_norm() / f.l2_norm().max(f64::MIN_POSITIVE))
}

/// Variable-coefficient perturbation `R u = Σ_{|α|=2k} R_α(x) ∂^α u`.
/// Each coefficient field stores a `dimV × dimV` real matrix per point,
/// row-major.
#[derive(Clone, Debug)]
pub struct Perturbation {
    dim: usize,
    terms: Vec<(MultiIndex, TorusField)>,
}

impl Perturbation {
    pub fn new(op: &OperatorSpec, terms: Vec<(MultiIndex, TorusField)>) -> Result<Self> {
        let n = op.dim_v();
        for (alpha, field) in &terms {
            if alpha.dim() != op.d() || alpha.modulus() != 2 * op.order() {
                return Err(Error::Precondition(format!(
                    "perturbation terms must have order 2k = {}, got {alpha:?}",
                    2 * op.order()
                )));
            }
            if field.dim() != n * n || field.grid().d() != op.d() {
                return Err(Error::Grid("perturbation coefficient must be a dimV x dimV matrix field".into()));
            }
        }
        Ok(Self { dim: n, terms })
    }

    pub fn zero(op: &OperatorSpec) -> Self {
        Self { dim: op.dim_v(), terms: Vec::new() }
    }

    /// Constant coefficients `R_α = c_α M`.
    pub fn constant(op: &OperatorSpec, grid: TorusGrid, coeffs: &[(MultiIndex, DMatrix<f64>)]) -> Result<Self> {
        let terms = coeffs
            .iter()
            .map(|(a, m)| {
                let v: Vec<f64> = m.transpose().iter().copied().collect();
                TorusField::from_real_fn(grid, m.len(), |_| v.clone()).map(|f| (a.clone(), f))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(op, terms)
    }

    /// `sup_α sup_x ‖R_α(x)‖` (spectral norm).
    pub fn sup_norm(&self) -> f64 {
        let n = self.dim;
        let mut best: f64 = 0.0;
        for (_, field) in &self.terms {
            for idx in 0..field.grid().len() {
                let m = DMatrix::from_row_iterator(n, n, field.at(idx).iter().map(|z| z.re));
                best = best.max(linalg::svd_full(&m).0[0]);
            }
        }
        best
    }

    pub fn apply(&self, u: &TorusField) -> Result<TorusField> {
        let n = self.dim;
        let mut out = TorusField::zeros(u.grid(), n);
        for (alpha, coeff) in &self.terms {
            let du = derivative(u, alpha)?;
            for idx in 0..u.grid().len() {
                let r = coeff.at(idx);
                let src: Vec<C64> = du.at(idx).to_vec();
                for (i, slot) in out.at_mut(idx).iter_mut().enumerate() {
                    for (j, s) in src.iter().enumerate() {
                        *slot += s * r[i * n + j].re;
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct PerturbedSolution {
    pub u: TorusField,
    pub iterations: usize,
    /// `‖(Id + Δ_B − R)u − f‖₂ / ‖f‖₂`.
    pub residual: f64,
    /// Ratio of the last two successive differences; estimates the
    /// contraction factor of `u ↦ (Id + Δ_B)^{-1}(f + R u)`.
    pub contraction: f64,
    pub sup_norm: f64,
    /// Relative `H^{2k}` change per iteration.
    pub changes: Vec<f64>,
}

/// Fixed point of `u ↦ (Id + Δ_B)^{-1}(f + R u)` starting from
/// `u_0 = (Id + Δ_B)^{-1} f`. Stops once the relative `H^{2k}` change of
/// successive iterates is at most `tol`; an iterate whose `L²` norm exceeds
/// twice that of `u_0` is reported as divergence.
pub fn solve_perturbed(
    op: &OperatorSpec,
    r: &Perturbation,
    f: &TorusField,
    tol: f64,
    max_iter: usize,
) -> Result<PerturbedSolution> {
    let s = 2.0 * op.order() as f64;
    let u0 = solve_laplace(op, f)?;
    let base = u0.l2_norm();
    // u_0 = T(0), so its own norm is the zeroth successive difference.
    let mut diffs: Vec<f64> = vec![bessel_norm(&u0, s, 2.0)?];
    let mut u = u0;
    let mut changes = Vec::new();
    let contraction = |d: &[f64]| match d {
        [.., a, b] if *a > 0.0 => b / a,
        _ => 0.0,
    };
    for it in 1..=max_iter {
        let next = solve_laplace(op, &f.add(&r.apply(&u)?)?)?;
        let diff = bessel_norm(&next.sub(&u)?, s, 2.0)?;
        let scale = bessel_norm(&next, s, 2.0)?.max(f64::MIN_POSITIVE);
        diffs.push(diff);
        changes.push(diff / scale);
        u = next;
        if u.l2_norm() > 2.0 * base.max(f64::MIN_POSITIVE) {
            return Err(Error::Diverged { iterations: it, contraction: contraction(&diffs) });
        }
        if diff <= tol * scale {
            let lhs = apply_laplace_plus_identity(op, &u)?.sub(&r.apply(&u)?)?;
            let residual = lhs.sub(f)?.l2_norm() / f.l2_norm().max(f64::MIN_POSITIVE);
            return Ok(PerturbedSolution {
                u,
                iterations: it,
                residual,
                contraction: contraction(&diffs),
                sup_norm: r.sup_norm(),
                changes,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        last_change: changes.last().copied().unwrap_or(f64::NAN),
        contraction: contraction(&diffs),
    })
}

/// `π(ζ) = A(ζ)†A(ζ)`, identity at `ζ = 0`.
pub fn projection_multiplier(op: &OperatorSpec, rank_tol: f64) -> Multiplier<'_> {
    Multiplier::new(op.dim_v(), op.dim_v(), ZeroMode::Identity, move |z| {
        cone::projection_symbol(op, z, rank_tol).expect("nonzero frequency").map(|v| C64::new(v, 0.0))
    })
    .expect("square")
}

/// `ζ^α |ζ|^{k−|α|} A_red(ζ)†`: a 0-homogeneous companion of the
/// pseudoinverse symbol (real, `dimV × dimW`).
pub fn pseudoinverse_multiplier<'a>(op: &'a OperatorSpec, alpha: &'a MultiIndex, rank_tol: f64) -> Multiplier<'a> {
    let k = op.order() as i32;
    Multiplier::new(op.dim_w(), op.dim_v(), ZeroMode::Zero, move |z| {
        let a = op.reduced_symbol(z).expect("frequency matches operator");
        let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
        let w = alpha.monomial(z) * norm.powi(k - alpha.modulus() as i32);
        (linalg::pseudo_inverse(&a, rank_tol) * w).map(|v| C64::new(v, 0.0))
    })
    .expect("zero mode")
}

/// `u_A = F^{-1}(π û)`; the mean passes through unchanged.
pub fn a_representative(op: &OperatorSpec, u: &TorusField) -> Result<TorusField> {
    check_grid(op, u.grid())?;
    apply_multiplier(u, &projection_multiplier(op, DEFAULT_RANK_TOL))
}

/// Smooth radial cutoff: 1 for `r ≤ R/2`, `cos²` roll-off, 0 from `r = R`.
pub fn radial_cutoff(r: f64, radius: f64) -> f64 {
    if r <= radius / 2.0 {
        1.0
    } else if r >= radius {
        0.0
    } else {
        let t = (r - radius / 2.0) / (radius / 2.0);
        (PI * t / 2.0).cos().powi(2)
    }
}

/// Periodic samples of `K_A = F^{-1}[A(ζ)† χ(|ζ|)]` (`χ` a radial cutoff):
/// a `dimV × dimW` matrix per point, row-major.
#[derive(Clone, Debug)]
pub struct KernelSample {
    pub field: TorusField,
    pub dim_v: usize,
    pub dim_w: usize,
    pub order: u32,
    pub cutoff: f64,
}

impl KernelSample {
    /// Matrix at the lattice point `x = offset / n`, offsets taken mod `n`.
    pub fn at_offset(&self, offset: &[i64]) -> DMatrix<C64> {
        let idx = self.field.grid().index_wrapped(offset);
        DMatrix::from_row_slice(self.dim_v, self.dim_w, self.field.at(idx))
    }

    pub fn norm_at_offset(&self, offset: &[i64]) -> f64 {
        self.at_offset(offset).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(K ⋆ g)(x) = ∫ K(x − y) g(y) dy` by the discrete periodic convolution.
    pub fn convolve(&self, g: &TorusField) -> Result<TorusField> {
        if g.grid() != self.field.grid() || g.dim() != self.dim_w {
            return Err(Error::Grid("convolution operand does not match the kernel grid".into()));
        }
        let ks = self.field.spectrum();
        let gs = g.spectrum();
        let grid = g.grid();
        let mut out = Spectrum::zeros(grid, self.dim_v);
        for idx in 0..grid.len() {
            let k = ks.at(idx);
            let gv = gs.at(idx);
            for (i, slot) in out.at_mut(idx).iter_mut().enumerate() {
                *slot = (0..self.dim_w).map(|j| k[i * self.dim_w + j] * gv[j]).sum();
            }
        }
        Ok(out.to_field())
    }
}

/// Samples `K_A` on an `n = box_n` periodic grid with cutoff radius
/// `cutoff` (in frequency units, at most `box_n/2`). Fails if the rank of
/// `A(ζ)` varies over the lattice.
pub fn kernel_eval(op: &OperatorSpec, box_n: usize, cutoff: f64) -> Result<KernelSample> {
    let grid = TorusGrid::new(op.d(), box_n)?;
    if !(cutoff > 0.0 && cutoff <= box_n as f64 / 2.0) {
        return Err(Error::Precondition(format!("cutoff {cutoff} must lie in (0, n/2]")));
    }
    let (dim_v, dim_w) = (op.dim_v(), op.dim_w());
    let inv = full_factor(op.order()).inv();
    let mut spec = Spectrum::zeros(grid, dim_v * dim_w);
    let mut rank: Option<usize> = None;
    for idx in 1..grid.len() {
        let zeta = grid.freq(idx);
        let a = op.reduced_symbol(&zeta)?;
        let r = linalg::rank(&a, DEFAULT_RANK_TOL);
        match rank {
            None => rank = Some(r),
            Some(r0) if r0 != r => {
                return Err(Error::Precondition(format!(
                    "symbol rank varies on the lattice ({r0} vs {r} at ζ = {zeta:?}); K_A needs constant rank"
                )))
            }
            _ => {}
        }
        let norm = zeta.iter().map(|x| x * x).sum::<f64>().sqrt();
        let chi = radial_cutoff(norm, cutoff);
        if chi == 0.0 {
            continue;
        }
        let p = linalg::pseudo_inverse(&a, DEFAULT_RANK_TOL);
        for (slot, v) in spec.at_mut(idx).iter_mut().zip(p.transpose().iter()) {
            *slot = inv * (v * chi);
        }
    }
    Ok(KernelSample { field: spec.to_field(), dim_v, dim_w, order: op.order(), cutoff })
}

/// `|K(2x)| / |K(x)|` at lattice offsets `x`, against the homogeneity
/// prediction `2^{k−d}`. `None` when `k ≥ d`, where `K_A` has logarithmic
/// or polynomial growth and no pure-power check applies.
pub fn kernel_homogeneity(kernel: &KernelSample, offsets: &[Vec<i64>]) -> Option<Vec<(f64, f64)>> {
    let d = kernel.field.grid().d() as i32;
    let k = kernel.order as i32;
    if k >= d {
        return None;
    }
    let expected = 2f64.powi(k - d);
    Some(
        offsets
            .iter()
            .map(|x| {
                let x2: Vec<i64> = x.iter().map(|v| 2 * v).collect();
                (kernel.norm_at_offset(&x2) / kernel.norm_at_offset(x), expected)
            })
            .collect(),
    )
}
