//! Matrices of polynomials: exact determinants, adjugates, generalized
//! Laplacian symbols and the adjugate annihilator of an elliptic operator.
//!
//! Everything here works with reduced symbols. Since `|(2πi)^k|² = (2π)^{2k}`
//! is a positive real scalar, the Hermitian adjoint `B(ξ)^*` reduces to the
//! plain transpose at the polynomial level and `B*B` carries no scalar
//! factor beyond a positive constant.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_traits::One;

use crate::cone;
use crate::multi_index::MultiIndex;
use crate::operator::{OperatorSpec, QMatrix};
use crate::poly::Poly;
use crate::rational::Rational;
use crate::sphere;
use crate::{Error, Result, DEFAULT_RANK_TOL};

/// Largest matrix handled by [`PolyMatrix::det`] and [`PolyMatrix::adjugate`].
pub const MAX_DET_SIZE: usize = 8;
/// Largest `dimU` accepted by [`annihilator`].
pub const MAX_ANNIHILATOR_DIM: usize = 4;
/// Largest symbol degree `2k·dimU` accepted by [`annihilator`].
pub const MAX_ANNIHILATOR_DEGREE: u32 = 24;
/// Largest symbol degree `2^r·k` accepted by [`iterated_laplacian`].
pub const MAX_ITERATED_DEGREE: u32 = 64;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    nvars: usize,
    entries: Vec<Poly>,
    homogeneity: Option<u32>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        Self {
            rows,
            cols,
            nvars,
            entries: (0..rows * cols).map(|_| Poly::zero(nvars)).collect(),
            homogeneity: None,
        }
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        let mut m = Self::zeros(n, n, nvars);
        for i in 0..n {
            m.entries[i * n + i] = Poly::one(nvars);
        }
        m.homogeneity = Some(0);
        m
    }

    pub fn from_fn(rows: usize, cols: usize, nvars: usize, mut f: impl FnMut(usize, usize) -> Poly) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let p = f(i, j);
                debug_assert_eq!(p.nvars(), nvars);
                entries.push(p);
            }
        }
        let mut m = Self { rows, cols, nvars, entries, homogeneity: None };
        m.homogeneity = m.audit_degree();
        m
    }

    /// Reduced symbol `Σ A_α ξ^α` of an operator as a polynomial matrix.
    pub fn from_operator(op: &OperatorSpec) -> Self {
        let d = op.d();
        let mut m = Self::zeros(op.dim_w(), op.dim_v(), d);
        for (alpha, a) in op.coeffs() {
            for i in 0..a.rows() {
                for j in 0..a.cols() {
                    m.entries[i * m.cols + j].add_term(alpha.clone(), a.get(i, j));
                }
            }
        }
        m.homogeneity = Some(op.order());
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Declared common degree of the nonzero entries.
    pub fn homogeneity(&self) -> Option<u32> {
        self.homogeneity
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Poly)> {
        self.entries.iter().enumerate().map(move |(n, p)| (n / self.cols, n % self.cols, p))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    /// Recomputes the common degree term by term: `Some(deg)` when every
    /// nonzero entry is homogeneous of degree `deg`.
    pub fn audit_degree(&self) -> Option<u32> {
        let mut deg = None;
        for p in self.entries.iter().filter(|p| !p.is_zero()) {
            let h = p.homogeneous_degree()?;
            match deg {
                None => deg = Some(h),
                Some(d) if d == h => {}
                Some(_) => return None,
            }
        }
        deg
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.nvars);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t.homogeneity = self.homogeneity;
        t
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols, self.nvars);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = Poly::zero(self.nvars);
                for l in 0..self.cols {
                    let a = self.get(i, l);
                    let b = rhs.get(l, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.entries[i * rhs.cols + j] = acc;
            }
        }
        out.homogeneity = match (self.homogeneity, rhs.homogeneity) {
            (Some(a), Some(b)) => Some(a + b),
            _ => out.audit_degree(),
        };
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::DimensionMismatch("matrix shapes differ".into()));
        }
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect();
        let mut out = Self { rows: self.rows, cols: self.cols, nvars: self.nvars, entries, homogeneity: None };
        out.homogeneity = out.audit_degree();
        Ok(out)
    }

    /// Multiplies every entry by the polynomial `p`.
    pub fn scale_poly(&self, p: &Poly) -> Self {
        let entries = self.entries.iter().map(|e| e * p).collect();
        let mut out = Self { rows: self.rows, cols: self.cols, nvars: self.nvars, entries, homogeneity: None };
        out.homogeneity = out.audit_degree();
        out
    }

    pub fn eval(&self, xi: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval(xi))
    }

    fn check_square(&self) -> Result<()> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        if self.rows > MAX_DET_SIZE {
            return Err(Error::BudgetExceeded(format!(
                "determinant of a {n}x{n} polynomial matrix (limit {MAX_DET_SIZE}); \
                 cofactor expansion grows factorially in the size",
                n = self.rows
            )));
        }
        Ok(())
    }

    /// Exact determinant. Sizes up to 4 use cofactor expansion, larger ones
    /// fraction-free Bareiss elimination.
    pub fn det(&self) -> Result<Poly> {
        self.check_square()?;
        if self.rows <= 4 {
            Ok(det_expansion(&self.entries, self.rows, self.nvars))
        } else {
            Ok(det_bareiss(&self.entries, self.rows, self.nvars))
        }
    }

    /// Exact determinant by fraction-free Bareiss elimination at any size.
    pub fn det_bareiss(&self) -> Result<Poly> {
        self.check_square()?;
        Ok(det_bareiss(&self.entries, self.rows, self.nvars))
    }

    /// Transpose of the cofactor matrix, so that `adj(M)·M = det(M)·I`.
    pub fn adjugate(&self) -> Result<Self> {
        self.check_square()?;
        let n = self.rows;
        if n == 1 {
            return Ok(Self::identity(1, self.nvars));
        }
        let mut adj = Self::zeros(n, n, self.nvars);
        for i in 0..n {
            for j in 0..n {
                let minor: Vec<Poly> = (0..n)
                    .filter(|&r| r != i)
                    .flat_map(|r| (0..n).filter(move |&c| c != j).map(move |c| (r, c)))
                    .map(|(r, c)| self.get(r, c).clone())
                    .collect();
                let m = if n - 1 <= 4 {
                    det_expansion(&minor, n - 1, self.nvars)
                } else {
                    det_bareiss(&minor, n - 1, self.nvars)
                };
                adj.entries[j * n + i] = if (i + j) % 2 == 0 { m } else { -&m };
            }
        }
        adj.homogeneity = adj.audit_degree();
        Ok(adj)
    }

    /// Rebuilds an operator from a homogeneous symbol of degree `order`.
    pub fn to_operator(&self, order: u32) -> Result<OperatorSpec> {
        let mut coeffs: alloc::collections::BTreeMap<MultiIndex, QMatrix> = Default::default();
        for i in 0..self.rows {
            for j in 0..self.cols {
                for (alpha, c) in self.get(i, j).terms() {
                    if alpha.modulus() != order {
                        return Err(Error::InvalidOperator(format!(
                            "symbol term {:?} has degree {}, expected {}",
                            alpha,
                            alpha.modulus(),
                            order
                        )));
                    }
                    coeffs
                        .entry(alpha.clone())
                        .or_insert_with(|| QMatrix::zeros(self.rows, self.cols))
                        .set(i, j, c.clone());
                }
            }
        }
        OperatorSpec::new_allow_zero(self.nvars, order, self.cols, self.rows, coeffs)
    }
}

fn det_expansion(m: &[Poly], n: usize, nvars: usize) -> Poly {
    match n {
        0 => Poly::one(nvars),
        1 => m[0].clone(),
        2 => &(&m[0] * &m[3]) - &(&m[1] * &m[2]),
        _ => {
            let mut acc = Poly::zero(nvars);
            for j in 0..n {
                let a = &m[j];
                if a.is_zero() {
                    continue;
                }
                let minor: Vec<Poly> = (1..n)
                    .flat_map(|r| (0..n).filter(move |&c| c != j).map(move |c| m[r * n + c].clone()))
                    .collect();
                let term = a * &det_expansion(&minor, n - 1, nvars);
                acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

fn det_bareiss(m: &[Poly], n: usize, nvars: usize) -> Poly {
    if n == 0 {
        return Poly::one(nvars);
    }
    let mut a: Vec<Poly> = m.to_vec();
    let mut prev = Poly::one(nvars);
    let mut negate = false;
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            match (k + 1..n).find(|&r| !a[r * n + k].is_zero()) {
                Some(r) => {
                    for c in 0..n {
                        a.swap(k * n + c, r * n + c);
                    }
                    negate = !negate;
                }
                None => return Poly::zero(nvars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k * n + k] * &a[i * n + j]) - &(&a[i * n + k] * &a[k * n + j]);
                a[i * n + j] = num.exact_div(&prev).expect("Bareiss step divides exactly");
            }
            a[i * n + k] = Poly::zero(nvars);
        }
        prev = a[k * n + k].clone();
    }
    let det = a[n * n - 1].clone();
    if negate {
        -&det
    } else {
        det
    }
}

/// Reduced symbol of `Δ_B = B*B`: the polynomial matrix `B(ξ)ᵀ B(ξ)`,
/// homogeneous of degree `2k`.
pub fn laplacian_symbol(op_b: &OperatorSpec) -> PolyMatrix {
    let b = PolyMatrix::from_operator(op_b);
    b.transpose().mul(&b).expect("shapes agree")
}

/// Output of [`annihilator`].
#[derive(Clone, Debug)]
pub struct Annihilator {
    pub op: OperatorSpec,
    pub symbol: PolyMatrix,
    /// Degree `2k·dimU` of the symbol, equal to the order of `op`.
    pub order: u32,
    /// `symbol · B(ξ)` is the zero polynomial matrix.
    pub symbolic_zero: bool,
}

/// Adjugate annihilator of an elliptic operator `B: U → V`:
/// `A(ξ) = det[BᵀB] id_V − B adj[BᵀB] Bᵀ`, with `A(ξ)B(ξ) ≡ 0` and
/// `im B(ξ) = ker A(ξ)` for `ξ ≠ 0`.
pub fn annihilator(op_b: &OperatorSpec) -> Result<Annihilator> {
    let dim_u = op_b.dim_v();
    let order = 2 * op_b.order() * dim_u as u32;
    if dim_u > MAX_ANNIHILATOR_DIM {
        return Err(Error::BudgetExceeded(format!(
            "annihilator needs det/adj of a {dim_u}x{dim_u} polynomial matrix (limit {MAX_ANNIHILATOR_DIM})"
        )));
    }
    if order > MAX_ANNIHILATOR_DEGREE {
        return Err(Error::BudgetExceeded(format!(
            "annihilator symbol degree 2k·dimU = {order} exceeds {MAX_ANNIHILATOR_DEGREE}"
        )));
    }
    ensure_elliptic(op_b)?;

    let nvars = op_b.d();
    let b = PolyMatrix::from_operator(op_b);
    let bt = b.transpose();
    let q = bt.mul(&b)?;
    let det = q.det()?;
    let adj = q.adjugate()?;
    let dim_v = op_b.dim_w();
    let left = PolyMatrix::identity(dim_v, nvars).scale_poly(&det);
    let right = b.mul(&adj)?.mul(&bt)?;
    let mut symbol = left.sub(&right)?;
    symbol.homogeneity = symbol.audit_degree();
    let symbolic_zero = symbol.mul(&b)?.is_zero();
    let op = symbol.to_operator(order)?;
    Ok(Annihilator { op, symbol, order, symbolic_zero })
}

fn ensure_elliptic(op: &OperatorSpec) -> Result<()> {
    let sample = sphere::sphere_sample(op.d(), (4 * op.d()).max(32), 0)?;
    for xi in sample.points() {
        let kernel = cone::kernel_basis(op, xi, DEFAULT_RANK_TOL)?;
        if kernel.ncols() > 0 {
            return Err(Error::NotElliptic(format!(
                "symbol has a {}-dimensional kernel at ξ = {:?}; the adjugate construction \
                 needs B(ξ)*B(ξ) invertible for every ξ ≠ 0",
                kernel.ncols(),
                xi
            )));
        }
    }
    Ok(())
}

/// `[A(ξ)ᵀA(ξ)]^{2^{r-1}}`, the symbol of `Δ_A^r`, homogeneous of degree `2^r k`.
pub fn iterated_laplacian(op_a: &OperatorSpec, r: u32) -> Result<PolyMatrix> {
    if r == 0 {
        return Err(Error::InvalidOperator("iteration exponent r must be positive".into()));
    }
    let degree = 1u64
        .checked_shl(r)
        .map(|p| p * u64::from(op_a.order()))
        .filter(|&deg| deg <= u64::from(MAX_ITERATED_DEGREE))
        .ok_or_else(|| {
            Error::BudgetExceeded(format!(
                "iterated Laplacian of order 2^{r}·{} exceeds {MAX_ITERATED_DEGREE}",
                op_a.order()
            ))
        })?;
    let mut p = laplacian_symbol(op_a);
    for _ in 1..r {
        p = p.mul(&p)?;
    }
    debug_assert_eq!(p.homogeneity(), Some(degree as u32));
    Ok(p)
}

/// Smallest `r ≥ 1` with `2^r k > d`, i.e. `r > log₂(d/k)`.
pub fn minimal_iteration_exponent(k: u32, d: u32) -> u32 {
    let mut r = 1;
    while (1u64 << r) * u64::from(k) <= u64::from(d) {
        r += 1;
    }
    r
}

/// `ξ ↦ |ξ|²` in `nvars` variables.
pub fn squared_norm(nvars: usize) -> Poly {
    let mut p = Poly::zero(nvars);
    for i in 0..nvars {
        p.add_term(MultiIndex::axis(nvars, i, 2), &Rational::one());
    }
    p
}

/// Polynomial matrix with integer entries given as polynomials of degree
/// zero; helper for tests and callers building constant matrices.
pub fn constant_matrix(rows: usize, cols: usize, nvars: usize, values: &[i64]) -> PolyMatrix {
    PolyMatrix::from_fn(rows, cols, nvars, |i, j| {
        let v = values[i * cols + j];
        if v == 0 {
            Poly::zero(nvars)
        } else {
            Poly::constant(nvars, Rational::from_integer(v.into()))
        }
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{builtin, Builtin};
    use crate::rational::int;
    use alloc::vec;

    fn x(i: usize) -> Poly {
        Poly::var(2, i)
    }

    #[test]
    fn det_of_scaled_identity() {
        let n2 = squared_norm(2);
        let m = PolyMatrix::identity(2, 2).scale_poly(&n2);
        assert_eq!(m.det().unwrap(), &n2 * &n2);
    }

    #[test]
    fn det_zero_row() {
        let m = PolyMatrix::from_fn(3, 3, 2, |i, j| if i == 1 { Poly::zero(2) } else { (&x(0) + &Poly::constant(2, int((i + j) as i64))).clone() });
        assert!(m.det().unwrap().is_zero());
        assert!(m.det_bareiss().unwrap().is_zero());
    }

    #[test]
    fn det_errors() {
        assert!(matches!(PolyMatrix::zeros(2, 3, 2).det(), Err(Error::NotSquare { .. })));
        assert!(matches!(PolyMatrix::zeros(9, 9, 2).det(), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn adjugate_small_cases() {
        let p = &x(0) * &x(1);
        let one = PolyMatrix::from_fn(1, 1, 2, |_, _| p.clone());
        assert_eq!(one.adjugate().unwrap(), PolyMatrix::identity(1, 2));
        let q = &x(0) + &x(1);
        let diag = PolyMatrix::from_fn(2, 2, 2, |i, j| match (i, j) {
            (0, 0) => p.clone(),
            (1, 1) => q.clone(),
            _ => Poly::zero(2),
        });
        let adj = diag.adjugate().unwrap();
        assert_eq!(adj.get(0, 0), &q);
        assert_eq!(adj.get(1, 1), &p);
        assert!(adj.get(0, 1).is_zero() && adj.get(1, 0).is_zero());
    }

    #[test]
    fn laplacian_of_gradient_is_norm_squared() {
        let g = builtin(Builtin::Gradient, 3, 1, None).unwrap();
        let l = laplacian_symbol(&g);
        assert_eq!((l.rows(), l.cols()), (1, 1));
        assert_eq!(l.get(0, 0), &squared_norm(3));
        assert_eq!(l.homogeneity(), Some(2));
    }

    #[test]
    fn gradient_annihilator_is_curl_like() {
        let g = builtin(Builtin::Gradient, 2, 1, None).unwrap();
        let ann = annihilator(&g).unwrap();
        assert!(ann.symbolic_zero);
        assert_eq!(ann.order, 2);
        let s = &ann.symbol;
        assert_eq!(s.get(0, 0), &(&x(1) * &x(1)));
        assert_eq!(s.get(0, 1), &-&(&x(0) * &x(1)));
        assert_eq!(s.get(1, 0), &-&(&x(0) * &x(1)));
        assert_eq!(s.get(1, 1), &(&x(0) * &x(0)));
        let composed = OperatorSpec::compose(&ann.op, &g).unwrap();
        assert!(composed.is_zero());
    }

    #[test]
    fn annihilator_rejects_non_elliptic() {
        let curl = builtin(Builtin::Curl, 2, 1, None).unwrap();
        assert!(matches!(annihilator(&curl), Err(Error::NotElliptic(_))));
        let big = builtin(Builtin::Gradient, 2, 5, None).unwrap();
        assert!(matches!(annihilator(&big), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn minimal_r() {
        assert_eq!(minimal_iteration_exponent(1, 4), 3);
        assert_eq!(minimal_iteration_exponent(1, 2), 2);
        assert_eq!(minimal_iteration_exponent(2, 3), 1);
        assert_eq!(minimal_iteration_exponent(3, 2), 1);
    }

    #[test]
    fn iterated_laplacian_base_case() {
        let curl = builtin(Builtin::Curl, 2, 1, None).unwrap();
        assert_eq!(iterated_laplacian(&curl, 1).unwrap(), laplacian_symbol(&curl));
        let it = iterated_laplacian(&curl, 2).unwrap();
        assert_eq!(it.homogeneity(), Some(4));
        assert!(iterated_laplacian(&curl, 0).is_err());
        assert!(iterated_laplacian(&curl, 7).is_err());
    }

    #[test]
    fn constant_matrix_helper() {
        let m = constant_matrix(2, 2, 1, &[1, 2, 3, 4]);
        assert_eq!(m.det().unwrap(), Poly::constant(1, int(-2)));
        let _ = vec![0u8];
    }
}
