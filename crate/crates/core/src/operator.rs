//! Homogeneous constant-coefficient operators `A = Σ_{|α|=k} A_α ∂^α`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt::Write;

use nalgebra::{Complex, DMatrix};
use num_traits::{One, Zero};

use crate::multi_index::MultiIndex;
use crate::rational::{self, Rational};
use crate::{Error, Result};

/// Dense matrix of exact rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: (0..rows * cols).map(|_| Rational::zero()).collect() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged or empty coefficient matrix".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: usize, cols: usize, values: &[i64]) -> Self {
        assert_eq!(values.len(), rows * cols);
        Self { rows, cols, data: values.iter().map(|&v| rational::int(v)).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: &Rational) {
        self.data[i * self.cols + j] += v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(l, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add_assign(&mut self, rhs: &Self) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * c).collect() }
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| rational::to_f64(self.get(i, j)))
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

impl core::fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str("; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        f.write_str("]")
    }
}

/// A homogeneous operator of order `k` from `V = R^dim_v` to `W = R^dim_w`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OperatorSpec {
    d: usize,
    order: u32,
    dim_v: usize,
    dim_w: usize,
    coeffs: BTreeMap<MultiIndex, QMatrix>,
}

/// Numerical value of a symbol at one frequency.
#[derive(Clone, Debug)]
pub struct SymbolValue {
    pub freq: Vec<f64>,
    pub matrix: DMatrix<Complex<f64>>,
    /// `true` when the `(2πi)^k` factor is stripped.
    pub reduced: bool,
}

/// `(2πi)^k`.
pub fn full_factor(k: u32) -> Complex<f64> {
    let mut z = Complex::new(1.0, 0.0);
    for _ in 0..k {
        z *= Complex::new(0.0, 2.0 * PI);
    }
    z
}

impl OperatorSpec {
    /// Validates and builds an operator. Repeated multi-indices are summed
    /// and zero coefficient matrices are dropped; the result must be nonzero.
    pub fn new(
        d: usize,
        order: u32,
        dim_v: usize,
        dim_w: usize,
        coeffs: impl IntoIterator<Item = (MultiIndex, QMatrix)>,
    ) -> Result<Self> {
        let op = Self::new_allow_zero(d, order, dim_v, dim_w, coeffs)?;
        if op.is_zero() {
            return Err(Error::InvalidOperator("all coefficients are zero".into()));
        }
        Ok(op)
    }

    /// Like [`OperatorSpec::new`] but accepts the zero operator, which arises
    /// from compositions such as `A ∘ B` with `A` an annihilator of `B`.
    pub fn new_allow_zero(
        d: usize,
        order: u32,
        dim_v: usize,
        dim_w: usize,
        coeffs: impl IntoIterator<Item = (MultiIndex, QMatrix)>,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidOperator("space dimension d must be >= 1".into()));
        }
        if order == 0 {
            return Err(Error::InvalidOperator("order k must be a positive integer".into()));
        }
        if dim_v == 0 || dim_w == 0 {
            return Err(Error::InvalidOperator("dimV and dimW must be positive".into()));
        }
        let mut map: BTreeMap<MultiIndex, QMatrix> = BTreeMap::new();
        for (alpha, m) in coeffs {
            if alpha.dim() != d {
                return Err(Error::InvalidOperator(format!(
                    "multi-index {:?} has {} entries, expected d = {}",
                    alpha,
                    alpha.dim(),
                    d
                )));
            }
            if alpha.modulus() != order {
                return Err(Error::InvalidOperator(format!(
                    "multi-index {:?} has modulus {}, expected k = {}",
                    alpha,
                    alpha.modulus(),
                    order
                )));
            }
            if m.rows() != dim_w || m.cols() != dim_v {
                return Err(Error::InvalidOperator(format!(
                    "coefficient for {:?} is {}x{}, expected {}x{} (dimW x dimV)",
                    alpha,
                    m.rows(),
                    m.cols(),
                    dim_w,
                    dim_v
                )));
            }
            match map.get_mut(&alpha) {
                Some(existing) => existing.add_assign(&m),
                None => {
                    map.insert(alpha, m);
                }
            }
        }
        map.retain(|_, m| !m.is_zero());
        Ok(Self { d, order, dim_v, dim_w, coeffs: map })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn dim_w(&self) -> usize {
        self.dim_w
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&MultiIndex, &QMatrix)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Option<&QMatrix> {
        self.coeffs.get(alpha)
    }

    fn check_freq(&self, xi: &[f64]) -> Result<()> {
        if xi.len() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "frequency has {} components, operator has d = {}",
                xi.len(),
                self.d
            )));
        }
        if xi.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("frequency".into()));
        }
        Ok(())
    }

    /// `Σ A_α ξ^α` as a real `dimW × dimV` matrix.
    pub fn reduced_symbol(&self, xi: &[f64]) -> Result<DMatrix<f64>> {
        self.check_freq(xi)?;
        Ok(self.reduced_symbol_unchecked(xi))
    }

    pub(crate) fn reduced_symbol_unchecked(&self, xi: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim_w, self.dim_v);
        for (alpha, m) in &self.coeffs {
            let w = alpha.monomial(xi);
            if w == 0.0 {
                continue;
            }
            for i in 0..self.dim_w {
                for j in 0..self.dim_v {
                    let c = m.get(i, j);
                    if !c.is_zero() {
                        out[(i, j)] += w * rational::to_f64(c);
                    }
                }
            }
        }
        out
    }

    /// Principal symbol at `ξ`, with or without the `(2πi)^k` factor.
    pub fn symbol_eval(&self, xi: &[f64], reduced: bool) -> Result<SymbolValue> {
        let red = self.reduced_symbol(xi)?;
        let scale = if reduced { Complex::new(1.0, 0.0) } else { full_factor(self.order) };
        Ok(SymbolValue {
            freq: xi.to_vec(),
            matrix: red.map(|v| scale * v),
            reduced,
        })
    }

    /// Operator with coefficients `A_αᵀ`; its reduced symbol is the transpose
    /// of `self`'s. The distributional formal adjoint is `(-1)^k` times this
    /// operator, and its full symbol is [`OperatorSpec::hermitian_symbol`].
    pub fn adjoint(&self) -> Self {
        Self {
            d: self.d,
            order: self.order,
            dim_v: self.dim_w,
            dim_w: self.dim_v,
            coeffs: self.coeffs.iter().map(|(a, m)| (a.clone(), m.transpose())).collect(),
        }
    }

    /// `A(ξ)^H`, the full symbol of the formal adjoint.
    pub fn hermitian_symbol(&self, xi: &[f64]) -> Result<DMatrix<Complex<f64>>> {
        Ok(self.symbol_eval(xi, false)?.matrix.adjoint())
    }

    /// `outer ∘ inner`, coefficients by convolution over multi-indices.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        if outer.d != inner.d {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose operators in d = {} and d = {}",
                outer.d, inner.d
            )));
        }
        if outer.dim_v != inner.dim_w {
            return Err(Error::DimensionMismatch(format!(
                "outer dimV = {} but inner dimW = {}",
                outer.dim_v, inner.dim_w
            )));
        }
        let mut coeffs = Vec::new();
        for (a, ma) in &outer.coeffs {
            for (b, mb) in &inner.coeffs {
                coeffs.push((a.add(b), ma.mul(mb)));
            }
        }
        Self::new_allow_zero(outer.d, outer.order + inner.order, inner.dim_v, outer.dim_w, coeffs)
    }

    /// Multiplies every coefficient by `c`.
    pub fn scaled(&self, c: &Rational) -> Self {
        let coeffs = self.coeffs.iter().map(|(a, m)| (a.clone(), m.scaled(c)));
        Self::new_allow_zero(self.d, self.order, self.dim_v, self.dim_w, coeffs)
            .expect("scaling preserves shape")
    }

    /// Canonical textual form: identical operators give identical strings.
    pub fn canonical_string(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "d={};k={};dimV={};dimW={}", self.d, self.order, self.dim_v, self.dim_w);
        for (alpha, m) in &self.coeffs {
            let _ = write!(s, ";{:?}:", alpha.entries());
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    let _ = write!(s, "{},", rational::format(m.get(i, j)));
                }
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{builtin, Builtin};
    use alloc::vec;

    fn grad2() -> OperatorSpec {
        builtin(Builtin::Gradient, 2, 1, None).unwrap()
    }

    #[test]
    fn gradient_symbol_column() {
        let s = grad2().symbol_eval(&[1.0, 0.0], true).unwrap();
        assert_eq!(s.matrix.shape(), (2, 1));
        assert_eq!(s.matrix[(0, 0)], Complex::new(1.0, 0.0));
        assert_eq!(s.matrix[(1, 0)], Complex::new(0.0, 0.0));
    }

    #[test]
    fn symbol_vanishes_at_origin() {
        let op = builtin(Builtin::DivergenceRows, 3, 1, None).unwrap();
        let s = op.symbol_eval(&[0.0; 3], false).unwrap();
        assert!(s.matrix.iter().all(|z| z.norm_sqr() == 0.0));
    }

    #[test]
    fn divergence_rows_applies_m_xi() {
        let op = builtin(Builtin::DivergenceRows, 2, 1, None).unwrap();
        let s = op.reduced_symbol(&[0.0, 1.0]).unwrap();
        let m = nalgebra::DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]);
        let out = s * m;
        assert_eq!(out.as_slice(), &[2.0, 4.0]);
    }

    #[test]
    fn full_symbol_factor() {
        let op = grad2();
        let s = op.symbol_eval(&[1.0, 0.0], false).unwrap();
        assert!((s.matrix[(0, 0)] - Complex::new(0.0, 2.0 * PI)).norm_sqr() < 1e-30);
    }

    #[test]
    fn dimension_errors() {
        assert!(grad2().reduced_symbol(&[1.0]).is_err());
        assert!(grad2().reduced_symbol(&[f64::NAN, 1.0]).is_err());
        let bad = OperatorSpec::new(2, 1, 1, 2, vec![(MultiIndex::axis(2, 0, 2), QMatrix::zeros(2, 1))]);
        assert!(bad.is_err());
        let zero = OperatorSpec::new(2, 1, 1, 2, vec![(MultiIndex::axis(2, 0, 1), QMatrix::zeros(2, 1))]);
        assert!(matches!(zero, Err(Error::InvalidOperator(_))));
        let order0 = OperatorSpec::new(2, 0, 1, 1, vec![(MultiIndex::zero(2), QMatrix::identity(1))]);
        assert!(order0.is_err());
    }

    #[test]
    fn adjoint_of_gradient_is_row() {
        let adj = grad2().adjoint();
        assert_eq!((adj.dim_w(), adj.dim_v()), (1, 2));
        let s = adj.reduced_symbol(&[0.3, -0.7]).unwrap();
        assert_eq!(s.as_slice(), &[0.3, -0.7]);
        assert_eq!(adj.adjoint(), grad2());
    }

    #[test]
    fn laplacian_is_self_adjoint() {
        let lap = builtin(Builtin::Laplacian, 3, 2, None).unwrap();
        assert_eq!(lap.adjoint(), lap);
    }

    #[test]
    fn hermitian_symbol_is_conjugate_transpose() {
        let op = builtin(Builtin::Curl, 2, 2, None).unwrap();
        let xi = [0.4, 1.3];
        let h = op.hermitian_symbol(&xi).unwrap();
        let a = op.symbol_eval(&xi, false).unwrap().matrix;
        assert!((h - a.adjoint()).norm() == 0.0);
    }

    #[test]
    fn compose_div_grad_is_laplacian() {
        let grad = builtin(Builtin::Gradient, 2, 2, None).unwrap();
        let div = builtin(Builtin::DivergenceRows, 2, 1, None).unwrap();
        let c = OperatorSpec::compose(&div, &grad).unwrap();
        assert_eq!(c.order(), 2);
        assert_eq!(c, builtin(Builtin::Laplacian, 2, 2, None).unwrap());
        assert!(OperatorSpec::compose(&grad, &grad).is_err());
    }

    #[test]
    fn canonical_string_is_stable() {
        let a = grad2().canonical_string();
        assert_eq!(a, grad2().canonical_string());
        assert!(a.starts_with("d=2;k=1;dimV=1;dimW=2"));
    }
}
