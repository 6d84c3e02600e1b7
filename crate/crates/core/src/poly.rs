//! Multivariate polynomials with exact rational coefficients.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::multi_index::MultiIndex;
use crate::rational::{self, Rational};

/// Sparse polynomial in `nvars` variables. Zero coefficients are never
/// stored, so the zero polynomial has no terms.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(MultiIndex::zero(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn monomial(alpha: MultiIndex, c: Rational) -> Self {
        let nvars = alpha.dim();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(alpha, c);
        }
        Self { nvars, terms }
    }

    /// The coordinate polynomial `ξ_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(MultiIndex::axis(nvars, i, 1), Rational::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Rational {
        self.terms.get(alpha).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: &Rational) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(alpha.dim(), self.nvars);
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(alpha) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c.clone());
            }
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::modulus).max()
    }

    /// The common degree of all terms, if the polynomial is nonzero and
    /// homogeneous.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(MultiIndex::modulus);
        let first = it.next()?;
        it.all(|m| m == first).then_some(first)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(a, v)| (a.clone(), v * c)).collect(),
        }
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(a, c)| rational::to_f64(c) * a.monomial(xi))
            .sum()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Lexicographically largest term.
    fn leading(&self) -> Option<(&MultiIndex, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder (or the divisor is zero).
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        let (lead_a, lead_c) = divisor.leading()?;
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((ra, rc)) = rem.leading() {
            let shift = ra.checked_sub(lead_a)?;
            let c = rc / lead_c;
            let step = Self::monomial(shift.clone(), c.clone());
            quot.add_term(shift, &c);
            rem = &rem - &(&step * divisor);
        }
        Some(quot)
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), c);
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), &-c);
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let mut out = Poly::zero(self.nvars);
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(a.add(b), &(ca * cb));
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<_> = self.terms.iter().rev().collect();
        for (n, (a, c)) in parts.into_iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}")?;
            for (i, e) in a.entries().iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "·x{}", i + 1)?,
                    e => write!(f, "·x{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}
