//! Multi-indices `α ∈ N₀^d`, ordered lexicographically.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionMismatch("multi-index must have d >= 1 entries".into()));
        }
        Ok(Self(entries))
    }

    pub fn zero(d: usize) -> Self {
        Self(vec![0; d])
    }

    /// `k · e_axis` in `d` dimensions.
    pub fn axis(d: usize, axis: usize, k: u32) -> Self {
        let mut e = vec![0; d];
        e[axis] = k;
        Self(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn modulus(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` when `other ≤ self` componentwise.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }

    /// `ξ^α`.
    pub fn monomial(&self, xi: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(xi)
            .map(|(&a, &x)| {
                let mut p = 1.0;
                for _ in 0..a {
                    p *= x;
                }
                p
            })
            .product()
    }

    /// All multi-indices of modulus `k` in `d` variables, lexicographically
    /// increasing.
    pub fn all_of_modulus(d: usize, k: u32) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; d];
        fill(&mut cur, 0, k, &mut out);
        out.reverse();
        out
    }
}

// Emits in lexicographically decreasing order (largest first entry first).
fn fill(cur: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    let d = cur.len();
    if pos + 1 == d {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for a in (0..=remaining).rev() {
        cur[pos] = a;
        fill(cur, pos + 1, remaining - a, out);
    }
    cur[pos] = 0;
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "α{:?}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_is_sorted_and_complete() {
        let all = MultiIndex::all_of_modulus(3, 2);
        assert_eq!(all.len(), 6);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(all.iter().all(|a| a.modulus() == 2));
        assert_eq!(all[0].entries(), &[0, 0, 2]);
        assert_eq!(all[5].entries(), &[2, 0, 0]);
    }

    #[test]
    fn monomial_and_arith() {
        let a = MultiIndex::new(vec![2, 1]).unwrap();
        assert_eq!(a.monomial(&[3.0, 2.0]), 18.0);
        let b = MultiIndex::axis(2, 0, 1);
        assert_eq!(a.checked_sub(&b).unwrap().entries(), &[1, 1]);
        assert!(b.checked_sub(&a).is_none());
        assert_eq!(a.add(&b).modulus(), 4);
        assert!(MultiIndex::new(vec![]).is_err());
    }
}
