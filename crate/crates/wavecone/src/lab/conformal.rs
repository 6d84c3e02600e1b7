//! Conformal coordinates of real 2×2 matrices:
//! `A z = a₊ z + a₋ z̄` with `μ_A = a₋ / conj(a₊)` the dilatation.

use nalgebra::Matrix2;

use crate::grid::C64;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConformalCoords {
    pub a_plus: C64,
    pub a_minus: C64,
}

impl ConformalCoords {
    /// `None` when `a₊ = 0` (μ is infinite).
    pub fn dilatation(&self) -> Option<C64> {
        if self.a_plus.norm_sqr() == 0.0 {
            None
        } else {
            Some(self.a_minus / self.a_plus.conj())
        }
    }

    pub fn reconstruct(&self) -> Matrix2<f64> {
        let (p, m) = (self.a_plus, self.a_minus);
        Matrix2::new(p.re + m.re, m.im - p.im, p.im + m.im, p.re - m.re)
    }
}

pub fn conformal_coords(a: &Matrix2<f64>) -> ConformalCoords {
    ConformalCoords {
        a_plus: C64::new(a[(0, 0)] + a[(1, 1)], a[(1, 0)] - a[(0, 1)]) * 0.5,
        a_minus: C64::new(a[(0, 0)] - a[(1, 1)], a[(1, 0)] + a[(0, 1)]) * 0.5,
    }
}

/// Frobenius distance of `A/|A|` to the conformal matrices `{a₋ = 0}`.
pub fn dist_to_conformal(a: &Matrix2<f64>) -> Result<f64> {
    let n = a.norm();
    if n == 0.0 {
        return Err(Error::Precondition("the zero matrix has no direction".into()));
    }
    let c = conformal_coords(a);
    Ok(std::f64::consts::SQRT_2 * c.a_minus.norm() / n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_is_conformal() {
        let (s, c) = 0.7f64.sin_cos();
        let a = Matrix2::new(c, -s, s, c) * 3.0;
        let z = conformal_coords(&a);
        assert!(z.a_minus.norm() < 1e-15);
        assert!((z.a_plus - C64::new(3.0 * c, 3.0 * s)).norm() < 1e-14);
        assert_eq!(z.dilatation().unwrap().norm(), 0.0);
    }

    #[test]
    fn reflection_has_infinite_dilatation() {
        let z = conformal_coords(&Matrix2::new(1.0, 0.0, 0.0, -1.0));
        assert!(z.dilatation().is_none());
        assert!((dist_to_conformal(&Matrix2::new(1.0, 0.0, 0.0, -1.0)).unwrap() - 1.0).abs() < 1e-15);
    }
}
