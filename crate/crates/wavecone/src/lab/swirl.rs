//! The logarithmic swirl: `u_ε(x) = g_ε(ln|x|)/|ln ε|` with
//! `g_ε(t) = η(t/ln ε)·t`, whose Hessian splits as
//!
//! ```text
//! ∇²u_ε = I_ε + II_ε,
//! I_ε  = g_ε'(ln|x|)/|ln ε| · ∇² ln|x|
//! II_ε = g_ε''(ln|x|)/|ln ε| · x⊗x/|x|⁴
//! ```
//!
//! `I_ε` is trace-free with `∫_{B₁∖B_ε}|I_ε| = 2√2π`, while `∫_{B₁}|II_ε|`
//! decays like `1/|ln ε|`. Radial integrals are done by Gauss–Legendre in
//! `s = ln r` with breaks where `η` switches on and off.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::Matrix2;

use crate::grid::{TorusField, TorusGrid};
use crate::lab::quadrature::Composite;
use crate::{Error, Result};

/// Quintic smoothstep cutoff: 1 on `(-∞, 1]`, 0 on `[2, ∞)`, C² across.
pub fn eta(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let s = r - 1.0;
        1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    }
}

pub fn eta_d1(r: f64) -> f64 {
    if r <= 1.0 || r >= 2.0 {
        0.0
    } else {
        let s = r - 1.0;
        -30.0 * s * s * (1.0 - s) * (1.0 - s)
    }
}

pub fn eta_d2(r: f64) -> f64 {
    if r <= 1.0 || r >= 2.0 {
        0.0
    } else {
        let s = r - 1.0;
        -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Swirl {
    eps: f64,
    log: f64,
}

impl Swirl {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Precondition(format!("swirl parameter must lie in (0,1), got {eps}")));
        }
        Ok(Self { eps, log: -eps.ln() })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `|ln ε|`.
    pub fn log_scale(&self) -> f64 {
        self.log
    }

    // R = ln r / ln ε.
    fn ratio(&self, s: f64) -> f64 {
        -s / self.log
    }

    /// `g_ε'(s)` and `g_ε''(s)`.
    fn g_derivs(&self, s: f64) -> (f64, f64) {
        let r = self.ratio(s);
        let g1 = eta(r) + eta_d1(r) * r;
        let g2 = -(2.0 * eta_d1(r) + eta_d2(r) * r) / self.log;
        (g1, g2)
    }

    pub fn value(&self, x: [f64; 2]) -> f64 {
        let r = x[0].hypot(x[1]);
        if r == 0.0 {
            return 0.0;
        }
        let s = r.ln();
        eta(self.ratio(s)) * s / self.log
    }

    pub fn part_i(&self, x: [f64; 2]) -> Matrix2<f64> {
        let r2 = x[0] * x[0] + x[1] * x[1];
        if r2 == 0.0 {
            return Matrix2::zeros();
        }
        let (g1, _) = self.g_derivs(0.5 * r2.ln());
        let hess_log = Matrix2::new(x[1] * x[1] - x[0] * x[0], -2.0 * x[0] * x[1], -2.0 * x[0] * x[1], x[0] * x[0] - x[1] * x[1]) / (r2 * r2);
        hess_log * (g1 / self.log)
    }

    pub fn part_ii(&self, x: [f64; 2]) -> Matrix2<f64> {
        let r2 = x[0] * x[0] + x[1] * x[1];
        if r2 == 0.0 {
            return Matrix2::zeros();
        }
        let (_, g2) = self.g_derivs(0.5 * r2.ln());
        Matrix2::new(x[0] * x[0], x[0] * x[1], x[1] * x[0], x[1] * x[1]) * (g2 / (self.log * r2 * r2))
    }

    /// `∇²u_ε` from the radial form `φ'' x̂⊗x̂ + φ'/r (1 − x̂⊗x̂)`.
    pub fn hessian(&self, x: [f64; 2]) -> Matrix2<f64> {
        let r = x[0].hypot(x[1]);
        if r == 0.0 {
            return Matrix2::zeros();
        }
        let (g1, g2) = self.g_derivs(r.ln());
        let phi_s = g1 / self.log;
        let phi_ss = g2 / self.log;
        let d1 = phi_s / r;
        let d2 = (phi_ss - phi_s) / (r * r);
        let xh = [x[0] / r, x[1] / r];
        let outer = Matrix2::new(xh[0] * xh[0], xh[0] * xh[1], xh[1] * xh[0], xh[1] * xh[1]);
        outer * d2 + (Matrix2::identity() - outer) * (d1 / r)
    }
}

/// Frobenius distance of `m` to trace-free symmetric matrices.
pub fn dist_to_sd2(m: &Matrix2<f64>) -> f64 {
    let skew = 0.5 * (m[(0, 1)] - m[(1, 0)]);
    let tr = m.trace();
    (2.0 * skew * skew + 0.5 * tr * tr).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwirlReport {
    pub eps: f64,
    /// `∫_{B₁∖B_ε} |I_ε|`.
    pub int_i: f64,
    /// The closed form `2√2π`.
    pub expected_int_i: f64,
    /// `∫_{B₁} |II_ε|`.
    pub int_ii: f64,
    /// `2π/|ln ε|`, a lower bound for `∫_{B₁}|II_ε|` valid for any cutoff.
    pub int_ii_lower_bound: f64,
    /// `∫_{B₁} dist(∇²u_ε, SD(2))`.
    pub dist_sd2: f64,
    /// Largest `|∇²u_ε − I_ε − II_ε|` relative to `|∇²u_ε|` over the nodes.
    pub split_residual: f64,
}

const DEGREE: usize = 24;
const SUBPANELS: usize = 64;

/// Radial integrals of the swirl on the unit disc.
pub fn swirl_example(eps: f64) -> Result<SwirlReport> {
    let sw = Swirl::new(eps)?;
    let l = sw.log_scale();
    let quad = Composite::new(DEGREE, SUBPANELS);
    // dx = 2π r² ds on radial functions, r = e^s; along the x₁-axis suffices
    // because all three integrands are rotation invariant.
    let radial = |f: &dyn Fn([f64; 2]) -> f64, s: f64| {
        let r = s.exp();
        f([r, 0.0]) * 2.0 * PI * r * r
    };
    let int_i = quad.integrate(&[-l, 0.0], |s| radial(&|x| sw.part_i(x).norm(), s));
    let breaks = [-2.0 * l, -l, 0.0];
    let int_ii = quad.integrate(&breaks, |s| radial(&|x| sw.part_ii(x).norm(), s));
    let dist_sd2 = quad.integrate(&breaks, |s| radial(&|x| dist_to_sd2(&sw.hessian(x)), s));
    let mut split_residual: f64 = 0.0;
    for s in quad.nodes(&[-2.0 * l - 1.0, -2.0 * l, -l, 0.0]) {
        let r = s.exp();
        for theta in [0.3, 1.1, 2.9, 4.4] {
            let x = [r * f64::cos(theta), r * f64::sin(theta)];
            let h = sw.hessian(x);
            let diff = (h - sw.part_i(x) - sw.part_ii(x)).norm();
            split_residual = split_residual.max(diff / h.norm().max(f64::MIN_POSITIVE));
        }
    }
    Ok(SwirlReport {
        eps,
        int_i,
        expected_int_i: 2.0 * SQRT_2 * PI,
        int_ii,
        int_ii_lower_bound: 2.0 * PI / l,
        dist_sd2,
        split_residual,
    })
}

/// `∇²u_ε`, `I_ε`, `II_ε` sampled on the torus identified with `[-1,1)²`
/// (row-major 2×2 entries), for export.
pub fn swirl_fields(eps: f64, grid: TorusGrid) -> Result<[TorusField; 3]> {
    if grid.d() != 2 {
        return Err(Error::Grid("the swirl lives in two dimensions".into()));
    }
    let sw = Swirl::new(eps)?;
    let to_phys = |p: &[f64]| [2.0 * p[0] - 1.0, 2.0 * p[1] - 1.0];
    let flat = |m: Matrix2<f64>| vec![m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]];
    let h = TorusField::from_real_fn(grid, 4, |p| flat(sw.hessian(to_phys(p))))?;
    let i = TorusField::from_real_fn(grid, 4, |p| flat(sw.part_i(to_phys(p))))?;
    let ii = TorusField::from_real_fn(grid, 4, |p| flat(sw.part_ii(to_phys(p))))?;
    Ok([h, i, ii])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_is_c2() {
        for r in [1.0, 2.0] {
            let h = 1e-7;
            assert!((eta(r + h) - eta(r - h)).abs() < 1e-12);
            assert!((eta_d1(r + h) - eta_d1(r - h)).abs() < 1e-9);
            assert!((eta_d2(r + h) - eta_d2(r - h)).abs() < 1e-5);
        }
        assert!(eta(1.999) > 0.0);
    }

    #[test]
    fn part_i_is_trace_free() {
        let sw = Swirl::new(1e-3).unwrap();
        assert!(sw.part_i([0.01, 0.02]).trace().abs() < 1e-9);
    }
}
