//! Numerical experiments around cone-constrained measures: discrete
//! measures and mollification, polar diagnostics, the higher-integrability
//! and local-canceling ratio experiments, compactness diagnostics, and the
//! swirl / laminate / conformal-coordinate counterexample generators.

pub mod compactness;
pub mod conformal;
pub mod experiments;
pub mod laminate;
pub mod measure;
pub mod mihlin;
pub mod quadrature;
pub mod swirl;

pub use wavecone_core::ladder;

/// Axis-aligned box `[lo, hi]^d` inside the unit torus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubBox {
    pub lo: f64,
    pub hi: f64,
}

impl SubBox {
    /// The centered box of relative side 1/2, `[1/4, 3/4]^d`.
    pub const CENTERED_HALF: SubBox = SubBox { lo: 0.25, hi: 0.75 };

    pub fn new(lo: f64, hi: f64) -> crate::Result<Self> {
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(crate::Error::Precondition(format!("sub-box [{lo}, {hi}] must satisfy 0 <= lo < hi <= 1")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().all(|&v| v >= self.lo && v <= self.hi)
    }
}

impl Default for SubBox {
    fn default() -> Self {
        Self::CENTERED_HALF
    }
}
