//! Constant-coefficient linear differential operators and their symbols.
//!
//! This crate holds the allocation-only algebra: exact rational operator
//! specifications, numerical symbol evaluation, wave-cone and
//! constant-rank analysis over the frequency sphere, exact polynomial-matrix
//! algebra (determinants, adjugates, adjugate annihilators) and the Sobolev
//! exponent ladder. Grid-based spectral machinery and file formats live in
//! the `wavecone` crate.
//!
//! Conventions: the *reduced* symbol of `A = Σ_{|α|=k} A_α ∂^α` is
//! `Σ A_α ξ^α`; the *full* symbol carries the extra factor `(2πi)^k`.
//! Kernels, images, ranks and projections are computed on the reduced
//! symbol, which is real.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod builtin;
pub mod cone;
pub mod error;
pub mod ladder;
pub mod linalg;
pub mod multi_index;
pub mod operator;
pub mod poly;
pub mod polymatrix;
pub mod rational;
pub mod sphere;

pub use error::{Error, Result};
pub use multi_index::MultiIndex;
pub use operator::{OperatorSpec, QMatrix, SymbolValue};
pub use poly::Poly;
pub use polymatrix::PolyMatrix;
pub use rational::Rational;

/// Default relative singular-value threshold for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
