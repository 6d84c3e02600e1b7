//! Catalog of standard operators.
//!
//! Matrix-valued fields are flattened row-major: entry `(i, j)` of an
//! `m × d` matrix sits at index `i * d + j`.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::multi_index::MultiIndex;
use crate::operator::{OperatorSpec, QMatrix};
use crate::rational::{self, Rational};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    /// `u ↦ Du` for `R^m`-valued `u`; symbol `a ↦ a ⊗ ξ`.
    Gradient,
    /// `u ↦ (∂^α u)_{|α|=k}` for `R^m`-valued `u`.
    HessianK,
    /// Row-wise divergence of `d × d` matrix fields; symbol `M ↦ Mξ`.
    DivergenceRows,
    /// Row-wise curl of `m × d` matrix fields; `ker = {a ⊗ ξ}`.
    Curl,
    /// `u ↦ (Du + Duᵀ)/2` for `R^d`-valued `u`, valued in `d × d` matrices.
    SymmetricGradient,
    /// Componentwise Laplacian on `R^m`-valued fields; symbol `|ξ|² id`.
    Laplacian,
}

impl Builtin {
    pub const ALL: [Builtin; 6] = [
        Builtin::Gradient,
        Builtin::HessianK,
        Builtin::DivergenceRows,
        Builtin::Curl,
        Builtin::SymmetricGradient,
        Builtin::Laplacian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Gradient => "gradient",
            Builtin::HessianK => "hessian_k",
            Builtin::DivergenceRows => "divergence_rows",
            Builtin::Curl => "curl",
            Builtin::SymmetricGradient => "symmetric_gradient",
            Builtin::Laplacian => "laplacian",
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::UnknownBuiltin(s.to_string()))
    }
}

/// Builds a catalog operator. `m` is the number of field components where
/// relevant (ignored by `divergence_rows` and `symmetric_gradient`); `k` is
/// only used by `hessian_k`.
pub fn builtin(name: Builtin, d: usize, m: usize, k: Option<u32>) -> Result<OperatorSpec> {
    if d == 0 {
        return Err(Error::InvalidBuiltin("d must be >= 1".into()));
    }
    if m == 0 {
        return Err(Error::InvalidBuiltin("m must be >= 1".into()));
    }
    let one = rational::int(1);
    match name {
        Builtin::Gradient => {
            let coeffs = (0..d).map(|j| {
                let mut a = QMatrix::zeros(m * d, m);
                for i in 0..m {
                    a.set(i * d + j, i, one.clone());
                }
                (MultiIndex::axis(d, j, 1), a)
            });
            OperatorSpec::new(d, 1, m, m * d, coeffs)
        }
        Builtin::HessianK => {
            let k = k.ok_or_else(|| Error::InvalidBuiltin("hessian_k requires k".into()))?;
            if k == 0 {
                return Err(Error::InvalidBuiltin("hessian_k requires k >= 1".into()));
            }
            let alphas = MultiIndex::all_of_modulus(d, k);
            let n = alphas.len();
            let coeffs = alphas.iter().enumerate().map(|(slot, alpha)| {
                let mut a = QMatrix::zeros(m * n, m);
                for i in 0..m {
                    a.set(i * n + slot, i, one.clone());
                }
                (alpha.clone(), a)
            });
            OperatorSpec::new(d, k, m, m * n, coeffs.collect::<Vec<_>>())
        }
        Builtin::DivergenceRows => {
            let coeffs = (0..d).map(|j| {
                let mut a = QMatrix::zeros(d, d * d);
                for i in 0..d {
                    a.set(i, i * d + j, one.clone());
                }
                (MultiIndex::axis(d, j, 1), a)
            });
            OperatorSpec::new(d, 1, d * d, d, coeffs)
        }
        Builtin::Curl => {
            if d < 2 {
                return Err(Error::InvalidBuiltin("curl requires d >= 2".into()));
            }
            let pairs: Vec<(usize, usize)> =
                (0..d).flat_map(|j| (j + 1..d).map(move |l| (j, l))).collect();
            let np = pairs.len();
            // (curl M)_{i,(j,l)} = ∂_j M_{il} - ∂_l M_{ij}
            let coeffs = (0..d).map(|axis| {
                let mut a = QMatrix::zeros(m * np, m * d);
                for i in 0..m {
                    for (p, &(j, l)) in pairs.iter().enumerate() {
                        if axis == j {
                            a.set(i * np + p, i * d + l, one.clone());
                        }
                        if axis == l {
                            a.set(i * np + p, i * d + j, -one.clone());
                        }
                    }
                }
                (MultiIndex::axis(d, axis, 1), a)
            });
            OperatorSpec::new(d, 1, m * d, m * np, coeffs.collect::<Vec<_>>())
        }
        Builtin::SymmetricGradient => {
            let half = rational::ratio(1, 2);
            let coeffs = (0..d).map(|axis| {
                let mut a = QMatrix::zeros(d * d, d);
                for i in 0..d {
                    for j in 0..d {
                        if j == axis {
                            a.add_at(i * d + j, i, &half);
                        }
                        if i == axis {
                            a.add_at(i * d + j, j, &half);
                        }
                    }
                }
                (MultiIndex::axis(d, axis, 1), a)
            });
            OperatorSpec::new(d, 1, d, d * d, coeffs.collect::<Vec<_>>())
        }
        Builtin::Laplacian => {
            let coeffs = (0..d).map(|j| (MultiIndex::axis(d, j, 2), QMatrix::identity(m)));
            OperatorSpec::new(d, 2, m, m, coeffs)
        }
    }
}

/// A parsed `builtin:NAME?d=..&m=..&k=..` reference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuiltinRef {
    pub name: Builtin,
    pub d: usize,
    pub m: usize,
    pub k: Option<u32>,
}

impl BuiltinRef {
    pub fn parse(s: &str) -> Result<Self> {
        let body = s
            .strip_prefix("builtin:")
            .ok_or_else(|| Error::InvalidBuiltin(format!("`{s}` does not start with `builtin:`")))?;
        let (name, query) = body.split_once('?').unwrap_or((body, ""));
        let name: Builtin = name.parse()?;
        let mut d = None;
        let mut m = 1usize;
        let mut k = None;
        for pair in query.split('&').filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::InvalidBuiltin(format!("malformed parameter `{pair}`")))?;
            let parsed: usize = value
                .parse()
                .map_err(|_| Error::InvalidBuiltin(format!("parameter `{key}` is not an integer")))?;
            match key {
                "d" => d = Some(parsed),
                "m" => m = parsed,
                "k" => k = Some(parsed as u32),
                other => return Err(Error::InvalidBuiltin(format!("unknown parameter `{other}`"))),
            }
        }
        let d = d.ok_or_else(|| Error::InvalidBuiltin("missing parameter `d`".into()))?;
        Ok(Self { name, d, m, k })
    }

    pub fn build(&self) -> Result<OperatorSpec> {
        builtin(self.name, self.d, self.m, self.k)
    }
}

impl fmt::Display for BuiltinRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "builtin:{}?d={}&m={}", self.name, self.d, self.m)?;
        if let Some(k) = self.k {
            write!(f, "&k={k}")?;
        }
        Ok(())
    }
}

/// Convenience: the scalar multiple `c · op` used by invariance checks.
pub fn scaled(op: &OperatorSpec, c: i64) -> OperatorSpec {
    op.scaled(&Rational::from_integer(c.into()))
}
