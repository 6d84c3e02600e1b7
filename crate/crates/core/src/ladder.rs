//! The Sobolev exponent ladder `q(ℓ)`: `q(0) = q` and, for `ℓ ≥ 1`,
//! `q(ℓ) = dq/(d − ℓq)` while `ℓq < d`, else `q(ℓ−1)`. Exact rationals.

use alloc::format;

use num_traits::One;

use crate::rational::{self, Rational};
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LadderQuery {
    pub q: Rational,
    pub d: u32,
    pub k: u32,
    pub ell: u32,
}

fn step(q: &Rational, d: u32, ell: u32) -> Option<Rational> {
    let d = Rational::from_integer(d.into());
    let lq = Rational::from_integer(ell.into()) * q;
    (lq < d).then(|| &d * q / (d - lq))
}

/// `q(ℓ)` for `q > 1`, `d ≥ 1`.
pub fn q_ladder(q: &Rational, d: u32, ell: u32) -> Result<Rational> {
    if *q <= Rational::one() {
        return Err(Error::InvalidLadder(format!("q = {} must exceed 1", rational::format(q))));
    }
    if d == 0 {
        return Err(Error::InvalidLadder("d must be >= 1".into()));
    }
    let mut cur = q.clone();
    for l in 1..=ell {
        if let Some(next) = step(q, d, l) {
            cur = next;
        }
    }
    Ok(cur)
}

pub fn evaluate(query: &LadderQuery) -> Result<Rational> {
    q_ladder(&query.q, query.d, query.ell)
}

/// Admissible exponents `[1, d/(d−k))`, or `[1, ∞)` when `k ≥ d`. The
/// upper bound is `None` for the unbounded case.
pub fn exponent_window(d: u32, k: u32) -> Option<Rational> {
    (k < d).then(|| Rational::new(d.into(), (d - k).into()))
}

fn window_string(d: u32, k: u32) -> alloc::string::String {
    match exponent_window(d, k) {
        Some(hi) => format!("[1, {})", rational::format(&hi)),
        None => "[1, inf)".into(),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SeedBoundary {
    /// `p = 1`: no ladder, the estimate is plain total variation.
    TotalVariation,
    /// `p = d/(d−k)`: the closed end of the window, reached by the limiting
    /// seed `q = d/(d−1)`.
    WindowEndpoint,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LadderSeed {
    pub q: Rational,
    /// `q(k−1)`, the exponent the bootstrap actually reaches.
    pub reached: Rational,
    /// `reached == p`. Otherwise `reached > p` and the `L^p` bound follows
    /// from the `L^{q(k−1)}` one by Hölder on the bounded set.
    pub exact: bool,
    pub boundary: Option<SeedBoundary>,
}

/// Finds `q ∈ (1, d/(d−1))` with `q(k−1) = p`. Every rung below `d` is
/// active for such `q`, so `q(k−1) = dq/(d − ℓ'q)` with `ℓ' = min(k−1, d−1)`,
/// which inverts to `q = dp/(d + ℓ'p)`. That inverse exceeds 1 only for
/// `p > d/(d−ℓ')`; below it `q(k−1)` cannot come down to `p`, and the seed
/// `q = (2d−1)/(2d−2)` (midpoint of the interval) is returned with
/// `q(k−1) > p`.
pub fn ladder_seed(p: &Rational, d: u32, k: u32) -> Result<LadderSeed> {
    if d == 0 || k == 0 {
        return Err(Error::InvalidLadder("d and k must be >= 1".into()));
    }
    let range_err = || Error::ExponentOutOfRange {
        p: rational::format(p),
        d,
        k,
        window: window_string(d, k),
    };
    if *p < Rational::one() {
        return Err(range_err());
    }
    let window = exponent_window(d, k);
    let boundary = match &window {
        Some(hi) if p > hi => return Err(range_err()),
        Some(hi) if p == hi => Some(SeedBoundary::WindowEndpoint),
        _ => None,
    };
    if rational::is_one(p) {
        return Ok(LadderSeed {
            q: p.clone(),
            reached: p.clone(),
            exact: true,
            boundary: Some(SeedBoundary::TotalVariation),
        });
    }
    let dd = Rational::from_integer(d.into());
    let lp = Rational::from_integer((k - 1).min(d - 1).into());
    let mut q = &dd * p / (&dd + lp * p);
    if q <= Rational::one() {
        // d = 1 has no interval (1, d/(d−1)); any q > 1 then saturates.
        q = if d == 1 { p.clone() } else { Rational::new((2 * d - 1).into(), (2 * d - 2).into()) };
    }
    let reached = q_ladder(&q, d, k - 1)?;
    if reached < *p {
        return Err(range_err());
    }
    Ok(LadderSeed { exact: reached == *p, q, reached, boundary })
}
