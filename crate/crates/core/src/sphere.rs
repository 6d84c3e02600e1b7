//! Deterministic point sets on the unit sphere of frequency space.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

// Needed without std; shadowed by inherent float methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Scheme {
    /// Golden-ratio lattice (circle or Fibonacci sphere), `d ≤ 3`.
    Fibonacci,
    /// Normalized seeded Gaussians, `d ≥ 4`.
    Gaussian,
    /// Caller-supplied points; used for refinements and tests.
    Explicit,
}

/// Unit frequencies; the coordinate axes `±e_i` are always present.
#[derive(Clone, PartialEq, Debug)]
pub struct SphereSample {
    d: usize,
    points: Vec<Vec<f64>>,
    seed: u64,
    scheme: Scheme,
}

const GOLDEN: f64 = 1.618_033_988_749_895;

/// `n` lattice (or Gaussian) points followed by `±e_1, …, ±e_d`.
pub fn sphere_sample(d: usize, n: usize, seed: u64) -> Result<SphereSample> {
    if d == 0 {
        return Err(Error::InvalidOperator("space dimension d must be >= 1".into()));
    }
    if n < 2 * d {
        return Err(Error::SampleTooSmall { needed: 2 * d, got: n });
    }
    // Seed-dependent rotation of the lattice so different seeds differ.
    let shift = (seed as f64 * (GOLDEN - 1.0)).fract();
    let (scheme, mut points) = match d {
        1 => (Scheme::Fibonacci, (0..n).map(|i| vec![if i % 2 == 0 { 1.0 } else { -1.0 }]).collect()),
        2 => (
            Scheme::Fibonacci,
            (0..n)
                .map(|i| {
                    let t = 2.0 * PI * (i as f64 + shift) / n as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect(),
        ),
        3 => (
            Scheme::Fibonacci,
            (0..n)
                .map(|i| {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let t = 2.0 * PI * (i as f64 / GOLDEN + shift);
                    vec![r * t.cos(), r * t.sin(), z]
                })
                .collect(),
        ),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n);
            while pts.len() < n {
                let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
                if v.iter().map(|x| x * x).sum::<f64>() > 1e-12 {
                    pts.push(v);
                }
            }
            (Scheme::Gaussian, pts)
        }
    };
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; d];
            e[i] = s;
            points.push(e);
        }
    }
    for p in &mut points {
        normalize(p);
    }
    Ok(SphereSample { d, points, seed, scheme })
}

fn normalize(p: &mut [f64]) {
    let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in p.iter_mut() {
        *x /= n;
    }
}

impl SphereSample {
    /// Wraps arbitrary nonzero points, normalizing them.
    pub fn from_points(d: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        let mut points = points;
        for p in &mut points {
            if p.len() != d {
                return Err(Error::DimensionMismatch(alloc::format!(
                    "point has {} coordinates, expected {d}",
                    p.len()
                )));
            }
            if p.iter().all(|&x| x == 0.0) || p.iter().any(|x| !x.is_finite()) {
                return Err(Error::ZeroFrequency);
            }
            normalize(p);
        }
        Ok(Self { d, points, seed: 0, scheme: Scheme::Explicit })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.iter().map(Vec::as_slice)
    }
}

/// Unit vector along the great-circle arc from `a` to `b` at fraction `t`
/// (normalized linear interpolation; `a ≠ −b`).
pub fn arc_point(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    let mut p: Vec<f64> = a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect();
    normalize(&mut p);
    p
}
