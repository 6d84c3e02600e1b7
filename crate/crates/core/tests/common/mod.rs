#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavecone_core::{MultiIndex, OperatorSpec, QMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gaussian-ish nonzero frequency with entries in [-2, 2].
pub fn random_freq(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let xi: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
        if xi.iter().map(|x| x * x).sum::<f64>() > 1e-2 {
            return xi;
        }
    }
}

/// Random operator with small integer coefficients.
pub fn random_operator(seed: u64, d: usize, k: u32, dim_v: usize, dim_w: usize) -> OperatorSpec {
    let mut rng = rng(seed);
    let mut coeffs = BTreeMap::new();
    for alpha in MultiIndex::all_of_modulus(d, k) {
        let vals: Vec<i64> = (0..dim_v * dim_w).map(|_| rng.random_range(-3..=3)).collect();
        coeffs.insert(alpha, QMatrix::from_i64(dim_w, dim_v, &vals));
    }
    let first = MultiIndex::axis(d, 0, k);
    coeffs.insert(first, QMatrix::from_i64(dim_w, dim_v, &vec![1; dim_v * dim_w]));
    OperatorSpec::new(d, k, dim_v, dim_w, coeffs).unwrap()
}

pub fn rel_err(a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}
