//! Empirical operator-norm proxies for Fourier multipliers on `L^q`.
//!
//! Test fields are real trigonometric polynomials with a fixed frequency
//! band and seeded Gaussian coefficients; the coefficient stream depends on
//! the seed only, so the same continuous field is sampled at every
//! resolution and proxies can be compared across grids.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::grid::{Spectrum, TorusField, TorusGrid, C64};
use crate::spectral::{apply_multiplier, Multiplier};
use crate::{Error, Result};

/// Real field `Re Σ_{|ζ|_∞ ≤ band} c_ζ e^{2πiζ·x}` with `c_ζ` complex Gaussian.
pub fn band_limited_field(grid: TorusGrid, dim: usize, band: i64, seed: u64) -> Result<TorusField> {
    if band < 1 || 2 * band as usize >= grid.n() {
        return Err(Error::Precondition(format!("band {band} must be positive and below n/2 = {}", grid.n() / 2)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = grid.d();
    let width = (2 * band + 1) as usize;
    let mut spec = Spectrum::zeros(grid, dim);
    let mut zeta = vec![0i64; d];
    for flat in 0..width.pow(d as u32) {
        let mut rest = flat;
        for z in zeta.iter_mut().rev() {
            *z = (rest % width) as i64 - band;
            rest /= width;
        }
        let idx = grid.index_wrapped(&zeta);
        for slot in spec.at_mut(idx) {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *slot = C64::new(re, im);
        }
    }
    Ok(spec.to_field().real_part())
}

/// `max_f ‖T f‖_q / ‖f‖_q` over the given fields.
pub fn multiplier_norm_proxy(m: &Multiplier, fields: &[TorusField], q: f64) -> Result<f64> {
    let mut best: f64 = 0.0;
    for f in fields {
        let tf = apply_multiplier(f, m)?;
        let den = f.lq_norm(q);
        if den > 0.0 {
            best = best.max(tf.lq_norm(q) / den);
        }
    }
    Ok(best)
}
