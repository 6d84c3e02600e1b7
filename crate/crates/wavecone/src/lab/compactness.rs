//! Weak* pairings and `L^q` tails of a sequence of fields on `Ω′`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::grid::TorusField;
use crate::lab::SubBox;
use crate::{Error, Result};

/// Tails at the largest threshold must fall below this fraction of the
/// largest `∫_{Ω′}|f|^q` for the sequence to count as equi-integrable.
pub const TAIL_FRACTION: f64 = 1e-2;

const MAX_DEGREE: u32 = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompactnessReport {
    pub q: f64,
    /// `pairings[j]` lists `∫_{Ω′} ψ f_j` over the test functions, components fastest.
    pub pairings: Vec<Vec<f64>>,
    /// Largest change of a pairing between the last two fields.
    pub weakstar_gap: f64,
    pub thresholds: Vec<f64>,
    /// `tails[j][m] = ∫_{Ω′ ∩ {|f_j| > M_m}} |f_j|^q`.
    pub tails: Vec<Vec<f64>>,
    pub sup_tails: Vec<f64>,
    pub equiintegrable: bool,
}

/// Trig test functions `1, cos 2πm x_i, sin 2πm x_i` with `m ≤ 3`.
fn test_value(t: usize, x: &[f64]) -> f64 {
    if t == 0 {
        return 1.0;
    }
    let t = t - 1;
    let axis = t / (2 * MAX_DEGREE as usize);
    let m = (t % (2 * MAX_DEGREE as usize)) / 2 + 1;
    let arg = 2.0 * PI * m as f64 * x[axis];
    if t.is_multiple_of(2) {
        arg.cos()
    } else {
        arg.sin()
    }
}

pub fn compactness_diagnostics(fields: &[TorusField], omega: SubBox, thresholds: &[f64], q: f64) -> Result<CompactnessReport> {
    let Some(first) = fields.first() else {
        return Err(Error::Precondition("empty sequence".into()));
    };
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::Precondition(format!("tail exponent q = {q} must be finite and >= 1")));
    }
    if thresholds.is_empty() || thresholds.windows(2).any(|w| w[0] >= w[1]) || thresholds[0] < 0.0 {
        return Err(Error::Precondition("thresholds must be nonnegative and strictly increasing".into()));
    }
    let dim = first.dim();
    let n_tests = 1 + 2 * MAX_DEGREE as usize * first.grid().d();
    let mut pairings = Vec::with_capacity(fields.len());
    let mut tails = Vec::with_capacity(fields.len());
    let mut mass_max: f64 = 0.0;
    for f in fields {
        if f.dim() != dim || f.grid().d() != first.grid().d() {
            return Err(Error::Grid("fields in a sequence must share their shape".into()));
        }
        let grid = f.grid();
        let w = grid.cell_volume();
        let mut pair = vec![0.0; n_tests * dim];
        let mut tail = vec![0.0; thresholds.len()];
        let mut mass = 0.0;
        for idx in 0..grid.len() {
            let x = grid.point(idx);
            if !omega.contains(&x) {
                continue;
            }
            for t in 0..n_tests {
                let psi = test_value(t, &x) * w;
                for (c, v) in f.at(idx).iter().enumerate() {
                    pair[t * dim + c] += psi * v.re;
                }
            }
            let m = f.modulus_at(idx);
            let mq = m.powf(q) * w;
            mass += mq;
            for (slot, &level) in tail.iter_mut().zip(thresholds) {
                if m > level {
                    *slot += mq;
                }
            }
        }
        mass_max = mass_max.max(mass);
        pairings.push(pair);
        tails.push(tail);
    }
    let sup_tails: Vec<f64> = (0..thresholds.len()).map(|m| tails.iter().map(|t| t[m]).fold(0.0, f64::max)).collect();
    let weakstar_gap = match pairings.len() {
        0 | 1 => 0.0,
        n => pairings[n - 1].iter().zip(&pairings[n - 2]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
    };
    let last = *sup_tails.last().expect("nonempty thresholds");
    Ok(CompactnessReport {
        q,
        pairings,
        weakstar_gap,
        thresholds: thresholds.to_vec(),
        tails,
        equiintegrable: last <= TAIL_FRACTION * mass_max,
        sup_tails,
    })
}
