//! Ratio experiments: `‖μ_t‖_{L^p(Ω′)} / (|μ_t|(Ω) + |Aμ_t|(Ω))` along a
//! family of mollified cone-valued measures, and the negative-norm ratio
//! for canceling operators.

use serde::Serialize;
use wavecone_core::cone::{self, ConeSpec};
use wavecone_core::ladder::{ladder_seed, LadderSeed};
use wavecone_core::operator::OperatorSpec;
use wavecone_core::rational::{self, Rational};
use wavecone_core::sphere::sphere_sample;
use wavecone_core::DEFAULT_RANK_TOL;

use crate::grid::TorusField;
use crate::lab::measure::{mollify, polar_diagnostics, DiscreteMeasure};
use crate::lab::swirl::eta;
use crate::lab::SubBox;
use crate::spectral::{apply_operator, bessel_norm};
use crate::{Error, Result};

/// Points used when the experiments probe symbol-level hypotheses.
const HYPOTHESIS_SAMPLE: usize = 96;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every hypothesis checked.
    Gated,
    /// Run anyway; numbers carry no guarantee.
    Exploratory,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub p: Rational,
    pub omega: SubBox,
    pub force: bool,
    /// Relative tolerance for polar vectors leaving the cone.
    pub cone_tol: f64,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(p: Rational) -> Self {
        Self { p, omega: SubBox::default(), force: false, cone_tol: 1e-9, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub scale: f64,
    pub lp_norm: f64,
    pub tv_mu: f64,
    pub tv_sigma: f64,
    pub ratio: f64,
    pub cone_max_dist: f64,
    #[serde(rename = "M_inf")]
    pub m_inf: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub p: String,
    pub mode: Mode,
    /// Why the run is exploratory, if it is.
    pub skipped_hypotheses: Vec<String>,
    pub ladder_seed: Option<String>,
    pub ellipticity_delta: f64,
    pub rows: Vec<ExperimentRow>,
    /// All `|Aμ_t|` vanish: the bound then holds on the larger A-free range.
    pub sigma_vanishes: bool,
}

impl ExperimentReport {
    /// `ratio[i+1] / ratio[i]`, in the order the family was given.
    pub fn growth(&self) -> Vec<f64> {
        self.rows.windows(2).map(|w| w[1].ratio / w[0].ratio).collect()
    }

    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio).fold(0.0, f64::max)
    }
}

fn describe_seed(s: &LadderSeed) -> String {
    format!(
        "q = {}, reaches {}{}",
        rational::format(&s.q),
        rational::format(&s.reached),
        if s.exact { "" } else { " (not exact)" }
    )
}

/// Runs the ratio experiment on `(t, μ)` pairs; each `μ` is mollified at its
/// own scale `t`. Refuses (gate error) unless the exponent is reachable by
/// the ladder and `L` misses the wave cone on the sample, or `force` is set.
/// A cone violation of any mollified polar is always a gate error.
pub fn higher_integrability_experiment(
    op: &OperatorSpec,
    family: &[(f64, DiscreteMeasure)],
    cone: &ConeSpec,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport> {
    if family.is_empty() {
        return Err(Error::Precondition("empty measure family".into()));
    }
    if cone.dim() != op.dim_v() {
        return Err(Error::Precondition("cone and operator domain differ".into()));
    }
    let d = op.d();
    let p = rational::to_f64(&cfg.p);
    let mut skipped = Vec::new();
    let seed = match ladder_seed(&cfg.p, d as u32, op.order()) {
        Ok(s) => Some(s),
        Err(e) => {
            skipped.push(format!("exponent: {e}"));
            None
        }
    };
    let sample = sphere_sample(d, HYPOTHESIS_SAMPLE, cfg.seed)?;
    let ell = cone::ellipticity_distance(op, cone.subspace(), &sample, DEFAULT_RANK_TOL)?;
    if ell.delta <= 0.0 {
        skipped.push(format!("ellipticity: L meets the wave cone (delta_L = {:.3e})", ell.delta));
    }
    if !skipped.is_empty() && !cfg.force {
        return Err(Error::Gate(format!("hypotheses fail: {}", skipped.join("; "))));
    }

    let mut rows = Vec::with_capacity(family.len());
    for (t, mu) in family {
        let f = mollify(mu, *t)?;
        let diag = polar_diagnostics(&f, cone)?;
        if diag.max_dist > cfg.cone_tol {
            return Err(Error::Gate(format!(
                "mollified polar leaves the cone at scale {t}: distance {:.3e}",
                diag.max_dist
            )));
        }
        let sigma = apply_operator(op, &f)?;
        let omega = cfg.omega;
        let lp_norm = f.lq_norm_where(p, |x| omega.contains(x));
        let tv_mu = f.lq_norm(1.0);
        let tv_sigma = sigma.lq_norm(1.0);
        let denom = tv_mu + tv_sigma;
        rows.push(ExperimentRow {
            scale: *t,
            lp_norm,
            tv_mu,
            tv_sigma,
            ratio: if denom > 0.0 { lp_norm / denom } else { 0.0 },
            cone_max_dist: diag.max_dist,
            m_inf: diag.m_inf,
        });
    }
    let sigma_vanishes = rows.iter().all(|r| r.tv_sigma <= 1e-10 * r.tv_mu.max(f64::MIN_POSITIVE));
    Ok(ExperimentReport {
        p: rational::format(&cfg.p),
        mode: if skipped.is_empty() { Mode::Gated } else { Mode::Exploratory },
        skipped_hypotheses: skipped,
        ladder_seed: seed.as_ref().map(describe_seed),
        ellipticity_delta: ell.delta,
        rows,
        sigma_vanishes,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalCancelingReport {
    /// Exponent `d/(d−1)` of the negative Sobolev norm.
    pub exponent: f64,
    /// `‖φ Aμ_t‖_{W^{−1, d/(d−1)}}` (Bessel-potential proxy), `φ` a cutoff of `Ω′`.
    pub neg_norm: f64,
    pub tv_bound: f64,
    pub ratio: f64,
}

/// Smooth cutoff, 1 on `omega`, vanishing at distance `≥ margin` from it.
pub fn box_cutoff(x: &[f64], omega: SubBox, margin: f64) -> f64 {
    x.iter()
        .map(|&v| {
            let out = (omega.lo - v).max(v - omega.hi).max(0.0);
            eta(1.0 + out / margin)
        })
        .product()
}

/// Negative-norm ratio of `Aμ_t` for canceling, constant-rank operators of
/// order `k < d`; refuses otherwise.
pub fn local_canceling_experiment(op: &OperatorSpec, mu: &DiscreteMeasure, t: f64, omega: SubBox) -> Result<LocalCancelingReport> {
    let d = op.d();
    let mut failed = Vec::new();
    if op.order() as usize >= d {
        failed.push(format!("order k = {} is not below d = {d}", op.order()));
    }
    let sample = sphere_sample(d, HYPOTHESIS_SAMPLE, 0)?;
    if !cone::canceling_check(op, &sample, DEFAULT_RANK_TOL)?.is_canceling {
        failed.push("operator is not canceling".into());
    }
    let profile = cone::rank_profile(op, &sample, DEFAULT_RANK_TOL)?;
    if !profile.is_constant_rank {
        failed.push(format!("rank varies between {} and {}", profile.min_rank, profile.max_rank));
    }
    if !failed.is_empty() {
        return Err(Error::Gate(format!("local canceling experiment refused: {}", failed.join("; "))));
    }
    if mu.dim() != op.dim_v() {
        return Err(Error::Precondition("measure and operator domain differ".into()));
    }
    let f = mollify(mu, t)?;
    let sigma = apply_operator(op, &f)?;
    let margin = omega.lo.min(1.0 - omega.hi) * 0.5;
    let mut local = sigma.clone();
    for idx in 0..local.grid().len() {
        let c = box_cutoff(&local.grid().point(idx), omega, margin);
        for v in local.at_mut(idx) {
            *v *= c;
        }
    }
    let exponent = d as f64 / (d as f64 - 1.0);
    let neg_norm = bessel_norm(&local, -1.0, exponent)?;
    let tv_bound = f.lq_norm(1.0) + sigma.lq_norm(1.0);
    Ok(LocalCancelingReport { exponent, neg_norm, tv_bound, ratio: if tv_bound > 0.0 { neg_norm / tv_bound } else { 0.0 } })
}

/// Real scalar indicator density of the disc `|x − c| < r`, times `v`.
pub fn disc_density(grid: crate::grid::TorusGrid, center: &[f64], radius: f64, v: &[f64]) -> Result<TorusField> {
    TorusField::from_real_fn(grid, v.len(), |x| {
        let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
        if r2 < radius * radius {
            v.to_vec()
        } else {
            vec![0.0; v.len()]
        }
    })
}

/// `v` times the arclength measure of the hyperplane `{x_axis = c}`,
/// discretized as a density of height `1/h` on one layer of cells.
pub fn hyperplane_density(grid: crate::grid::TorusGrid, axis: usize, c: f64, v: &[f64]) -> Result<TorusField> {
    let n = grid.n();
    let layer = ((c * n as f64).floor() as usize).min(n - 1);
    let height = n as f64;
    TorusField::from_real_fn(grid, v.len(), |x| {
        let i = ((x[axis] * n as f64).round() as usize).min(n - 1);
        if i == layer {
            v.iter().map(|a| a * height).collect()
        } else {
            vec![0.0; v.len()]
        }
    })
}
