//! JSON experiment configs for `wavecone run`. The `experiment` tag selects
//! the pipeline; every report echoes the parsed config and seed.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wavecone_core::cone::ConeSpec;
use wavecone_core::operator::OperatorSpec;

use crate::grid::TorusGrid;
use crate::io;
use crate::lab::compactness::compactness_diagnostics;
use crate::lab::experiments::{disc_density, higher_integrability_experiment, hyperplane_density, local_canceling_experiment, ExperimentConfig};
use crate::lab::laminate::{laminate, laminate_sequence, LaminateSpec};
use crate::lab::measure::{mollify, Atom, DiscreteMeasure};
use crate::lab::swirl::swirl_example;
use crate::lab::SubBox;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureShape {
    Disc,
    Atom,
    Hyperplane,
}

/// A cone given inline or as a path relative to the config file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConeRef {
    Path(PathBuf),
    Inline(serde_json::Value),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LaminateParams {
    pub op: String,
    pub xi: Vec<i64>,
    pub amplitude: Vec<f64>,
    #[serde(default)]
    pub base: Vec<f64>,
    #[serde(default = "one")]
    pub delta: f64,
    pub js: Vec<u32>,
    #[serde(default = "grid_256")]
    pub grid: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Laminate(LaminateParams),
    /// Mollified unit point masses at the cell centre, one field per scale.
    MollifiedAtom { dim: usize, d: usize, grid: usize, scales: Vec<f64> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum ExperimentSpec {
    HigherIntegrability {
        op: String,
        cone: ConeRef,
        p: String,
        #[serde(default = "grid_128")]
        grid: usize,
        #[serde(default)]
        scales: Vec<f64>,
        #[serde(default = "disc")]
        measure: MeasureShape,
        #[serde(default = "radius")]
        radius: f64,
        #[serde(default)]
        force: bool,
        #[serde(default)]
        seed: u64,
    },
    LocalCanceling {
        op: String,
        /// Polar direction of the measure.
        axis: Vec<f64>,
        t: f64,
        #[serde(default = "grid_128")]
        grid: usize,
        #[serde(default = "disc")]
        measure: MeasureShape,
        #[serde(default = "radius")]
        radius: f64,
    },
    Swirl {
        eps: f64,
    },
    Laminate(LaminateParams),
    Compactness {
        #[serde(flatten)]
        family: Family,
        thresholds: Vec<f64>,
        #[serde(default = "one")]
        q: f64,
    },
}

fn one() -> f64 {
    1.0
}
fn grid_128() -> usize {
    128
}
fn grid_256() -> usize {
    256
}
fn disc() -> MeasureShape {
    MeasureShape::Disc
}
fn radius() -> f64 {
    0.2
}

/// Output of a config run: a JSON report and, for ratio experiments, CSV.
#[derive(Debug)]
pub struct RunOutput {
    pub json: String,
    pub csv: Option<String>,
}

pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    serde_json::from_str(text).map_err(|e| Error::parse("experiment config", format!("line {}, column {}: {e}", e.line(), e.column())))
}

pub fn load_config(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    parse_config(&text)
}

pub fn default_scales(n: usize) -> Vec<f64> {
    let floor = 4.0 / n as f64;
    let mut t = 0.125;
    let mut out = Vec::new();
    while t >= floor - 1e-15 {
        out.push(t);
        t *= 0.5;
    }
    out
}

pub fn build_measure(shape: MeasureShape, grid: TorusGrid, axis: &[f64], radius: f64) -> Result<DiscreteMeasure> {
    let center = vec![0.5; grid.d()];
    match shape {
        MeasureShape::Disc => DiscreteMeasure::from_density(disc_density(grid, &center, radius, axis)?),
        MeasureShape::Atom => DiscreteMeasure::from_atoms(grid, axis.len(), vec![Atom { location: center, weight: axis.to_vec() }]),
        MeasureShape::Hyperplane => DiscreteMeasure::from_density(hyperplane_density(grid, 0, 0.5, axis)?),
    }
}

fn resolve_cone(cone: &ConeRef, base: &Path) -> Result<ConeSpec> {
    match cone {
        ConeRef::Path(p) if p.is_absolute() => io::load_cone(p),
        ConeRef::Path(p) => io::load_cone(&base.join(p)),
        ConeRef::Inline(v) => io::cone_from_json(&v.to_string()),
    }
}

fn laminate_spec(l: &LaminateParams, op: &OperatorSpec) -> LaminateSpec {
    let b0 = if l.base.is_empty() { vec![0.0; op.dim_v()] } else { l.base.clone() };
    LaminateSpec { xi: l.xi.clone(), p: l.amplitude.clone(), b0, delta: l.delta }
}

fn pretty(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializes")
}

/// Runs a parsed config; relative paths resolve against `base`.
pub fn run_experiment(spec: &ExperimentSpec, base: &Path) -> Result<RunOutput> {
    let omega = SubBox::default();
    match spec {
        ExperimentSpec::HigherIntegrability { op, cone, p, grid, scales, measure, radius, force, seed } => {
            let op = io::load_operator(op)?;
            let cone = resolve_cone(cone, base)?;
            let grid = TorusGrid::new(op.d(), *grid)?;
            let scales = if scales.is_empty() { default_scales(grid.n()) } else { scales.clone() };
            let axis: Vec<f64> = cone.axis().iter().copied().collect();
            let mu = build_measure(*measure, grid, &axis, *radius)?;
            let family: Vec<(f64, DiscreteMeasure)> = scales.iter().map(|&t| (t, mu.clone())).collect();
            let mut cfg = ExperimentConfig::new(crate::cli::parse_exponent(p)?);
            cfg.force = *force;
            cfg.seed = *seed;
            cfg.omega = omega;
            let report = higher_integrability_experiment(&op, &family, &cone, &cfg)?;
            let mut buf = Vec::new();
            io::write_report_csv(&mut buf, &report)?;
            let body: serde_json::Value = serde_json::from_str(&io::report_json(&report, &io::operator_hash(&op))).expect("valid json");
            Ok(RunOutput {
                json: pretty(&serde_json::json!({ "config": spec, "report": body })),
                csv: Some(String::from_utf8(buf).expect("csv is utf-8")),
            })
        }
        ExperimentSpec::LocalCanceling { op, axis, t, grid, measure, radius } => {
            let op = io::load_operator(op)?;
            let grid = TorusGrid::new(op.d(), *grid)?;
            let mu = build_measure(*measure, grid, axis, *radius)?;
            let r = local_canceling_experiment(&op, &mu, *t, omega)?;
            Ok(RunOutput {
                json: pretty(&serde_json::json!({ "config": spec, "operator_hash": io::operator_hash(&op), "report": r })),
                csv: None,
            })
        }
        ExperimentSpec::Swirl { eps } => {
            let r = swirl_example(*eps)?;
            Ok(RunOutput {
                json: pretty(&serde_json::json!({
                    "config": spec,
                    "report": {
                        "eps": r.eps,
                        "int_I": r.int_i,
                        "int_I_expected": r.expected_int_i,
                        "int_II": r.int_ii,
                        "int_II_lower_bound": r.int_ii_lower_bound,
                        "dist_SD2": r.dist_sd2,
                        "split_residual": r.split_residual,
                    }
                })),
                csv: None,
            })
        }
        ExperimentSpec::Laminate(l) => {
            let op = io::load_operator(&l.op)?;
            let grid = TorusGrid::new(op.d(), l.grid)?;
            let r = laminate_sequence(&op, &laminate_spec(l, &op), &l.js, grid, omega)?;
            let rows: Vec<_> = r
                .rows
                .iter()
                .map(|row| {
                    serde_json::json!({
                        "j": row.j,
                        "pairing_error": row.pairing_error,
                        "l1_to_midpoint": row.l1_to_midpoint,
                        "a_free_residual": row.a_free_residual,
                    })
                })
                .collect();
            Ok(RunOutput {
                json: pretty(&serde_json::json!({
                    "config": spec,
                    "operator_hash": io::operator_hash(&op),
                    "report": { "midpoint": r.midpoint, "rate": r.rate, "rows": rows }
                })),
                csv: None,
            })
        }
        ExperimentSpec::Compactness { family, thresholds, q } => {
            let fields = match family {
                Family::Laminate(l) => {
                    let op = io::load_operator(&l.op)?;
                    let grid = TorusGrid::new(op.d(), l.grid)?;
                    let s = laminate_spec(l, &op);
                    l.js.iter().map(|&j| laminate(&op, &s, j, grid)).collect::<Result<Vec<_>>>()?
                }
                Family::MollifiedAtom { dim, d, grid, scales } => {
                    let grid = TorusGrid::new(*d, *grid)?;
                    let mut w = vec![0.0; *dim];
                    if let Some(first) = w.first_mut() {
                        *first = 1.0;
                    }
                    let mu = build_measure(MeasureShape::Atom, grid, &w, 0.0)?;
                    scales.iter().map(|&t| mollify(&mu, t)).collect::<Result<Vec<_>>>()?
                }
            };
            let r = compactness_diagnostics(&fields, omega, thresholds, *q)?;
            Ok(RunOutput { json: pretty(&serde_json::json!({ "config": spec, "report": r })), csv: None })
        }
    }
}
