//! Command-line front end. Exit codes: 0 success, 2 unreadable or malformed
//! input, 3 failed mathematical precondition, 4 rejected by an experiment's
//! hypothesis gate. Output is deterministic for a fixed `--seed`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wavecone_core::cone::{self, ConeSpec};
use wavecone_core::ladder::{ladder_seed, SeedBoundary};
use wavecone_core::operator::OperatorSpec;
use wavecone_core::polymatrix::{annihilator, minimal_iteration_exponent};
use wavecone_core::rational::{self, Rational};
use wavecone_core::sphere::sphere_sample;
use wavecone_core::DEFAULT_RANK_TOL;

use crate::grid::TorusGrid;
use crate::io;
use crate::config::{build_measure, default_scales, load_config, run_experiment, MeasureShape};
use crate::lab::experiments::{higher_integrability_experiment, ExperimentConfig};
use crate::lab::laminate::{laminate_sequence, LaminateSpec};
use crate::lab::measure::DiscreteMeasure;
use crate::lab::swirl::swirl_example;
use crate::lab::SubBox;
use crate::spectral::{laplace_residual, solve_laplace};
use crate::{Category, Result};

#[derive(Parser, Debug)]
#[command(name = "wavecone", version, about = "Wave-cone analysis of constant-coefficient operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeasureKind {
    /// Indicator of a disc times the cone axis.
    Disc,
    /// A point mass along the cone axis.
    Atom,
    /// Surface measure of the hyperplane `{x₁ = 1/2}` times the cone axis.
    Hyperplane,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Rank profile, canceling and (co)canceling / ellipticity tests.
    Analyze {
        #[arg(long)]
        op: String,
        #[arg(long)]
        subspace: Option<PathBuf>,
        #[arg(long)]
        cone: Option<PathBuf>,
        #[arg(long, default_value_t = 128)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Adjugate annihilator of an elliptic operator.
    Annihilate {
        #[arg(long)]
        op: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seed exponent of the integrability ladder for a target `p`.
    Ladder {
        #[arg(long)]
        p: String,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        k: u32,
    },
    /// Solves `(Id + B*B) u = f` on the torus for a field file `f`.
    Solve {
        #[arg(long)]
        op: String,
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Higher-integrability ratio experiment on mollified cone measures.
    Experiment {
        #[arg(long)]
        op: String,
        #[arg(long)]
        cone: PathBuf,
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 128)]
        grid: usize,
        /// Comma-separated mollification radii; default halves from 1/8 to 4h.
        #[arg(long, value_delimiter = ',')]
        scales: Vec<f64>,
        #[arg(long, value_enum, default_value_t = MeasureKind::Disc)]
        measure: MeasureKind,
        #[arg(long, default_value_t = 0.2)]
        radius: f64,
        /// Run even if hypotheses fail; the report is labelled exploratory.
        #[arg(long)]
        force: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Weak* and L¹ diagnostics of an oscillating laminate sequence.
    Laminate {
        #[arg(long)]
        op: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        xi: Vec<i64>,
        #[arg(long = "amplitude", value_delimiter = ',', allow_hyphen_values = true)]
        amplitude: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        base: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
        js: Vec<u32>,
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
    /// Runs an experiment described by a JSON config; with `--out DIR`
    /// writes `report.json` (and `report.csv` for ratio experiments).
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Radial integrals of the logarithmic swirl.
    Swirl {
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
    },
}

/// Accepts `p/q`, integers and finite decimals (converted exactly).
pub fn parse_exponent(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        let digits = format!("{int}{frac}");
        let den = format!("1{}", "0".repeat(frac.len()));
        return Ok(rational::parse(&format!("{digits}/{den}"))?);
    }
    Ok(rational::parse(s)?)
}

fn to_json(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializes")
}

#[derive(Serialize)]
struct RankJson {
    min: usize,
    max: usize,
    constant: bool,
}

#[derive(Serialize)]
struct AnalyzeJson {
    operator_hash: String,
    d: usize,
    k: u32,
    #[serde(rename = "dimV")]
    dim_v: usize,
    #[serde(rename = "dimW")]
    dim_w: usize,
    samples: usize,
    seed: u64,
    rank: RankJson,
    canceling: bool,
    intersection_dim: usize,
    minimal_iteration_exponent: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    ellipticity_delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cocanceling_certificate: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cocanceling_witness: Option<Vec<f64>>,
}

fn analyze(op: &OperatorSpec, subspace: Option<cone::SubspaceSpec>, cone: Option<ConeSpec>, samples: usize, seed: u64) -> Result<AnalyzeJson> {
    let sample = sphere_sample(op.d(), samples, seed)?;
    let profile = cone::rank_profile(op, &sample, DEFAULT_RANK_TOL)?;
    let canc = cone::canceling_check(op, &sample, DEFAULT_RANK_TOL)?;
    let l = subspace.or_else(|| cone.as_ref().map(|c| c.subspace().clone()));
    let ellipticity_delta = match &l {
        Some(l) => Some(cone::ellipticity_distance(op, l, &sample, DEFAULT_RANK_TOL)?.delta),
        None => None,
    };
    let rigidity = match &cone {
        Some(c) => Some(cone::cocanceling_rigidity(op, c, &sample, DEFAULT_RANK_TOL)?),
        None => None,
    };
    Ok(AnalyzeJson {
        operator_hash: io::operator_hash(op),
        d: op.d(),
        k: op.order(),
        dim_v: op.dim_v(),
        dim_w: op.dim_w(),
        samples: sample.len(),
        seed,
        rank: RankJson { min: profile.min_rank, max: profile.max_rank, constant: profile.is_constant_rank },
        canceling: canc.is_canceling,
        intersection_dim: canc.intersection_dim,
        minimal_iteration_exponent: minimal_iteration_exponent(op.order(), op.d() as u32),
        ellipticity_delta,
        cocanceling_certificate: rigidity.as_ref().map(|r| r.certificate),
        cocanceling_witness: rigidity.and_then(|r| r.witness).map(|w| w.iter().copied().collect()),
    })
}

fn analyze_text(a: &AnalyzeJson) -> String {
    let mut s = format!(
        "operator {} (d={}, k={}, {} -> {})\nrank {}..{} ({})\ncanceling: {} (intersection dim {})\nminimal iteration exponent r = {}\n",
        a.operator_hash,
        a.d,
        a.k,
        a.dim_v,
        a.dim_w,
        a.rank.min,
        a.rank.max,
        if a.rank.constant { "constant" } else { "varies" },
        a.canceling,
        a.intersection_dim,
        a.minimal_iteration_exponent
    );
    if let Some(delta) = a.ellipticity_delta {
        s += &format!("delta_L = {delta:.6e}\n");
    }
    if let Some(c) = a.cocanceling_certificate {
        s += &format!("cocanceling certificate: {c}\n");
    }
    s
}

impl From<MeasureKind> for MeasureShape {
    fn from(k: MeasureKind) -> Self {
        match k {
            MeasureKind::Disc => MeasureShape::Disc,
            MeasureKind::Atom => MeasureShape::Atom,
            MeasureKind::Hyperplane => MeasureShape::Hyperplane,
        }
    }
}

/// Runs one command and returns its standard output.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Analyze { op, subspace, cone, samples, seed, format } => {
            let op = io::load_operator(op)?;
            let l = subspace.as_deref().map(io::load_subspace).transpose()?;
            let c = cone.as_deref().map(io::load_cone).transpose()?;
            let a = analyze(&op, l, c, *samples, *seed)?;
            Ok(match format {
                Format::Text => analyze_text(&a),
                _ => to_json(&a),
            })
        }
        Command::Annihilate { op, out } => {
            let op = io::load_operator(op)?;
            let ann = annihilator(&op)?;
            let text = format!(
                "{{\n\"order\": {},\n\"symbolic_zero\": {},\n\"operator\": {},\n\"symbol\": {}\n}}",
                ann.order,
                ann.symbolic_zero,
                io::operator_to_json(&ann.op),
                io::polymatrix_to_json(&ann.symbol)
            );
            match out {
                Some(path) => {
                    io::emit(Some(path), &text)?;
                    Ok(format!("annihilator of order {} written to {}\n", ann.order, path.display()))
                }
                None => Ok(text),
            }
        }
        Command::Ladder { p, d, k } => {
            let p = parse_exponent(p)?;
            let s = ladder_seed(&p, *d, *k)?;
            let boundary = match s.boundary {
                Some(SeedBoundary::TotalVariation) => "total-variation",
                Some(SeedBoundary::WindowEndpoint) => "window-endpoint",
                None => "interior",
            };
            Ok(to_json(&serde_json::json!({
                "p": rational::format(&p),
                "seed_q": rational::format(&s.q),
                "reached": rational::format(&s.reached),
                "exact": s.exact,
                "boundary": boundary,
            })))
        }
        Command::Solve { op, field, out } => {
            let op = io::load_operator(op)?;
            let f = io::read_field(field)?;
            let u = solve_laplace(&op, &f)?;
            let res = laplace_residual(&op, &u, &f)?;
            io::write_field(out, &u)?;
            Ok(format!("relative residual {res:.3e}; solution written to {}\n", out.display()))
        }
        Command::Experiment { op, cone, p, grid, scales, measure, radius, force, seed, out, format } => {
            let op = io::load_operator(op)?;
            let cone = io::load_cone(cone)?;
            let grid = TorusGrid::new(op.d(), *grid)?;
            let scales = if scales.is_empty() { default_scales(grid.n()) } else { scales.clone() };
            let axis: Vec<f64> = cone.axis().iter().copied().collect();
            let mu = build_measure((*measure).into(), grid, &axis, *radius)?;
            let family: Vec<(f64, DiscreteMeasure)> = scales.iter().map(|&t| (t, mu.clone())).collect();
            let mut cfg = ExperimentConfig::new(parse_exponent(p)?);
            cfg.force = *force;
            cfg.seed = *seed;
            cfg.omega = SubBox::default();
            let report = higher_integrability_experiment(&op, &family, &cone, &cfg)?;
            let text = match format {
                Format::Json => io::report_json(&report, &io::operator_hash(&op)),
                _ => {
                    let mut buf = Vec::new();
                    io::write_report_csv(&mut buf, &report)?;
                    String::from_utf8(buf).expect("csv is utf-8")
                }
            };
            match out {
                Some(path) => {
                    io::emit(Some(path), &text)?;
                    Ok(format!("{} rows ({:?}) written to {}\n", report.rows.len(), report.mode, path.display()))
                }
                None => Ok(text),
            }
        }
        Command::Laminate { op, xi, amplitude, base, delta, js, grid } => {
            let op = io::load_operator(op)?;
            let grid = TorusGrid::new(op.d(), *grid)?;
            let base = if base.is_empty() { vec![0.0; op.dim_v()] } else { base.clone() };
            let spec = LaminateSpec { xi: xi.clone(), p: amplitude.clone(), b0: base, delta: *delta };
            let report = laminate_sequence(&op, &spec, js, grid, SubBox::default())?;
            let rows: Vec<_> = report
                .rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "j": r.j,
                        "pairing_error": r.pairing_error,
                        "l1_to_midpoint": r.l1_to_midpoint,
                        "a_free_residual": r.a_free_residual,
                    })
                })
                .collect();
            Ok(to_json(&serde_json::json!({ "midpoint": report.midpoint, "rate": report.rate, "rows": rows })))
        }
        Command::Run { config, out } => {
            let spec = load_config(config)?;
            let base = config.parent().unwrap_or(Path::new("."));
            let r = run_experiment(&spec, base)?;
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(dir).map_err(|source| crate::Error::Io { path: dir.display().to_string(), source })?;
                    io::emit(Some(&dir.join("report.json")), &r.json)?;
                    if let Some(csv) = &r.csv {
                        io::emit(Some(&dir.join("report.csv")), csv)?;
                    }
                    Ok(format!("report written to {}\n", dir.display()))
                }
                None => Ok(r.json),
            }
        }
        Command::Swirl { eps } => {
            let r = swirl_example(*eps)?;
            Ok(to_json(&serde_json::json!({
                "eps": r.eps,
                "int_I": r.int_i,
                "int_I_expected": r.expected_int_i,
                "int_II": r.int_ii,
                "int_II_lower_bound": r.int_ii_lower_bound,
                "dist_SD2": r.dist_sd2,
                "split_residual": r.split_residual,
            })))
        }
    }
}

pub fn exit_code(c: Category) -> i32 {
    match c {
        Category::Parse => 2,
        Category::Precondition => 3,
        Category::Gate => 4,
    }
}

/// Parses `args`, runs, and returns `(exit code, stdout, stderr)`.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, if code == 0 { e.to_string() } else { String::new() }, if code == 0 { String::new() } else { e.to_string() });
        }
    };
    match execute(&cli) {
        Ok(out) => (0, out, String::new()),
        Err(e) => (exit_code(e.category()), String::new(), format!("error: {e}\n")),
    }
}
