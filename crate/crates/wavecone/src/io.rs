//! File formats.
//!
//! * operators, subspaces, cones and polynomial matrices: JSON, rationals as
//!   `"p/q"` strings;
//! * fields: little-endian binary (`u64` header `d, n, dimV`, then
//!   interleaved `re, im` as `f64`, point-major, last axis fastest) with a
//!   JSON sidecar next to it;
//! * experiment reports: CSV or JSON.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wavecone_core::builtin::BuiltinRef;
use wavecone_core::cone::{ConeSpec, SubspaceSpec};
use wavecone_core::multi_index::MultiIndex;
use wavecone_core::operator::{OperatorSpec, QMatrix};
use wavecone_core::polymatrix::PolyMatrix;
use wavecone_core::rational;

use crate::grid::{TorusField, TorusGrid, C64};
use crate::lab::experiments::ExperimentReport;
use crate::{Error, Result};

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

fn json_err(ctx: &str) -> impl Fn(serde_json::Error) -> Error + '_ {
    move |e| Error::parse(ctx, e)
}

#[derive(Serialize, Deserialize)]
struct CoeffJson {
    alpha: Vec<u32>,
    matrix: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    d: usize,
    k: u32,
    #[serde(rename = "dimV")]
    dim_v: usize,
    #[serde(rename = "dimW")]
    dim_w: usize,
    coeffs: Vec<CoeffJson>,
}

pub fn operator_to_json(op: &OperatorSpec) -> String {
    let coeffs = op
        .coeffs()
        .map(|(alpha, m)| CoeffJson {
            alpha: alpha.entries().to_vec(),
            matrix: (0..m.rows()).map(|i| m.row(i).iter().map(rational::format).collect()).collect(),
        })
        .collect();
    let doc = OperatorJson { d: op.d(), k: op.order(), dim_v: op.dim_v(), dim_w: op.dim_w(), coeffs };
    serde_json::to_string_pretty(&doc).expect("operator serializes")
}

pub fn operator_from_json(text: &str) -> Result<OperatorSpec> {
    let doc: OperatorJson = serde_json::from_str(text).map_err(json_err("operator"))?;
    let mut coeffs = Vec::with_capacity(doc.coeffs.len());
    for c in doc.coeffs {
        let rows = c
            .matrix
            .iter()
            .map(|row| row.iter().map(|s| rational::parse(s)).collect::<std::result::Result<Vec<_>, _>>())
            .collect::<std::result::Result<Vec<_>, _>>()?;
        coeffs.push((MultiIndex::new(c.alpha)?, QMatrix::from_rows(rows)?));
    }
    Ok(OperatorSpec::new(doc.d, doc.k, doc.dim_v, doc.dim_w, coeffs)?)
}

/// `builtin:NAME?d=..` or a path to an operator JSON file.
pub fn load_operator(spec: &str) -> Result<OperatorSpec> {
    if spec.starts_with("builtin:") {
        return Ok(BuiltinRef::parse(spec)?.build()?);
    }
    operator_from_json(&read_text(Path::new(spec))?)
}

/// Hex SHA-256 of the canonical operator string; stable across runs.
pub fn operator_hash(op: &OperatorSpec) -> String {
    hex::encode(Sha256::digest(op.canonical_string().as_bytes()))
}

#[derive(Serialize, Deserialize)]
struct SubspaceJson {
    ambient: usize,
    basis: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct ConeJson {
    axis: Vec<f64>,
    subspace: Option<SubspaceJson>,
    eps: f64,
}

fn subspace_from_doc(doc: SubspaceJson) -> Result<SubspaceSpec> {
    Ok(SubspaceSpec::new(doc.ambient, &doc.basis)?)
}

pub fn subspace_from_json(text: &str) -> Result<SubspaceSpec> {
    subspace_from_doc(serde_json::from_str(text).map_err(json_err("subspace"))?)
}

pub fn subspace_to_json(l: &SubspaceSpec) -> String {
    serde_json::to_string_pretty(&SubspaceJson { ambient: l.ambient_dim(), basis: l.basis_vectors() }).expect("serializes")
}

/// A cone file gives `axis`, `eps` and optionally `subspace` (default:
/// the span of the axis).
pub fn cone_from_json(text: &str) -> Result<ConeSpec> {
    let doc: ConeJson = serde_json::from_str(text).map_err(json_err("cone"))?;
    match doc.subspace {
        Some(l) => Ok(ConeSpec::new(&doc.axis, subspace_from_doc(l)?, doc.eps)?),
        None => Ok(ConeSpec::around(&doc.axis, doc.eps)?),
    }
}

pub fn cone_to_json(c: &ConeSpec) -> String {
    let doc = ConeJson {
        axis: c.axis().iter().copied().collect(),
        subspace: Some(SubspaceJson { ambient: c.dim(), basis: c.subspace().basis_vectors() }),
        eps: c.eps(),
    };
    serde_json::to_string_pretty(&doc).expect("serializes")
}

pub fn load_subspace(path: &Path) -> Result<SubspaceSpec> {
    subspace_from_json(&read_text(path)?)
}

pub fn load_cone(path: &Path) -> Result<ConeSpec> {
    cone_from_json(&read_text(path)?)
}

#[derive(Serialize)]
struct TermJson {
    exponent: Vec<u32>,
    coeff: String,
}

#[derive(Serialize)]
struct PolyMatrixJson {
    rows: usize,
    cols: usize,
    nvars: usize,
    /// Row-major list of entries, each a list of monomials.
    entries: Vec<Vec<TermJson>>,
}

pub fn polymatrix_to_json(m: &PolyMatrix) -> String {
    let entries = m
        .entries()
        .map(|(_, _, p)| {
            p.terms()
                .map(|(alpha, c)| TermJson { exponent: alpha.entries().to_vec(), coeff: rational::format(c) })
                .collect()
        })
        .collect();
    let doc = PolyMatrixJson { rows: m.rows(), cols: m.cols(), nvars: m.nvars(), entries };
    serde_json::to_string_pretty(&doc).expect("serializes")
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct FieldSidecar {
    pub d: usize,
    pub n: usize,
    #[serde(rename = "dimV")]
    pub dim_v: usize,
    pub dtype: String,
    pub layout: String,
}

/// `field.bin` → `field.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

pub fn write_field(path: &Path, f: &TorusField) -> Result<()> {
    let g = f.grid();
    let mut bytes = Vec::with_capacity(24 + 16 * f.values().len());
    for h in [g.d(), g.n(), f.dim()] {
        bytes.extend_from_slice(&(h as u64).to_le_bytes());
    }
    for v in f.values() {
        bytes.extend_from_slice(&v.re.to_le_bytes());
        bytes.extend_from_slice(&v.im.to_le_bytes());
    }
    write_bytes(path, &bytes)?;
    let side = FieldSidecar {
        d: g.d(),
        n: g.n(),
        dim_v: f.dim(),
        dtype: "complex128-le".into(),
        layout: "point-major, components fastest; points row-major, last axis fastest".into(),
    };
    write_bytes(&sidecar_path(path), serde_json::to_string_pretty(&side).expect("serializes").as_bytes())
}

pub fn read_field(path: &Path) -> Result<TorusField> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut file| file.read_to_end(&mut bytes))
        .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    let ctx = path.display().to_string();
    if bytes.len() < 24 {
        return Err(Error::parse(&ctx, "truncated header"));
    }
    let word = |i: usize| u64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().expect("8 bytes")) as usize;
    let (d, n, dim) = (word(0), word(1), word(2));
    let grid = TorusGrid::new(d, n).map_err(|e| Error::parse(&ctx, e))?;
    let count = grid.len().checked_mul(dim).ok_or_else(|| Error::parse(&ctx, "header overflows"))?;
    if bytes.len() != 24 + 16 * count {
        return Err(Error::parse(&ctx, format!("expected {} payload bytes, found {}", 16 * count, bytes.len() - 24)));
    }
    let values = bytes[24..]
        .chunks_exact(16)
        .map(|c| {
            C64::new(
                f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
            )
        })
        .collect();
    TorusField::from_values(grid, dim, values)
}

pub const REPORT_COLUMNS: [&str; 7] = ["scale", "lp_norm", "tv_mu", "tv_sigma", "ratio", "cone_max_dist", "M_inf"];

pub fn write_report_csv(w: impl Write, report: &ExperimentReport) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::parse("report csv", e);
    out.write_record(REPORT_COLUMNS).map_err(io)?;
    for r in &report.rows {
        out.write_record(
            [r.scale, r.lp_norm, r.tv_mu, r.tv_sigma, r.ratio, r.cone_max_dist, r.m_inf].map(|v| format!("{v:.12e}")),
        )
        .map_err(io)?;
    }
    out.flush().map_err(|source| Error::Io { path: "<report>".into(), source })
}

pub fn report_json(report: &ExperimentReport, op_hash: &str) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        operator_hash: &'a str,
        #[serde(flatten)]
        report: &'a ExperimentReport,
    }
    serde_json::to_string_pretty(&Doc { operator_hash: op_hash, report }).expect("serializes")
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_bytes(p, text.as_bytes()),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_round_trip_and_hash() {
        let op = load_operator("builtin:curl?d=2&m=2").unwrap();
        let back = operator_from_json(&operator_to_json(&op)).unwrap();
        assert_eq!(op, back);
        assert_eq!(operator_hash(&op), operator_hash(&back));
        assert_eq!(operator_hash(&op).len(), 64);
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        let e = operator_from_json("{\"d\": 2").unwrap_err();
        assert_eq!(e.category(), crate::Category::Parse);
    }
}
