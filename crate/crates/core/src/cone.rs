//! Linear algebra of the symbol over the frequency sphere: kernels, rank
//! profiles, the wave cone `Λ_A = ⋃_{|ξ|=1} ker A(ξ)`, the distance of a
//! subspace to it, canceling / co-canceling tests, and the pseudoinverse and
//! projection symbols.
//!
//! All checks are over a finite [`SphereSample`]; a positive answer is a
//! sampled certificate, not a proof.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use nalgebra::Complex;
// Needed without std; shadowed by inherent float methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg;
use crate::operator::{full_factor, OperatorSpec};
use crate::sphere::{arc_point, SphereSample};
use crate::{Error, Result};

/// Random unit combinations drawn inside each sampled kernel.
pub const COMBINATIONS_PER_FREQ: usize = 5;
/// Tolerance on principal-angle sines when intersecting sampled subspaces.
pub const INTERSECTION_TOL: f64 = 1e-8;

/// Subspace of `V` with an orthonormal basis (one vector per column).
#[derive(Clone, PartialEq, Debug)]
pub struct SubspaceSpec {
    basis: DMatrix<f64>,
}

impl SubspaceSpec {
    /// Orthonormalizes linearly independent vectors of a common length.
    pub fn new(ambient: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        if vectors.iter().any(|v| v.len() != ambient) {
            return Err(Error::DimensionMismatch(format!("subspace vectors must have length {ambient}")));
        }
        if vectors.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("subspace basis".into()));
        }
        let m = DMatrix::from_fn(ambient, vectors.len(), |i, j| vectors[j][i]);
        let q = linalg::orthonormalize(&m, 1e-10);
        if q.ncols() != vectors.len() {
            return Err(Error::InvalidSubspace("basis vectors are linearly dependent".into()));
        }
        Ok(Self { basis: q })
    }

    /// Span of the columns, which need not be independent.
    pub fn span(m: &DMatrix<f64>) -> Self {
        Self { basis: linalg::orthonormalize(m, 1e-10) }
    }

    pub fn zero(ambient: usize) -> Self {
        Self { basis: DMatrix::zeros(ambient, 0) }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<f64>> {
        self.basis.column_iter().map(|c| c.iter().copied().collect()).collect()
    }

    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.basis * (self.basis.transpose() * v)
    }

    pub fn distance(&self, v: &DVector<f64>) -> f64 {
        (v - self.project(v)).norm()
    }
}

/// Circular cone `K_ε = {v : |v − (v·e)e| ≤ 2ε (v·e)}` around a unit axis
/// `e` lying in a subspace `L`.
#[derive(Clone, PartialEq, Debug)]
pub struct ConeSpec {
    axis: DVector<f64>,
    subspace: SubspaceSpec,
    eps: f64,
}

impl ConeSpec {
    /// `axis` is normalized; it must lie in `subspace` and `ε ∈ (0, 1)`.
    pub fn new(axis: &[f64], subspace: SubspaceSpec, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidCone(format!("aperture ε = {eps} must lie in (0, 1)")));
        }
        if axis.len() != subspace.ambient_dim() {
            return Err(Error::DimensionMismatch("cone axis and subspace differ in dimension".into()));
        }
        let axis = linalg::unit(&DVector::from_column_slice(axis)).ok_or_else(|| Error::InvalidCone("axis must be a nonzero finite vector".into()))?;
        if subspace.distance(&axis) > 1e-10 {
            return Err(Error::InvalidCone("axis must lie in the subspace L".into()));
        }
        Ok(Self { axis, subspace, eps })
    }

    /// Cone around `axis` with `L = span{axis}`.
    pub fn around(axis: &[f64], eps: f64) -> Result<Self> {
        let l = SubspaceSpec::new(axis.len(), &[axis.to_vec()])?;
        Self::new(axis, l, eps)
    }

    pub fn axis(&self) -> &DVector<f64> {
        &self.axis
    }

    pub fn subspace(&self) -> &SubspaceSpec {
        &self.subspace
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn dim(&self) -> usize {
        self.axis.len()
    }

    /// `(v·e, |v − (v·e)e|)`.
    fn split(&self, v: &DVector<f64>) -> (f64, f64) {
        let c = v.dot(&self.axis);
        let s = (v - &self.axis * c).norm();
        (c, s)
    }

    /// Membership with an absolute slack `tol`.
    pub fn contains(&self, v: &DVector<f64>, tol: f64) -> bool {
        let (c, s) = self.split(v);
        c >= -tol && s <= 2.0 * self.eps * c + tol
    }

    /// Euclidean distance from `v` to the (closed, convex) cone.
    pub fn distance(&self, v: &DVector<f64>) -> f64 {
        let a = 2.0 * self.eps;
        let (c, s) = self.split(v);
        if s <= a * c {
            0.0
        } else if a * s <= -c {
            (c * c + s * s).sqrt()
        } else {
            (s - a * c) / (1.0 + a * a).sqrt()
        }
    }

    /// Nearest point of the cone to `v`.
    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        let a = 2.0 * self.eps;
        let (c, s) = self.split(v);
        if s <= a * c {
            return v.clone();
        }
        if a * s <= -c {
            return DVector::zeros(v.len());
        }
        let w = v - &self.axis * c;
        let t = (c + a * s) / (1.0 + a * a);
        &self.axis * t + w * (a * t / s)
    }
}

fn check_nonzero(xi: &[f64]) -> Result<()> {
    if xi.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroFrequency);
    }
    Ok(())
}

/// Orthonormal basis of `ker A(ξ)`.
pub fn kernel_basis(op: &OperatorSpec, xi: &[f64], rank_tol: f64) -> Result<DMatrix<f64>> {
    let a = op.reduced_symbol(xi)?;
    check_nonzero(xi)?;
    Ok(linalg::kernel(&a, rank_tol))
}

pub fn symbol_rank(op: &OperatorSpec, xi: &[f64], rank_tol: f64) -> Result<usize> {
    let a = op.reduced_symbol(xi)?;
    check_nonzero(xi)?;
    Ok(linalg::rank(&a, rank_tol))
}

#[derive(Clone, PartialEq, Debug)]
pub struct RankProfile {
    pub min_rank: usize,
    pub max_rank: usize,
    pub is_constant_rank: bool,
    /// Rank at each sample point, in sample order.
    pub ranks: Vec<usize>,
    /// Extra frequencies examined between neighbours of differing rank.
    pub refined_points: usize,
}

/// Ranks over the sample; neighbouring points of different rank trigger a
/// refinement pass along the arc joining them.
pub fn rank_profile(op: &OperatorSpec, sample: &SphereSample, rank_tol: f64) -> Result<RankProfile> {
    if sample.is_empty() {
        return Err(Error::SampleTooSmall { needed: 1, got: 0 });
    }
    let ranks = sample
        .points()
        .map(|xi| symbol_rank(op, xi, rank_tol))
        .collect::<Result<Vec<_>>>()?;
    let mut min_rank = *ranks.iter().min().unwrap();
    let mut max_rank = *ranks.iter().max().unwrap();
    let mut refined_points = 0;
    if min_rank != max_rank {
        const STEPS: usize = 16;
        for i in 0..sample.len() {
            let j = nearest_neighbour(sample, i);
            if ranks[i] == ranks[j] {
                continue;
            }
            for s in 1..STEPS {
                let p = arc_point(sample.point(i), sample.point(j), s as f64 / STEPS as f64);
                let r = symbol_rank(op, &p, rank_tol)?;
                min_rank = min_rank.min(r);
                max_rank = max_rank.max(r);
                refined_points += 1;
            }
        }
    }
    Ok(RankProfile { min_rank, max_rank, is_constant_rank: min_rank == max_rank, ranks, refined_points })
}

fn nearest_neighbour(sample: &SphereSample, i: usize) -> usize {
    let p = sample.point(i);
    (0..sample.len())
        .filter(|&j| j != i)
        .map(|j| {
            let q = sample.point(j);
            let dot: f64 = p.iter().zip(q).map(|(a, b)| a * b).sum();
            (j, dot)
        })
        .filter(|&(_, dot)| dot > -1.0 + 1e-9)
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map_or(i, |(j, _)| j)
}

/// Unit directions of the wave cone found on a frequency sample.
#[derive(Clone, Debug)]
pub struct WaveConeSample {
    pub directions: Vec<DVector<f64>>,
    pub generating_freqs: Vec<Vec<f64>>,
    pub rank_tol: f64,
}

impl WaveConeSample {
    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

/// Kernel basis vectors at each sampled `ξ` plus
/// [`COMBINATIONS_PER_FREQ`] seeded random unit vectors inside each kernel.
pub fn wave_cone_sample(op: &OperatorSpec, sample: &SphereSample, rank_tol: f64, seed: u64) -> Result<WaveConeSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut directions = Vec::new();
    let mut generating_freqs = Vec::new();
    for xi in sample.points() {
        let q = kernel_basis(op, xi, rank_tol)?;
        if q.ncols() == 0 {
            continue;
        }
        for c in q.column_iter() {
            directions.push(c.into_owned());
            generating_freqs.push(xi.to_vec());
        }
        for _ in 0..COMBINATIONS_PER_FREQ {
            let coef = DVector::from_fn(q.ncols(), |_, _| StandardNormal.sample(&mut rng));
            if let Some(v) = linalg::unit(&(&q * coef)) {
                directions.push(v);
                generating_freqs.push(xi.to_vec());
            }
        }
    }
    Ok(WaveConeSample { directions, generating_freqs, rank_tol })
}

#[derive(Clone, Debug)]
pub struct EllipticityDistance {
    /// `min dist(v, L)` over unit `v` in the sampled kernels; `+∞` when no
    /// sampled kernel is nontrivial.
    pub delta: f64,
    /// No nontrivial kernel on the sample (the sentinel case).
    pub all_kernels_trivial: bool,
    /// Frequency and unit kernel vector realizing the minimum.
    pub argmin: Option<(Vec<f64>, DVector<f64>)>,
}

/// Distance from `Λ_A ∩ S` to the subspace `L`, minimized exactly over each
/// sampled kernel: at a frequency with kernel basis `Q`, the smallest value
/// of `|v − P_L v|` over unit `v ∈ ker A(ξ)` is `σ_min((I − P_L) Q)`.
pub fn ellipticity_distance(
    op: &OperatorSpec,
    l: &SubspaceSpec,
    sample: &SphereSample,
    rank_tol: f64,
) -> Result<EllipticityDistance> {
    if l.dim() == 0 {
        return Err(Error::InvalidSubspace("L must be nontrivial".into()));
    }
    if l.ambient_dim() != op.dim_v() {
        return Err(Error::DimensionMismatch(format!(
            "subspace lives in R^{}, operator acts on R^{}",
            l.ambient_dim(),
            op.dim_v()
        )));
    }
    let n = op.dim_v();
    let complement = DMatrix::identity(n, n) - linalg::projector(l.basis());
    let mut best: Option<(f64, Vec<f64>, DVector<f64>)> = None;
    for xi in sample.points() {
        let q = kernel_basis(op, xi, rank_tol)?;
        if q.ncols() == 0 {
            continue;
        }
        let r = &complement * &q;
        let (sv, v) = linalg::svd_full(&r);
        // The padded SVD lists min(rows, cols) values; r has n ≥ cols rows.
        let s = sv[q.ncols() - 1];
        if best.as_ref().is_none_or(|b| s < b.0) {
            let dir = &q * v.column(q.ncols() - 1);
            best = Some((s, xi.to_vec(), dir));
        }
    }
    Ok(match best {
        None => EllipticityDistance { delta: f64::INFINITY, all_kernels_trivial: true, argmin: None },
        Some((s, xi, v)) => EllipticityDistance {
            delta: if s <= rank_tol { 0.0 } else { s },
            all_kernels_trivial: false,
            argmin: Some((xi, v)),
        },
    })
}

#[derive(Clone, Debug)]
pub struct CancelingResult {
    pub is_canceling: bool,
    pub intersection_dim: usize,
    /// Orthonormal basis of `⋂ im A(ξ)` over the sample.
    pub intersection_basis: DMatrix<f64>,
    /// Intersection dimension after each sample point.
    pub history: Vec<usize>,
}

/// Intersects `im A(ξ)` over the sample; canceling iff the result is `{0}`.
pub fn canceling_check(op: &OperatorSpec, sample: &SphereSample, rank_tol: f64) -> Result<CancelingResult> {
    let d = op.d();
    if sample.len() < 2 * d {
        return Err(Error::SampleTooSmall { needed: 2 * d, got: sample.len() });
    }
    let mut q = DMatrix::identity(op.dim_w(), op.dim_w());
    let mut history = Vec::with_capacity(sample.len());
    for xi in sample.points() {
        if q.ncols() > 0 {
            let im = linalg::image(&op.reduced_symbol(xi)?, rank_tol);
            q = linalg::intersect(&q, &im, INTERSECTION_TOL);
        }
        history.push(q.ncols());
    }
    Ok(CancelingResult { is_canceling: q.ncols() == 0, intersection_dim: q.ncols(), intersection_basis: q, history })
}

/// `⋂ ker A(ξ)` over the sample, as an orthonormal basis.
pub fn common_kernel(op: &OperatorSpec, sample: &SphereSample, rank_tol: f64) -> Result<DMatrix<f64>> {
    let mut q = DMatrix::identity(op.dim_v(), op.dim_v());
    for xi in sample.points() {
        if q.ncols() == 0 {
            break;
        }
        let k = kernel_basis(op, xi, rank_tol)?;
        q = linalg::intersect(&q, &k, INTERSECTION_TOL);
    }
    Ok(q)
}

#[derive(Clone, Debug)]
pub struct RigidityResult {
    /// `N ∩ K_ε = {0}` on the sample, where `N = ⋂ ker A(ξ)`.
    pub certificate: bool,
    /// A unit element of `N ∩ K_ε` when the certificate fails.
    pub witness: Option<DVector<f64>>,
    pub common_kernel_dim: usize,
    /// `max {n·e : n ∈ N, |n| = 1}`; the cone is met iff this reaches
    /// `1/√(1 + 4ε²)`.
    pub max_axis_alignment: f64,
}

/// Co-canceling test on a cone. For a unit `n`, membership in `K_ε` reads
/// `n·e ≥ 1/√(1+4ε²)`, and over unit `n ∈ N` the alignment `n·e` peaks at
/// `P_N e / |P_N e|` with value `|P_N e|`, so the convex feasibility
/// question has a closed-form answer.
pub fn cocanceling_rigidity(
    op: &OperatorSpec,
    cone: &ConeSpec,
    sample: &SphereSample,
    rank_tol: f64,
) -> Result<RigidityResult> {
    if cone.dim() != op.dim_v() {
        return Err(Error::DimensionMismatch("cone and operator domain differ".into()));
    }
    let n = common_kernel(op, sample, rank_tol)?;
    let dim = n.ncols();
    if dim == 0 {
        return Ok(RigidityResult { certificate: true, witness: None, common_kernel_dim: 0, max_axis_alignment: 0.0 });
    }
    let pe = &n * (n.transpose() * cone.axis());
    let align = pe.norm();
    let a = 2.0 * cone.eps();
    let threshold = 1.0 / (1.0 + a * a).sqrt();
    let hit = align >= threshold - 1e-12;
    Ok(RigidityResult {
        certificate: !hit,
        witness: if hit { linalg::unit(&pe) } else { None },
        common_kernel_dim: dim,
        max_axis_alignment: align,
    })
}

/// Moore–Penrose inverse of the full symbol, `(2πi)^{-k} A_red(ξ)†`.
pub fn pseudoinverse_symbol(op: &OperatorSpec, xi: &[f64], rank_tol: f64) -> Result<DMatrix<Complex<f64>>> {
    let a = op.reduced_symbol(xi)?;
    check_nonzero(xi)?;
    let inv = full_factor(op.order()).inv();
    Ok(linalg::pseudo_inverse(&a, rank_tol).map(|v| inv * v))
}

/// `π(ξ) = A(ξ)†A(ξ)`, the orthogonal projection onto `(ker A(ξ))^⊥`.
/// The scalar factors cancel, so it is real.
pub fn projection_symbol(op: &OperatorSpec, xi: &[f64], rank_tol: f64) -> Result<DMatrix<f64>> {
    let a = op.reduced_symbol(xi)?;
    check_nonzero(xi)?;
    Ok(linalg::pseudo_inverse(&a, rank_tol) * a)
}
