//! Dense real linear algebra on top of nalgebra's SVD: ranks, kernels,
//! images, Moore–Penrose inverses and subspace intersections.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

/// Singular values (descending) and a full `n×n` right-singular basis,
/// columns ordered like the singular values; missing values are zero.
pub fn svd_full(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let (rows, cols) = m.shape();
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv = order.iter().map(|&i| svd.singular_values[i]).collect();
    let v = DMatrix::from_fn(cols, cols, |r, c| vt[(order[c], r)]);
    (sv, v)
}

fn numerical_rank(sv: &[f64], rank_tol: f64) -> usize {
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rank_tol * smax).count()
}

/// Rank with singular values below `rank_tol·σ_max` counted as zero.
pub fn rank(m: &DMatrix<f64>, rank_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    numerical_rank(&svd_full(m).0, rank_tol)
}

/// Orthonormal basis of the null space, one vector per column.
pub fn kernel(m: &DMatrix<f64>, rank_tol: f64) -> DMatrix<f64> {
    let cols = m.ncols();
    if m.nrows() == 0 {
        return DMatrix::identity(cols, cols);
    }
    let (sv, v) = svd_full(m);
    let r = numerical_rank(&sv, rank_tol);
    v.columns(r, cols - r).into_owned()
}

/// Orthonormal basis of the column space.
pub fn image(m: &DMatrix<f64>, rank_tol: f64) -> DMatrix<f64> {
    if m.is_empty() {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| smax > 0.0 && svd.singular_values[i] > rank_tol * smax)
        .collect();
    DMatrix::from_fn(m.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// Moore–Penrose inverse with the same relative cutoff as [`rank`].
pub fn pseudo_inverse(m: &DMatrix<f64>, rank_tol: f64) -> DMatrix<f64> {
    let (rows, cols) = m.shape();
    if m.is_empty() {
        return DMatrix::zeros(cols, rows);
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let cut = rank_tol * smax;
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let mut out = DMatrix::zeros(cols, rows);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if smax > 0.0 && s > cut {
            out += (vt.row(i).transpose() * u.column(i).transpose()) / s;
        }
    }
    out
}

/// Orthonormal basis of the span of the columns of `m`.
pub fn orthonormalize(m: &DMatrix<f64>, rank_tol: f64) -> DMatrix<f64> {
    image(m, rank_tol)
}

/// Orthogonal projector `Q Qᵀ` onto the span of an orthonormal basis.
pub fn projector(q: &DMatrix<f64>) -> DMatrix<f64> {
    q * q.transpose()
}

/// Smallest singular value, zero for matrices with fewer rows than columns.
pub fn sigma_min(m: &DMatrix<f64>) -> f64 {
    if m.ncols() == 0 {
        return f64::INFINITY;
    }
    let (sv, _) = svd_full(m);
    sv.last().copied().unwrap_or(0.0)
}

/// Orthonormal basis of `span Q1 ∩ span Q2` for orthonormal `Q1`, `Q2`:
/// the vectors `Q1 c` with `(I − P₂) Q1 c = 0`.
pub fn intersect(q1: &DMatrix<f64>, q2: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = q1.nrows();
    if q1.ncols() == 0 || q2.ncols() == 0 {
        return DMatrix::zeros(n, 0);
    }
    let residual = (DMatrix::identity(n, n) - projector(q2)) * q1;
    // Absolute cutoff: Q1 has orthonormal columns, so σ(residual) ∈ [0, 1]
    // are the sines of the principal angles.
    let (sv, v) = svd_full(&residual);
    let keep: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] <= tol).collect();
    let c = DMatrix::from_fn(q1.ncols(), keep.len(), |r, j| v[(r, keep[j])]);
    orthonormalize(&(q1 * c), 1e-12)
}

/// Largest principal-angle sine between two subspaces given by orthonormal
/// bases: the spectral norm of the projector difference. Subspaces of
/// different dimension are at gap 1.
pub fn subspace_gap(q1: &DMatrix<f64>, q2: &DMatrix<f64>) -> f64 {
    if q1.ncols() != q2.ncols() {
        return 1.0;
    }
    if q1.ncols() == 0 {
        return 0.0;
    }
    svd_full(&(projector(q1) - projector(q2))).0[0]
}

pub fn unit(v: &DVector<f64>) -> Option<DVector<f64>> {
    let n = v.norm();
    (n > 0.0 && n.is_finite()).then(|| v / n)
}
