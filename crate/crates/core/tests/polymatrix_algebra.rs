mod common;

use common::{random_freq, rng};
use proptest::prelude::*;
use rand::Rng;
use wavecone_core::builtin::{builtin, Builtin};
use wavecone_core::linalg;
use wavecone_core::polymatrix::{annihilator, iterated_laplacian, laplacian_symbol, minimal_iteration_exponent, squared_norm, PolyMatrix};
use wavecone_core::rational::int;
use wavecone_core::{MultiIndex, OperatorSpec, Poly, DEFAULT_RANK_TOL as TOL};

fn random_poly(r: &mut impl Rng, nvars: usize, max_deg: u32) -> Poly {
    let mut p = Poly::zero(nvars);
    for deg in 0..=max_deg {
        for alpha in MultiIndex::all_of_modulus(nvars, deg) {
            if r.random_bool(0.5) {
                p.add_term(alpha, &int(r.random_range(-4..=4)));
            }
        }
    }
    p
}

fn random_matrix(seed: u64, n: usize, nvars: usize, max_deg: u32) -> PolyMatrix {
    let mut r = rng(seed);
    PolyMatrix::from_fn(n, n, nvars, |_, _| random_poly(&mut r, nvars, max_deg))
}

#[test]
fn det_examples() {
    let n2 = squared_norm(2);
    let m = PolyMatrix::identity(2, 2).scale_poly(&n2);
    assert_eq!(m.det().unwrap(), &n2 * &n2);
    let grad = builtin(Builtin::Gradient, 2, 1, None).unwrap();
    assert_eq!(laplacian_symbol(&grad).det().unwrap(), n2);
}

#[test]
fn det_agrees_with_numeric_determinant() {
    for seed in 0..5 {
        let m = random_matrix(seed, 4, 2, 2);
        let det = m.det().unwrap();
        let mut r = rng(100 + seed);
        for _ in 0..10 {
            let xi = random_freq(&mut r, 2);
            let num = m.eval(&xi).determinant();
            assert!((det.eval(&xi) - num).abs() <= 1e-9 * num.abs().max(1.0));
        }
    }
}

#[test]
fn bareiss_matches_expansion() {
    for seed in 0..3 {
        let m = random_matrix(seed, 4, 2, 1);
        assert_eq!(m.det().unwrap(), m.det_bareiss().unwrap());
    }
    // Size 5 goes through Bareiss; compare with the expansion of a minor-free oracle.
    let m = random_matrix(42, 5, 1, 1);
    let det = m.det().unwrap();
    let mut r = rng(43);
    for _ in 0..5 {
        let x = [r.random_range(-2.0..2.0)];
        let num = m.eval(&x).determinant();
        assert!((det.eval(&x) - num).abs() <= 1e-8 * num.abs().max(1.0));
    }
}

#[test]
fn adjugate_identity_random_3x3() {
    for seed in 0..6 {
        let m = random_matrix(seed, 3, 2, 2);
        let adj = m.adjugate().unwrap();
        let det = m.det().unwrap();
        let lhs = adj.mul(&m).unwrap();
        let rhs = PolyMatrix::identity(3, 2).scale_poly(&det);
        assert!(lhs.sub(&rhs).unwrap().is_zero());
        assert!(m.mul(&adj).unwrap().sub(&rhs).unwrap().is_zero());
    }
}

#[test]
fn symmetric_gradient_laplacian() {
    let sg = builtin(Builtin::SymmetricGradient, 2, 1, None).unwrap();
    let l = laplacian_symbol(&sg);
    assert_eq!(l.homogeneity(), Some(2));
    assert_eq!(l.audit_degree(), Some(2));
    assert_eq!(l.get(0, 1), l.get(1, 0));
    // det = |ξ|⁴/2 (eigenvalues |ξ|²/2 on ξ^⊥ and |ξ|² along ξ).
    let n2 = squared_norm(2);
    assert_eq!(l.det().unwrap(), (&n2 * &n2).scale(&wavecone_core::rational::ratio(1, 2)));
    let mut r = rng(8);
    for _ in 0..50 {
        let xi = random_freq(&mut r, 2);
        let ev = l.eval(&xi).symmetric_eigenvalues();
        assert!(ev.min() > 0.0);
    }
}

fn check_exactness(b: &OperatorSpec, seed: u64) {
    let ann = annihilator(b).unwrap();
    assert!(ann.symbolic_zero);
    assert!(ann.symbol.mul(&PolyMatrix::from_operator(b)).unwrap().is_zero());
    assert_eq!(ann.order, 2 * b.order() * b.dim_v() as u32);
    assert_eq!(ann.symbol.audit_degree(), Some(ann.order));
    assert_eq!(ann.op.order(), ann.order);
    assert!(OperatorSpec::compose(&ann.op, b).unwrap().is_zero());
    let mut r = rng(seed);
    for _ in 0..100 {
        let xi = random_freq(&mut r, b.d());
        let im = linalg::image(&b.reduced_symbol(&xi).unwrap(), TOL);
        let ker = linalg::kernel(&ann.op.reduced_symbol(&xi).unwrap(), 1e-9);
        assert_eq!(im.ncols(), ker.ncols());
        assert!(linalg::subspace_gap(&im, &ker) < 1e-8);
    }
}

#[test]
fn annihilator_of_gradient() {
    let grad = builtin(Builtin::Gradient, 2, 1, None).unwrap();
    let ann = annihilator(&grad).unwrap();
    let (x, y) = (Poly::var(2, 0), Poly::var(2, 1));
    assert_eq!(ann.symbol.get(0, 0), &(&y * &y));
    assert_eq!(ann.symbol.get(1, 1), &(&x * &x));
    assert_eq!(ann.symbol.get(0, 1), &-&(&x * &y));
    check_exactness(&grad, 1);
    check_exactness(&builtin(Builtin::Gradient, 3, 1, None).unwrap(), 2);
}

#[test]
fn annihilator_of_symmetric_gradient() {
    let sg = builtin(Builtin::SymmetricGradient, 2, 1, None).unwrap();
    check_exactness(&sg, 3);
    assert_eq!(annihilator(&sg).unwrap().order, 4);
}

#[test]
fn annihilator_of_hessian() {
    check_exactness(&builtin(Builtin::HessianK, 2, 1, Some(2)).unwrap(), 4);
}

#[test]
fn annihilator_preconditions() {
    assert!(annihilator(&builtin(Builtin::DivergenceRows, 2, 1, None).unwrap()).is_err());
    assert!(annihilator(&builtin(Builtin::SymmetricGradient, 5, 1, None).unwrap()).is_err());
}

#[test]
fn iterated_laplacian_keeps_the_kernel() {
    let curl = builtin(Builtin::Curl, 2, 1, None).unwrap();
    let it = iterated_laplacian(&curl, 2).unwrap();
    assert_eq!(it.audit_degree(), Some(4));
    let k = linalg::kernel(&it.eval(&[0.0, 1.0]), 1e-9);
    assert_eq!(k.ncols(), 1);
    assert!((k[(1, 0)].abs() - 1.0).abs() < 1e-12);
    let mut r = rng(9);
    for op in [curl, builtin(Builtin::DivergenceRows, 2, 1, None).unwrap()] {
        for rr in 1..=3 {
            let it = iterated_laplacian(&op, rr).unwrap();
            for _ in 0..20 {
                let xi = random_freq(&mut r, 2);
                let a = linalg::kernel(&op.reduced_symbol(&xi).unwrap(), TOL);
                let b = linalg::kernel(&it.eval(&xi), 1e-9);
                assert_eq!(a.ncols(), b.ncols());
                assert!(linalg::subspace_gap(&a, &b) < 1e-8);
            }
        }
    }
    assert_eq!(minimal_iteration_exponent(1, 4), 3);
}

#[test]
fn annihilator_round_trips_through_operator() {
    let sg = builtin(Builtin::SymmetricGradient, 2, 1, None).unwrap();
    let ann = annihilator(&sg).unwrap();
    assert_eq!(PolyMatrix::from_operator(&ann.op), ann.symbol);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn adjugate_identity_holds(seed in 0u64..100_000, n in 1usize..4, deg in 0u32..3) {
        let m = random_matrix(seed, n, 2, deg);
        let lhs = m.adjugate().unwrap().mul(&m).unwrap();
        let rhs = PolyMatrix::identity(n, 2).scale_poly(&m.det().unwrap());
        prop_assert!(lhs.sub(&rhs).unwrap().is_zero());
    }

    #[test]
    fn det_is_multiplicative(seed in 0u64..100_000) {
        let a = random_matrix(seed, 3, 2, 1);
        let b = random_matrix(seed + 7, 3, 2, 1);
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(ab.det().unwrap(), &a.det().unwrap() * &b.det().unwrap());
    }
}
