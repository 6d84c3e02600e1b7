use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use wavecone::core::builtin::{builtin, Builtin};
use wavecone::core::{MultiIndex, DEFAULT_RANK_TOL};
use wavecone::lab::mihlin::band_limited_field;
use wavecone::spectral::{
    a_representative, apply_laplace_plus_identity, apply_multiplier, apply_operator, bessel_norm, derivative, kernel_eval,
    kernel_homogeneity, projection_multiplier, riesz_potential, solve_laplace, solve_perturbed, Perturbation,
};
use wavecone::{Category, Error, TorusField, TorusGrid, C64};

fn grid2(n: usize) -> TorusGrid {
    TorusGrid::new(2, n).unwrap()
}

#[test]
fn derivatives_match_closed_form() {
    // f = sin 2π(x + 2y) + cos 6πx, differentiated by hand.
    let g = grid2(32);
    let f = TorusField::from_real_fn(g, 1, |x| vec![(TAU * (x[0] + 2.0 * x[1])).sin() + (3.0 * TAU * x[0]).cos()]).unwrap();
    let fxy = derivative(&f, &MultiIndex::new(vec![1, 1]).unwrap()).unwrap();
    let fxx = derivative(&f, &MultiIndex::new(vec![2, 0]).unwrap()).unwrap();
    let mut err: f64 = 0.0;
    for idx in 0..g.len() {
        let x = g.point(idx);
        let ph = TAU * (x[0] + 2.0 * x[1]);
        let exy = -2.0 * TAU * TAU * ph.sin();
        let exx = -TAU * TAU * ph.sin() - 9.0 * TAU * TAU * (3.0 * TAU * x[0]).cos();
        err = err.max((fxy.at(idx)[0].re - exy).abs()).max((fxx.at(idx)[0].re - exx).abs());
    }
    assert!(err < 1e-9, "{err}");
}

#[test]
fn bessel_and_riesz_on_single_modes() {
    let g = grid2(32);
    for zeta in [[1i64, 0], [3, -4], [0, 7]] {
        let f = TorusField::single_mode(g, &zeta, &[C64::new(1.0, 0.0)]).unwrap();
        let r2 = (zeta[0] * zeta[0] + zeta[1] * zeta[1]) as f64;
        for s in [-1.0, 0.5, 2.0] {
            let expect = (1.0 + 4.0 * PI * PI * r2).powf(s / 2.0);
            assert!((bessel_norm(&f, s, 2.0).unwrap() - expect).abs() < 1e-12 * expect);
        }
        let i = riesz_potential(&f, 1.0).unwrap();
        let expect = f.scale(1.0 / (TAU * r2.sqrt()));
        assert!(i.sub(&expect).unwrap().max_abs() < 1e-14);
    }
    assert!(riesz_potential(&TorusField::zeros(g, 1), 2.0).is_err());
    assert!(bessel_norm(&TorusField::zeros(g, 1), 1.0, 1.0).is_err());
}

#[test]
fn projection_is_idempotent_and_kills_kernel_part() {
    let g = grid2(32);
    for (name, m) in [(Builtin::Curl, 2), (Builtin::DivergenceRows, 1), (Builtin::SymmetricGradient, 1)] {
        let op = builtin(name, 2, m, None).unwrap();
        let u = band_limited_field(g, op.dim_v(), 6, 1).unwrap();
        let pi = projection_multiplier(&op, DEFAULT_RANK_TOL);
        let once = apply_multiplier(&u, &pi).unwrap();
        let twice = apply_multiplier(&once, &pi).unwrap();
        assert!(twice.sub(&once).unwrap().l2_norm() < 1e-12 * u.l2_norm());
        let rest = u.sub(&a_representative(&op, &u).unwrap()).unwrap();
        assert!(apply_operator(&op, &rest).unwrap().l2_norm() < 1e-10 * apply_operator(&op, &u).unwrap().l2_norm());
    }
}

#[test]
fn perturbation_contracts_at_rate_delta() {
    let g = grid2(32);
    let op = builtin(Builtin::Gradient, 2, 1, None).unwrap();
    let zero = Perturbation::zero(&op);
    let f = band_limited_field(g, 1, 5, 2).unwrap();
    let s = solve_perturbed(&op, &zero, &f, 1e-12, 5).unwrap();
    assert_eq!(s.iterations, 1);
    assert!(s.u.sub(&solve_laplace(&op, &f).unwrap()).unwrap().max_abs() < 1e-15);

    let big = Perturbation::constant(&op, g, &[(MultiIndex::new(vec![0, 2]).unwrap(), nalgebra::DMatrix::from_element(1, 1, 3.0))]).unwrap();
    let high = TorusField::single_mode(g, &[0, 9], &[C64::new(1.0, 0.0)]).unwrap();
    match solve_perturbed(&op, &big, &high, 1e-10, 50) {
        Err(e @ Error::Diverged { contraction, .. }) => {
            assert!(contraction > 2.9, "{contraction}");
            assert_eq!(e.category(), Category::Precondition);
        }
        other => panic!("expected divergence, got {other:?}"),
    }
    assert!(Perturbation::constant(&op, g, &[(MultiIndex::new(vec![1, 0]).unwrap(), nalgebra::DMatrix::from_element(1, 1, 1.0))]).is_err());
}

#[test]
fn kernel_checks() {
    let lap = builtin(Builtin::Laplacian, 2, 1, None).unwrap();
    let k = kernel_eval(&lap, 64, 32.0).unwrap();
    assert!(kernel_homogeneity(&k, &[vec![4, 0]]).is_none());
    assert!(kernel_eval(&lap, 64, 40.0).is_err());
    // Rank of the ∂₁-only operator drops on the axis ζ₁ = 0.
    let op = wavecone::core::OperatorSpec::new(
        2,
        1,
        1,
        1,
        [(MultiIndex::new(vec![1, 0]).unwrap(), wavecone::core::operator::QMatrix::from_i64(1, 1, &[1]))],
    )
    .unwrap();
    assert_eq!(kernel_eval(&op, 16, 8.0).unwrap_err().category(), Category::Precondition);
}

fn op_strategy() -> impl Strategy<Value = wavecone::core::OperatorSpec> {
    prop_oneof![
        Just(builtin(Builtin::Gradient, 2, 2, None).unwrap()),
        Just(builtin(Builtin::Curl, 2, 2, None).unwrap()),
        Just(builtin(Builtin::SymmetricGradient, 2, 1, None).unwrap()),
        Just(builtin(Builtin::HessianK, 2, 1, Some(2)).unwrap()),
        Just(builtin(Builtin::DivergenceRows, 2, 1, None).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn laplace_solve_inverts(op in op_strategy(), seed in 0u64..1000, band in 1i64..8) {
        let f = band_limited_field(grid2(32), op.dim_v(), band, seed).unwrap();
        let u = solve_laplace(&op, &f).unwrap();
        let back = apply_laplace_plus_identity(&op, &u).unwrap();
        let err = back.sub(&f).unwrap().l2_norm() / f.l2_norm();
        // Round-off of u in physical space reaches every mode, and applying
        // I + B*B amplifies it by the symbol's size at the grid corner.
        let kappa = 1.0 + (TAU * 16.0 * 2f64.sqrt()).powi(2 * op.order() as i32);
        prop_assert!(err <= 1e-15 * kappa, "relative residual {err:.2e}, kappa {kappa:.2e}");
    }

    #[test]
    fn fft_round_trip(seed in 0u64..1000, n in prop::sample::select(vec![8usize, 16, 32])) {
        let g = TorusGrid::new(3, n).unwrap();
        let f = band_limited_field(g, 2, 2, seed).unwrap();
        let back = f.spectrum().to_field();
        prop_assert!(back.sub(&f).unwrap().max_abs() <= 1e-12 * f.max_abs());
    }
}
