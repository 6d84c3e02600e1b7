use nalgebra::{DVector, Matrix2};
use proptest::prelude::*;
use wavecone::core::builtin::{builtin, Builtin};
use wavecone::core::cone::ConeSpec;
use wavecone::core::rational::{int, ratio};
use wavecone::lab::compactness::compactness_diagnostics;
use wavecone::lab::conformal::{conformal_coords, dist_to_conformal};
use wavecone::lab::experiments::{
    disc_density, higher_integrability_experiment, hyperplane_density, local_canceling_experiment, ExperimentConfig, Mode,
};
use wavecone::lab::laminate::{laminate, LaminateSpec};
use wavecone::lab::measure::{bump, mollify, mollify_in_cone, polar_diagnostics, Atom, DiscreteMeasure};
use wavecone::lab::swirl::{swirl_fields, Swirl};
use wavecone::lab::SubBox;
use wavecone::{Category, TorusField, TorusGrid};

fn grid2(n: usize) -> TorusGrid {
    TorusGrid::new(2, n).unwrap()
}

#[test]
fn mollify_matches_direct_convolution() {
    let g = grid2(16);
    let dens = TorusField::from_real_fn(g, 2, |x| vec![(7.0 * x[0]).sin() + x[1], (x[0] * x[1]).cos()]).unwrap();
    let mu = DiscreteMeasure::from_density(dens.clone()).unwrap();
    let t = 0.2;
    let fast = mollify(&mu, t).unwrap();
    // Σ_y ρ(x − y) f(y) hᵈ with the normalized bump, computed directly.
    let h2 = g.cell_volume();
    let wrap = |v: f64| (v + 0.5).rem_euclid(1.0) - 0.5;
    let mass: f64 = (0..g.len()).map(|i| bump(&g.point(i).iter().map(|&v| wrap(v)).collect::<Vec<_>>(), t)).sum::<f64>() * h2;
    for i in (0..g.len()).step_by(7) {
        let x = g.point(i);
        let mut acc = [0.0; 2];
        for j in 0..g.len() {
            let y = g.point(j);
            let w = bump(&[wrap(x[0] - y[0]), wrap(x[1] - y[1])], t) / mass * h2;
            acc[0] += w * dens.at(j)[0].re;
            acc[1] += w * dens.at(j)[1].re;
        }
        assert!((fast.at(i)[0].re - acc[0]).abs() < 1e-12 && (fast.at(i)[1].re - acc[1]).abs() < 1e-12);
    }
}

#[test]
fn aperture_bound_on_m_inf() {
    let eps: f64 = 0.3;
    let cone = ConeSpec::around(&[1.0, 0.0], eps).unwrap();
    let theta = eps.asin();
    let f = TorusField::from_real_fn(grid2(8), 2, |x| {
        let s = 1.0 + x[0];
        vec![s * theta.cos(), s * theta.sin()]
    })
    .unwrap();
    let diag = polar_diagnostics(&f, &cone).unwrap();
    assert!((diag.m_inf - eps / (1.0 - eps * eps).sqrt()).abs() < 1e-14);
    assert!(diag.m_inf <= 2.0 * eps);
    assert_eq!(diag.max_dist, 0.0);
}

#[test]
fn swirl_hessian_matches_finite_differences() {
    let sw = Swirl::new(1e-2).unwrap();
    // Points in each regime: η ≡ 1, the transition annulus, η ≡ 0.
    for (r, th) in [(0.3, 0.4), (0.05, 2.0), (3e-3, 1.0), (4e-4, 5.0), (5e-5, 3.0)] {
        let x = [r * f64::cos(th), r * f64::sin(th)];
        let h = 1e-3 * r;
        let u = |dx: f64, dy: f64| sw.value([x[0] + dx, x[1] + dy]);
        let d2 = |a: [f64; 2], b: [f64; 2]| {
            let p = |s: f64, t: f64| u(s * a[0] * h + t * b[0] * h, s * a[1] * h + t * b[1] * h);
            (p(1.0, 1.0) - p(1.0, -1.0) - p(-1.0, 1.0) + p(-1.0, -1.0)) / (4.0 * h * h)
        };
        let fd = Matrix2::new(d2([1.0, 0.0], [1.0, 0.0]), d2([1.0, 0.0], [0.0, 1.0]), d2([0.0, 1.0], [1.0, 0.0]), d2([0.0, 1.0], [0.0, 1.0]));
        let exact = sw.hessian(x);
        let split = sw.part_i(x) + sw.part_ii(x);
        let scale = exact.norm().max(1e-300);
        assert!((fd - exact).norm() <= 1e-5 * scale, "r = {r}: {fd} vs {exact}");
        assert!((split - exact).norm() <= 1e-12 * scale, "r = {r}");
    }
}

#[test]
fn swirl_fields_have_trace_free_first_part() {
    let [h, i, ii] = swirl_fields(1e-2, grid2(32)).unwrap();
    let mut worst: f64 = 0.0;
    for idx in 0..h.grid().len() {
        let (a, b, c) = (h.real_at(idx), i.real_at(idx), ii.real_at(idx));
        worst = worst.max((&a - &b - &c).norm() / a.norm().max(1.0));
        assert!((b[0] + b[3]).abs() <= 1e-12 * b.norm().max(1.0));
    }
    assert!(worst < 1e-12);
    assert!(swirl_fields(1e-2, TorusGrid::new(3, 8).unwrap()).is_err());
}

#[test]
fn compactness_separates_laminates_from_concentration() {
    let g = grid2(64);
    let curl = builtin(Builtin::Curl, 2, 2, None).unwrap();
    let spec = LaminateSpec { xi: vec![0, 1], p: vec![0.0, 1.0, 0.0, -1.0], b0: vec![0.0; 4], delta: 1.0 };
    let lams: Vec<_> = [2, 4, 8, 16].iter().map(|&j| laminate(&curl, &spec, j, g).unwrap()).collect();
    let thresholds = [0.5, 2.0, 8.0];
    let rep = compactness_diagnostics(&lams, SubBox::default(), &thresholds, 1.0).unwrap();
    assert!(rep.equiintegrable);

    let atom = DiscreteMeasure::from_atoms(g, 1, vec![Atom { location: vec![0.5, 0.5], weight: vec![1.0] }]).unwrap();
    let peaks: Vec<_> = [0.25, 0.125, 0.0625].iter().map(|&t| mollify(&atom, t).unwrap()).collect();
    let rep = compactness_diagnostics(&peaks, SubBox::default(), &thresholds, 1.0).unwrap();
    assert!(!rep.equiintegrable);
    assert!(rep.sup_tails.windows(2).all(|w| w[1] <= w[0]));

    let c = TorusField::from_real_fn(g, 1, |_| vec![3.0]).unwrap();
    let rep = compactness_diagnostics(&[c.clone(), c], SubBox::default(), &thresholds, 2.0).unwrap();
    assert_eq!(rep.tails[0], rep.tails[1]);
    assert_eq!(rep.weakstar_gap, 0.0);
    assert!(compactness_diagnostics(&[], SubBox::default(), &thresholds, 1.0).is_err());
    assert!(compactness_diagnostics(&peaks, SubBox::default(), &[2.0, 1.0], 1.0).is_err());
}

#[test]
fn local_canceling_ratio_is_resolution_stable() {
    let grad = builtin(Builtin::Gradient, 2, 1, None).unwrap();
    let atoms = vec![Atom { location: vec![0.5, 0.5], weight: vec![1.0] }, Atom { location: vec![0.4, 0.6], weight: vec![-0.5] }];
    let coarse = DiscreteMeasure::from_atoms(grid2(64), 1, atoms).unwrap();
    let fine = coarse.regrid(grid2(128)).unwrap();
    let a = local_canceling_experiment(&grad, &coarse, 0.0625, SubBox::default()).unwrap();
    let b = local_canceling_experiment(&grad, &fine, 0.0625, SubBox::default()).unwrap();
    assert!((a.ratio - b.ratio).abs() <= 0.25 * b.ratio, "{} vs {}", a.ratio, b.ratio);
    assert_eq!(a.exponent, 2.0);

    let zero = DiscreteMeasure::zero(grid2(64), 1);
    assert_eq!(local_canceling_experiment(&grad, &zero, 0.0625, SubBox::default()).unwrap().ratio, 0.0);

    let div = builtin(Builtin::DivergenceRows, 2, 1, None).unwrap();
    let e = local_canceling_experiment(&div, &DiscreteMeasure::zero(grid2(64), 4), 0.0625, SubBox::default()).unwrap_err();
    assert_eq!(e.category(), Category::Gate);
    assert!(e.to_string().contains("not canceling"));
    let lap = builtin(Builtin::Laplacian, 2, 1, None).unwrap();
    let e = local_canceling_experiment(&lap, &zero, 0.0625, SubBox::default()).unwrap_err();
    assert!(e.to_string().contains("order"));
}

#[test]
fn experiment_gates() {
    let g = grid2(64);
    let div = builtin(Builtin::DivergenceRows, 2, 1, None).unwrap();
    let axis = [0.5f64.sqrt(), 0.0, 0.0, 0.5f64.sqrt()];
    let cone = ConeSpec::around(&axis, 0.05).unwrap();
    let mu = DiscreteMeasure::from_density(disc_density(g, &[0.5, 0.5], 0.2, &axis).unwrap()).unwrap();
    let family = vec![(0.125, mu.clone()), (0.0625, mu)];

    // p = 3 lies beyond d/(d−k) = 2.
    let mut cfg = ExperimentConfig::new(int(3));
    assert_eq!(higher_integrability_experiment(&div, &family, &cone, &cfg).unwrap_err().category(), Category::Gate);
    cfg.force = true;
    let rep = higher_integrability_experiment(&div, &family, &cone, &cfg).unwrap();
    assert_eq!(rep.mode, Mode::Exploratory);
    assert!(rep.ladder_seed.is_none());

    let rep = higher_integrability_experiment(&div, &family, &cone, &ExperimentConfig::new(ratio(3, 2))).unwrap();
    assert_eq!(rep.mode, Mode::Gated);
    assert!(!rep.sigma_vanishes);
    assert!(rep.rows.iter().all(|r| r.cone_max_dist == 0.0 && r.m_inf < 1e-12));

    // Polar e₁⊗e₁ is far outside the cone around I/√2.
    let off = DiscreteMeasure::from_density(disc_density(g, &[0.5, 0.5], 0.2, &[1.0, 0.0, 0.0, 0.0]).unwrap()).unwrap();
    let e = higher_integrability_experiment(&div, &[(0.125, off)], &cone, &ExperimentConfig::new(int(2))).unwrap_err();
    assert!(e.to_string().contains("leaves the cone"));

    let curl = builtin(Builtin::Curl, 2, 2, None).unwrap();
    let rank_one = [1.0, 0.0, 0.0, 0.0];
    let line = DiscreteMeasure::from_density(hyperplane_density(g, 0, 0.5, &rank_one).unwrap()).unwrap();
    let mut forced = ExperimentConfig::new(int(2));
    forced.force = true;
    let rep = higher_integrability_experiment(&curl, &[(0.125, line)], &ConeSpec::around(&rank_one, 0.05).unwrap(), &forced).unwrap();
    assert!(rep.sigma_vanishes);
    assert!((rep.rows[0].tv_mu - 1.0).abs() < 1e-12);
}

#[test]
fn laminate_rejects_amplitude_outside_kernel() {
    let curl = builtin(Builtin::Curl, 2, 2, None).unwrap();
    let spec = LaminateSpec { xi: vec![1, 0], p: vec![0.0, 1.0, 0.0, 0.0], b0: vec![0.0; 4], delta: 1.0 };
    assert_eq!(laminate(&curl, &spec, 4, grid2(64)).unwrap_err().category(), Category::Gate);
    let ok = LaminateSpec { p: vec![1.0, 0.0, 0.0, 0.0], ..spec };
    assert_eq!(laminate(&curl, &ok, 32, grid2(64)).unwrap_err().category(), Category::Precondition);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mollified_atoms_keep_mass_and_cone(
        locs in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..4),
        tilts in prop::collection::vec(-0.09f64..0.09, 1..4),
        t in 0.07f64..0.3,
    ) {
        let g = grid2(32);
        let cone = ConeSpec::around(&[1.0, 0.0], 0.1).unwrap();
        let atoms: Vec<Atom> = locs.iter().zip(tilts.iter().cycle()).map(|(&(x, y), &s)| Atom { location: vec![x, y], weight: vec![1.0, s] }).collect();
        let mu = DiscreteMeasure::from_atoms(g, 2, atoms).unwrap();
        let (f, ok) = mollify_in_cone(&mu, t, &cone, 1e-12).unwrap();
        prop_assert!(ok);
        let m = f.mean();
        let expect = mu.mass();
        prop_assert!((m[0].re - expect[0]).abs() < 1e-12 && (m[1].re - expect[1]).abs() < 1e-12);
        prop_assert!(f.lq_norm(1.0) <= mu.total_variation() + 1e-12);
    }

    #[test]
    fn conformal_coordinates(a in prop::array::uniform4(-5.0f64..5.0)) {
        let m = Matrix2::new(a[0], a[1], a[2], a[3]);
        let z = conformal_coords(&m);
        prop_assert!((z.reconstruct() - m).norm() < 1e-12);
        prop_assert!((m.determinant() - (z.a_plus.norm_sqr() - z.a_minus.norm_sqr())).abs() < 1e-10);
        if let (Some(mu), Ok(dist)) = (z.dilatation(), dist_to_conformal(&m)) {
            prop_assert!(dist <= mu.norm() + 1e-12);
            prop_assert_eq!(mu.norm() < 1.0, m.determinant() > 0.0 || z.a_minus.norm() == 0.0);
        }
    }
}

#[test]
fn polar_diagnostics_checks_shapes() {
    let f = TorusField::zeros(grid2(8), 3);
    assert!(polar_diagnostics(&f, &ConeSpec::around(&[1.0, 0.0], 0.1).unwrap()).is_err());
    let v = DVector::from_vec(vec![1.0, 0.0]);
    assert!(ConeSpec::around(&[1.0, 0.0], 0.1).unwrap().contains(&v, 0.0));
}
