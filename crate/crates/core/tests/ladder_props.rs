use proptest::prelude::*;
use wavecone_core::ladder::{ladder_seed, q_ladder, SeedBoundary};
use wavecone_core::rational::{int, ratio};
use wavecone_core::Rational;

#[test]
fn endpoint_identity() {
    // q = d/(d−1) climbs to d/(d−k) in k−1 steps.
    for d in 2..8u32 {
        for k in 1..d {
            let q = ratio(d as i64, d as i64 - 1);
            assert_eq!(q_ladder(&q, d, k - 1).unwrap(), ratio(d as i64, (d - k) as i64));
        }
    }
}

#[test]
fn window_rejection_names_the_window() {
    let err = ladder_seed(&int(4), 2, 1).unwrap_err().to_string();
    assert!(err.contains("[1, 2/1)"), "{err}");
    let s = ladder_seed(&int(1), 2, 1).unwrap();
    assert_eq!(s.boundary, Some(SeedBoundary::TotalVariation));
}

proptest! {
    #[test]
    fn ladder_is_monotone_and_composes(num in 101i64..400, d in 1u32..8, r in 0u32..6, l in 0u32..6) {
        let q = Rational::new(num.into(), 100.into());
        let qr = q_ladder(&q, d, r).unwrap();
        prop_assert!(qr >= q);
        prop_assert_eq!(q_ladder(&qr, d, l).unwrap(), q_ladder(&q, d, r + l).unwrap());
    }

    #[test]
    fn seed_inverts_the_ladder(d in 2u32..7, k in 1u32..7, a in 1i64..1000) {
        // p spread over the admissible window.
        let p = match k < d {
            true => {
                let hi = ratio(d as i64, (d - k) as i64);
                int(1) + (hi - int(1)) * ratio(a, 1000)
            }
            false => int(1) + ratio(a, 10),
        };
        let s = ladder_seed(&p, d, k).unwrap();
        prop_assert!(s.q > int(1) && s.q < ratio(d as i64, d as i64 - 1));
        prop_assert_eq!(q_ladder(&s.q, d, k - 1).unwrap(), s.reached.clone());
        prop_assert!(s.reached >= p);
        if s.exact { prop_assert_eq!(s.reached, p); }
    }
}
