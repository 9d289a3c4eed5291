use num_traits::Zero;
use proptest::prelude::*;

use cantor_core::cantor::CantorPair;
use cantor_core::interval::IntervalSet;
use cantor_core::rational::{ratio, Rational};
use cantor_core::renorm::{
    difference_pair_search, verify_certificate, Certificate, DiffPairContext, PlanePoint,
    SearchLimits, Verdict,
};

fn covering(pair: &CantorPair, s: &Rational, depth: usize) -> IntervalSet {
    let left = pair.k.to_ifs().level_set(depth, 1 << 20).unwrap();
    let right = pair.kp.to_ifs().level_set(depth, 1 << 20).unwrap();
    left.minkowski_diff(&right.affine_image(s, &Rational::zero()).unwrap())
        .unwrap()
}

fn arb_pair() -> impl Strategy<Value = CantorPair> {
    [3i64..=7, 3i64..=7, 3i64..=7, 3i64..=7]
        .prop_map(|[p0, p1, q0, q1]| CantorPair::from_params([p0, p1, 1, q0, q1, 1]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verdicts_agree_with_coverings(
        pair in arb_pair(),
        s_num in 1i64..=12,
        t_num in -40i64..=40,
    ) {
        let s = ratio(s_num, 4);
        let t = ratio(t_num, 24);
        let limits = SearchLimits { depth_cap: 24, node_budget: 1 << 14 };
        let ctx = DiffPairContext::with_limits(&pair, limits);
        let cert = difference_pair_search(&ctx, &PlanePoint::new(s.clone(), t.clone()).unwrap());
        verify_certificate(&cert).unwrap();
        let back = Certificate::from_json(&cert.to_json()).unwrap();
        prop_assert_eq!(&back, &cert);
        match cert.verdict {
            Verdict::Yes => prop_assert!(covering(&pair, &s, 6).contains(&t)),
            Verdict::No => prop_assert!((0..=10).any(|d| !covering(&pair, &s, d).contains(&t))),
            Verdict::Unknown => {}
        }
    }
}
