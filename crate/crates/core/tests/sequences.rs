use proptest::prelude::*;
use ultraweight::sequences::{check_beta1, check_beta3, check_gamma1, check_lc, check_nq, check_nq_r};
use ultraweight::{VerdictKind, WeightSequence};

fn family() -> impl Strategy<Value = WeightSequence> {
    prop_oneof![
        (0.2f64..4.0).prop_map(|s| WeightSequence::gevrey(s).unwrap()),
        (1.05f64..3.0).prop_map(|q| WeightSequence::qgevrey(q).unwrap()),
        ((0.2f64..3.0), (0.3f64..3.0)).prop_map(|(s, r)| WeightSequence::gevrey(s).unwrap().power(r).unwrap()),
        ((0.2f64..3.0), (0.0f64..2.0)).prop_map(|(s, e)| WeightSequence::gevrey(s).unwrap().factorial_shift(e).unwrap()),
        (0.2f64..3.0).prop_map(|s| WeightSequence::gevrey(s).unwrap().hat()),
        prop::collection::vec(0.5f64..20.0, 8..200).prop_map(|q| WeightSequence::from_quotients(q).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn values_are_products_of_quotients(m in family()) {
        let top = m.range().min(1000);
        let mut acc = 0.0;
        for p in 1..=top {
            acc += m.log_quotient(p);
            let v = m.log_value(p);
            prop_assert!((acc - v).abs() <= 1e-12 * v.abs().max(1.0), "p={p}: {acc} vs {v}");
        }
    }

    #[test]
    fn lc_agrees_with_quotient_scan(q in prop::collection::vec(0.1f64..10.0, 2..60)) {
        let m = WeightSequence::from_quotients(q.clone()).unwrap();
        let sorted = q.windows(2).all(|w| w[0] <= w[1]);
        prop_assert_eq!(check_lc(&m).kind() == VerdictKind::Satisfied, sorted);
    }

    #[test]
    fn power_and_hat_transform_quotients(s in 0.2f64..3.0, r in 0.2f64..4.0) {
        let m = WeightSequence::gevrey(s).unwrap();
        let pw = m.power(r).unwrap();
        let hat = m.hat();
        for p in 1..200 {
            prop_assert!((pw.log_quotient(p) - r * m.log_quotient(p)).abs() <= 1e-12 * (1.0 + pw.log_quotient(p).abs()));
            let want = (p as f64).ln() + m.log_quotient(p);
            prop_assert!((hat.log_quotient(p) - want).abs() <= 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn beta1_implies_beta3(m in family()) {
        if check_beta1(&m).is_satisfied() {
            prop_assert!(check_beta3(&m).is_satisfied());
        }
    }

    #[test]
    fn beta1_matches_gamma1(m in family()) {
        if check_lc(&m).is_satisfied() {
            let (b, g) = (check_beta1(&m).kind(), check_gamma1(&m).kind());
            if b != VerdictKind::Inconclusive && g != VerdictKind::Inconclusive {
                prop_assert_eq!(b, g);
            }
        }
    }

    #[test]
    fn ramified_nq_is_nq_of_root(s in 0.3f64..4.0, r in 0.3f64..3.0) {
        let m = WeightSequence::gevrey(s).unwrap();
        prop_assert_eq!(check_nq_r(&m, r).kind(), check_nq(&m.power(1.0 / r).unwrap()).kind());
    }

    #[test]
    fn specs_round_trip(m in family()) {
        let json = serde_json::to_string(&m.to_spec()).unwrap();
        let back = WeightSequence::from_spec(&serde_json::from_str(&json).unwrap()).unwrap();
        for p in 0..=m.range().min(100) {
            let (a, b) = (m.log_value(p), back.log_value(p));
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}
