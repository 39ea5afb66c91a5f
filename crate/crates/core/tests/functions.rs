use proptest::prelude::*;
use ultraweight::functions::{check_implication_chain, young_conjugate, ConvexPL, OmegaCondition};
use ultraweight::{TGrid, VerdictKind, WeightFunction, YGrid};

fn closed_form() -> impl Strategy<Value = WeightFunction> {
    prop_oneof![
        ((0.05f64..2.0), (0.1f64..5.0)).prop_map(|(a, c)| WeightFunction::power_law(a, c).unwrap()),
        ((1.0f64..4.0), (0.1f64..5.0)).prop_map(|(a, c)| WeightFunction::log_power(a, c).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn conjugate_is_nondecreasing_from_zero(w in closed_form()) {
        let c = young_conjugate(&w.normalize(), &YGrid::default()).unwrap();
        prop_assert_eq!(c.eval(0.0), 0.0);
        let slopes = c.slopes();
        prop_assert!(slopes.windows(2).all(|s| s[0] <= s[1]));
        prop_assert!(slopes.iter().all(|s| *s >= 0.0));
    }

    #[test]
    fn biconjugation_fixes_breakpoints(
        x0 in -5.0f64..5.0,
        gaps in prop::collection::vec(0.01f64..2.0, 2..40),
        incs in prop::collection::vec(0.0f64..3.0, 2..40),
        v0 in -10.0f64..10.0,
        s0 in -5.0f64..5.0,
    ) {
        let n = gaps.len().min(incs.len());
        let mut xs = vec![x0];
        let mut vals = vec![v0];
        let mut slope = s0;
        for i in 0..n {
            slope += incs[i];
            xs.push(xs[i] + gaps[i]);
            vals.push(vals[i] + slope * gaps[i]);
        }
        let g = ConvexPL::new(xs.clone(), vals.clone(), None, None).unwrap();
        let gg = g.conjugate().conjugate();
        for (x, v) in xs.iter().zip(&vals) {
            prop_assert!((gg.eval(*x) - v).abs() <= 1e-9 * v.abs().max(1.0));
        }
    }

    #[test]
    fn substitution_is_composition(w in closed_form(), r in 0.1f64..4.0) {
        let sub = w.power_substitute(r).unwrap();
        for t in TGrid::default().points().into_iter().step_by(7) {
            let (a, b) = (sub.at(t), w.at(t.powf(r)));
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300), "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn implication_chain_never_inverted(w in closed_form()) {
        let grid = TGrid::default();
        let verdicts = check_implication_chain(&w, &grid).unwrap();
        let kind = |c: OmegaCondition| verdicts.iter().find(|(k, _)| *k == c).unwrap().1.kind();
        let chain = [OmegaCondition::OmegaSnq, OmegaCondition::OmegaNq, OmegaCondition::Omega5, OmegaCondition::Omega2];
        for pair in chain.windows(2) {
            if kind(pair[0]) == VerdictKind::Satisfied {
                prop_assert_ne!(kind(pair[1]), VerdictKind::Violated, "{} holds but {} fails", pair[0], pair[1]);
            }
        }
    }

    #[test]
    fn specs_round_trip(w in closed_form(), r in 0.2f64..3.0) {
        for f in [w.clone(), w.power_substitute(r).unwrap(), w.normalize()] {
            let json = serde_json::to_string(&f.to_spec()).unwrap();
            let back = WeightFunction::from_spec(&serde_json::from_str(&json).unwrap()).unwrap();
            for t in TGrid::new(1e-2, 1e12, 100).unwrap().points() {
                let (a, b) = (f.at(t), back.at(t));
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
            }
        }
    }
}
