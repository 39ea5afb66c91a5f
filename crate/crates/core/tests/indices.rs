use proptest::prelude::*;
use ultraweight::constructions::associated_function;
use ultraweight::functions::compare_preceq;
use ultraweight::indices::{find_gamma1_witness, gamma_index_fun, gamma_index_seq, mu_fun};
use ultraweight::{WeightFunction, WeightSequence};

fn power(a: f64) -> WeightFunction {
    WeightFunction::power_law(a, 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn probes_are_monotone(a in 0.1f64..1.5, b in 0.1f64..1.5) {
        let e = gamma_index_fun(&power(a.max(b)), &power(b));
        let first_fail = e.samples.iter().position(|p| !p.verdict.is_satisfied());
        if let Some(i) = first_fail {
            prop_assert!(e.samples[i..].iter().all(|p| !p.verdict.is_satisfied()));
        }
    }

    #[test]
    fn ordering_chain(a in 0.1f64..1.5, b in 0.1f64..1.5) {
        let (s, w) = (power(a.max(b)), power(b));
        prop_assume!(compare_preceq(&s, &w).is_satisfied());
        let (g_w, g_sw, mu) = (gamma_index_fun(&w, &w), gamma_index_fun(&s, &w), mu_fun(&w));
        prop_assert!(g_w.lower - g_w.tolerance <= g_sw.upper);
        prop_assert!(g_sw.lower <= mu.upper + mu.tolerance);
    }

    #[test]
    fn scaling_law(a in 0.1f64..1.0, b in 0.1f64..1.0, r in prop::sample::select(vec![0.5, 2.0, 3.0])) {
        let (s, w) = (power(a.max(b)), power(b));
        let g = gamma_index_fun(&s, &w);
        let gr = gamma_index_fun(&s.power_substitute(r).unwrap(), &w.power_substitute(r).unwrap());
        prop_assume!(g.upper < g.cap && r * gr.upper < g.cap);
        prop_assert!((g.midpoint() - r * gr.midpoint()).abs() <= 2.0 * g.tolerance * r.max(1.0));
    }

    #[test]
    fn witness_implies_index_above_one(a in 0.1f64..2.0, b in 0.1f64..2.0) {
        let (s, w) = (power(a.max(b)), power(b));
        if find_gamma1_witness(&s, &w).is_some() {
            let g = gamma_index_fun(&s, &w);
            prop_assert!(g.upper > 1.0 - g.tolerance);
        }
    }
}

#[test]
fn sequence_and_function_indices_agree() {
    for (sm, sn) in [(1.0, 2.0), (1.0, 1.5), (2.0, 2.0), (0.5, 1.0), (1.5, 3.0)] {
        let (m, n) = (WeightSequence::gevrey(sm).unwrap(), WeightSequence::gevrey(sn).unwrap());
        let seq = gamma_index_seq(&m, &n);
        let fun = gamma_index_fun(&associated_function(&m).unwrap(), &associated_function(&n).unwrap());
        assert!(
            (seq.midpoint() - fun.midpoint()).abs() <= 2.0 * seq.tolerance,
            "({sm}, {sn}): seq {seq:?} fun [{}, {}]",
            fun.lower,
            fun.upper
        );
    }
}
