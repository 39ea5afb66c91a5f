use super::{TailSum, WeightSequence};
use crate::special::ln_factorial;
use crate::verdict::ConditionVerdict;

/// Largest `Q` tried by the beta checks.
pub const Q_MAX: usize = 8;
/// A running supremum is stable when it moves by less than this over the last doubling.
pub const STABLE_REL: f64 = 1e-3;

/// Second differences of a log sequence; first index (of the later entry) where it dips.
fn first_convexity_failure(logs: impl Fn(usize) -> f64, range: usize) -> Option<(usize, f64)> {
    let mut prev = logs(0);
    let mut cur = logs(1);
    for p in 1..range {
        let next = logs(p + 1);
        let d = prev + next - 2.0 * cur;
        let tol = 1e-12 * (prev.abs() + 2.0 * cur.abs() + next.abs()) + 1e-14;
        if d < -tol {
            return Some((p + 1, (next - cur) - (cur - prev)));
        }
        prev = cur;
        cur = next;
    }
    None
}

/// Log-convexity `M_p^2 <= M_{p-1} M_{p+1}` on `0..=range`.
pub fn check_lc(m: &WeightSequence) -> ConditionVerdict {
    let range = m.range();
    if range < 2 {
        return ConditionVerdict::satisfied([("range", range as f64)]);
    }
    match first_convexity_failure(|p| m.log_value(p), range) {
        None => ConditionVerdict::satisfied([("range", range as f64)]),
        Some((p, log_ratio)) => ConditionVerdict::violated(
            p as f64,
            log_ratio.exp(),
            format!("quotient drops: mu_{p}/mu_{} < 1", p - 1),
        ),
    }
}

/// Independent path for the lc test: quotients compared directly.
pub fn quotients_nondecreasing(m: &WeightSequence) -> bool {
    let range = m.range();
    (2..=range).all(|p| {
        let a = m.log_quotient(p - 1);
        let b = m.log_quotient(p);
        b >= a - 1e-10 * a.abs().max(1.0)
    })
}

/// Strong log-convexity: `m_p = M_p / p!` log-convex.
pub fn check_slc(m: &WeightSequence) -> ConditionVerdict {
    let range = m.range();
    if range < 2 {
        return ConditionVerdict::satisfied([("range", range as f64)]);
    }
    match first_convexity_failure(|p| m.log_value(p) - ln_factorial(p as f64), range) {
        None => ConditionVerdict::satisfied([("range", range as f64)]),
        Some((p, log_ratio)) => ConditionVerdict::violated(
            p as f64,
            log_ratio.exp(),
            format!("mu_{p}/{p} drops below mu_{}/{}", p - 1, p - 1),
        ),
    }
}

/// Moderate growth `M_{p+q} <= C^{p+q} M_p M_q`. Never Violated.
pub fn check_mg(m: &WeightSequence) -> ConditionVerdict {
    let range = m.range();
    if range < 16 {
        return ConditionVerdict::inconclusive(
            format!("range {range} too short to judge moderate growth"),
            vec![],
        );
    }
    let log_c = |p: usize, q: usize| {
        (m.log_value(p + q) - m.log_value(p) - m.log_value(q)) / (p + q) as f64
    };
    let half = range / 2;
    let block = half.min(256);
    let mut sup_early = f64::NEG_INFINITY;
    for p in 0..=block {
        for q in 0..=block.min(range - p) {
            if p + q > 0 && p + q <= half {
                sup_early = sup_early.max(log_c(p, q));
            }
        }
    }
    let mut sup_late = sup_early;
    for p in 0..=block {
        for q in 0..=block.min(range - p) {
            if p + q > half {
                sup_late = sup_late.max(log_c(p, q));
            }
        }
    }
    // Diagonal p = q, with running max recorded at checkpoints.
    let mut trend = Vec::new();
    let mut next_mark = 1usize;
    for p in 1..=half {
        let v = log_c(p, p);
        if 2 * p <= half {
            sup_early = sup_early.max(v);
        }
        sup_late = sup_late.max(v);
        if p == next_mark || p == half {
            trend.push(sup_late.exp());
            next_mark *= 2;
        }
    }
    sup_late = sup_late.max(sup_early);
    if (sup_late - sup_early).abs() < STABLE_REL {
        ConditionVerdict::satisfied([("C", sup_late.exp()), ("range", range as f64)])
    } else {
        ConditionVerdict::inconclusive(
            format!(
                "sup of (M_(p+q)/(M_p M_q))^(1/(p+q)) still growing: {:.6e} at half range, {:.6e} at {range}",
                sup_early.exp(),
                sup_late.exp()
            ),
            trend,
        )
    }
}

/// Non-quasianalyticity `sum 1/mu_p < infinity`.
pub fn check_nq(m: &WeightSequence) -> ConditionVerdict {
    check_nq_r(m, 1.0)
}

/// `sum (1/mu_p)^{1/r} < infinity`.
pub fn check_nq_r(m: &WeightSequence, r: f64) -> ConditionVerdict {
    assert!(r > 0.0, "check_nq_r needs r > 0");
    let e = 1.0 / r;
    match m.tail_sum(1, e) {
        TailSum::Finite { value, fitted } => {
            let v = ConditionVerdict::satisfied([("sum", value)]);
            if fitted {
                v.with_witness("tail_fitted", 1.0)
            } else {
                v
            }
        }
        TailSum::Divergent => {
            let range = m.range();
            let partial: f64 = (1..=range).map(|p| (-e * m.log_quotient(p)).exp()).sum();
            ConditionVerdict::violated(
                range as f64,
                partial,
                "tail model: terms decay no faster than 1/p".to_string(),
            )
        }
        TailSum::Unknown => empirical_sum_trend(m, e),
    }
}

/// For sequences without a tail model: Violated on a witnessed harmonic-type trend.
fn empirical_sum_trend(m: &WeightSequence, e: f64) -> ConditionVerdict {
    let range = m.range();
    let partial: Vec<f64> = (1..=range)
        .scan(0.0, |acc, p| {
            *acc += (-e * m.log_quotient(p)).exp();
            Some(*acc)
        })
        .collect();
    let trend: Vec<f64> = partial.iter().copied().step_by((range / 32).max(1)).collect();
    if range < 20 {
        return ConditionVerdict::inconclusive(
            format!("only {range} quotients and no tail model"),
            trend,
        );
    }
    let start = (range * 9) / 10;
    // p * term bounded below over the final window means harmonic-type divergence.
    let floor = (start.max(1)..=range)
        .map(|p| (p as f64) * (-e * m.log_quotient(p)).exp())
        .fold(f64::INFINITY, f64::min);
    let head = (start.max(1) / 2..start.max(1))
        .map(|p| (p as f64) * (-e * m.log_quotient(p)).exp())
        .fold(f64::INFINITY, f64::min);
    if floor > 0.0 && floor >= head * (1.0 - STABLE_REL) && floor > 1e-3 {
        ConditionVerdict::violated(
            range as f64,
            partial[range - 1],
            format!("terms stay above {floor:.3e}/p over the final window"),
        )
    } else {
        ConditionVerdict::inconclusive("no tail model: partial sums cannot settle convergence", trend)
    }
}

/// `(gamma_1)`: `sup_p (mu_p/p) sum_{k>=p} 1/mu_k < infinity`.
pub fn check_gamma1(m: &WeightSequence) -> ConditionVerdict {
    crate::indices::mixed_condition_seq(m, m, 1.0)
}

/// Window minima of `mu_{Qp}/mu_p` over the final 10% of the usable range, for Q = 2..=Q_MAX.
fn quotient_ratio_minima(m: &WeightSequence) -> Vec<(usize, f64)> {
    let top = m.range() / Q_MAX;
    let start = ((top * 9) / 10).max(1);
    (2..=Q_MAX)
        .map(|q| {
            let min = (start..=top.max(start))
                .map(|p| m.log_quotient(q * p) - m.log_quotient(p))
                .fold(f64::INFINITY, f64::min);
            (q, min.exp())
        })
        .collect()
}

enum Beta {
    One,
    Three,
}

fn check_beta(m: &WeightSequence, which: Beta) -> ConditionVerdict {
    let minima = quotient_ratio_minima(m);
    let threshold = |q: usize| match which {
        Beta::One => q as f64,
        Beta::Three => 1.0,
    };
    // Smallest Q clearing the threshold, else the Q closest to it.
    let (best_q, best) = minima
        .iter()
        .copied()
        .find(|(q, v)| *v > threshold(*q) * (1.0 + STABLE_REL))
        .or_else(|| {
            minima.iter().copied().max_by(|a, b| (a.1 / threshold(a.0)).total_cmp(&(b.1 / threshold(b.0))))
        })
        .expect("at least one Q");
    let trend: Vec<f64> = minima.iter().map(|(_, v)| *v).collect();
    if let Some(model) = m.tail_model().filter(|t| t.exact) {
        let holds = match which {
            Beta::One => model.lin > 0.0 || (model.lin == 0.0 && model.log_coef > 1.0),
            Beta::Three => model.lin > 0.0 || (model.lin == 0.0 && model.log_coef > 0.0),
        };
        return if holds {
            ConditionVerdict::satisfied([("Q", best_q as f64), ("liminf", best)])
        } else {
            let bound = match which {
                Beta::One => "Q",
                Beta::Three => "1",
            };
            ConditionVerdict::violated(
                best_q as f64,
                best,
                format!("quotient law gives liminf mu_(Qp)/mu_p <= {bound} for every Q"),
            )
        };
    }
    if best > threshold(best_q) * (1.0 + STABLE_REL) {
        ConditionVerdict::satisfied([("Q", best_q as f64), ("liminf", best)])
    } else {
        ConditionVerdict::inconclusive(
            "window minima of mu_(Qp)/mu_p do not clear the threshold",
            trend,
        )
    }
}

/// `(beta_1)`: `liminf mu_{Qp}/mu_p > Q` for some `Q`.
pub fn check_beta1(m: &WeightSequence) -> ConditionVerdict {
    check_beta(m, Beta::One)
}

/// `(beta_3)`: `liminf mu_{Qp}/mu_p > 1` for some `Q`.
pub fn check_beta3(m: &WeightSequence) -> ConditionVerdict {
    check_beta(m, Beta::Three)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn lc_of_gevrey_and_counterexample() {
        for s in [0.3, 1.0, 2.0, 3.5] {
            assert!(check_lc(&WeightSequence::gevrey(s).unwrap()).is_satisfied());
        }
        let m = WeightSequence::explicit(vec![1.0, 4.0, 8.0, 32.0]).unwrap();
        match check_lc(&m) {
            ConditionVerdict::Violated { at, .. } => assert_eq!(at, 2.0),
            v => panic!("{v}"),
        }
        assert!(!quotients_nondecreasing(&m));
    }

    #[test]
    fn slc_of_gevrey() {
        assert!(check_slc(&WeightSequence::gevrey(2.0).unwrap()).is_satisfied());
        assert!(check_slc(&WeightSequence::gevrey(1.0).unwrap()).is_satisfied());
        assert!(check_slc(&WeightSequence::gevrey(0.5).unwrap()).is_violated());
    }

    #[test]
    fn mg_gevrey_and_qgevrey() {
        for s in [1.0, 2.0, 3.0] {
            let v = check_mg(&WeightSequence::gevrey(s).unwrap());
            let c = v.witness("C").unwrap_or_else(|| panic!("{v}"));
            assert!(c <= 2f64.powf(s) * (1.0 + 1e-12));
        }
        assert!(check_mg(&WeightSequence::qgevrey(2.0).unwrap()).is_inconclusive());
    }

    #[test]
    fn nq_closed_forms() {
        let v = check_nq(&WeightSequence::gevrey(2.0).unwrap());
        assert!((v.witness("sum").unwrap() - PI * PI / 6.0).abs() < 1e-12);
        assert!(check_nq(&WeightSequence::gevrey(1.0).unwrap()).is_violated());
        let g3 = WeightSequence::gevrey(3.0).unwrap();
        assert!(check_nq_r(&g3, 2.0).is_satisfied());
        assert!(check_nq_r(&g3, 3.0).is_violated());
    }

    #[test]
    fn nq_without_model_never_satisfied() {
        let squares: Vec<f64> = (1..=400).map(|p| (p * p) as f64).collect();
        let m = WeightSequence::from_quotients(squares).unwrap();
        assert!(check_nq(&m).is_inconclusive());
        let harmonic: Vec<f64> = (1..=400).map(|p| p as f64).collect();
        let m = WeightSequence::from_quotients(harmonic).unwrap();
        assert!(check_nq(&m).is_violated());
    }

    #[test]
    fn beta_checks() {
        let g2 = WeightSequence::gevrey(2.0).unwrap();
        let v = check_beta1(&g2);
        assert_eq!(v.witness("Q"), Some(2.0));
        assert!((v.witness("liminf").unwrap() - 4.0).abs() < 1e-9);
        assert!(check_beta1(&WeightSequence::gevrey(1.0).unwrap()).is_violated());
        assert!(check_beta3(&WeightSequence::gevrey(1.0).unwrap()).is_satisfied());
        assert!(check_beta1(&WeightSequence::qgevrey(2.0).unwrap()).is_satisfied());
    }

    #[test]
    fn gamma1_matches_beta1() {
        let v = check_gamma1(&WeightSequence::gevrey(2.0).unwrap());
        let c = v.witness("sup").unwrap_or_else(|| panic!("{v}"));
        assert!((1.0..=2.0).contains(&c), "{c}");
        assert!(check_gamma1(&WeightSequence::gevrey(1.0).unwrap()).is_violated());
    }
}
