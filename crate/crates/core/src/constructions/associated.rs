use crate::error::{Error, Result};
use crate::functions::{check_omega_condition, OmegaCondition, WeightFunction};
use crate::sequences::{Repr, WeightSequence};
use crate::verdict::ConditionVerdict;

/// Rejects sequences whose associated function is not a weight function.
pub fn check_associated_preconditions(m: &WeightSequence) -> Result<()> {
    if let ConditionVerdict::Violated { at, .. } = m.lc_verdict() {
        return Err(Error::NotLogConvex(*at as usize));
    }
    if let Some(law) = m.law() {
        if law.lin == 0.0 && law.log_coef == 0.0 {
            return Err(Error::DivergentAssociated(law.constant.exp()));
        }
    }
    Ok(())
}

/// Largest `p` in `[lo, hi]` with `pred(p)`, given `pred(lo)` and monotonicity.
fn last_true(mut lo: f64, mut hi: f64, pred: impl Fn(f64) -> bool) -> f64 {
    if pred(hi) {
        return hi;
    }
    while hi - lo > 1.0 {
        let mid = (0.5 * (lo + hi)).floor();
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `omega_M(t) = sup_p (p log t - log M_p)` for log-convex `M`.
///
/// The supremum is attained at the last `p` with `mu_p <= t`; no precondition
/// checks are made here.
pub fn associated_value(m: &WeightSequence, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let lt = t.ln();
    if let Repr::Law(law) = m.repr() {
        if law.log_quotient(1.0) > lt {
            return -law.log_m0;
        }
        let p = if law.lin == 0.0 {
            if law.log_coef <= 0.0 {
                return f64::INFINITY;
            }
            let guess = ((lt - law.constant) / law.log_coef).exp().floor().max(1.0);
            if !guess.is_finite() {
                return f64::INFINITY;
            }
            let pred = |p: f64| law.log_quotient(p) <= lt;
            let half = (0.5 * guess).floor().max(1.0);
            last_true(if pred(half) { half } else { 1.0 }, 2.0 * guess + 1.0, pred)
        } else {
            // log_coef * ln p >= 0 bounds p by the linear part alone.
            let hi = ((lt - law.constant) / law.lin).max(1.0).ceil() + 1.0;
            last_true(1.0, hi, |p| law.log_quotient(p) <= lt)
        };
        return p * lt - law.log_value(p);
    }
    let top = m.max_index().unwrap_or_else(|| m.p_max());
    if top == 0 || m.log_quotient(1) > lt {
        return -m.log_value(0);
    }
    let p = last_true(1.0, top as f64, |p| m.log_quotient(p as usize) <= lt) as usize;
    p as f64 * lt - m.log_value(p)
}

/// Checked [`associated_value`].
pub fn associated_eval(m: &WeightSequence, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("weight functions live on [0, inf), got t = {t}")));
    }
    check_associated_preconditions(m)?;
    Ok(associated_value(m, t))
}

/// `omega_M` with the post-checks (omega3) and (omega4).
pub fn associated_function(m: &WeightSequence) -> Result<WeightFunction> {
    let w = WeightFunction::associated(m)?;
    for which in [OmegaCondition::Omega3, OmegaCondition::Omega4] {
        if let v @ ConditionVerdict::Violated { .. } = check_omega_condition(&w, which) {
            return Err(Error::InternalInconsistency(format!(
                "associated function of {} fails {which}: {v:?}",
                m.describe()
            )));
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(m: &WeightSequence, t: f64, p_max: usize) -> f64 {
        (0..=p_max).map(|p| p as f64 * t.ln() - m.log_value(p)).fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn gevrey_one_at_e() {
        let m = WeightSequence::gevrey(1.0).unwrap();
        let v = associated_eval(&m, std::f64::consts::E).unwrap();
        assert!((v - (2.0 - 2f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn matches_brute_force() {
        let fams = [
            WeightSequence::gevrey(1.0).unwrap(),
            WeightSequence::gevrey(2.5).unwrap(),
            WeightSequence::qgevrey(2.0).unwrap(),
            WeightSequence::explicit((0..60).map(|p| (1..=p).map(|k| k as f64).product::<f64>().powf(1.5)).collect())
                .unwrap(),
        ];
        for m in &fams {
            let top = m.max_index().unwrap_or(5000);
            for t in [0.5, 1.0, 3.7, 42.0, 1e3] {
                let (a, b) = (associated_value(m, t), brute(m, t, top));
                assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "{m:?} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn rejects_non_log_convex() {
        let m = WeightSequence::explicit(vec![1.0, 4.0, 8.0, 32.0]).unwrap();
        assert_eq!(associated_eval(&m, 2.0), Err(Error::NotLogConvex(2)));
    }
}
