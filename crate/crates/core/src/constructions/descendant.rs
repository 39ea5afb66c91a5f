use super::ser_sequence;
use crate::error::{Error, Result};
use crate::indices::mixed_condition_seq;
use crate::sequences::{check_mg, check_nq_r, check_slc, Family, Repr, TailModel, TailSum, WeightSequence};
use crate::verdict::{relative_change, ConditionVerdict};
use serde::Serialize;

const STABLE_REL: f64 = 1e-3;

/// The descendant `S` of `N^{1/r}` and `L = S^r`, with the post-checks.
#[derive(Debug, Clone, Serialize)]
pub struct Descendant {
    #[serde(serialize_with = "ser_sequence")]
    pub s: WeightSequence,
    #[serde(serialize_with = "ser_sequence")]
    pub l: WeightSequence,
    pub r: f64,
    pub tau_1: f64,
    /// `sigma_1, sigma_2, ...` for the first few indices.
    pub sigma_head: Vec<f64>,
    /// `sup_p lambda_p / nu_p` over the range.
    pub lambda_nu_bound: f64,
    pub slc: ConditionVerdict,
    pub mixed_at_r: ConditionVerdict,
    pub tail_fitted: bool,
    pub range: usize,
}

/// `T_p = sum_{j >= p} nu_j^{-1/r}` for `p = 1 ..= range + 1`, index 0 unused.
fn tail_sums(n: &WeightSequence, e: f64, range: usize) -> Result<(Vec<f64>, bool)> {
    let (last, fitted) = match n.tail_sum(range + 1, e) {
        TailSum::Finite { value, fitted } => (value, fitted),
        TailSum::Divergent => {
            return Err(Error::NotNonQuasianalytic(format!("sum of nu^(-1/r) diverges for {}", n.describe())))
        }
        TailSum::Unknown => {
            return Err(Error::PreconditionInconclusive(format!("{} has no tail model", n.describe())))
        }
    };
    let mut t = vec![0.0; range + 2];
    t[range + 1] = last;
    for p in (1..=range).rev() {
        t[p] = t[p + 1] + (-e * n.log_quotient(p)).exp();
    }
    Ok((t, fitted))
}

fn check_preconditions(n: &WeightSequence, r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("r must be positive, got {r}")));
    }
    if let ConditionVerdict::Violated { at, .. } = n.lc_verdict() {
        return Err(Error::NotLogConvex(*at as usize));
    }
    match check_nq_r(n, r) {
        ConditionVerdict::Violated { note, .. } => Err(Error::NotNonQuasianalytic(note)),
        ConditionVerdict::Inconclusive { reason, .. } => Err(Error::PreconditionInconclusive(reason)),
        ConditionVerdict::Satisfied { .. } => Ok(()),
    }
}

/// `sigma_p = tau_1 p / tau_p` with `tau_p = p nu_p^{-1/r} + sum_{j >= p} nu_j^{-1/r}`.
pub fn descendant(n: &WeightSequence, r: f64) -> Result<Descendant> {
    check_preconditions(n, r)?;
    let e = 1.0 / r;
    let range = n.range();
    let (tails, tail_fitted) = tail_sums(n, e, range)?;
    let tau = |p: usize| p as f64 * (-e * n.log_quotient(p)).exp() + tails[p];
    let tau_1 = tau(1);
    let mut logs = Vec::with_capacity(range + 1);
    logs.push(0.0);
    let mut acc = 0.0;
    let mut sigma_head = Vec::new();
    for p in 1..=range {
        let sigma = tau_1 * p as f64 / tau(p);
        if p <= 16 {
            sigma_head.push(sigma);
        }
        acc += sigma.ln();
        logs.push(acc);
    }
    let tail = n.tail_model().map(|t| TailModel { lin: t.lin * e, log_coef: t.log_coef * e, exact: false });
    let s = WeightSequence::from_parts(Family::Descendant { base: n.clone(), r }, Repr::Table(logs), tail);
    let slc = check_slc(&s);
    if !slc.is_satisfied() {
        return Err(Error::InternalInconsistency(format!("descendant is not strongly log-convex: {slc:?}")));
    }
    let l = s.power(r)?;
    let lambda_nu_bound = (1..=range)
        .map(|p| (l.log_quotient(p) - n.log_quotient(p)).exp())
        .fold(f64::NEG_INFINITY, f64::max);
    let mixed_at_r = mixed_condition_seq(&l, n, r);
    Ok(Descendant { s, l, r, tau_1, sigma_head, lambda_nu_bound, slc, mixed_at_r, tail_fitted, range })
}

/// `(nu_{2k}/nu_k)^{1/r} <= C + C (nu_{2k})^{1/r} / (2k) sum_{j >= 2k} nu_j^{-1/r}`,
/// cross-checked against (mg) for `L`.
pub fn check_descendant_mg(n: &WeightSequence, r: f64) -> ConditionVerdict {
    if let Err(err) = check_preconditions(n, r) {
        return ConditionVerdict::inconclusive(format!("precondition: {err}"), vec![]);
    }
    let e = 1.0 / r;
    let range = n.range();
    let tails = match tail_sums(n, e, range) {
        Ok((t, _)) => t,
        Err(err) => return ConditionVerdict::inconclusive(err.to_string(), vec![]),
    };
    let k_max = range / 2;
    let ck: Vec<f64> = (1..=k_max)
        .map(|k| {
            let l2k = e * n.log_quotient(2 * k);
            let ratio = (l2k - e * n.log_quotient(k)).exp();
            ratio / (1.0 + l2k.exp() * tails[2 * k] / (2 * k) as f64)
        })
        .collect();
    let half = ck[..k_max / 2].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let all = ck.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if relative_change(half, all) >= STABLE_REL {
        return ConditionVerdict::inconclusive("constant still growing at the end of the range", vec![half, all]);
    }
    let v = ConditionVerdict::satisfied([("C", all), ("range", k_max as f64)]);
    let l = match descendant(n, r) {
        Ok(d) => d.l,
        Err(err) => return ConditionVerdict::inconclusive(format!("descendant: {err}"), vec![all]),
    };
    match check_mg(&l) {
        ConditionVerdict::Satisfied { witness } => {
            v.with_witness("mg_L_C", witness.get("C").copied().unwrap_or(f64::NAN))
        }
        other => ConditionVerdict::inconclusive(
            format!("condition holds with C = {all:.6} but (mg) of L is {}", other.kind()),
            vec![all],
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gevrey_two_first_quotients() {
        let n = WeightSequence::gevrey(2.0).unwrap();
        let d = descendant(&n, 1.0).unwrap();
        let z = std::f64::consts::PI.powi(2) / 6.0;
        assert!((d.tau_1 - (1.0 + z)).abs() < 1e-12);
        assert!((d.sigma_head[0] - 1.0).abs() < 1e-15);
        let sigma_2 = 2.0 * (1.0 + z) / (0.5 + z - 1.0);
        assert!((d.sigma_head[1] - sigma_2).abs() < 1e-10);
        assert!((sigma_2 - 4.62029).abs() < 1e-4);
        assert!(d.mixed_at_r.is_satisfied());
        assert!(d.lambda_nu_bound.is_finite());
    }

    #[test]
    fn harmonic_base_rejected() {
        let n = WeightSequence::gevrey(1.0).unwrap();
        assert!(matches!(descendant(&n, 1.0), Err(Error::NotNonQuasianalytic(_))));
    }

    #[test]
    fn moderate_growth_transfers() {
        let v = check_descendant_mg(&WeightSequence::gevrey(2.0).unwrap(), 1.0);
        assert!(v.is_satisfied(), "{v:?}");
        assert!(v.witness("mg_L_C").is_some());
    }
}
