use super::conditions::STABLE_REL;
use super::WeightSequence;
use crate::verdict::ConditionVerdict;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    /// `M ≾ N`: `sup (M_p/N_p)^{1/p} < infinity`.
    Precsim,
    /// `M ◁ N`: `(M_p/N_p)^{1/p} -> 0`.
    Vartriangleleft,
    /// `M ≾ N` and `N ≾ M`.
    Equivalent,
}

/// Outcome of a relation test. `witness` is the sup of `(M_p/N_p)^{1/p}` over the range
/// for `Precsim`/`Equivalent` (the larger of both directions), the last value for
/// `Vartriangleleft`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationVerdict {
    pub kind: RelationKind,
    pub verdict: ConditionVerdict,
    pub witness: f64,
    /// The rule used to turn finite data into a verdict.
    pub convention: String,
}

/// Asymptotic direction of `(log M_p - log N_p)/p` from two exact quotient laws:
/// `+1` to infinity, `-1` to minus infinity, `0` bounded.
fn law_direction(m: &WeightSequence, n: &WeightSequence) -> Option<i8> {
    let (a, b) = (m.law()?, n.law()?);
    let dl = a.lin - b.lin;
    let da = a.log_coef - b.log_coef;
    let scale = 1e-12 * (a.lin.abs() + b.lin.abs() + a.log_coef.abs() + b.log_coef.abs() + 1.0);
    Some(if dl > scale || (dl.abs() <= scale && da > scale) {
        1
    } else if dl < -scale || (dl.abs() <= scale && da < -scale) {
        -1
    } else {
        0
    })
}

/// `(log M_p - log N_p)/p` for `p = 1..=P`.
fn log_ratios(m: &WeightSequence, n: &WeightSequence) -> Vec<f64> {
    let range = m.range().min(n.range());
    (1..=range).map(|p| (m.log_value(p) - n.log_value(p)) / p as f64).collect()
}

fn sup_prefix(x: &[f64], len: usize) -> f64 {
    x[..len].iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn trend(x: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = 1;
    while k <= x.len() {
        out.push(x[k - 1].exp());
        k *= 2;
    }
    out
}

fn precsim(m: &WeightSequence, n: &WeightSequence) -> (ConditionVerdict, f64) {
    let x = log_ratios(m, n);
    if x.len() < 4 {
        let w = sup_prefix(&x, x.len()).exp();
        return (ConditionVerdict::inconclusive("range too short", trend(&x)), w);
    }
    let len = x.len();
    let early = sup_prefix(&x, len / 2);
    let all = sup_prefix(&x, len);
    let witness = all.exp();
    let settled = (all - early).abs() < STABLE_REL;
    match law_direction(m, n) {
        Some(1) => (
            ConditionVerdict::violated(
                len as f64,
                x[len - 1].exp(),
                "(M_p/N_p)^(1/p) diverges under the quotient laws",
            ),
            witness,
        ),
        _ if settled => (ConditionVerdict::satisfied([("C", witness)]), witness),
        _ => (
            ConditionVerdict::inconclusive(
                "sup of (M_p/N_p)^(1/p) still moving over the last doubling",
                trend(&x),
            ),
            witness,
        ),
    }
}

fn vartriangleleft(m: &WeightSequence, n: &WeightSequence) -> (ConditionVerdict, f64) {
    let x = log_ratios(m, n);
    let len = x.len();
    if len < 4 {
        let w = x.last().copied().unwrap_or(0.0).exp();
        return (ConditionVerdict::inconclusive("range too short", trend(&x)), w);
    }
    let last = x[len - 1];
    let witness = last.exp();
    match law_direction(m, n) {
        Some(-1) => (ConditionVerdict::satisfied([("ratio_at_range_end", witness)]), witness),
        Some(_) => (
            ConditionVerdict::violated(
                len as f64,
                witness,
                "(M_p/N_p)^(1/p) does not tend to 0 under the quotient laws",
            ),
            witness,
        ),
        None => {
            // Empirical: the ratio must keep falling, by a factor sqrt 2 over the last doubling.
            let mid = x[len / 2 - 1];
            let falling = x[len / 2..].windows(2).all(|w| w[1] <= w[0] + 1e-12);
            if falling && last <= mid - 0.5 * std::f64::consts::LN_2 {
                (ConditionVerdict::satisfied([("ratio_at_range_end", witness)]), witness)
            } else {
                (
                    ConditionVerdict::inconclusive(
                        "(M_p/N_p)^(1/p) not seen to tend to 0",
                        trend(&x),
                    ),
                    witness,
                )
            }
        }
    }
}

/// Compare two sequences on the log scale over their common range.
pub fn compare(m: &WeightSequence, n: &WeightSequence, kind: RelationKind) -> RelationVerdict {
    let (verdict, witness, convention) = match kind {
        RelationKind::Precsim => {
            let (v, w) = precsim(m, n);
            (v, w, "sup of (M_p/N_p)^(1/p) stable over the last doubling of the range")
        }
        RelationKind::Vartriangleleft => {
            let (v, w) = vartriangleleft(m, n);
            (v, w, "(M_p/N_p)^(1/p) decreasing, down by sqrt 2 over the last doubling")
        }
        RelationKind::Equivalent => {
            let (a, wa) = precsim(m, n);
            let (b, wb) = precsim(n, m);
            let w = wa.max(wb);
            let v = match (&a, &b) {
                (ConditionVerdict::Satisfied { .. }, ConditionVerdict::Satisfied { .. }) => {
                    ConditionVerdict::satisfied([("C", w)])
                }
                (ConditionVerdict::Violated { .. }, _) => a,
                (_, ConditionVerdict::Violated { .. }) => b,
                (ConditionVerdict::Inconclusive { .. }, _) => a,
                _ => b,
            };
            (v, w, "precsim in both directions on the same range")
        }
    };
    RelationVerdict { kind, verdict, witness, convention: convention.to_string() }
}
