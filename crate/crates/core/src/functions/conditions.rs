use super::{weighted_integral, Expr, IntegralOutcome, WeightFunction};
use crate::error::{Error, Result};
use crate::grid::TGrid;
use crate::verdict::{relative_change, ConditionVerdict};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

const STABLE_REL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaCondition {
    /// `omega(2t) = O(omega(t))`
    Omega1,
    /// `omega(t) = O(t)`
    Omega2,
    /// `log t = o(omega(t))`
    Omega3,
    /// `phi(y) = omega(e^y)` convex
    Omega4,
    /// `omega(t) = o(t)`
    Omega5,
    /// `2 omega(t) <= omega(H t) + H`
    Omega6,
    /// `int_1^inf omega(t)/t^2 dt < inf`
    OmegaNq,
    /// `int_1^inf omega(t y)/y^2 dy = O(omega(t)) + O(1)`
    OmegaSnq,
}

impl OmegaCondition {
    pub const ALL: [OmegaCondition; 8] = [
        OmegaCondition::Omega1,
        OmegaCondition::Omega2,
        OmegaCondition::Omega3,
        OmegaCondition::Omega4,
        OmegaCondition::Omega5,
        OmegaCondition::Omega6,
        OmegaCondition::OmegaNq,
        OmegaCondition::OmegaSnq,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            OmegaCondition::Omega1 => "omega1",
            OmegaCondition::Omega2 => "omega2",
            OmegaCondition::Omega3 => "omega3",
            OmegaCondition::Omega4 => "omega4",
            OmegaCondition::Omega5 => "omega5",
            OmegaCondition::Omega6 => "omega6",
            OmegaCondition::OmegaNq => "omega_nq",
            OmegaCondition::OmegaSnq => "omega_snq",
        }
    }
}

impl fmt::Display for OmegaCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OmegaCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['(', ')', '-'], "");
        let key = key.strip_prefix("omega").or_else(|| key.strip_prefix("om")).unwrap_or(&key);
        let key = key.trim_start_matches('_');
        Ok(match key {
            "1" => OmegaCondition::Omega1,
            "2" => OmegaCondition::Omega2,
            "3" => OmegaCondition::Omega3,
            "4" => OmegaCondition::Omega4,
            "5" => OmegaCondition::Omega5,
            "6" => OmegaCondition::Omega6,
            "nq" => OmegaCondition::OmegaNq,
            "snq" => OmegaCondition::OmegaSnq,
            _ => return Err(Error::InvalidArgument(format!("unknown weight-function condition {s:?}"))),
        })
    }
}

#[derive(Clone, Copy, PartialEq)]
pub(crate) enum Mode {
    Bounded,
    Vanishing,
}

/// Verdict on `num/den` over a grid: bounded (O) or vanishing (o).
///
/// Only points after the last one where `den` vanishes but `num` does not are used.
/// `model` is the answer of the power expansions, when they apply.
pub(crate) fn ratio_verdict(
    ts: &[f64],
    num: &[f64],
    den: &[f64],
    grid: &TGrid,
    mode: Mode,
    model: Option<bool>,
    limit: Option<f64>,
) -> ConditionVerdict {
    let n = ts.len();
    let start = (0..n).rev().find(|&i| den[i] <= 0.0 && num[i] > 0.0).map_or(0, |i| i + 1);
    if start >= n {
        return ConditionVerdict::violated(
            ts[n - 1],
            num[n - 1],
            "denominator vanishes on the whole grid while the numerator does not",
        );
    }
    let pts: Vec<(f64, f64)> = (start..n)
        .filter(|&i| den[i] > 0.0)
        .map(|i| (ts[i], num[i] / den[i]))
        .collect();
    let top = grid.top_decade_start();
    let (t_last, g_last) = *pts.last().expect("nonempty tail of grid");
    let trend: Vec<f64> = pts.iter().filter(|(t, _)| *t >= top).map(|(_, g)| *g).step_by(4).collect();
    if model == Some(false) {
        let note = match mode {
            Mode::Bounded => "ratio unbounded under the power expansions",
            Mode::Vanishing => "ratio does not tend to 0 under the power expansions",
        };
        return ConditionVerdict::violated(t_last, g_last, note);
    }
    let t0 = pts[0].0;
    match mode {
        Mode::Bounded => {
            let early = pts.iter().filter(|(t, _)| *t < top).map(|(_, g)| *g).fold(f64::NEG_INFINITY, f64::max);
            let all = pts.iter().map(|(_, g)| *g).fold(f64::NEG_INFINITY, f64::max);
            // A ratio climbing towards the limit predicted by the expansions is bounded by it.
            let reference = match (model, limit) {
                (Some(true), Some(l)) => early.max(l),
                _ => early,
            };
            if reference.is_finite() && (all <= reference || relative_change(reference, all) < STABLE_REL) {
                ConditionVerdict::satisfied([("C", all.max(reference)), ("t0", t0)])
            } else {
                ConditionVerdict::inconclusive("ratio still growing in the top decade of the grid", trend)
            }
        }
        Mode::Vanishing => {
            let top_pts: Vec<f64> = pts.iter().filter(|(t, _)| *t >= top).map(|(_, g)| *g).collect();
            let falling = top_pts.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-300);
            let mid = (grid.t_min.ln() + grid.t_max.ln()) / 2.0;
            let upper_max = pts
                .iter()
                .filter(|(t, _)| t.ln() >= mid)
                .map(|(_, g)| *g)
                .fold(f64::NEG_INFINITY, f64::max);
            if falling && g_last <= 0.5 * upper_max {
                ConditionVerdict::satisfied([("ratio_at_tmax", g_last), ("t0", t0)])
            } else {
                ConditionVerdict::inconclusive("ratio not seen to tend to 0 on the grid", trend)
            }
        }
    }
}

fn leading_exponent(w: &WeightFunction) -> Option<f64> {
    w.expansion().map(|e| e.leading().1)
}

/// Limit of `num/den` from the leading terms: 0 for a smaller exponent, the coefficient
/// ratio for equal exponents, `None` when unbounded or unknown.
pub(crate) fn limit_ratio(num: Option<(f64, f64)>, den: Option<(f64, f64)>) -> Option<f64> {
    let ((cn, an), (cd, ad)) = (num?, den?);
    if an < ad - 1e-12 {
        Some(0.0)
    } else if (an - ad).abs() <= 1e-12 && cd > 0.0 {
        Some(cn / cd)
    } else {
        None
    }
}

fn leading(w: &WeightFunction) -> Option<(f64, f64)> {
    w.expansion().map(|e| e.leading())
}

/// `num = O(den)` (or `o`) decided by leading exponents of the expansions.
pub(crate) fn exponent_model(num: Option<f64>, den: Option<f64>, mode: Mode) -> Option<bool> {
    let (a, b) = (num?, den?);
    Some(match mode {
        Mode::Bounded => a <= b + 1e-12,
        Mode::Vanishing => a < b - 1e-12,
    })
}

fn sample(w: &WeightFunction, ts: &[f64]) -> Vec<f64> {
    ts.iter().map(|t| w.at(*t)).collect()
}

/// Check one condition on the default grid.
pub fn check_omega_condition(w: &WeightFunction, which: OmegaCondition) -> ConditionVerdict {
    check_omega_condition_on(w, which, &TGrid::default())
}

pub fn check_omega_condition_on(w: &WeightFunction, which: OmegaCondition, grid: &TGrid) -> ConditionVerdict {
    w.cached(format!("{which}|{grid}"), || evaluate(w, which, grid))
}

fn evaluate(w: &WeightFunction, which: OmegaCondition, grid: &TGrid) -> ConditionVerdict {
    let ts = grid.points();
    let lead = leading_exponent(w);
    match which {
        OmegaCondition::Omega1 => {
            let num: Vec<f64> = ts.iter().map(|t| w.at(2.0 * t)).collect();
            let den = sample(w, &ts);
            let model = lead.map(|_| true);
            let limit = lead.map(|a| 2f64.powf(a));
            ratio_verdict(&ts, &num, &den, grid, Mode::Bounded, model, limit)
        }
        OmegaCondition::Omega2 | OmegaCondition::Omega5 => {
            let mode = if which == OmegaCondition::Omega2 { Mode::Bounded } else { Mode::Vanishing };
            let num = sample(w, &ts);
            let model = exponent_model(lead, Some(1.0), mode);
            let limit = limit_ratio(leading(w), Some((1.0, 1.0)));
            ratio_verdict(&ts, &num, &ts, grid, mode, model, limit)
        }
        OmegaCondition::Omega3 => {
            let num: Vec<f64> = ts.iter().map(|t| t.ln().max(0.0)).collect();
            let den = sample(w, &ts);
            let model = match w.expr() {
                Expr::LogPower { a, .. } => Some(*a > 1.0),
                _ => lead.map(|a| a > 0.0),
            };
            ratio_verdict(&ts, &num, &den, grid, Mode::Vanishing, model, None)
        }
        OmegaCondition::Omega4 => check_convexity(w, grid),
        OmegaCondition::Omega6 => check_omega6(w, grid, &ts),
        OmegaCondition::OmegaNq => check_omega_nq_r_on(w, 1.0, grid),
        OmegaCondition::OmegaSnq => crate::indices::mixed_condition_fun_on(w, w, 1.0, grid),
    }
}

fn check_convexity(w: &WeightFunction, grid: &TGrid) -> ConditionVerdict {
    let n = 2000;
    let (a, b) = (grid.t_min.ln(), grid.t_max.ln());
    let ys: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
    let phi: Vec<f64> = ys.iter().map(|y| w.at(y.exp())).collect();
    match super::convex::check_sampled_convexity(&ys, &phi) {
        Ok(()) => ConditionVerdict::satisfied([("y_points", n as f64), ("y_max", b)]),
        Err(Error::ConvexityViolation { y1, excess, .. }) => ConditionVerdict::violated(
            y1.exp(),
            excess,
            format!("phi(y) = omega(e^y) bends down at y = {y1:.6}"),
        ),
        Err(e) => ConditionVerdict::inconclusive(e.to_string(), vec![]),
    }
}

fn check_omega6(w: &WeightFunction, grid: &TGrid, ts: &[f64]) -> ConditionVerdict {
    let base = sample(w, ts);
    let top = grid.top_decade_start();
    let split = (top.ln() + grid.t_max.ln()) / 2.0;
    let mut best_trend = Vec::new();
    for k in 1..=40 {
        let h = 2f64.powf(k as f64 / 2.0);
        let g: Vec<f64> = ts.iter().zip(&base).map(|(t, v)| 2.0 * v - w.at(h * t) - h).collect();
        let worst = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let scale = base.iter().copied().fold(0.0, f64::max);
        if worst > 1e-12 * scale {
            continue;
        }
        let first_half = ts.iter().zip(&g).filter(|(t, _)| **t >= top && t.ln() < split).map(|(_, v)| *v);
        let second_half = ts.iter().zip(&g).filter(|(t, _)| t.ln() >= split).map(|(_, v)| *v);
        let m1 = first_half.fold(f64::NEG_INFINITY, f64::max);
        let m2 = second_half.fold(f64::NEG_INFINITY, f64::max);
        if m2 <= m1 + 1e-9 * m1.abs().max(1.0) {
            return ConditionVerdict::satisfied([("H", h), ("max_gap", worst)]);
        }
        if best_trend.is_empty() {
            best_trend = vec![h, m1, m2];
        }
    }
    ConditionVerdict::inconclusive(
        "no H <= 2^20 with 2 omega(t) - omega(Ht) - H <= 0 and a falling trend",
        best_trend,
    )
}

/// `int_1^inf omega(t) t^{-1-1/r} dt < inf` on the default grid settings.
pub fn check_omega_nq_r(w: &WeightFunction, r: f64) -> ConditionVerdict {
    check_omega_nq_r_on(w, r, &TGrid::default())
}

pub fn check_omega_nq_r_on(w: &WeightFunction, r: f64, _grid: &TGrid) -> ConditionVerdict {
    assert!(r > 0.0, "check_omega_nq_r needs r > 0");
    w.cached(format!("nq_r:{r:e}"), || match weighted_integral(w, 1.0, r) {
        IntegralOutcome::Finite { value, fitted_tail, .. } => {
            let v = ConditionVerdict::satisfied([("integral", value)]);
            if fitted_tail {
                v.with_witness("tail_fitted", 1.0)
            } else {
                v
            }
        }
        IntegralOutcome::Divergent { exponent } => ConditionVerdict::violated(
            super::Y_CUT,
            exponent,
            format!("integrand grows like t^{exponent:.6} against t^(-1-1/r), r = {r}"),
        ),
        IntegralOutcome::Undecided { exponent } => ConditionVerdict::inconclusive(
            format!("fitted tail exponent {exponent:.6} too close to 1/r = {:.6}", 1.0 / r),
            vec![exponent, 1.0 / r],
        ),
    })
}

/// `tau = O(sigma)`, written `sigma ≼ tau`.
pub fn compare_preceq(sigma: &WeightFunction, tau: &WeightFunction) -> ConditionVerdict {
    compare_preceq_on(sigma, tau, &TGrid::default())
}

pub fn compare_preceq_on(sigma: &WeightFunction, tau: &WeightFunction, grid: &TGrid) -> ConditionVerdict {
    compare(sigma, tau, grid, Mode::Bounded)
}

/// `tau = o(sigma)`.
pub fn compare_o(sigma: &WeightFunction, tau: &WeightFunction) -> ConditionVerdict {
    compare_o_on(sigma, tau, &TGrid::default())
}

pub fn compare_o_on(sigma: &WeightFunction, tau: &WeightFunction, grid: &TGrid) -> ConditionVerdict {
    compare(sigma, tau, grid, Mode::Vanishing)
}

fn compare(sigma: &WeightFunction, tau: &WeightFunction, grid: &TGrid, mode: Mode) -> ConditionVerdict {
    let ts = grid.points();
    let num = sample(tau, &ts);
    let den = sample(sigma, &ts);
    let model = exponent_model(leading_exponent(tau), leading_exponent(sigma), mode);
    let limit = limit_ratio(leading(tau), leading(sigma));
    ratio_verdict(&ts, &num, &den, grid, mode, model, limit)
}

/// `sigma ≼ tau` and `tau ≼ sigma`.
pub fn equivalent_fun(sigma: &WeightFunction, tau: &WeightFunction) -> ConditionVerdict {
    equivalent_fun_on(sigma, tau, &TGrid::default())
}

pub fn equivalent_fun_on(sigma: &WeightFunction, tau: &WeightFunction, grid: &TGrid) -> ConditionVerdict {
    let a = compare_preceq_on(sigma, tau, grid);
    let b = compare_preceq_on(tau, sigma, grid);
    match (&a, &b) {
        (ConditionVerdict::Satisfied { .. }, ConditionVerdict::Satisfied { .. }) => {
            let ca = a.witness("C").unwrap_or(f64::NAN);
            let cb = b.witness("C").unwrap_or(f64::NAN);
            ConditionVerdict::satisfied([("C", ca.max(cb))])
        }
        (ConditionVerdict::Violated { .. }, _) | (ConditionVerdict::Inconclusive { .. }, _) => a,
        _ => b,
    }
}

/// Verdicts for (omega_snq), (omega_nq), (omega5), (omega2) in that order; fails if a stronger
/// condition holds while a weaker one is violated.
pub fn check_implication_chain(w: &WeightFunction, grid: &TGrid) -> Result<Vec<(OmegaCondition, ConditionVerdict)>> {
    let chain = [OmegaCondition::OmegaSnq, OmegaCondition::OmegaNq, OmegaCondition::Omega5, OmegaCondition::Omega2];
    let verdicts: Vec<(OmegaCondition, ConditionVerdict)> =
        chain.iter().map(|c| (*c, check_omega_condition_on(w, *c, grid))).collect();
    for (i, (strong, vs)) in verdicts.iter().enumerate() {
        for (weak, vw) in &verdicts[i + 1..] {
            if vs.is_satisfied() && vw.is_violated() {
                return Err(Error::InternalInconsistency(format!(
                    "{strong} satisfied but {weak} violated for {}",
                    w.describe()
                )));
            }
        }
    }
    Ok(verdicts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use OmegaCondition::*;

    fn power(a: f64) -> WeightFunction {
        WeightFunction::power_law(a, 1.0).unwrap()
    }

    #[test]
    fn sqrt_conditions() {
        let w = power(0.5);
        let v = check_omega_condition(&w, Omega1);
        assert!((v.witness("C").unwrap() - 2f64.sqrt()).abs() < 1e-12);
        for c in [Omega2, Omega3, Omega4, Omega5, Omega6, OmegaNq, OmegaSnq] {
            assert!(check_omega_condition(&w, c).is_satisfied(), "{c}");
        }
        assert_eq!(check_omega_condition(&w, Omega6).witness("H"), Some(4.0));
    }

    #[test]
    fn linear_weight() {
        let w = power(1.0);
        assert!(check_omega_condition(&w, Omega5).is_violated());
        assert!(check_omega_condition(&w, Omega2).is_satisfied());
        assert!(check_omega_condition(&w, OmegaNq).is_violated());
        check_implication_chain(&w, &TGrid::default()).unwrap();
    }

    #[test]
    fn log_weight() {
        let w = WeightFunction::log_power(2.0, 1.0).unwrap();
        assert!(check_omega_condition(&w, Omega3).is_satisfied());
        let l = WeightFunction::log_power(1.0, 1.0).unwrap();
        assert!(check_omega_condition(&l, Omega3).is_violated());
        assert!(check_omega_condition(&l, Omega4).is_satisfied());
        let h = WeightFunction::log_power(0.5, 1.0).unwrap();
        assert!(check_omega_condition(&h, Omega4).is_violated());
    }

    #[test]
    fn comparisons() {
        assert!(compare_preceq(&power(0.5), &power(1.0 / 3.0)).is_satisfied());
        assert!(compare_preceq(&power(1.0 / 3.0), &power(0.5)).is_violated());
        assert!(compare_o(&power(0.5), &power(0.5)).is_violated());
        assert!(compare_o(&power(0.5), &power(0.25)).is_satisfied());
        let w = power(0.5);
        assert!(equivalent_fun(&w, &w.normalize()).is_satisfied());
    }

    #[test]
    fn parse_condition_names() {
        assert_eq!("omega1".parse::<OmegaCondition>().unwrap(), Omega1);
        assert_eq!("om6".parse::<OmegaCondition>().unwrap(), Omega6);
        assert_eq!("omega_snq".parse::<OmegaCondition>().unwrap(), OmegaSnq);
        assert_eq!("(omega_nq)".parse::<OmegaCondition>().unwrap(), OmegaNq);
        assert!("omega9".parse::<OmegaCondition>().is_err());
    }
}
