//! Weight functions `omega: [0, inf) -> [0, inf)` as immutable expression trees.
//!
//! Closed-form nodes carry a power expansion `sum c_k t^{a_k}` valid beyond some point;
//! it decides integrability and O/o comparisons where the grid alone cannot.

mod conditions;
mod convex;
mod integral;
mod spec;

pub use conditions::{
    check_implication_chain, check_omega_condition, check_omega_condition_on, check_omega_nq_r,
    check_omega_nq_r_on, compare_o, compare_o_on, compare_preceq, compare_preceq_on,
    equivalent_fun, equivalent_fun_on, OmegaCondition,
};
pub(crate) use conditions::{exponent_model, limit_ratio, ratio_verdict, Mode};
pub use convex::{young_conjugate, ConvexPL};
pub use integral::{weighted_integral, weighted_integrals, IntegralOutcome, Y_CUT};
pub use spec::FunctionSpec;

use crate::error::{Error, Result};
use crate::sequences::WeightSequence;
use crate::verdict::ConditionVerdict;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

#[derive(Debug, Clone)]
pub enum Expr {
    /// `c t^a`.
    PowerLaw { a: f64, c: f64 },
    /// `c (log t)^a` for `t >= 1`, zero before.
    LogPower { a: f64, c: f64 },
    /// `omega_M(t) = sup_p log(t^p / M_p)`.
    Associated(WeightSequence),
    /// `base(t^r)`.
    PowerSubst { base: WeightFunction, r: f64 },
    /// `(1/r) int_1^inf base(t u) u^{-1-1/r} du`, which is `kappa_{base^r}(t^{1/r})`.
    Kappa { base: WeightFunction, r: f64 },
    /// `multipliers[i] * base(t) - offsets[i]` on `[breakpoints[i], breakpoints[i+1])`.
    PiecewiseGlue { base: WeightFunction, breakpoints: Vec<f64>, multipliers: Vec<f64>, offsets: Vec<f64> },
    /// `max(0, base(t) - base(1))` for `t >= 1`, zero before.
    NormalizedShift { base: WeightFunction, shift: f64 },
}

#[derive(Debug)]
struct FnInner {
    expr: Expr,
    cache: Mutex<BTreeMap<String, ConditionVerdict>>,
}

/// A weight function. Cheap to clone; verdicts are cached per grid.
#[derive(Clone)]
pub struct WeightFunction {
    inner: Arc<FnInner>,
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightFunction({})", self.describe())
    }
}

/// `sum c_k t^{a_k}` for `t >= valid_from`; terms sorted by decreasing exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub terms: Vec<(f64, f64)>,
    pub valid_from: f64,
}

impl Expansion {
    fn new(terms: Vec<(f64, f64)>, valid_from: f64) -> Self {
        let mut merged: Vec<(f64, f64)> = Vec::new();
        let mut sorted = terms;
        sorted.sort_by(|x, y| y.1.total_cmp(&x.1));
        for (c, a) in sorted {
            match merged.last_mut() {
                Some(last) if last.1 == a => last.0 += c,
                _ => merged.push((c, a)),
            }
        }
        merged.retain(|(c, _)| *c != 0.0);
        Expansion { terms: merged, valid_from }
    }

    /// Leading `(c, a)`; the constant term `(0, 0)` if empty.
    pub fn leading(&self) -> (f64, f64) {
        self.terms.first().copied().unwrap_or((0.0, 0.0))
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|(c, a)| c * t.powf(*a)).sum()
    }
}

impl WeightFunction {
    fn from_expr(expr: Expr) -> Self {
        WeightFunction { inner: Arc::new(FnInner { expr, cache: Mutex::new(BTreeMap::new()) }) }
    }

    /// `c t^a`, unclamped.
    pub fn power_law(a: f64, c: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidSpec(format!("power law needs a, c > 0, got a={a}, c={c}")));
        }
        Ok(Self::from_expr(Expr::PowerLaw { a, c }))
    }

    /// `c (log t)^a` on `[1, inf)`.
    pub fn log_power(a: f64, c: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidSpec(format!("log power needs a, c > 0, got a={a}, c={c}")));
        }
        Ok(Self::from_expr(Expr::LogPower { a, c }))
    }

    /// Associated function of a log-convex sequence.
    pub fn associated(m: &WeightSequence) -> Result<Self> {
        crate::constructions::check_associated_preconditions(m)?;
        Ok(Self::from_expr(Expr::Associated(m.clone())))
    }

    /// `omega^r(t) = omega(t^r)`. Nested substitutions collapse.
    pub fn power_substitute(&self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!("substitution exponent must be positive, got {r}")));
        }
        Ok(match &self.inner.expr {
            Expr::PowerLaw { a, c } => Self::from_expr(Expr::PowerLaw { a: a * r, c: *c }),
            Expr::PowerSubst { base, r: inner } => {
                let rr = inner * r;
                if rr == 1.0 {
                    base.clone()
                } else {
                    Self::from_expr(Expr::PowerSubst { base: base.clone(), r: rr })
                }
            }
            _ => Self::from_expr(Expr::PowerSubst { base: self.clone(), r }),
        })
    }

    pub(crate) fn kappa_node(&self, r: f64) -> Self {
        Self::from_expr(Expr::Kappa { base: self.clone(), r })
    }

    /// Piecewise combination `multipliers[i] * self - offsets[i]` on `[x_i, x_{i+1})`.
    pub fn glue(
        &self,
        breakpoints: Vec<f64>,
        multipliers: Vec<f64>,
        offsets: Vec<f64>,
    ) -> Result<Self> {
        if breakpoints.is_empty()
            || breakpoints.len() != multipliers.len()
            || breakpoints.len() != offsets.len()
        {
            return Err(Error::InvalidSpec("glue needs equally many breakpoints, multipliers and offsets".into()));
        }
        if breakpoints[0] != 0.0 || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidSpec("glue breakpoints must start at 0 and increase".into()));
        }
        Ok(Self::from_expr(Expr::PiecewiseGlue { base: self.clone(), breakpoints, multipliers, offsets }))
    }

    /// Zero on `[0, 1]`, `max(0, omega(t) - omega(1))` beyond.
    pub fn normalize(&self) -> Self {
        let shift = self.at(1.0);
        Self::from_expr(Expr::NormalizedShift { base: self.clone(), shift })
    }

    pub fn expr(&self) -> &Expr {
        &self.inner.expr
    }

    /// `omega(t)`; errors for negative `t` and for divergent `kappa` integrals.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("weight functions live on [0, inf), got t = {t}")));
        }
        let v = self.at(t);
        if v.is_infinite() {
            return Err(Error::NotNonQuasianalytic(format!("integral diverges at t = {t}")));
        }
        Ok(v)
    }

    /// Unchecked evaluation; `+inf` where a defining integral or supremum diverges.
    pub fn at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.inner.expr {
            Expr::PowerLaw { a, c } => c * t.powf(*a),
            Expr::LogPower { a, c } => {
                if t <= 1.0 {
                    0.0
                } else {
                    c * t.ln().powf(*a)
                }
            }
            Expr::Associated(m) => crate::constructions::associated_value(m, t),
            Expr::PowerSubst { base, r } => base.at(t.powf(*r)),
            Expr::Kappa { base, r } => match weighted_integral(base, t, *r) {
                IntegralOutcome::Finite { value, .. } => value / r,
                _ => f64::INFINITY,
            },
            Expr::PiecewiseGlue { base, breakpoints, multipliers, offsets } => {
                let i = breakpoints.partition_point(|x| *x <= t).saturating_sub(1);
                multipliers[i] * base.at(t) - offsets[i]
            }
            Expr::NormalizedShift { base, shift } => {
                if t <= 1.0 {
                    0.0
                } else {
                    (base.at(t) - shift).max(0.0)
                }
            }
        }
    }

    /// Power expansion valid for large `t`, when the node has a closed form there.
    pub fn expansion(&self) -> Option<Expansion> {
        match &self.inner.expr {
            Expr::PowerLaw { a, c } => Some(Expansion::new(vec![(*c, *a)], 0.0)),
            Expr::LogPower { .. } | Expr::Associated(_) => None,
            Expr::PowerSubst { base, r } => {
                let e = base.expansion()?;
                Some(Expansion::new(
                    e.terms.iter().map(|(c, a)| (*c, a * r)).collect(),
                    e.valid_from.powf(1.0 / r),
                ))
            }
            Expr::Kappa { base, r } => {
                let e = base.expansion()?;
                if e.terms.iter().any(|(_, a)| *a >= 1.0 / r - 1e-12) {
                    return None;
                }
                Some(Expansion::new(
                    e.terms.iter().map(|(c, a)| (c / (1.0 - r * a), *a)).collect(),
                    e.valid_from,
                ))
            }
            Expr::PiecewiseGlue { base, breakpoints, multipliers, offsets } => {
                let e = base.expansion()?;
                let n = *multipliers.last()?;
                let mut terms: Vec<(f64, f64)> = e.terms.iter().map(|(c, a)| (c * n, *a)).collect();
                terms.push((-*offsets.last()?, 0.0));
                Some(Expansion::new(terms, e.valid_from.max(*breakpoints.last()?)))
            }
            Expr::NormalizedShift { base, shift } => {
                let e = base.expansion()?;
                let mut terms = e.terms.clone();
                terms.push((-shift, 0.0));
                Some(Expansion::new(terms, e.valid_from.max(1.0)))
            }
        }
    }

    /// Whether `omega(t) = 0` on `[0, 1]`.
    pub fn is_normalized(&self) -> bool {
        match &self.inner.expr {
            Expr::NormalizedShift { .. } | Expr::LogPower { .. } => true,
            Expr::PowerLaw { .. } => false,
            Expr::PowerSubst { base, .. } => base.is_normalized(),
            _ => self.at(1.0) == 0.0,
        }
    }

    pub(crate) fn cached(&self, key: String, f: impl FnOnce() -> ConditionVerdict) -> ConditionVerdict {
        if let Some(v) = self.inner.cache.lock().expect("verdict cache poisoned").get(&key) {
            return v.clone();
        }
        let v = f();
        self.inner.cache.lock().expect("verdict cache poisoned").entry(key).or_insert(v).clone()
    }

    pub fn to_spec(&self) -> FunctionSpec {
        FunctionSpec::from_expr(&self.inner.expr)
    }

    pub fn from_spec(spec: &FunctionSpec) -> Result<Self> {
        spec.build()
    }

    pub fn describe(&self) -> String {
        match &self.inner.expr {
            Expr::PowerLaw { a, c } if *c == 1.0 => format!("power:{a}"),
            Expr::PowerLaw { a, c } => format!("{c}*power:{a}"),
            Expr::LogPower { a, c } if *c == 1.0 => format!("logpower:{a}"),
            Expr::LogPower { a, c } => format!("{c}*logpower:{a}"),
            Expr::Associated(m) => format!("assoc({})", m.describe()),
            Expr::PowerSubst { base, r } => format!("subst:{r}({})", base.describe()),
            Expr::Kappa { base, r } => format!("kappa:{r}({})", base.describe()),
            Expr::PiecewiseGlue { base, breakpoints, .. } => {
                format!("glue[{}]({})", breakpoints.len(), base.describe())
            }
            Expr::NormalizedShift { base, .. } => format!("normalized({})", base.describe()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_evaluations() {
        let w = WeightFunction::power_law(0.5, 1.0).unwrap();
        assert_eq!(w.eval(4.0).unwrap(), 2.0);
        assert_eq!(w.eval(0.0).unwrap(), 0.0);
        assert!(matches!(w.eval(-1.0), Err(Error::InvalidArgument(_))));
        let s = w.power_substitute(2.0).unwrap();
        assert!((s.eval(3.0).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn substitutions_collapse() {
        let w = WeightFunction::power_law(1.0 / 3.0, 1.0).unwrap();
        match w.power_substitute(1.5).unwrap().expr() {
            Expr::PowerLaw { a, .. } => assert!((a - 0.5).abs() < 1e-15),
            e => panic!("{e:?}"),
        }
        let l = WeightFunction::log_power(2.0, 1.0).unwrap();
        let back = l.power_substitute(2.0).unwrap().power_substitute(0.5).unwrap();
        assert!(matches!(back.expr(), Expr::LogPower { .. }));
        for t in [0.5, 2.0, 10.0, 1e5] {
            assert_eq!(back.at(t), l.at(t));
        }
    }

    #[test]
    fn normalization() {
        let w = WeightFunction::power_law(0.5, 1.0).unwrap();
        let n = w.normalize();
        assert_eq!(n.eval(1.0).unwrap(), 0.0);
        assert_eq!(n.eval(0.3).unwrap(), 0.0);
        for t in [1.5, 9.0, 1e6] {
            assert_eq!(n.eval(t).unwrap(), w.at(t) - 1.0);
        }
        assert!(n.is_normalized());
    }

    #[test]
    fn expansion_of_normalized_kappa() {
        let w = WeightFunction::power_law(1.0 / 3.0, 1.0).unwrap();
        let k = w.kappa_node(2.0).normalize();
        let e = k.expansion().unwrap();
        assert!((e.leading().0 - 3.0).abs() < 1e-12);
        for t in [10.0, 1e3, 1e6] {
            let rel = (e.eval(t) - k.at(t)).abs() / k.at(t);
            assert!(rel < 1e-7, "t={t} rel={rel}");
        }
    }
}
