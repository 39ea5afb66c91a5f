//! Weight sequences `M = (M_p)`, their quotients `mu_p = M_p / M_{p-1}` and
//! reduced form `m_p = M_p / p!`, together with the sequence-level conditions
//! and comparison relations.
//!
//! All arithmetic is carried out on `log M_p`; a q-Gevrey sequence reaches
//! `10^4800` by `p = 100`, far outside `f64`.
//!
//! Closed-form families (Gevrey, q-Gevrey and anything obtained from them by
//! powers, factorial shifts and the hat operation) share one representation,
//! a [`QuotientLaw`]
//!
//! ```text
//! log mu_p = lin * p + log_coef * log p + constant      (p >= 1)
//! ```
//!
//! which is evaluated at any index and gives exact tail sums. Other families
//! (explicit lists, descendants, matrix levels) are tabulated up to their range.

mod conditions;
mod relations;
mod spec;

pub use conditions::{
    check_beta1, check_beta3, check_gamma1, check_lc, check_mg, check_nq, check_nq_r, check_slc,
    quotients_nondecreasing,
};
pub use relations::{compare, RelationKind, RelationVerdict};
pub use spec::SequenceSpec;

use crate::error::{Error, Result};
use crate::functions::{ConvexPL, WeightFunction};
use crate::special::{hurwitz_zeta, ln_factorial};
use crate::verdict::ConditionVerdict;
use std::fmt;
use std::sync::{Arc, OnceLock};

/// Default number of entries considered by range-based checks.
pub const DEFAULT_P_MAX: usize = 100_000;

/// `log mu_p = lin * p + log_coef * ln p + constant` for `p >= 1`, `log M_0 = log_m0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotientLaw {
    pub log_m0: f64,
    pub lin: f64,
    pub log_coef: f64,
    pub constant: f64,
}

impl QuotientLaw {
    pub fn log_quotient(&self, p: f64) -> f64 {
        if p == 0.0 {
            return 0.0;
        }
        let mut v = self.log_coef * p.ln();
        if self.lin != 0.0 {
            v += self.lin * p;
        }
        if self.constant != 0.0 {
            v += self.constant;
        }
        v
    }

    pub fn log_value(&self, p: f64) -> f64 {
        let mut v = self.log_m0;
        if self.log_coef != 0.0 {
            v += self.log_coef * ln_factorial(p);
        }
        if self.lin != 0.0 {
            v += self.lin * p * (p + 1.0) / 2.0;
        }
        if self.constant != 0.0 {
            v += self.constant * p;
        }
        v
    }

    fn scaled(&self, r: f64) -> Self {
        QuotientLaw {
            log_m0: self.log_m0 * r,
            lin: self.lin * r,
            log_coef: self.log_coef * r,
            constant: self.constant * r,
        }
    }

    /// `sum_{j >= p} mu_j^{-e}` for `p >= 1`.
    fn tail_sum(&self, p: usize, e: f64) -> TailSum {
        debug_assert!(p >= 1);
        if self.lin < 0.0 {
            return TailSum::Divergent;
        }
        if self.lin == 0.0 {
            let x = e * self.log_coef;
            if x <= 1.0 + 1e-12 {
                return TailSum::Divergent;
            }
            let value = (-e * self.constant).exp() * hurwitz_zeta(x, p as f64);
            return TailSum::Finite { value, fitted: false };
        }
        // Geometric decay eventually dominates; sum until negligible.
        let mut sum = 0.0;
        let mut j = p as f64;
        let mut prev = f64::INFINITY;
        for _ in 0..50_000_000u64 {
            let term = (-e * self.log_quotient(j)).exp();
            sum += term;
            if term <= 1e-18 * sum && term <= prev {
                return TailSum::Finite { value: sum, fitted: false };
            }
            prev = term;
            j += 1.0;
        }
        TailSum::Finite { value: sum, fitted: true }
    }
}

/// Asymptotic shape of the quotients: `log mu_p ~ lin * p + log_coef * ln p + O(1)`.
/// `exact` means the relation holds with a known constant for every `p >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TailModel {
    pub lin: f64,
    pub log_coef: f64,
    pub exact: bool,
}

impl TailModel {
    /// Whether `sum mu_p^{-e}` converges under this model.
    pub fn sum_converges(&self, e: f64) -> bool {
        self.lin > 0.0 || (self.lin == 0.0 && e * self.log_coef > 1.0 + 1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailSum {
    Finite { value: f64, fitted: bool },
    Divergent,
    /// No tail model: the sum cannot be completed.
    Unknown,
}

#[derive(Debug, Clone)]
pub enum Family {
    Gevrey { s: f64 },
    QGevrey { q: f64 },
    Explicit { values: Vec<f64> },
    FromQuotients { quotients: Vec<f64> },
    Power { base: WeightSequence, r: f64 },
    FactorialShift { base: WeightSequence, eps: f64 },
    Hat { base: WeightSequence },
    Descendant { base: WeightSequence, r: f64 },
    MatrixLevel { omega: WeightFunction, l: f64 },
}

#[derive(Debug)]
pub(crate) enum Repr {
    Law(QuotientLaw),
    /// `log M_0 ..= log M_P`
    Table(Vec<f64>),
    /// Computed from the family's base on demand.
    Derived,
    /// `log M_j = phi*(l j) / l`, trusted up to `max_index`.
    Conjugate { pl: Arc<ConvexPL>, l: f64, max_index: usize },
}

#[derive(Debug)]
struct Inner {
    family: Family,
    repr: Repr,
    tail: Option<TailModel>,
    p_max: usize,
    warnings: Vec<String>,
    lc: OnceLock<ConditionVerdict>,
}

/// A positive sequence `M_0, M_1, ...`. Cheap to clone; immutable once built.
#[derive(Clone)]
pub struct WeightSequence {
    inner: Arc<Inner>,
}

impl fmt::Debug for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightSequence({})", self.describe())
    }
}

impl WeightSequence {
    pub(crate) fn from_parts(family: Family, repr: Repr, tail: Option<TailModel>) -> Self {
        Self::build(family, repr, tail, DEFAULT_P_MAX, Vec::new())
    }

    fn build(
        family: Family,
        repr: Repr,
        tail: Option<TailModel>,
        p_max: usize,
        warnings: Vec<String>,
    ) -> Self {
        WeightSequence {
            inner: Arc::new(Inner { family, repr, tail, p_max, warnings, lc: OnceLock::new() }),
        }
    }

    fn from_law(family: Family, law: QuotientLaw) -> Self {
        let tail = TailModel { lin: law.lin, log_coef: law.log_coef, exact: true };
        Self::from_parts(family, Repr::Law(law), Some(tail))
    }

    /// Gevrey sequence `M_p = (p!)^s`.
    pub fn gevrey(s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidSpec(format!("Gevrey order must be positive, got {s}")));
        }
        let law = QuotientLaw { log_m0: 0.0, lin: 0.0, log_coef: s, constant: 0.0 };
        Ok(Self::from_law(Family::Gevrey { s }, law))
    }

    /// q-Gevrey sequence `M_p = q^{p^2}`.
    pub fn qgevrey(q: f64) -> Result<Self> {
        if !(q > 1.0 && q.is_finite()) {
            return Err(Error::InvalidSpec(format!("q-Gevrey base must exceed 1, got {q}")));
        }
        let lq = q.ln();
        let law = QuotientLaw { log_m0: 0.0, lin: 2.0 * lq, log_coef: 0.0, constant: -lq };
        Ok(Self::from_law(Family::QGevrey { q }, law))
    }

    /// Finite sequence `M_0, ..., M_P`. A first entry other than 1 is recorded as a warning.
    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSpec("explicit sequence is empty".into()));
        }
        if let Some((p, v)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidSpec(format!("entry M_{p} = {v} is not positive")));
        }
        let mut warnings = Vec::new();
        if values[0] != 1.0 {
            warnings.push(format!("M_0 = {} differs from 1", values[0]));
        }
        let logs = values.iter().map(|v| v.ln()).collect();
        Ok(Self::build(
            Family::Explicit { values },
            Repr::Table(logs),
            None,
            DEFAULT_P_MAX,
            warnings,
        ))
    }

    /// Finite sequence with `M_0 = 1` given by its quotients `mu_1, ..., mu_P`.
    pub fn from_quotients(quotients: Vec<f64>) -> Result<Self> {
        if let Some((p, v)) =
            quotients.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite()))
        {
            return Err(Error::InvalidSpec(format!("quotient mu_{} = {v} is not positive", p + 1)));
        }
        let mut logs = Vec::with_capacity(quotients.len() + 1);
        let mut acc = 0.0;
        logs.push(0.0);
        for q in &quotients {
            acc += q.ln();
            logs.push(acc);
        }
        Ok(Self::from_parts(Family::FromQuotients { quotients }, Repr::Table(logs), None))
    }

    /// The power `M^r = (M_p^r)`.
    pub fn power(&self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!("power exponent must be positive, got {r}")));
        }
        let family = Family::Power { base: self.clone(), r };
        let tail = self.tail_model().map(|t| TailModel {
            lin: t.lin * r,
            log_coef: t.log_coef * r,
            exact: t.exact,
        });
        Ok(match &self.inner.repr {
            Repr::Law(law) => Self::from_law(family, law.scaled(r)),
            _ => self.derived(family, tail),
        })
    }

    /// The factorial shift `M_eps = (p!^eps M_p)`.
    pub fn factorial_shift(&self, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("shift must be positive, got {eps}")));
        }
        let family = Family::FactorialShift { base: self.clone(), eps };
        Ok(self.add_factorial(family, eps))
    }

    /// `hat M = (p! M_p)`.
    pub fn hat(&self) -> Self {
        self.add_factorial(Family::Hat { base: self.clone() }, 1.0)
    }

    fn add_factorial(&self, family: Family, eps: f64) -> Self {
        let tail = self.tail_model().map(|t| TailModel { log_coef: t.log_coef + eps, ..t });
        match &self.inner.repr {
            Repr::Law(law) => {
                Self::from_law(family, QuotientLaw { log_coef: law.log_coef + eps, ..*law })
            }
            _ => self.derived(family, tail),
        }
    }

    fn derived(&self, family: Family, tail: Option<TailModel>) -> Self {
        Self::build(family, Repr::Derived, tail, self.inner.p_max, self.inner.warnings.clone())
    }

    /// Same sequence with a different default checking range.
    pub fn with_p_max(&self, p_max: usize) -> Self {
        let repr = match &self.inner.repr {
            Repr::Law(l) => Repr::Law(*l),
            Repr::Table(t) => Repr::Table(t.clone()),
            Repr::Derived => Repr::Derived,
            Repr::Conjugate { pl, l, max_index } => {
                Repr::Conjugate { pl: pl.clone(), l: *l, max_index: *max_index }
            }
        };
        Self::build(
            self.inner.family.clone(),
            repr,
            self.inner.tail,
            p_max.max(2),
            self.inner.warnings.clone(),
        )
    }

    pub fn family(&self) -> &Family {
        &self.inner.family
    }

    pub fn tail_model(&self) -> Option<TailModel> {
        self.inner.tail
    }

    /// The closed-form quotient law, when the sequence has one.
    pub fn law(&self) -> Option<QuotientLaw> {
        match &self.inner.repr {
            Repr::Law(l) => Some(*l),
            _ => None,
        }
    }

    pub(crate) fn repr(&self) -> &Repr {
        &self.inner.repr
    }

    pub fn warnings(&self) -> &[String] {
        &self.inner.warnings
    }

    pub fn p_max(&self) -> usize {
        self.inner.p_max
    }

    /// Largest index with a known value; `None` for closed forms.
    pub fn max_index(&self) -> Option<usize> {
        match &self.inner.repr {
            Repr::Law(_) => None,
            Repr::Table(t) => Some(t.len() - 1),
            Repr::Conjugate { max_index, .. } => Some(*max_index),
            Repr::Derived => self.base().and_then(|b| b.max_index()),
        }
    }

    /// The index range used by the finite checks: `min(max_index, p_max)`.
    pub fn range(&self) -> usize {
        match self.max_index() {
            Some(m) => m.min(self.inner.p_max),
            None => self.inner.p_max,
        }
    }

    fn base(&self) -> Option<&WeightSequence> {
        match &self.inner.family {
            Family::Power { base, .. }
            | Family::FactorialShift { base, .. }
            | Family::Hat { base }
            | Family::Descendant { base, .. } => Some(base),
            _ => None,
        }
    }

    /// `log M_p`. Panics if `p` exceeds [`max_index`](Self::max_index).
    pub fn log_value(&self, p: usize) -> f64 {
        match &self.inner.repr {
            Repr::Law(law) => law.log_value(p as f64),
            Repr::Table(t) => t[p],
            Repr::Conjugate { pl, l, .. } => pl.eval(l * p as f64) / l,
            Repr::Derived => match &self.inner.family {
                Family::Power { base, r } => r * base.log_value(p),
                Family::FactorialShift { base, eps } => {
                    base.log_value(p) + eps * ln_factorial(p as f64)
                }
                Family::Hat { base } => base.log_value(p) + ln_factorial(p as f64),
                _ => unreachable!("derived representation without a base"),
            },
        }
    }

    /// `log mu_p`, with `mu_0 = 1`.
    pub fn log_quotient(&self, p: usize) -> f64 {
        if p == 0 {
            return 0.0;
        }
        match &self.inner.repr {
            Repr::Law(law) => law.log_quotient(p as f64),
            Repr::Table(t) => t[p] - t[p - 1],
            Repr::Conjugate { pl, l, .. } => {
                let x = l * p as f64;
                (pl.eval(x) - pl.eval(x - l)) / l
            }
            Repr::Derived => match &self.inner.family {
                Family::Power { base, r } => r * base.log_quotient(p),
                Family::FactorialShift { base, eps } => {
                    base.log_quotient(p) + eps * (p as f64).ln()
                }
                Family::Hat { base } => base.log_quotient(p) + (p as f64).ln(),
                _ => unreachable!("derived representation without a base"),
            },
        }
    }

    /// `log m_p = log M_p - log p!`.
    pub fn log_reduced(&self, p: usize) -> f64 {
        self.log_value(p) - ln_factorial(p as f64)
    }

    pub fn value(&self, p: usize) -> f64 {
        self.log_value(p).exp()
    }

    pub fn quotient(&self, p: usize) -> f64 {
        self.log_quotient(p).exp()
    }

    pub fn reduced(&self, p: usize) -> f64 {
        self.log_reduced(p).exp()
    }

    /// `M_0 = 1 <= M_1`.
    pub fn is_normalized(&self) -> bool {
        let l0 = self.log_value(0);
        let has_one = self.max_index().map_or(true, |m| m >= 1);
        l0.abs() <= 1e-15 && (!has_one || self.log_value(1) >= -1e-15)
    }

    /// Cached `check_lc` over [`range`](Self::range).
    pub fn lc_verdict(&self) -> &ConditionVerdict {
        self.inner.lc.get_or_init(|| check_lc(self))
    }

    /// `sum_{j >= p} mu_j^{-e}` completed with the tail model.
    pub fn tail_sum(&self, p: usize, e: f64) -> TailSum {
        let p = p.max(1);
        if let Repr::Law(law) = &self.inner.repr {
            return law.tail_sum(p, e);
        }
        let Some(model) = self.inner.tail else {
            return TailSum::Unknown;
        };
        if !model.sum_converges(e) {
            return TailSum::Divergent;
        }
        let end = self.range();
        let mut direct = 0.0;
        for j in p..=end {
            direct += (-e * self.log_quotient(j)).exp();
        }
        // Fit the model constant at the end of the range and complete with it.
        let from = end.max(p - 1) + 1;
        let fit_at = end.max(1);
        let constant = self.log_quotient(fit_at)
            - model.lin * fit_at as f64
            - model.log_coef * (fit_at as f64).ln();
        let fitted =
            QuotientLaw { log_m0: 0.0, lin: model.lin, log_coef: model.log_coef, constant };
        match fitted.tail_sum(from, e) {
            TailSum::Finite { value, .. } => {
                TailSum::Finite { value: direct + value, fitted: !model.exact }
            }
            other => other,
        }
    }

    /// Serializable description of how the sequence was built.
    pub fn to_spec(&self) -> SequenceSpec {
        SequenceSpec::from_family(&self.inner.family)
    }

    pub fn from_spec(spec: &SequenceSpec) -> Result<Self> {
        spec.build()
    }

    pub fn describe(&self) -> String {
        match &self.inner.family {
            Family::Gevrey { s } => format!("gevrey:{s}"),
            Family::QGevrey { q } => format!("qgevrey:{q}"),
            Family::Explicit { values } => format!("explicit[{}]", values.len()),
            Family::FromQuotients { quotients } => format!("quotients[{}]", quotients.len()),
            Family::Power { base, r } => format!("power:{r}({})", base.describe()),
            Family::FactorialShift { base, eps } => format!("shift:{eps}({})", base.describe()),
            Family::Hat { base } => format!("hat({})", base.describe()),
            Family::Descendant { base, r } => format!("descendant:{r}({})", base.describe()),
            Family::MatrixLevel { omega, l } => format!("matrix:{l}({})", omega.describe()),
        }
    }
}
