use super::{Family, WeightSequence};
use crate::error::Result;
use crate::functions::FunctionSpec;
use serde::{Deserialize, Serialize};

/// JSON description of a sequence, e.g. `{"family":"gevrey","s":2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceSpec {
    Gevrey { s: f64 },
    Qgevrey { q: f64 },
    Explicit { values: Vec<f64> },
    Quotients { values: Vec<f64> },
    Shift { eps: f64, base: Box<SequenceSpec> },
    Power { r: f64, base: Box<SequenceSpec> },
    Hat { base: Box<SequenceSpec> },
    /// The descendant `S` of `N^{1/r}`.
    Descendant { r: f64, base: Box<SequenceSpec> },
    /// Level `l` of the weight matrix of a weight function.
    Matrix { l: f64, omega: Box<FunctionSpec> },
}

impl SequenceSpec {
    pub fn build(&self) -> Result<WeightSequence> {
        match self {
            SequenceSpec::Gevrey { s } => WeightSequence::gevrey(*s),
            SequenceSpec::Qgevrey { q } => WeightSequence::qgevrey(*q),
            SequenceSpec::Explicit { values } => WeightSequence::explicit(values.clone()),
            SequenceSpec::Quotients { values } => WeightSequence::from_quotients(values.clone()),
            SequenceSpec::Shift { eps, base } => base.build()?.factorial_shift(*eps),
            SequenceSpec::Power { r, base } => base.build()?.power(*r),
            SequenceSpec::Hat { base } => Ok(base.build()?.hat()),
            SequenceSpec::Descendant { r, base } => {
                Ok(crate::constructions::descendant(&base.build()?, *r)?.s)
            }
            SequenceSpec::Matrix { l, omega } => {
                crate::constructions::matrix_level(&omega.build()?, *l)
            }
        }
    }

    pub(crate) fn from_family(family: &Family) -> SequenceSpec {
        let boxed = |s: &WeightSequence| Box::new(s.to_spec());
        match family {
            Family::Gevrey { s } => SequenceSpec::Gevrey { s: *s },
            Family::QGevrey { q } => SequenceSpec::Qgevrey { q: *q },
            Family::Explicit { values } => SequenceSpec::Explicit { values: values.clone() },
            Family::FromQuotients { quotients } => {
                SequenceSpec::Quotients { values: quotients.clone() }
            }
            Family::Power { base, r } => SequenceSpec::Power { r: *r, base: boxed(base) },
            Family::FactorialShift { base, eps } => {
                SequenceSpec::Shift { eps: *eps, base: boxed(base) }
            }
            Family::Hat { base } => SequenceSpec::Hat { base: boxed(base) },
            Family::Descendant { base, r } => {
                SequenceSpec::Descendant { r: *r, base: boxed(base) }
            }
            Family::MatrixLevel { omega, l } => {
                SequenceSpec::Matrix { l: *l, omega: Box::new(omega.to_spec()) }
            }
        }
    }
}
