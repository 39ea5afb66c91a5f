use super::{Expr, WeightFunction};
use crate::error::Result;
use crate::sequences::SequenceSpec;
use serde::{Deserialize, Serialize};

fn one() -> f64 {
    1.0
}

/// JSON description of a weight function, e.g. `{"kind":"power","a":0.5}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Power {
        a: f64,
        #[serde(default = "one")]
        c: f64,
    },
    Logpower {
        a: f64,
        #[serde(default = "one")]
        c: f64,
    },
    Subst { r: f64, base: Box<FunctionSpec> },
    Assoc { sequence: SequenceSpec },
    /// `kappa_{base^r}(t^{1/r})`; `r = 1` is the plain `kappa`.
    Kappa {
        #[serde(default = "one")]
        r: f64,
        base: Box<FunctionSpec>,
    },
    Normalized { base: Box<FunctionSpec> },
    Glue { base: Box<FunctionSpec>, breakpoints: Vec<f64>, multipliers: Vec<f64>, offsets: Vec<f64> },
}

impl FunctionSpec {
    pub fn build(&self) -> Result<WeightFunction> {
        match self {
            FunctionSpec::Power { a, c } => WeightFunction::power_law(*a, *c),
            FunctionSpec::Logpower { a, c } => WeightFunction::log_power(*a, *c),
            FunctionSpec::Subst { r, base } => base.build()?.power_substitute(*r),
            FunctionSpec::Assoc { sequence } => WeightFunction::associated(&sequence.build()?),
            FunctionSpec::Kappa { r, base } => crate::constructions::kappa_r(&base.build()?, *r),
            FunctionSpec::Normalized { base } => Ok(base.build()?.normalize()),
            FunctionSpec::Glue { base, breakpoints, multipliers, offsets } => {
                base.build()?.glue(breakpoints.clone(), multipliers.clone(), offsets.clone())
            }
        }
    }

    pub(crate) fn from_expr(expr: &Expr) -> FunctionSpec {
        let boxed = |w: &WeightFunction| Box::new(w.to_spec());
        match expr {
            Expr::PowerLaw { a, c } => FunctionSpec::Power { a: *a, c: *c },
            Expr::LogPower { a, c } => FunctionSpec::Logpower { a: *a, c: *c },
            Expr::Associated(m) => FunctionSpec::Assoc { sequence: m.to_spec() },
            Expr::PowerSubst { base, r } => FunctionSpec::Subst { r: *r, base: boxed(base) },
            Expr::Kappa { base, r } => FunctionSpec::Kappa { r: *r, base: boxed(base) },
            Expr::PiecewiseGlue { base, breakpoints, multipliers, offsets } => FunctionSpec::Glue {
                base: boxed(base),
                breakpoints: breakpoints.clone(),
                multipliers: multipliers.clone(),
                offsets: offsets.clone(),
            },
            Expr::NormalizedShift { base, .. } => FunctionSpec::Normalized { base: boxed(base) },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_shapes_round_trip() {
        let cases = [
            r#"{"kind":"power","a":0.5}"#,
            r#"{"kind":"subst","r":2,"base":{"kind":"power","a":0.25}}"#,
            r#"{"kind":"assoc","sequence":{"family":"gevrey","s":2}}"#,
            r#"{"kind":"kappa","r":1.5,"base":{"kind":"power","a":0.3}}"#,
            r#"{"kind":"normalized","base":{"kind":"power","a":0.5}}"#,
        ];
        for c in cases {
            let spec: FunctionSpec = serde_json::from_str(c).unwrap();
            let w = spec.build().unwrap();
            let again = w.to_spec().build().unwrap();
            for t in [0.0, 0.5, 3.0, 1e4] {
                assert_eq!(w.at(t), again.at(t), "{c} at {t}");
            }
        }
    }
}
