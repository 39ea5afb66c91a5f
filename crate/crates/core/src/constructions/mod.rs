//! Explicit constructions: associated functions and weight matrices, the hat weight,
//! `kappa`, the descendant of a sequence and the reduction construction.

mod associated;
mod descendant;
mod kappa;
mod matrix;
mod reduction;

pub use associated::{associated_eval, associated_function, associated_value, check_associated_preconditions};
pub use descendant::{check_descendant_mg, descendant, Descendant};
pub use kappa::{kappa, kappa_alt_form, kappa_power_normalized, kappa_r};
pub use matrix::{associated_matrix, matrix_level, AbsorbSample, WeightMatrix, DEFAULT_J_MAX, DEFAULT_LEVELS};
pub use reduction::{reduction_build, BreakpointRow, ReductionResult, SegmentRow, DEFAULT_N_BREAK};

use crate::error::Result;
use crate::functions::WeightFunction;
use crate::sequences::WeightSequence;
use serde::{Serialize, Serializer};

pub(crate) fn ser_function<S: Serializer>(w: &WeightFunction, s: S) -> std::result::Result<S::Ok, S::Error> {
    w.to_spec().serialize(s)
}

pub(crate) fn ser_sequence<S: Serializer>(m: &WeightSequence, s: S) -> std::result::Result<S::Ok, S::Error> {
    m.to_spec().serialize(s)
}

/// `omega(hat M(omega))`: the associated function of `hat W^[1]`.
pub fn omega_hat(omega: &WeightFunction) -> Result<WeightFunction> {
    WeightFunction::associated(&matrix_level(omega, 1.0)?.hat())
}

/// `omega_{hat M}` for a sequence `M`.
pub fn omega_hat_of_sequence(m: &WeightSequence) -> Result<WeightFunction> {
    WeightFunction::associated(&m.hat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::equivalent_fun;

    #[test]
    fn hat_of_gevrey_one() {
        let g1 = WeightSequence::gevrey(1.0).unwrap();
        let w = WeightFunction::associated(&g1).unwrap();
        let hat = omega_hat(&w).unwrap();
        let g2 = WeightFunction::associated(&WeightSequence::gevrey(2.0).unwrap()).unwrap();
        assert!(equivalent_fun(&hat, &g2).is_satisfied());
        assert_eq!(hat.at(1.0), 0.0);
        let direct = omega_hat_of_sequence(&g1).unwrap();
        let t = std::f64::consts::E.powi(2);
        let brute = (0..100).map(|p| p as f64 * t.ln() - g2.at(0.0) - 2.0 * crate::special::ln_factorial(p as f64)).fold(f64::NEG_INFINITY, f64::max);
        assert!((direct.at(t) - brute).abs() < 1e-10);
    }
}
