//! Weight sequences and weight functions for ultradifferentiable and ultraholomorphic classes.
//!
//! * [`sequences`]: weight sequences `M`, their algebra and the conditions
//!   (lc), (slc), (mg), (nq), (nq_r), (gamma_1), (beta_1), (beta_3) plus the relations
//!   between sequences.
//! * [`functions`]: weight functions as expression trees, the Young conjugate of
//!   `phi(y) = omega(e^y)` and the conditions (omega_1) to (omega_6), (omega_nq), (omega_snq).
//! * [`indices`]: mixed growth indices and orders of quasianalyticity by bisection.
//! * [`constructions`]: associated functions and matrices, `kappa`, descendants and the
//!   reduction construction.
//!
//! Asymptotic conditions are tested on finite ranges, so every test returns a
//! [`ConditionVerdict`]: Satisfied with witness constants, Violated with a counterexample,
//! or Inconclusive with the data looked at.
//!
//! ```
//! use ultraweight::sequences::{check_nq, WeightSequence};
//!
//! let m = WeightSequence::gevrey(2.0)?;
//! let v = check_nq(&m);
//! let sum = v.witness("sum").unwrap();
//! assert!((sum - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
//! # Ok::<(), ultraweight::Error>(())
//! ```

pub mod constructions;
pub mod error;
pub mod functions;
pub mod grid;
pub mod indices;
pub mod quadrature;
pub mod sequences;
pub mod special;
pub mod verdict;

pub use error::{Error, Result};
pub use functions::{ConvexPL, FunctionSpec, WeightFunction};
pub use grid::{TGrid, YGrid};
pub use indices::{Gamma1Witness, IndexEstimate};
pub use sequences::{SequenceSpec, WeightSequence};
pub use verdict::{ConditionVerdict, VerdictKind, Witness};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/sequences.md")]
    mod sequences {}
    #[doc = include_str!("../../../book/src/functions.md")]
    mod functions {}
    #[doc = include_str!("../../../book/src/indices.md")]
    mod indices {}
    #[doc = include_str!("../../../book/src/constructions.md")]
    mod constructions {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
