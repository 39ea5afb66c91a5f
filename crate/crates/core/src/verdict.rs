//! Outcomes of testing an asymptotic condition on a finite range.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Named witness constants (`C`, `H`, `sum`, ...). Ordered so reports are deterministic.
pub type Witness = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ConditionVerdict {
    /// The condition holds on the tested range; `witness` holds the constants found.
    Satisfied { witness: Witness },
    /// A counterexample: the index or point `at`, the offending `value`, and a note.
    Violated { at: f64, value: f64, note: String },
    /// Finite evidence does not settle the condition. `trend` holds the data looked at.
    Inconclusive { reason: String, trend: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Satisfied,
    Violated,
    Inconclusive,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::Satisfied => "satisfied",
            VerdictKind::Violated => "violated",
            VerdictKind::Inconclusive => "inconclusive",
        })
    }
}

impl ConditionVerdict {
    /// Panics if `witness` is empty: a Satisfied verdict always carries a constant.
    pub fn satisfied<I, K>(witness: I) -> Self
    where
        I: IntoIterator<Item = (K, f64)>,
        K: Into<String>,
    {
        let witness: Witness = witness.into_iter().map(|(k, v)| (k.into(), v)).collect();
        assert!(!witness.is_empty(), "satisfied verdict without witness");
        ConditionVerdict::Satisfied { witness }
    }

    pub fn violated(at: f64, value: f64, note: impl Into<String>) -> Self {
        ConditionVerdict::Violated { at, value, note: note.into() }
    }

    pub fn inconclusive(reason: impl Into<String>, trend: Vec<f64>) -> Self {
        ConditionVerdict::Inconclusive { reason: reason.into(), trend }
    }

    pub fn kind(&self) -> VerdictKind {
        match self {
            ConditionVerdict::Satisfied { .. } => VerdictKind::Satisfied,
            ConditionVerdict::Violated { .. } => VerdictKind::Violated,
            ConditionVerdict::Inconclusive { .. } => VerdictKind::Inconclusive,
        }
    }

    pub fn is_satisfied(&self) -> bool {
        matches!(self, ConditionVerdict::Satisfied { .. })
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, ConditionVerdict::Violated { .. })
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, ConditionVerdict::Inconclusive { .. })
    }

    /// Look up a witness constant of a Satisfied verdict.
    pub fn witness(&self, name: &str) -> Option<f64> {
        match self {
            ConditionVerdict::Satisfied { witness } => witness.get(name).copied(),
            _ => None,
        }
    }

    /// Attach an extra witness constant (no-op for other verdicts).
    pub fn with_witness(mut self, name: &str, value: f64) -> Self {
        if let ConditionVerdict::Satisfied { witness } = &mut self {
            witness.insert(name.to_string(), value);
        }
        self
    }
}

impl fmt::Display for ConditionVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionVerdict::Satisfied { witness } => {
                write!(f, "satisfied")?;
                for (k, v) in witness {
                    write!(f, " {k}={v:.6}")?;
                }
                Ok(())
            }
            ConditionVerdict::Violated { at, value, note } => {
                write!(f, "violated at {at} (value {value:.6}): {note}")
            }
            ConditionVerdict::Inconclusive { reason, .. } => write!(f, "inconclusive: {reason}"),
        }
    }
}

/// Relative change of a running supremum between two range checkpoints.
pub(crate) fn relative_change(earlier: f64, later: f64) -> f64 {
    if earlier == later {
        return 0.0;
    }
    (later - earlier).abs() / earlier.abs().max(later.abs()).max(f64::MIN_POSITIVE)
}
