use super::ser_function;
use crate::error::{Error, Result};
use crate::functions::{young_conjugate, ConvexPL, WeightFunction};
use crate::grid::YGrid;
use crate::sequences::{Family, Repr, WeightSequence};
use serde::Serialize;
use std::sync::Arc;

pub const DEFAULT_LEVELS: [f64; 6] = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0];
pub const DEFAULT_J_MAX: usize = 64;
const STABLE_LOG: f64 = 1e-3;
const MAX_REFINEMENTS: usize = 5;
const Y_MAX_LIMIT: f64 = 600.0;

/// One sample of `h^j W^[l]_j <= D W^[A l]_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbsorbSample {
    pub h: f64,
    pub l: f64,
    /// `None` when no tested `A` shows a bounded ratio.
    pub a: Option<f64>,
    pub d: Option<f64>,
}

/// `W^[l]_j = exp(phi*(l j) / l)` for the sampled levels.
#[derive(Debug, Clone, Serialize)]
pub struct WeightMatrix {
    #[serde(serialize_with = "ser_function")]
    pub source: WeightFunction,
    pub levels: Vec<f64>,
    pub j_max: usize,
    pub grid: YGrid,
    #[serde(skip)]
    pub sequences: Vec<WeightSequence>,
    #[serde(skip)]
    pub conjugate: Arc<ConvexPL>,
    pub absorb: Vec<AbsorbSample>,
    pub diagnostics: Vec<String>,
}

impl WeightMatrix {
    pub fn level(&self, l: f64) -> Option<&WeightSequence> {
        self.levels.iter().position(|x| *x == l).map(|i| &self.sequences[i])
    }

    /// `log W^[l]_j = phi*(l j) / l`.
    pub fn log_entry(&self, l: f64, j: usize) -> f64 {
        self.conjugate.eval(l * j as f64) / l
    }

    /// Rows `(j, l, W^[l]_j)` for `j <= j_max`, level by level.
    pub fn table(&self) -> Vec<(usize, f64, f64)> {
        let mut rows = Vec::new();
        for &l in &self.levels {
            for j in 0..=self.j_max {
                rows.push((j, l, self.log_entry(l, j).exp()));
            }
        }
        rows
    }
}

fn last_breakpoint(pl: &ConvexPL) -> f64 {
    *pl.breakpoints().last().expect("conjugate has breakpoints")
}

/// Conjugate on a grid fine enough that `log W^[l]_{j_max}` is stable to `1e-3` for every level.
fn stable_conjugate(omega: &WeightFunction, l_max: f64, levels: &[f64], j_max: usize) -> Result<(ConvexPL, YGrid)> {
    let need = l_max * j_max as f64;
    let mut grid = YGrid::default();
    let mut pl = young_conjugate(omega, &grid)?;
    while last_breakpoint(&pl) < need && grid.y_max < Y_MAX_LIMIT {
        grid = YGrid::new(2.0 * grid.y_max, 2 * grid.points - 1)?;
        pl = young_conjugate(omega, &grid)?;
    }
    if last_breakpoint(&pl) < need {
        return Err(Error::GridTooCoarse(format!(
            "largest slope of phi on [0, {:.1}] is {:.4e}, below l j = {need}",
            grid.y_max,
            last_breakpoint(&pl)
        )));
    }
    for _ in 0..MAX_REFINEMENTS {
        let finer = grid.refined();
        let next = young_conjugate(omega, &finer)?;
        let moved = levels
            .iter()
            .map(|&l| ((next.eval(l * j_max as f64) - pl.eval(l * j_max as f64)) / l).abs())
            .fold(0.0, f64::max);
        grid = finer;
        pl = next;
        if moved < STABLE_LOG {
            return Ok((pl, grid));
        }
    }
    Err(Error::GridTooCoarse(format!(
        "log W at j = {j_max} still moves by more than {STABLE_LOG} after {MAX_REFINEMENTS} refinements"
    )))
}

fn level_sequence(omega: &WeightFunction, pl: &Arc<ConvexPL>, l: f64) -> WeightSequence {
    let max_index = (last_breakpoint(pl) / l).floor() as usize;
    WeightSequence::from_parts(
        Family::MatrixLevel { omega: omega.clone(), l },
        Repr::Conjugate { pl: pl.clone(), l, max_index },
        None,
    )
}

/// The weight matrix of a normalized weight function satisfying (omega4).
pub fn associated_matrix(omega: &WeightFunction, levels: &[f64], j_max: usize) -> Result<WeightMatrix> {
    if !omega.is_normalized() {
        return Err(Error::NotNormalized(format!("{} is not zero on [0, 1]", omega.describe())));
    }
    if levels.is_empty() || levels.iter().any(|l| !(*l > 0.0 && l.is_finite())) || j_max == 0 {
        return Err(Error::InvalidArgument("levels must be positive and j_max at least 1".into()));
    }
    let mut levels = levels.to_vec();
    levels.sort_by(|a, b| a.total_cmp(b));
    levels.dedup();
    let l_max = *levels.last().expect("nonempty");
    let (pl, grid) = stable_conjugate(omega, l_max, &levels, j_max)?;
    let pl = Arc::new(pl);
    let sequences: Vec<WeightSequence> = levels.iter().map(|&l| level_sequence(omega, &pl, l)).collect();
    let log_w = |l: f64, j: usize| pl.eval(l * j as f64) / l;

    for &l in &levels {
        let w0 = log_w(l, 0);
        if w0.abs() > 1e-9 || log_w(l, 1) < -1e-9 {
            return Err(Error::InternalInconsistency(format!("level {l} is not normalized: log W_0 = {w0}")));
        }
        for j in 1..j_max {
            let excess = 2.0 * log_w(l, j) - log_w(l, j - 1) - log_w(l, j + 1);
            if excess > 1e-9 * log_w(l, j + 1).abs().max(1.0) {
                return Err(Error::InternalInconsistency(format!("level {l} is not log-convex at j = {j}")));
            }
        }
    }
    for pair in levels.windows(2) {
        for j in 0..=j_max {
            let (a, b) = (log_w(pair[0], j), log_w(pair[1], j));
            if a > b + 1e-12 * b.abs().max(1.0) {
                return Err(Error::InternalInconsistency(format!(
                    "W^[{}]_{j} exceeds W^[{}]_{j}",
                    pair[0], pair[1]
                )));
            }
        }
    }

    let top = last_breakpoint(&pl);
    let mut absorb = Vec::new();
    for h in [2.0, std::f64::consts::E] {
        for &l in &levels {
            let mut found = AbsorbSample { h, l, a: None, d: None };
            for k in 1..=10 {
                let a = 2f64.powi(k);
                if a * l * j_max as f64 > top {
                    break;
                }
                let d: Vec<f64> =
                    (0..=j_max).map(|j| j as f64 * h.ln() + log_w(l, j) - log_w(a * l, j)).collect();
                let half = d[..=j_max / 2].iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let all = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if all <= half + 1e-12 {
                    found = AbsorbSample { h, l, a: Some(a), d: Some(all.exp()) };
                    break;
                }
            }
            absorb.push(found);
        }
    }
    let diagnostics = vec![
        format!("conjugate grid [0, {:.4}] with {} points", grid.y_max, grid.points),
        format!("entries trusted for l j <= {top:.6e}"),
    ];
    Ok(WeightMatrix {
        source: omega.clone(),
        levels,
        j_max,
        grid,
        sequences,
        conjugate: pl,
        absorb,
        diagnostics,
    })
}

/// The single level `W^[l]` with the default `j_max`.
pub fn matrix_level(omega: &WeightFunction, l: f64) -> Result<WeightSequence> {
    let m = associated_matrix(omega, &[l], DEFAULT_J_MAX)?;
    Ok(m.sequences[0].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ln_factorial;

    #[test]
    fn gevrey_one_level_one_is_factorial() {
        let m = WeightSequence::gevrey(1.0).unwrap();
        let w = WeightFunction::associated(&m).unwrap();
        let mat = associated_matrix(&w, &[1.0, 2.0], 64).unwrap();
        for j in 0..=20 {
            let rel = (mat.log_entry(1.0, j) - ln_factorial(j as f64)).exp() - 1.0;
            assert!(rel.abs() < 1e-2, "j={j} rel={rel}");
            assert!(mat.log_entry(1.0, j) <= mat.log_entry(2.0, j));
        }
        assert!(mat.absorb.iter().all(|s| s.a.is_some()));
    }

    #[test]
    fn rejects_unnormalized() {
        let w = WeightFunction::power_law(0.5, 1.0).unwrap();
        assert!(matches!(associated_matrix(&w, &[1.0], 8), Err(Error::NotNormalized(_))));
        assert!(associated_matrix(&w.normalize(), &[1.0], 8).is_ok());
    }
}
