use crate::functions::WeightFunction;
use crate::verdict::ConditionVerdict;
use serde::{Deserialize, Serialize};

/// Constants with `omega(K^j t) <= C H^j sigma(t)` for `t >= t0` and `j <= j_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gamma1Witness {
    pub c: f64,
    pub k: f64,
    pub h: f64,
    pub t0: f64,
    pub j_max: u32,
    pub t_max: f64,
}

/// Search budget for [`find_gamma1_witness_in`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gamma1Search {
    pub ks: Vec<f64>,
    /// `H` runs over `K^{i/h_steps}`, `0 < i < h_steps`.
    pub h_steps: u32,
    pub cs: Vec<f64>,
    pub t0s: Vec<f64>,
    pub t_max: f64,
    pub points: usize,
    pub j_max: u32,
}

impl Default for Gamma1Search {
    fn default() -> Self {
        Gamma1Search {
            ks: vec![2.0, 4.0, 8.0, 16.0],
            h_steps: 32,
            cs: (0..=10).map(|i| 2f64.powi(i)).collect(),
            t0s: vec![1.0, 10.0, 100.0, 1e3, 1e4],
            t_max: 1e8,
            points: 161,
            j_max: 30,
        }
    }
}

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| if i + 1 == n { hi } else { (a + (b - a) * i as f64 / (n - 1) as f64).exp() }).collect()
}

fn log_ratio(num: f64, den: f64) -> f64 {
    if num <= 0.0 {
        f64::NEG_INFINITY
    } else if den <= 0.0 {
        f64::INFINITY
    } else {
        num.ln() - den.ln()
    }
}

pub fn find_gamma1_witness(sigma: &WeightFunction, omega: &WeightFunction) -> Option<Gamma1Witness> {
    find_gamma1_witness_in(sigma, omega, &Gamma1Search::default())
}

/// Grid search ordered by smallest `K`, then `H`, then `C`, then `t0`.
///
/// Besides the pointwise inequality, the normalized ratio
/// `max_t omega(K^j t) / (H^j sigma(t))` must not increase from `j_max - 1`
/// to `j_max`, so that a witness is not an artefact of the finite `j` range.
pub fn find_gamma1_witness_in(
    sigma: &WeightFunction,
    omega: &WeightFunction,
    search: &Gamma1Search,
) -> Option<Gamma1Witness> {
    let first_t0 = search.t0s.iter().copied().fold(f64::INFINITY, f64::min);
    let ts = geometric(first_t0, search.t_max, search.points);
    let sig: Vec<f64> = ts.iter().map(|t| sigma.at(*t)).collect();
    let jm = search.j_max as usize;
    for &k in &search.ks {
        // lr[j][i] = log(omega(K^j t_i) / sigma(t_i))
        let lr: Vec<Vec<f64>> = (0..=jm)
            .map(|j| {
                let kj = k.powi(j as i32);
                ts.iter().zip(&sig).map(|(t, s)| log_ratio(omega.at(kj * t), *s)).collect()
            })
            .collect();
        for i in 1..search.h_steps {
            let lh = k.ln() * i as f64 / search.h_steps as f64;
            let h = lh.exp();
            for &t0 in &search.t0s {
                let start = ts.partition_point(|t| *t < t0 * (1.0 - 1e-12));
                if start >= ts.len() {
                    continue;
                }
                // Smallest log C that works for this (K, H, t0).
                let need = |j: usize| {
                    lr[j][start..].iter().copied().fold(f64::NEG_INFINITY, f64::max) - j as f64 * lh
                };
                let needs: Vec<f64> = (0..=jm).map(need).collect();
                let required = needs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if !required.is_finite() && required > 0.0 {
                    continue;
                }
                if jm >= 1 && needs[jm] > needs[jm - 1] + 1e-9 {
                    continue;
                }
                let slack = 1e-12 * (1.0 + required.abs());
                if let Some(&c) = search.cs.iter().find(|c| c.ln() + slack >= required) {
                    return Some(Gamma1Witness { c, k, h, t0, j_max: search.j_max, t_max: search.t_max });
                }
            }
        }
    }
    None
}

/// Pointwise check of `omega(K^j t) <= C H^j sigma(t)` on a geometric grid of `[t_lo, t_hi]`.
pub fn verify_gamma1_witness(
    sigma: &WeightFunction,
    omega: &WeightFunction,
    w: &Gamma1Witness,
    j_max: u32,
    t_lo: f64,
    t_hi: f64,
    points: usize,
) -> ConditionVerdict {
    let ts = geometric(t_lo.max(w.t0), t_hi, points);
    let mut worst = f64::NEG_INFINITY;
    for j in 0..=j_max {
        let kj = w.k.powi(j as i32);
        let bound = w.c * w.h.powi(j as i32);
        for t in &ts {
            let lhs = omega.at(kj * t);
            let rhs = bound * sigma.at(*t);
            if lhs > rhs * (1.0 + 1e-12) {
                return ConditionVerdict::violated(*t, lhs / rhs, format!("fails at j = {j}"));
            }
            if rhs > 0.0 {
                worst = worst.max(lhs / rhs);
            }
        }
    }
    ConditionVerdict::satisfied([
        ("C", w.c),
        ("K", w.k),
        ("H", w.h),
        ("t0", w.t0),
        ("max_ratio", worst.max(0.0)),
        ("j_max", j_max as f64),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(a: f64) -> WeightFunction {
        WeightFunction::power_law(a, 1.0).unwrap()
    }

    #[test]
    fn stated_witness_holds() {
        let w = Gamma1Witness { c: 1.0, k: 8.0, h: 3.0, t0: 1.0, j_max: 30, t_max: 1e8 };
        assert!(verify_gamma1_witness(&power(0.5), &power(1.0 / 3.0), &w, 30, 1.0, 1e8, 200).is_satisfied());
    }

    #[test]
    fn search_finds_smallest_k() {
        let w = find_gamma1_witness(&power(0.5), &power(1.0 / 3.0)).unwrap();
        assert_eq!(w.k, 2.0);
        assert!(w.h > 2f64.powf(1.0 / 3.0) && w.h < 2.0);
        assert!(verify_gamma1_witness(&power(0.5), &power(1.0 / 3.0), &w, 30, 1.0, 1e8, 200).is_satisfied());
    }

    #[test]
    fn linear_pair_has_no_witness() {
        assert!(find_gamma1_witness(&power(1.0), &power(1.0)).is_none());
        assert!(find_gamma1_witness(&power(0.5), &power(0.5)).is_some());
    }
}
