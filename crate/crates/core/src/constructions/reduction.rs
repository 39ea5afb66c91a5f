use super::ser_function;
use crate::error::{Error, Result};
use crate::functions::{check_omega_condition, compare_o, OmegaCondition, WeightFunction};
use crate::indices::{find_gamma1_witness, verify_gamma1_witness, Gamma1Witness};
use crate::verdict::ConditionVerdict;
use rayon::prelude::*;
use serde::Serialize;

pub const DEFAULT_N_BREAK: usize = 12;
const SEARCH_RATIO: f64 = 1.05;
const CERTIFY_T_MAX: f64 = 1e10;
const CERTIFY_POINTS: usize = 400;
const SEGMENT_SAMPLES: usize = 1000;
const CONTINUITY_TOL: f64 = 1e-9;
const OUTPUT_J_MAX: u32 = 20;
const OUTPUT_T_MAX: f64 = 1e6;

/// How a breakpoint was fixed and how `f >= n^2 sigma` beyond it was certified.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreakpointRow {
    pub n: usize,
    pub x: f64,
    pub lower_bound: f64,
    /// The constraint that was last to become true during the search.
    pub binding: String,
    /// `"analytic"` from the power expansions, otherwise `"grid-certified"`.
    pub certification: String,
}

/// Verification of one segment `[x_n, x_{n+1})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentRow {
    pub n: usize,
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
    pub omega_sandwich_violations: usize,
    pub sigma_sandwich_violations: usize,
    /// `max omega / omega~` on the segment, at most `1/(n-2)` for `n >= 3`.
    pub omega_over_tilde: f64,
    /// `max sigma / sigma~` on the segment.
    pub sigma_over_tilde: f64,
    /// `max sigma~ / f` on the segment, at most `1/n`.
    pub sigma_tilde_over_f: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionResult {
    pub breakpoints: Vec<f64>,
    #[serde(serialize_with = "ser_function")]
    pub omega_tilde: WeightFunction,
    #[serde(serialize_with = "ser_function")]
    pub sigma_tilde: WeightFunction,
    pub witness: Gamma1Witness,
    pub rows: Vec<BreakpointRow>,
    pub segments: Vec<SegmentRow>,
    pub continuity_max_rel: f64,
    pub omega1_preserved: Option<ConditionVerdict>,
    /// `C_1 = C D`, `H_1 = (H + K) / 2`.
    pub c1: f64,
    pub h1: f64,
    pub d: u32,
    pub output_condition: ConditionVerdict,
    pub diagnostics: Vec<String>,
}

impl ReductionResult {
    pub fn sandwich_violations(&self) -> usize {
        self.segments.iter().map(|s| s.omega_sandwich_violations + s.sigma_sandwich_violations).sum()
    }
}

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| if i + 1 == n { hi } else { (a + (b - a) * i as f64 / (n - 1) as f64).exp() }).collect()
}

/// Smallest `D >= 1` with `j H^j <= H1^j` for every `j >= D`.
fn absorb_constant(h: f64, h1: f64) -> u32 {
    let q = (h1 / h).ln();
    // j <= exp(q j) fails only below the larger root of log j = q j.
    let mut last_fail = 0;
    let bound = ((10.0 / q) * (10.0 / q).ln().max(1.0)).ceil().max(10.0) as u32;
    for j in 1..=bound {
        if (j as f64).ln() > q * j as f64 + 1e-12 {
            last_fail = j;
        }
    }
    last_fail + 1
}

struct Inputs<'a> {
    sigma: &'a WeightFunction,
    omega: &'a WeightFunction,
    f: &'a WeightFunction,
    analytic_tail: bool,
}

impl Inputs<'_> {
    /// `f(t) >= n^2 sigma(t)` for all sampled `t >= x`.
    fn tail_ok(&self, n: usize, x: f64) -> bool {
        let hi = CERTIFY_T_MAX.max(10.0 * x);
        let n2 = (n * n) as f64;
        geometric(x, hi, CERTIFY_POINTS).iter().all(|t| self.f.at(*t) >= n2 * self.sigma.at(*t))
    }

    /// Names of the constraints failing at `x`.
    fn failing(&self, n: usize, x: f64, xs: &[f64]) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.tail_ok(n, x) {
            out.push("f >= n^2 sigma beyond x_n");
        }
        let (w, s) = (self.omega.at(x), self.sigma.at(x));
        let scale = |i: usize| 2f64.powi((n - 1 - i) as i32);
        if xs.iter().enumerate().any(|(i, xi)| w < scale(i) * self.omega.at(*xi)) {
            out.push("omega(x_n) >= 2^(n-i) omega(x_i)");
        }
        if xs.iter().enumerate().any(|(i, xi)| s < scale(i) * self.sigma.at(*xi)) {
            out.push("sigma(x_n) >= 2^(n-i) sigma(x_i)");
        }
        out
    }
}

fn next_breakpoint(inp: &Inputs, n: usize, xs: &[f64], k: f64) -> Result<BreakpointRow> {
    let prev = *xs.last().expect("x_1 = 0 is always present");
    let mut lower = k.max(2.0) * prev + n as f64;
    if n == 2 {
        lower = lower.max(1.0);
    }
    // Strict inequality in the growth constraint.
    let start = lower * (1.0 + 4.0 * f64::EPSILON);
    let ok = |x: f64| inp.failing(n, x, xs).is_empty();
    let (mut lo, mut hi);
    if ok(start) {
        return Ok(BreakpointRow {
            n,
            x: start,
            lower_bound: lower,
            binding: "x_n > max(2, K) x_(n-1) + n".into(),
            certification: certification(inp),
        });
    }
    lo = start;
    hi = start * SEARCH_RATIO;
    let mut steps = 0;
    while !ok(hi) {
        lo = hi;
        hi *= SEARCH_RATIO;
        steps += 1;
        if steps > 5000 || !hi.is_finite() {
            return Err(Error::PreconditionInconclusive(format!("no admissible x_{n} below {lo:e}")));
        }
    }
    let binding = inp.failing(n, lo, xs).first().copied().unwrap_or("none").to_string();
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(BreakpointRow { n, x: hi, lower_bound: lower, binding, certification: certification(inp) })
}

fn certification(inp: &Inputs) -> String {
    if inp.analytic_tail { "analytic" } else { "grid-certified" }.to_string()
}

fn segment_row(
    n: usize,
    lo: f64,
    hi: f64,
    omega: &WeightFunction,
    sigma: &WeightFunction,
    ot: &WeightFunction,
    st: &WeightFunction,
    f: &WeightFunction,
) -> SegmentRow {
    let ts: Vec<f64> = geometric(lo, hi, SEGMENT_SAMPLES + 1)[..SEGMENT_SAMPLES].to_vec();
    let nf = n as f64;
    let slack = |v: f64| 1e-12 * v.abs().max(1.0);
    let mut row = SegmentRow {
        n,
        lo,
        hi,
        samples: ts.len(),
        omega_sandwich_violations: 0,
        sigma_sandwich_violations: 0,
        omega_over_tilde: 0.0,
        sigma_over_tilde: 0.0,
        sigma_tilde_over_f: 0.0,
    };
    for t in ts {
        let (w, wt, s, stv) = (omega.at(t), ot.at(t), sigma.at(t), st.at(t));
        let lower = (nf - 2.0).max(0.0);
        if wt < lower * w - slack(w * nf) || wt > nf * w + slack(w * nf) {
            row.omega_sandwich_violations += 1;
        }
        if stv < lower * s - slack(s * nf) || stv > nf * s + slack(s * nf) {
            row.sigma_sandwich_violations += 1;
        }
        if wt > 0.0 {
            row.omega_over_tilde = row.omega_over_tilde.max(w / wt);
        }
        if stv > 0.0 {
            row.sigma_over_tilde = row.sigma_over_tilde.max(s / stv);
        }
        let fv = f.at(t);
        if fv > 0.0 {
            row.sigma_tilde_over_f = row.sigma_tilde_over_f.max(stv / fv);
        }
    }
    row
}

/// Builds `omega~, sigma~` with `omega = o(omega~)`, `sigma = o(sigma~)`, `sigma~ = o(f)`
/// and `gamma(sigma~, omega~) > 1`, glued at `n_break` breakpoints.
///
/// On `[x_n, x_{n+1})` the multiplier is `n` and the offset `sum_{i <= n} omega(x_i)`,
/// which makes both weights continuous.
pub fn reduction_build(
    sigma: &WeightFunction,
    omega: &WeightFunction,
    f: &WeightFunction,
    n_break: usize,
    witness: Option<Gamma1Witness>,
) -> Result<ReductionResult> {
    if n_break < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 breakpoints, got {n_break}")));
    }
    let witness = match witness {
        Some(w) => w,
        None => find_gamma1_witness(sigma, omega).ok_or(Error::GammaNotAboveOne)?,
    };
    if let v @ ConditionVerdict::Violated { .. } = verify_gamma1_witness(sigma, omega, &witness, witness.j_max, witness.t0.max(1.0), witness.t_max, 161) {
        return Err(Error::InvalidArgument(format!("supplied witness does not hold: {v:?}")));
    }
    let pre = compare_o(f, sigma);
    if !pre.is_satisfied() {
        return Err(Error::PreconditionInconclusive(format!("sigma = o(f) not established: {}", pre.kind())));
    }
    let analytic_tail = match (f.expansion(), sigma.expansion()) {
        (Some(a), Some(b)) => a.leading().1 > b.leading().1 && a.leading().0 > 0.0,
        _ => false,
    };
    let inp = Inputs { sigma, omega, f, analytic_tail };

    let mut xs = vec![0.0];
    let mut rows = Vec::new();
    for n in 2..=n_break {
        let row = next_breakpoint(&inp, n, &xs, witness.k)?;
        xs.push(row.x);
        rows.push(row);
    }
    let multipliers: Vec<f64> = (1..=n_break).map(|n| n as f64).collect();
    let cumulative = |w: &WeightFunction| {
        xs.iter()
            .scan(0.0, |acc, x| {
                *acc += w.at(*x);
                Some(*acc)
            })
            .collect::<Vec<f64>>()
    };
    let omega_tilde = omega.glue(xs.clone(), multipliers.clone(), cumulative(omega))?;
    let sigma_tilde = sigma.glue(xs.clone(), multipliers, cumulative(sigma))?;

    let mut continuity_max_rel: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        for (w, wt) in [(omega, &omega_tilde), (sigma, &sigma_tilde)] {
            let n = i + 1;
            let left = (n - 1) as f64 * w.at(x) - xs[..i].iter().map(|xi| w.at(*xi)).sum::<f64>();
            let right = wt.at(x);
            let rel = (left - right).abs() / right.abs().max(f64::MIN_POSITIVE);
            continuity_max_rel = continuity_max_rel.max(rel);
        }
    }

    let k = witness.k;
    let segments: Vec<SegmentRow> = (2..=n_break)
        .into_par_iter()
        .map(|n| {
            let lo = xs[n - 1];
            let hi = if n < n_break { xs[n] } else { k.max(2.0) * lo };
            segment_row(n, lo, hi, omega, sigma, &omega_tilde, &sigma_tilde, f)
        })
        .collect();

    let mut diagnostics = Vec::new();
    if continuity_max_rel > CONTINUITY_TOL {
        diagnostics.push(format!("continuity defect {continuity_max_rel:e} exceeds {CONTINUITY_TOL:e}"));
    }
    diagnostics.push(format!(
        "last segment [x_{n_break}, inf) has fixed multiplier {n_break}; o-relations are reported per segment"
    ));

    let omega1_preserved = if check_omega_condition(omega, OmegaCondition::Omega1).is_satisfied() {
        let start = xs[2];
        let ts = geometric(start, CERTIFY_T_MAX.max(10.0 * xs[n_break - 1]), 400);
        let d1 = ts.iter().map(|t| omega_tilde.at(2.0 * t) / omega_tilde.at(*t)).fold(0.0, f64::max);
        Some(if d1.is_finite() {
            ConditionVerdict::satisfied([("D1", d1), ("from", start)])
        } else {
            ConditionVerdict::violated(start, d1, "omega~(2t) / omega~(t) unbounded")
        })
    } else {
        None
    };

    let h1 = 0.5 * (witness.h + witness.k);
    let d = absorb_constant(witness.h, h1);
    let c1 = witness.c * d as f64;
    let out_w = Gamma1Witness { c: c1, k, h: h1, t0: witness.t0.max(1.0), j_max: OUTPUT_J_MAX, t_max: OUTPUT_T_MAX };
    let output_condition = verify_gamma1_witness(
        &sigma_tilde,
        &omega_tilde,
        &out_w,
        OUTPUT_J_MAX,
        out_w.t0,
        OUTPUT_T_MAX,
        SEGMENT_SAMPLES,
    );

    Ok(ReductionResult {
        breakpoints: xs,
        omega_tilde,
        sigma_tilde,
        witness,
        rows,
        segments,
        continuity_max_rel,
        omega1_preserved,
        c1,
        h1,
        d,
        output_condition,
        diagnostics,
    })
}
