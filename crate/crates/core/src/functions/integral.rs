use super::WeightFunction;
use crate::quadrature::integrate;
use rayon::prelude::*;

/// Cut between the quadrature body and the analytic tail.
pub const Y_CUT: f64 = 1e8;
/// Fitted tail exponents within this distance of `1/r` are left undecided.
const FIT_MARGIN: f64 = 2e-3;
/// Where fitted tails read off the growth exponent.
const FIT_AT: f64 = 1e40;
/// Longest piece, in `log u`, of the shared quadrature pass.
const MAX_PIECE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegralOutcome {
    /// `fitted_tail` marks a tail extrapolated from a local exponent fit.
    Finite { value: f64, error: f64, fitted_tail: bool },
    /// The integrand decays no faster than `u^{-1}`; `exponent` is the growth exponent seen.
    Divergent { exponent: f64 },
    /// A fitted exponent too close to the threshold to decide.
    Undecided { exponent: f64 },
}

enum Tail {
    Value { value: f64, fitted: bool },
    Divergent(f64),
    Undecided(f64),
}

fn tail(omega: &WeightFunction, t: f64, e: f64) -> Tail {
    let start = t * Y_CUT;
    if let Some(exp) = omega.expansion().filter(|x| x.valid_from <= start) {
        let (_, lead) = exp.leading();
        if lead >= e - 1e-12 && !exp.terms.is_empty() {
            return Tail::Divergent(lead);
        }
        // int_Y^inf c (t u)^a u^{-1-e} du = c t^a Y^{a-e} / (e - a)
        let value = exp
            .terms
            .iter()
            .map(|(c, a)| c * t.powf(*a) * Y_CUT.powf(a - e) / (e - a))
            .sum();
        return Tail::Value { value, fitted: false };
    }
    // The growth exponent is read off far out, where lower-order terms have died down.
    let far = start.max(FIT_AT);
    let hi = omega.at(far);
    if hi <= 0.0 {
        return Tail::Value { value: 0.0, fitted: false };
    }
    let lo = omega.at(far / 10.0);
    let alpha = if lo > 0.0 { (hi / lo).log10() } else { f64::INFINITY };
    if alpha >= e + FIT_MARGIN {
        return Tail::Divergent(alpha);
    }
    if alpha > e - FIT_MARGIN {
        return Tail::Undecided(alpha);
    }
    let alpha = alpha.max(0.0);
    // int_far^inf omega(u) (u/t)^{-1-e} du/t with omega(u) ~ hi (u/far)^alpha
    let mut value = hi * (far / t).powf(-e) / (e - alpha);
    if far > start {
        let (a, b) = (start.ln(), far.ln());
        let lt = t.ln();
        value += integrate(|v: f64| omega.at(v.exp()) * (-e * (v - lt)).exp(), a, b, 1e-10, 1e-300, 4000).value;
    }
    Tail::Value { value, fitted: true }
}

/// `int_1^inf omega(t u) u^{-1-1/r} du`: adaptive quadrature on `[1, Y_CUT]` in the
/// variable `s = log u`, closed-form tail from the power expansion when one exists,
/// otherwise a tail extrapolated from the local growth exponent.
pub fn weighted_integral(omega: &WeightFunction, t: f64, r: f64) -> IntegralOutcome {
    let e = 1.0 / r;
    let (tail_value, fitted_tail) = match tail(omega, t, e) {
        Tail::Value { value, fitted } => (value, fitted),
        Tail::Divergent(exponent) => return IntegralOutcome::Divergent { exponent },
        Tail::Undecided(exponent) => return IntegralOutcome::Undecided { exponent },
    };
    let s_max = Y_CUT.ln();
    let body = integrate(|s: f64| omega.at(t * s.exp()) * (-s * e).exp(), 0.0, s_max, 1e-10, 1e-300, 4000);
    IntegralOutcome::Finite { value: body.value + tail_value, error: body.error, fitted_tail }
}

/// [`weighted_integral`] at every `t` in `ts` (increasing), sharing the quadrature work.
///
/// With `v = log(t u)` the body is `t^e int_{log t}^{log t + log Y_CUT} omega(e^v) e^{-e v} dv`,
/// so one pass over the pieces between consecutive endpoints serves all `t`.
pub fn weighted_integrals(omega: &WeightFunction, ts: &[f64], r: f64) -> Vec<IntegralOutcome> {
    let e = 1.0 / r;
    let ly = Y_CUT.ln();
    let mut knots: Vec<f64> = ts.iter().flat_map(|t| [t.ln(), t.ln() + ly]).collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    let mut fine = Vec::with_capacity(knots.len());
    for w in knots.windows(2) {
        let n = ((w[1] - w[0]) / MAX_PIECE).ceil().max(1.0) as usize;
        fine.extend((0..n).map(|i| w[0] + (w[1] - w[0]) * i as f64 / n as f64));
    }
    fine.extend(knots.last());
    let knots = fine;
    // h_k = int_{v_k}^{v_{k+1}} omega(e^v) e^{-e (v - v_k)} dv
    let pieces: Vec<(f64, f64)> = knots
        .par_windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let q = integrate(|v: f64| omega.at(v.exp()) * (-e * (v - a)).exp(), a, b, 1e-10, 1e-300, 400);
            (q.value, q.error)
        })
        .collect();
    let locate = |v: f64| knots.partition_point(|k| *k < v - 1e-12 * v.abs().max(1.0));
    ts.iter()
        .map(|&t| {
            let (tail_value, fitted_tail) = match tail(omega, t, e) {
                Tail::Value { value, fitted } => (value, fitted),
                Tail::Divergent(exponent) => return IntegralOutcome::Divergent { exponent },
                Tail::Undecided(exponent) => return IntegralOutcome::Undecided { exponent },
            };
            let lt = t.ln();
            let (mut value, mut error) = (0.0, 0.0);
            for k in locate(lt)..locate(lt + ly) {
                let scale = (-e * (knots[k] - lt)).exp();
                value += pieces[k].0 * scale;
                error += pieces[k].1 * scale;
            }
            IntegralOutcome::Finite { value: value + tail_value, error, fitted_tail }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_closed_form() {
        // int_1^inf (t u)^a u^{-1-e} du = t^a / (e - a)
        let w = WeightFunction::power_law(0.5, 1.0).unwrap();
        for t in [0.01, 1.0, 37.0, 1e6] {
            match weighted_integral(&w, t, 1.0) {
                IntegralOutcome::Finite { value, fitted_tail, .. } => {
                    assert!(!fitted_tail);
                    let exact = 2.0 * t.sqrt();
                    assert!((value - exact).abs() < 1e-8 * exact, "t={t}");
                }
                o => panic!("{o:?}"),
            }
        }
        assert!(matches!(weighted_integral(&w, 1.0, 2.0), IntegralOutcome::Divergent { .. }));
    }

    #[test]
    fn fitted_tail_for_associated_functions() {
        let m = crate::sequences::WeightSequence::gevrey(2.0).unwrap();
        let w = WeightFunction::associated(&m).unwrap();
        match weighted_integral(&w, 1.0, 1.0) {
            IntegralOutcome::Finite { fitted_tail, value, .. } => {
                assert!(fitted_tail);
                assert!(value.is_finite() && value > 0.0);
            }
            o => panic!("{o:?}"),
        }
        assert!(matches!(weighted_integral(&w, 1.0, 3.0), IntegralOutcome::Divergent { .. }));
    }

    #[test]
    fn shared_pass_matches_pointwise() {
        let m = crate::sequences::WeightSequence::gevrey(2.0).unwrap();
        let ts = crate::grid::TGrid::new(1e-2, 1e6, 40).unwrap().points();
        let w = WeightFunction::associated(&m).unwrap();
        // the pointwise pass sees the kinks of omega_M over one long interval
        for (t, o) in ts.iter().zip(weighted_integrals(&w, &ts, 1.5)) {
            match (o, weighted_integral(&w, *t, 1.5)) {
                (IntegralOutcome::Finite { value: a, .. }, IntegralOutcome::Finite { value: b, .. }) => {
                    assert!((a - b).abs() <= 1e-6 * b, "t={t}: {a} vs {b}");
                }
                (a, b) => panic!("{a:?} vs {b:?}"),
            }
        }
        let p = WeightFunction::power_law(0.4, 2.0).unwrap();
        for (t, o) in ts.iter().zip(weighted_integrals(&p, &ts, 1.5)) {
            let IntegralOutcome::Finite { value, .. } = o else { panic!("{o:?}") };
            let exact = 2.0 * t.powf(0.4) / (1.0 / 1.5 - 0.4);
            assert!((value - exact).abs() <= 1e-9 * exact, "t={t}");
        }
    }

    #[test]
    fn shared_pass_is_exact_on_kinks() {
        // omega = n t^a - off_n on [x_n, x_{n+1}), integrated segment by segment in closed form
        let (a, r) = (1.0 / 3.0, 1.5);
        let e = 1.0 / r;
        let xs: Vec<f64> = vec![0.0, 2.0, 7.0, 40.0];
        let base = WeightFunction::power_law(a, 1.0).unwrap();
        let mut offs = vec![0.0];
        for (i, x) in xs.iter().enumerate().skip(1) {
            offs.push(offs[i - 1] + x.powf(a));
        }
        let mults: Vec<f64> = (1..=xs.len()).map(|n| n as f64).collect();
        let w = base.glue(xs.clone(), mults.clone(), offs.clone()).unwrap();
        // int_lo^hi (n s^a - c) s^{-1-e} ds
        let piece = |n: f64, c: f64, lo: f64, hi: f64| {
            let pa = |s: f64| if s.is_infinite() { 0.0 } else { s.powf(a - e) / (a - e) };
            let pc = |s: f64| if s.is_infinite() { 0.0 } else { -s.powf(-e) / e };
            n * (pa(hi) - pa(lo)) - c * (pc(hi) - pc(lo))
        };
        for t in [0.5, 3.0, 10.0, 100.0] {
            let mut exact = 0.0;
            for i in 0..xs.len() {
                let hi = xs.get(i + 1).copied().unwrap_or(f64::INFINITY);
                let lo = xs[i].max(t);
                if hi > lo {
                    exact += piece(mults[i], offs[i], lo, hi);
                }
            }
            exact *= t.powf(e);
            let IntegralOutcome::Finite { value, .. } = weighted_integrals(&w, &[t], r)[0] else { panic!() };
            assert!((value - exact).abs() <= 1e-9 * exact, "t={t}: {value} vs {exact}");
        }
    }
}
