//! Special functions needed for exact tail analysis: `ln p!` and the Hurwitz zeta function.

use std::f64::consts::PI;
use std::sync::OnceLock;

const TABLE_LEN: usize = 1024;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(TABLE_LEN + 1);
        let mut acc = 0.0f64;
        t.push(0.0);
        for k in 1..=TABLE_LEN {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln p!` for a nonnegative integer-valued `p` (passed as `f64` so that
/// indices beyond `usize` range can be evaluated for closed-form sequences).
pub fn ln_factorial(p: f64) -> f64 {
    debug_assert!(p >= 0.0);
    let p = p.floor();
    if p <= TABLE_LEN as f64 {
        return ln_factorial_table()[p as usize];
    }
    // Stirling series; the first omitted term is O(p^-7).
    let inv = 1.0 / p;
    let inv2 = inv * inv;
    (p + 0.5) * p.ln() - p
        + 0.5 * (2.0 * PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

// B_{2k} / (2k)!
const BERNOULLI_OVER_FACT: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
];

/// Hurwitz zeta `sum_{k>=0} (a+k)^{-s}` for `s > 1`, `a > 0`, by Euler–Maclaurin
/// summation after shifting the argument past 16.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0, "hurwitz_zeta requires s > 1, got {s}");
    assert!(a > 0.0, "hurwitz_zeta requires a > 0, got {a}");
    let shift = if a < 16.0 { (16.0 - a).ceil() as usize } else { 0 };
    let mut head = 0.0;
    for k in 0..shift {
        head += (a + k as f64).powf(-s);
    }
    let x = a + shift as f64;
    let mut tail = x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // Rising products s(s+1)...(s+2k-2) times x^{-s-2k+1}.
    let mut rising = s;
    let mut xpow = x.powf(-s - 1.0);
    let inv_x2 = 1.0 / (x * x);
    for (k, b) in BERNOULLI_OVER_FACT.iter().enumerate() {
        let term = b * rising * xpow;
        tail += term;
        if term.abs() < 1e-18 * tail.abs() {
            break;
        }
        let m = 2.0 * k as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        xpow *= inv_x2;
    }
    head + tail
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_factorial_matches_direct_sum_across_table_boundary() {
        let mut acc = 0.0;
        for k in 1..=5000u32 {
            acc += (k as f64).ln();
            let got = ln_factorial(k as f64);
            assert!((got - acc).abs() <= 1e-12 * acc.max(1.0), "k={k}: {got} vs {acc}");
        }
    }

    #[test]
    fn zeta_two_and_three() {
        assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta(3.0, 1.0) - 1.202_056_903_159_594_3).abs() < 1e-14);
        assert!((hurwitz_zeta(4.0, 1.0) - PI.powi(4) / 90.0).abs() < 1e-14);
    }

    #[test]
    fn zeta_shift_identity() {
        // zeta(s, a) = a^{-s} + zeta(s, a + 1)
        for &s in &[1.05, 1.5, 2.5, 7.0] {
            for &a in &[0.3, 1.0, 3.7, 40.0, 1e5] {
                let lhs = hurwitz_zeta(s, a);
                let rhs = a.powf(-s) + hurwitz_zeta(s, a + 1.0);
                assert!((lhs - rhs).abs() <= 1e-13 * lhs, "s={s} a={a}");
            }
        }
    }

    #[test]
    fn zeta_near_one_blows_up_like_pole() {
        let eps = 1e-6;
        let z = hurwitz_zeta(1.0 + eps, 1.0);
        // zeta(1+e) = 1/e + Euler gamma + O(e)
        assert!((z - 1.0 / eps - 0.577_215_664_901_532_9).abs() < 1e-4);
    }
}
