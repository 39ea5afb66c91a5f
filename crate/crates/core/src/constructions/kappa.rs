use crate::error::{Error, Result};
use crate::functions::{check_omega_nq_r, WeightFunction, Y_CUT};
use crate::quadrature::integrate;
use crate::verdict::ConditionVerdict;

/// `kappa_omega(t) = int_1^inf omega(t y) y^{-2} dy`.
pub fn kappa(omega: &WeightFunction) -> Result<WeightFunction> {
    kappa_r(omega, 1.0)
}

/// `kappa_{omega^r}(t^{1/r})`, defined when (omega_nq_r) holds.
pub fn kappa_r(omega: &WeightFunction, r: f64) -> Result<WeightFunction> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("r must be positive, got {r}")));
    }
    if let ConditionVerdict::Violated { note, .. } = check_omega_nq_r(omega, r) {
        return Err(Error::NotNonQuasianalytic(format!("{} with r = {r}: {note}", omega.describe())));
    }
    Ok(omega.kappa_node(r))
}

/// The normalization of [`kappa_r`].
pub fn kappa_power_normalized(omega: &WeightFunction, r: f64) -> Result<WeightFunction> {
    Ok(kappa_r(omega, r)?.normalize())
}

/// `t int_t^inf omega(y) y^{-2} dy`, computed in `v = log y` independently of the kappa node.
pub fn kappa_alt_form(omega: &WeightFunction, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return if t == 0.0 { Ok(0.0) } else { Err(Error::InvalidArgument(format!("t = {t} is negative"))) };
    }
    let (v0, v1) = (t.ln(), (t * Y_CUT).ln());
    let body = integrate(|v: f64| omega.at(v.exp()) * (-v).exp(), v0, v1, 1e-11, 1e-300, 4000);
    let y = t * Y_CUT;
    let tail = match omega.expansion().filter(|e| e.valid_from <= y) {
        Some(e) => {
            if e.terms.iter().any(|(_, a)| *a >= 1.0) {
                return Err(Error::NotNonQuasianalytic(format!("{} grows too fast", omega.describe())));
            }
            // int_Y^inf c y^{a-2} dy = c Y^{a-1} / (1 - a)
            e.terms.iter().map(|(c, a)| c * y.powf(a - 1.0) / (1.0 - a)).sum::<f64>()
        }
        None => {
            let (hi, lo) = (omega.at(y), omega.at(y / 10.0));
            let alpha = if lo > 0.0 { (hi / lo).log10().max(0.0) } else { 0.0 };
            if alpha >= 1.0 {
                return Err(Error::NotNonQuasianalytic(format!("local growth exponent {alpha:.4} at {y:e}")));
            }
            hi / y / (1.0 - alpha)
        }
    };
    Ok(t * (body.value + tail))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_of_square_root() {
        let w = WeightFunction::power_law(0.5, 1.0).unwrap();
        let k = kappa(&w).unwrap();
        for t in [1.0f64, 7.5, 1e3, 1e6] {
            let exact = 2.0 * t.sqrt();
            assert!((k.at(t) - exact).abs() < 1e-6 * exact);
            assert!((kappa_alt_form(&w, t).unwrap() - exact).abs() < 1e-6 * exact);
        }
        assert_eq!(k.at(0.0), 0.0);
    }

    #[test]
    fn linear_weight_has_no_kappa() {
        let w = WeightFunction::power_law(1.0, 1.0).unwrap();
        assert!(matches!(kappa(&w), Err(Error::NotNonQuasianalytic(_))));
    }
}
