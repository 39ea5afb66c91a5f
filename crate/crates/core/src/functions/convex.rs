use super::WeightFunction;
use crate::error::{Error, Result};
use crate::grid::YGrid;
use serde::{Deserialize, Serialize};

/// Convex piecewise-linear function through `(xs[i], vals[i])`.
///
/// Beyond the first and last breakpoint it continues with `left_slope` and
/// `right_slope`; `None` means the domain ends there and the value is `+inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPL {
    xs: Vec<f64>,
    vals: Vec<f64>,
    left_slope: Option<f64>,
    right_slope: Option<f64>,
}

fn convexity_excess(s0: f64, s1: f64) -> f64 {
    let tol = 1e-9 * s0.abs().max(s1.abs()).max(1.0);
    if s1 < s0 - tol {
        s0 - s1
    } else {
        0.0
    }
}

impl ConvexPL {
    pub fn new(
        xs: Vec<f64>,
        vals: Vec<f64>,
        left_slope: Option<f64>,
        right_slope: Option<f64>,
    ) -> Result<Self> {
        if xs.is_empty() || xs.len() != vals.len() {
            return Err(Error::InvalidArgument("breakpoints and values must be nonempty and of equal length".into()));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("breakpoints must increase strictly".into()));
        }
        let pl = ConvexPL { xs, vals, left_slope, right_slope };
        let mut slopes = Vec::with_capacity(pl.xs.len() + 1);
        slopes.extend(pl.left_slope);
        slopes.extend(pl.slopes());
        slopes.extend(pl.right_slope);
        for (i, w) in slopes.windows(2).enumerate() {
            let excess = convexity_excess(w[0], w[1]);
            if excess > 0.0 {
                let k = i.min(pl.xs.len().saturating_sub(2));
                let y0 = pl.xs[k];
                let y1 = pl.xs[(k + 1).min(pl.xs.len() - 1)];
                let y2 = pl.xs[(k + 2).min(pl.xs.len() - 1)];
                return Err(Error::ConvexityViolation { y0, y1, y2, excess });
            }
        }
        Ok(pl)
    }

    /// Greatest convex minorant of the points, with the domain ending at both sides.
    pub fn lower_hull(xs: &[f64], vals: &[f64]) -> Result<Self> {
        let mut hx: Vec<f64> = Vec::with_capacity(xs.len());
        let mut hv: Vec<f64> = Vec::with_capacity(xs.len());
        for (&x, &v) in xs.iter().zip(vals) {
            while hx.len() >= 2 {
                let n = hx.len();
                let s_prev = (hv[n - 1] - hv[n - 2]) / (hx[n - 1] - hx[n - 2]);
                let s_new = (v - hv[n - 1]) / (x - hx[n - 1]);
                if s_prev >= s_new {
                    hx.pop();
                    hv.pop();
                } else {
                    break;
                }
            }
            hx.push(x);
            hv.push(v);
        }
        ConvexPL::new(hx, hv, None, None)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.vals
    }

    pub fn left_slope(&self) -> Option<f64> {
        self.left_slope
    }

    pub fn right_slope(&self) -> Option<f64> {
        self.right_slope
    }

    /// Slopes of the inner segments.
    pub fn slopes(&self) -> Vec<f64> {
        self.xs
            .windows(2)
            .zip(self.vals.windows(2))
            .map(|(x, v)| (v[1] - v[0]) / (x[1] - x[0]))
            .collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x < self.xs[0] {
            return self
                .left_slope
                .map_or(f64::INFINITY, |s| self.vals[0] + s * (x - self.xs[0]));
        }
        if x > self.xs[n - 1] {
            return self
                .right_slope
                .map_or(f64::INFINITY, |s| self.vals[n - 1] + s * (x - self.xs[n - 1]));
        }
        let i = self.xs.partition_point(|b| *b <= x);
        if i > 0 && self.xs[i - 1] == x {
            return self.vals[i - 1];
        }
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (v0, v1) = (self.vals[i - 1], self.vals[i]);
        v0 + (v1 - v0) * (x - x0) / (x1 - x0)
    }

    /// Exact Legendre–Fenchel conjugate `g*(xi) = sup_x (xi x - g(x))`, one pass.
    ///
    /// Breakpoints of the conjugate are the slopes of `g`; its slopes are the breakpoints of `g`.
    pub fn conjugate(&self) -> ConvexPL {
        let slopes = self.slopes();
        let n = self.xs.len();
        let mut xs = Vec::with_capacity(n + 1);
        let mut vals = Vec::with_capacity(n + 1);
        let mut push = |xi: f64, v: f64| {
            if xs.last().map_or(true, |last: &f64| xi > *last) {
                xs.push(xi);
                vals.push(v);
            }
        };
        if let Some(a) = self.left_slope {
            push(a, a * self.xs[0] - self.vals[0]);
        }
        for (i, s) in slopes.iter().enumerate() {
            // On the segment [x_i, x_{i+1}] both ends maximize; take x_i.
            push(*s, s * self.xs[i] - self.vals[i]);
        }
        if let Some(b) = self.right_slope {
            push(b, b * self.xs[n - 1] - self.vals[n - 1]);
        }
        if xs.is_empty() {
            // Single point without extensions: the conjugate is linear everywhere.
            return ConvexPL {
                xs: vec![0.0],
                vals: vec![-self.vals[0]],
                left_slope: Some(self.xs[0]),
                right_slope: Some(self.xs[0]),
            };
        }
        let left = if self.left_slope.is_some() { None } else { Some(self.xs[0]) };
        let right = if self.right_slope.is_some() { None } else { Some(self.xs[n - 1]) };
        ConvexPL { xs, vals, left_slope: left, right_slope: right }
    }

    /// The smallest maximizer of `xi x - g(x)`, or `None` when the supremum is not attained.
    pub fn conjugate_argmax(&self, xi: f64) -> Option<f64> {
        let n = self.xs.len();
        if let Some(a) = self.left_slope {
            if xi <= a {
                return None;
            }
        }
        if let Some(b) = self.right_slope {
            if xi >= b {
                return None;
            }
        }
        let slopes = self.slopes();
        let i = slopes.partition_point(|s| *s < xi);
        Some(self.xs[i.min(n - 1)])
    }
}

/// Young conjugate `phi*(x) = sup_{y >= 0} (x y - omega(e^y))` of the sampled `phi`.
///
/// Fails with [`Error::ConvexityViolation`] if the samples are not convex within tolerance.
pub fn young_conjugate(omega: &WeightFunction, grid: &YGrid) -> Result<ConvexPL> {
    let ys = grid.points();
    let phi: Vec<f64> = ys.iter().map(|y| omega.at(y.exp())).collect();
    check_sampled_convexity(&ys, &phi)?;
    let hull = ConvexPL::lower_hull(&ys, &phi)?;
    // The conjugate's slopes are exactly the hull breakpoints.
    assert!(
        hull.breakpoints().windows(2).all(|w| w[0] < w[1]),
        "conjugate slopes must be nondecreasing"
    );
    Ok(hull.conjugate())
}

pub(crate) fn check_sampled_convexity(ys: &[f64], phi: &[f64]) -> Result<()> {
    for i in 1..ys.len() - 1 {
        let s0 = (phi[i] - phi[i - 1]) / (ys[i] - ys[i - 1]);
        let s1 = (phi[i + 1] - phi[i]) / (ys[i + 1] - ys[i]);
        let tol = 1e-9 * s0.abs().max(s1.abs()).max(1.0)
            + 1e-12 * phi[i].abs() / (ys[i + 1] - ys[i]);
        if s1 < s0 - tol {
            return Err(Error::ConvexityViolation {
                y0: ys[i - 1],
                y1: ys[i],
                y2: ys[i + 1],
                excess: s0 - s1,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugate_of_abs_value() {
        // g(x) = |x| on [-1, 1]: g*(xi) = max(|xi| - 1, 0)
        let g = ConvexPL::new(vec![-1.0, 0.0, 1.0], vec![1.0, 0.0, 1.0], None, None).unwrap();
        let c = g.conjugate();
        for (xi, want) in [(-3.0, 2.0), (-1.0, 0.0), (0.0, 0.0), (0.5, 0.0), (2.5, 1.5)] {
            assert!((c.eval(xi) - want).abs() < 1e-15, "xi={xi}");
        }
    }

    #[test]
    fn biconjugate_restores_function() {
        let xs = vec![0.0, 0.5, 2.0, 3.0, 7.0];
        let vs = vec![0.0, 0.1, 1.0, 2.0, 9.0];
        let g = ConvexPL::new(xs.clone(), vs.clone(), None, Some(5.0)).unwrap();
        let gg = g.conjugate().conjugate();
        for (x, v) in xs.iter().zip(&vs) {
            assert!((gg.eval(*x) - v).abs() < 1e-12);
        }
        assert_eq!(gg.right_slope(), Some(5.0));
        assert_eq!(gg.left_slope(), None);
    }

    #[test]
    fn rejects_nonconvex() {
        let e = ConvexPL::new(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 2.5], None, None);
        assert!(matches!(e, Err(Error::ConvexityViolation { .. })));
    }

    #[test]
    fn hull_removes_dents() {
        let h = ConvexPL::lower_hull(&[0.0, 1.0, 2.0, 3.0], &[0.0, 2.0, 1.0, 3.0]).unwrap();
        assert_eq!(h.breakpoints(), &[0.0, 2.0, 3.0]);
    }

    #[test]
    fn smallest_maximizer_on_flat_piece() {
        let g = ConvexPL::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 2.0], None, None).unwrap();
        // xi = 1 is maximized on all of [0, 2]
        assert_eq!(g.conjugate_argmax(1.0), Some(0.0));
        assert_eq!(g.conjugate_argmax(1.5), Some(2.0));
    }

    #[test]
    fn young_conjugate_of_clamped_exponential() {
        // omega(t) = max(0, t - 1): phi(y) = e^y - 1, phi*(x) = x ln x - x + 1 for x >= 1
        let w = WeightFunction::power_law(1.0, 1.0).unwrap().normalize();
        let c = young_conjugate(&w, &YGrid::default()).unwrap();
        assert_eq!(c.eval(0.0), 0.0);
        assert_eq!(c.eval(0.7), 0.0);
        for x in [1.0, std::f64::consts::E, 5.0, 20.0] {
            let exact = x * x.ln() - x + 1.0;
            assert!((c.eval(x) - exact).abs() < 1e-3, "x={x}");
        }
    }

    #[test]
    fn nonconvex_samples_reported() {
        // omega(t) = (log t)^(1/2): phi(y) = y^(1/2) is concave
        let w = WeightFunction::log_power(0.5, 1.0).unwrap();
        assert!(matches!(
            young_conjugate(&w, &YGrid::default()),
            Err(Error::ConvexityViolation { .. })
        ));
    }
}
