//! Sampling grids for weight functions (`t`-grid) and their conjugates (`y`-grid).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Geometric grid on `[t_min, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl Default for TGrid {
    fn default() -> Self {
        TGrid { t_min: 1e-2, t_max: 1e12, points: 600 }
    }
}

impl TGrid {
    pub fn new(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad t-grid range [{t_min}, {t_max}]")));
        }
        if points < 16 {
            return Err(Error::InvalidArgument(format!("t-grid needs at least 16 points, got {points}")));
        }
        Ok(TGrid { t_min, t_max, points })
    }

    pub fn points(&self) -> Vec<f64> {
        let (a, b) = (self.t_min.ln(), self.t_max.ln());
        let n = self.points - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.t_max
                } else {
                    (a + (b - a) * i as f64 / n as f64).exp()
                }
            })
            .collect()
    }

    /// Grid points in the top decade `[t_max / 10, t_max]`.
    pub fn top_decade_start(&self) -> f64 {
        (self.t_max / 10.0).max(self.t_min)
    }
}

impl fmt::Display for TGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "geom[{:e},{:e}]x{}", self.t_min, self.t_max, self.points)
    }
}

/// Uniform grid on `[0, y_max]` for `phi(y) = omega(e^y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YGrid {
    pub y_max: f64,
    pub points: usize,
}

impl Default for YGrid {
    fn default() -> Self {
        YGrid { y_max: 1e12f64.ln(), points: 2000 }
    }
}

impl YGrid {
    pub fn new(y_max: f64, points: usize) -> Result<Self> {
        if !(y_max > 0.0 && y_max.is_finite()) || points < 3 {
            return Err(Error::InvalidArgument(format!("bad y-grid [0, {y_max}] x {points}")));
        }
        Ok(YGrid { y_max, points })
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n).map(|i| if i == n { self.y_max } else { self.y_max * i as f64 / n as f64 }).collect()
    }

    pub fn refined(&self) -> Self {
        YGrid { y_max: self.y_max, points: 2 * self.points - 1 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_endpoints() {
        let g = TGrid::default();
        let p = g.points();
        assert_eq!(p.len(), 600);
        assert!((p[0] - 1e-2).abs() < 1e-16);
        assert_eq!(*p.last().unwrap(), 1e12);
        assert!(p.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn validation() {
        assert!(TGrid::new(1.0, 0.5, 100).is_err());
        assert!(TGrid::new(1.0, 10.0, 8).is_err());
        assert!(YGrid::new(-1.0, 10).is_err());
    }
}
