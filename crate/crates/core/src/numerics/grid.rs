use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing, non-negative sample times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    /// `n_points` evenly spaced samples on `[t_start, t_end]`, endpoints included.
    ///
    /// A single point is allowed only when `t_start == t_end`.
    pub fn uniform(t_start: f64, t_end: f64, n_points: usize) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite()) {
            return Err(Error::invalid("grid", "endpoints must be finite"));
        }
        if t_start < 0.0 {
            return Err(Error::invalid("grid.t_start", "must be non-negative"));
        }
        match n_points {
            0 => Err(Error::invalid("grid.n_points", "grid must contain at least one point")),
            1 if t_end == t_start => Ok(Self { points: vec![t_start] }),
            1 => Err(Error::invalid(
                "grid.n_points",
                "a single-point grid needs t_end == t_start",
            )),
            n => {
                if t_end <= t_start {
                    return Err(Error::invalid("grid.t_end", "must exceed t_start"));
                }
                let step = (t_end - t_start) / (n - 1) as f64;
                let mut points: Vec<f64> = (0..n).map(|k| t_start + step * k as f64).collect();
                points[n - 1] = t_end;
                Ok(Self { points })
            }
        }
    }

    /// Grid from explicit sample times.
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("grid", "grid must contain at least one point"));
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("grid", "sample times must be finite"));
        }
        if points[0] < 0.0 {
            return Err(Error::invalid("grid.t_start", "must be non-negative"));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("grid", "sample times must be strictly increasing"));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.points[0]
    }

    pub fn end(&self) -> f64 {
        *self.points.last().expect("grid is never empty")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_endpoints_exact() {
        let g = TimeGrid::uniform(0.0, 15.0, 1501).unwrap();
        assert_eq!(g.len(), 1501);
        assert_eq!(g.start(), 0.0);
        assert_eq!(g.end(), 15.0);
        assert!((g.points()[100] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(TimeGrid::uniform(0.0, 1.0, 0).is_err());
        assert!(TimeGrid::uniform(0.0, 1.0, 1).is_err());
        assert!(TimeGrid::uniform(1.0, 1.0, 3).is_err());
        assert!(TimeGrid::uniform(-1.0, 1.0, 3).is_err());
        assert!(TimeGrid::from_points(vec![]).is_err());
        assert!(TimeGrid::from_points(vec![0.0, 0.5, 0.5]).is_err());
        assert_eq!(TimeGrid::uniform(2.0, 2.0, 1).unwrap().points(), &[2.0]);
    }
}
