//! Sampled intensity profiles and the grids they live on.

use crate::geometry::MICRON;
use crate::math::interp_linear;
use crate::{Error, Result};

/// Smallest number of samples a profile may hold.
pub const MIN_PROFILE_LEN: usize = 16;

/// Uniform detector grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Default for Grid {
    /// ±500 µm with 4001 points (0.25 µm step, well over 25 samples per fringe).
    fn default() -> Self {
        Self {
            x_min: -500.0 * MICRON,
            x_max: 500.0 * MICRON,
            n: 4001,
        }
    }
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        let grid = Self { x_min, x_max, n };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < MIN_PROFILE_LEN {
            return Err(Error::invalid(format!(
                "grid needs at least {MIN_PROFILE_LEN} points, got {}",
                self.n
            )));
        }
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_min < self.x_max) {
            return Err(Error::invalid(format!(
                "grid bounds must satisfy x_min < x_max ({} .. {})",
                self.x_min, self.x_max
            )));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.n)
            .map(|i| {
                if i + 1 == self.n {
                    self.x_max
                } else {
                    self.x_min + i as f64 * h
                }
            })
            .collect()
    }
}

/// Model tag and parameter echo attached to a profile.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProfileMeta {
    pub model: String,
    pub params: Vec<(String, String)>,
}

impl ProfileMeta {
    pub fn new(model: impl Into<String>) -> Self {
        Self {
            model: model.into(),
            params: Vec::new(),
        }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.params.push((key.into(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Intensity sampled on a strictly increasing set of detector positions (m).
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityProfile {
    xs: Vec<f64>,
    values: Vec<f64>,
    pub meta: ProfileMeta,
}

impl IntensityProfile {
    /// Validates the sampling. Negative values within round-off of zero
    /// (relative 1e-12 of the peak) are clamped to zero.
    pub fn new(xs: Vec<f64>, mut values: Vec<f64>, meta: ProfileMeta) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::invalid(format!(
                "profile has {} positions but {} values",
                xs.len(),
                values.len()
            )));
        }
        if xs.len() < MIN_PROFILE_LEN {
            return Err(Error::invalid(format!(
                "profile needs at least {MIN_PROFILE_LEN} samples, got {}",
                xs.len()
            )));
        }
        if let Some(i) = xs.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::invalid(format!(
                "profile positions not strictly increasing at index {}",
                i + 1
            )));
        }
        if let Some(i) = values.iter().chain(&xs).position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite profile entry at index {}",
                i % values.len()
            )));
        }
        let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for (i, v) in values.iter_mut().enumerate() {
            if *v < 0.0 {
                if *v >= -1e-12 * peak {
                    *v = 0.0;
                } else {
                    return Err(Error::invalid(format!("negative intensity {} at index {i}", *v)));
                }
            }
        }
        Ok(Self { xs, values, meta })
    }

    /// Samples `f` on `grid`.
    pub fn from_fn(grid: &Grid, meta: ProfileMeta, f: impl Fn(f64) -> f64) -> Result<Self> {
        grid.validate()?;
        let xs = grid.points();
        let values = xs.iter().map(|&x| f(x)).collect();
        Self::new(xs, values, meta)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Linear interpolation; `None` outside the sampled range.
    pub fn interpolate(&self, x: f64) -> Option<f64> {
        interp_linear(&self.xs, &self.values, x)
    }

    /// Grid step if the positions are uniform to 1e-6 relative.
    pub fn uniform_step(&self) -> Option<f64> {
        let n = self.xs.len();
        let h = (self.xs[n - 1] - self.xs[0]) / (n - 1) as f64;
        let uniform = self.xs.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-6 * h);
        uniform.then_some(h)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean_value(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Same positions, values multiplied by `factor` (must be positive).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(Error::invalid("scale factor must be positive"));
        }
        Self::new(
            self.xs.clone(),
            self.values.iter().map(|v| v * factor).collect(),
            self.meta.clone(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> ProfileMeta {
        ProfileMeta::new("test")
    }

    #[test]
    fn default_grid_has_quarter_micron_step() {
        let g = Grid::default();
        assert!((g.step() - 0.25e-6).abs() < 1e-18);
        let pts = g.points();
        assert_eq!(pts.len(), 4001);
        assert_eq!(pts[4000], 500e-6);
        assert!(pts[2000].abs() < 1e-18);
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(0.0, 1.0, 15).is_err());
        assert!(Grid::new(1.0, 1.0, 32).is_err());
        assert!(Grid::new(0.0, 1.0, 16).is_ok());
    }

    #[test]
    fn profile_invariants_are_enforced() {
        let xs: Vec<f64> = (0..16).map(f64::from).collect();
        assert!(IntensityProfile::new(xs.clone(), vec![1.0; 15], meta()).is_err());
        assert!(IntensityProfile::new(xs[..15].to_vec(), vec![1.0; 15], meta()).is_err());
        let mut bad = xs.clone();
        bad[5] = bad[4];
        assert!(IntensityProfile::new(bad, vec![1.0; 16], meta()).is_err());
        let mut neg = vec![1.0; 16];
        neg[3] = -0.5;
        assert!(IntensityProfile::new(xs.clone(), neg, meta()).is_err());
        let mut tiny = vec![1.0; 16];
        tiny[3] = -1e-15;
        let p = IntensityProfile::new(xs, tiny, meta()).unwrap();
        assert_eq!(p.values()[3], 0.0);
    }

    #[test]
    fn interpolation_and_uniform_step() {
        let grid = Grid::new(0.0, 15.0, 16).unwrap();
        let p = IntensityProfile::from_fn(&grid, meta(), |x| 2.0 * x + 1.0).unwrap();
        assert_eq!(p.uniform_step(), Some(1.0));
        assert!((p.interpolate(3.25).unwrap() - 7.5).abs() < 1e-12);
        assert!(p.interpolate(15.5).is_none());
    }
}
