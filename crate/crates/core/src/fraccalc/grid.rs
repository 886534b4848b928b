use std::ops::Index;

use crate::{Error, Result};

/// Uniform partition `0 = t_0 < t_1 < ... < t_L = T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::Domain(format!(
                "time horizon must be positive and finite, got {horizon}"
            )));
        }
        if steps == 0 {
            return Err(Error::Domain("time grid needs at least one step".into()));
        }
        Ok(Self { horizon, steps })
    }

    /// Final time `T`.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Number of intervals `L`.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of nodes, `L + 1`.
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node spacing `tau = T / L`.
    pub fn step(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn node(&self, index: usize) -> f64 {
        if index == self.steps {
            self.horizon
        } else {
            self.step() * index as f64
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.node(i))
    }

    /// Index of the node at `t`, if `t` coincides with one up to rounding.
    pub fn node_index(&self, t: f64) -> Option<usize> {
        let pos = t / self.step();
        let idx = pos.round();
        if idx < 0.0 || idx > self.steps as f64 || (pos - idx).abs() > 1e-9 {
            None
        } else {
            Some(idx as usize)
        }
    }

    pub(crate) fn ensure_same(&self, other: &TimeGrid, what: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{what}: (T={}, L={}) vs (T={}, L={})",
                self.horizon, self.steps, other.horizon, other.steps
            )))
        }
    }
}

/// Samples of a function of time at every node of a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "series has {} values but the grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: TimeGrid, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    /// Samples `f` at every node. Fails if `f` returns a non-finite value.
    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().map(f).collect())
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise combination of two series on the same grid.
    pub fn zip_with(&self, other: &TimeSeries, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.ensure_same(&other.grid, "zip_with")?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(self.grid, values)
    }

    pub fn sub(&self, other: &TimeSeries) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &TimeSeries) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, factor: f64) -> Result<Self> {
        self.map(|v| v * factor)
    }

    /// `L^2(0, T)` norm by the trapezoid rule.
    pub fn l2_norm(&self) -> f64 {
        trapezoid(self.grid.step(), self.values.iter().map(|v| v * v)).sqrt()
    }

    /// `L^1(0, T)` norm by the trapezoid rule applied to `|f|`.
    pub fn l1_norm(&self) -> f64 {
        trapezoid(self.grid.step(), self.values.iter().map(|v| v.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Sup-norm distance to another series on the same grid.
    pub fn max_abs_diff(&self, other: &TimeSeries) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }
}

impl Index<usize> for TimeSeries {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.values[index]
    }
}

/// Composite trapezoid rule on equispaced samples.
pub(crate) fn trapezoid(step: f64, samples: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 0.0;
    }
    let sum: f64 = samples
        .enumerate()
        .map(|(i, v)| if i == 0 || i == n - 1 { 0.5 * v } else { v })
        .sum();
    sum * step
}

/// Order `alpha` of a time-fractional derivative, `0 < alpha <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha <= 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::Domain(format!(
                "fractional order must lie in (0, 1], got {alpha}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// True for the classical first-order case `alpha = 1`.
    pub fn is_classical(self) -> bool {
        self.0 == 1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_invariants() {
        let g = TimeGrid::new(2.0, 8).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.step(), 0.25);
        assert_eq!(g.node(8), 2.0);
        assert_eq!(g.node_index(0.75), Some(3));
        assert_eq!(g.node_index(0.8), None);
        assert!(TimeGrid::new(0.0, 4).is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
    }

    #[test]
    fn series_rejects_bad_input() {
        let g = TimeGrid::new(1.0, 2).unwrap();
        assert!(matches!(
            TimeSeries::new(g, vec![0.0; 2]),
            Err(Error::GridMismatch(_))
        ));
        assert_eq!(
            TimeSeries::new(g, vec![0.0, f64::NAN, 1.0]),
            Err(Error::NonFinite { index: 1 })
        );
    }

    #[test]
    fn trapezoid_norms() {
        let g = TimeGrid::new(1.0, 4).unwrap();
        let f = TimeSeries::from_fn(g, |t| t).unwrap();
        assert!((f.l1_norm() - 0.5).abs() < 1e-15);
        // trapezoid on t^2 with 4 cells: 1/3 + 1/96
        assert!((f.l2_norm().powi(2) - (1.0 / 3.0 + 1.0 / 96.0)).abs() < 1e-15);
    }

    #[test]
    fn order_range() {
        assert!(FractionalOrder::new(1.0).unwrap().is_classical());
        assert!(FractionalOrder::new(0.0).is_err());
        assert!(FractionalOrder::new(1.2).is_err());
    }
}
