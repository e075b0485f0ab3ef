//! Observation grid and the bivariate increment series consumed by every statistic.

use serde::{Deserialize, Serialize};

use crate::error::{CojumpError, Result};
use crate::num::Scalar;

/// Regular observation grid on `[0, horizon]` with `count` increments of length `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingGrid<T> {
    delta: T,
    horizon: T,
    count: usize,
}

impl<T: Scalar> SamplingGrid<T> {
    /// Grid with `count` equal steps over `horizon`; the step is `horizon / count`.
    pub fn new(horizon: T, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(CojumpError::InvalidParameter("grid needs at least one increment".into()));
        }
        if !(horizon > T::zero()) || !horizon.is_finite() {
            return Err(CojumpError::InvalidParameter(format!("horizon must be positive, got {horizon}")));
        }
        Ok(Self { delta: horizon / T::from_count(count), horizon, count })
    }

    /// Grid with step `delta`; `count = floor(horizon / delta)`.
    pub fn from_delta(delta: T, horizon: T) -> Result<Self> {
        if !(delta > T::zero()) || !delta.is_finite() {
            return Err(CojumpError::InvalidParameter(format!("delta must be positive, got {delta}")));
        }
        // relative slack absorbs representation error in horizon / delta
        let ratio = horizon / delta;
        let count = (ratio + ratio * T::lit(1e-12)).floor().to_usize().unwrap_or(0);
        if count == 0 {
            return Err(CojumpError::InvalidParameter("horizon shorter than one step".into()));
        }
        Ok(Self { delta, horizon, count })
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

/// Increments `Δ_i X = X_{iΔ} − X_{(i−1)Δ}` of a two-component process.
///
/// Indexing is zero-based internally; the window helpers in
/// [`crate::estimators`] take one-based positions to match the usual
/// `i = 1..n` convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementSeries<T> {
    grid: SamplingGrid<T>,
    increments: Vec<[T; 2]>,
}

impl<T: Scalar> IncrementSeries<T> {
    pub fn new(grid: SamplingGrid<T>, increments: Vec<[T; 2]>) -> Result<Self> {
        if increments.len() != grid.count() {
            return Err(CojumpError::InvalidParameter(format!(
                "series has {} increments but grid expects {}",
                increments.len(),
                grid.count()
            )));
        }
        if let Some(pos) = increments.iter().position(|x| !(x[0].is_finite() && x[1].is_finite())) {
            return Err(CojumpError::InvalidParameter(format!("non-finite increment at position {}", pos + 1)));
        }
        Ok(Self { grid, increments })
    }

    /// Series over `[0, horizon]` with one grid step per increment.
    pub fn from_increments(horizon: T, increments: Vec<[T; 2]>) -> Result<Self> {
        let grid = SamplingGrid::new(horizon, increments.len())?;
        Self::new(grid, increments)
    }

    /// Increments of a level path `X_0, X_Δ, …`.
    pub fn from_levels(horizon: T, levels: &[[T; 2]]) -> Result<Self> {
        let incs = levels.windows(2).map(|w| [w[1][0] - w[0][0], w[1][1] - w[0][1]]).collect();
        Self::from_increments(horizon, incs)
    }

    pub fn grid(&self) -> &SamplingGrid<T> {
        &self.grid
    }

    pub fn delta(&self) -> T {
        self.grid.delta
    }

    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    pub fn increments(&self) -> &[[T; 2]] {
        &self.increments
    }

    /// Copy with component `m` multiplied by `scale[m]`.
    pub fn rescaled(&self, scale: [T; 2]) -> Self {
        Self {
            grid: self.grid,
            increments: self.increments.iter().map(|x| [x[0] * scale[0], x[1] * scale[1]]).collect(),
        }
    }

    /// Single component as a plain slice-friendly vector.
    pub fn component(&self, m: usize) -> Vec<T> {
        self.increments.iter().map(|x| x[m]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_from_delta_floors() {
        let g = SamplingGrid::from_delta(0.3_f64, 1.0).unwrap();
        assert_eq!(g.count(), 3);
        let g = SamplingGrid::from_delta(1.0 / 1600.0, 1.0).unwrap();
        assert_eq!(g.count(), 1600);
    }

    #[test]
    fn rejects_length_mismatch_and_nan() {
        let g = SamplingGrid::new(1.0_f64, 2).unwrap();
        assert!(IncrementSeries::new(g, vec![[0.0, 0.0]]).is_err());
        assert!(IncrementSeries::new(g, vec![[0.0, 0.0], [f64::NAN, 1.0]]).is_err());
    }

    #[test]
    fn levels_to_increments() {
        let s = IncrementSeries::from_levels(1.0_f64, &[[100.0, 1.0], [101.0, 2.0], [100.5, 2.0]]).unwrap();
        assert_eq!(s.increments(), &[[1.0, 1.0], [-0.5, 0.0]]);
        assert_eq!(s.delta(), 0.5);
    }
}
