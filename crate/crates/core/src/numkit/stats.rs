use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Affine map to zero mean and unit (population) variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    mean: f64,
    stddev: f64,
}

impl Standardizer {
    pub fn new(mean: f64, stddev: f64) -> Result<Self> {
        if !mean.is_finite() || !stddev.is_finite() || stddev <= 0.0 {
            return Err(Error::DegenerateDistribution(format!(
                "standardizer needs finite mean and positive stddev, got ({mean}, {stddev})"
            )));
        }
        Ok(Standardizer { mean, stddev })
    }

    /// Fits mean and divide-by-n standard deviation.
    pub fn fit(values: &[f64]) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 values to standardize, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite value in standardizer input".into()));
        }
        let n = values.len() as f64;
        let mean = pairwise_sum(values) / n;
        let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        let stddev = (pairwise_sum(&sq) / n).sqrt();
        if stddev == 0.0 || values.iter().all(|&v| v == values[0]) {
            return Err(Error::DegenerateDistribution(
                "all values are equal; standard deviation is zero".into(),
            ));
        }
        Standardizer::new(mean, stddev)
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn stddev(&self) -> f64 {
        self.stddev
    }

    pub fn apply(&self, x: f64) -> f64 {
        (x - self.mean) / self.stddev
    }

    pub fn invert(&self, z: f64) -> f64 {
        z * self.stddev + self.mean
    }
}

/// Fixed-shape pairwise summation. The reduction tree depends only on the
/// slice length, so the result is independent of how the terms were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
