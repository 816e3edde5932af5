//! Pooled ordinary least squares of price on day index and volatility.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{solve_least_squares, Matrix};

/// `price ≈ beta0 + beta1 · day + beta2 · sigma`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearParams {
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
}

/// One training observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearRow {
    pub day: f64,
    pub sigma: f64,
    pub price: f64,
}

impl LinearParams {
    pub fn predict(&self, day: f64, sigma: f64) -> f64 {
        self.beta0 + self.beta1 * day + self.beta2 * sigma
    }
}

/// Least squares on the design `[1, day, sigma]`.
pub fn fit(rows: &[LinearRow]) -> Result<LinearParams> {
    if rows.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "linear expert needs at least 3 rows, got {}",
            rows.len()
        )));
    }
    let mut design = Vec::with_capacity(rows.len() * 3);
    for r in rows {
        design.extend_from_slice(&[1.0, r.day, r.sigma]);
    }
    let x = Matrix::from_row_major(rows.len(), 3, design)?;
    let y: Vec<f64> = rows.iter().map(|r| r.price).collect();
    let beta = solve_least_squares(&x, &y).map_err(|e| match e {
        Error::SingularSystem(msg) => Error::SingularSystem(format!(
            "{msg}; the design [1, day, sigma] needs at least two distinct days and two distinct \
             sigmas (drop the sigma column if every row shares one volatility)"
        )),
        other => other,
    })?;
    Ok(LinearParams {
        beta0: beta[0],
        beta1: beta[1],
        beta2: beta[2],
    })
}
