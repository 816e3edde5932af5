//! Static volatility-keyed gate over the LSTM and linear experts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::LinearParams;
use crate::lstm::{predict_next, LstmParams};
use crate::numkit::Standardizer;
use crate::simdata::{CompanyProfile, VolatilityClass};

/// Convex mixing weights `(w_rnn, w_lm)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateWeights {
    pub w_rnn: f64,
    pub w_lm: f64,
}

impl GateWeights {
    pub fn new(w_rnn: f64, w_lm: f64) -> Result<Self> {
        let w = GateWeights { w_rnn, w_lm };
        w.validate("gate")?;
        Ok(w)
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        if !(self.w_rnn >= 0.0) || !(self.w_lm >= 0.0) || ((self.w_rnn + self.w_lm) - 1.0).abs() > 1e-12 {
            return Err(Error::config(
                field,
                format!(
                    "weights must be non-negative and sum to 1, got ({}, {})",
                    self.w_rnn, self.w_lm
                ),
            ));
        }
        Ok(())
    }

    pub fn rnn_only() -> Self {
        GateWeights { w_rnn: 1.0, w_lm: 0.0 }
    }

    pub fn linear_only() -> Self {
        GateWeights { w_rnn: 0.0, w_lm: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateConfig {
    pub weights_volatile: GateWeights,
    pub weights_stable: GateWeights,
}

impl Default for GateConfig {
    fn default() -> Self {
        GateConfig {
            weights_volatile: GateWeights { w_rnn: 0.7, w_lm: 0.3 },
            weights_stable: GateWeights { w_rnn: 0.3, w_lm: 0.7 },
        }
    }
}

impl GateConfig {
    /// Same weights for both regimes.
    pub fn uniform(w: GateWeights) -> Self {
        GateConfig {
            weights_volatile: w,
            weights_stable: w,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.weights_volatile.validate("gate.weights_volatile")?;
        self.weights_stable.validate("gate.weights_stable")
    }
}

pub fn gate_weights(class: VolatilityClass, cfg: &GateConfig) -> GateWeights {
    match class {
        VolatilityClass::Volatile => cfg.weights_volatile,
        VolatilityClass::Stable => cfg.weights_stable,
    }
}

/// `w_rnn · y_rnn + w_lm · y_lm`, clamped to the interval spanned by the two
/// predictions so rounding cannot leave the convex hull.
pub fn combine(w: GateWeights, y_rnn: f64, y_lm: f64) -> f64 {
    let y = w.w_rnn * y_rnn + w.w_lm * y_lm;
    y.clamp(y_rnn.min(y_lm), y_rnn.max(y_lm))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoePrediction {
    pub y_moe: f64,
    pub y_rnn: f64,
    pub y_lm: f64,
    pub weights: GateWeights,
}

/// The two trained experts the gate mixes. `rnn` is `None` when its
/// training pool was empty; the gate then falls back to the linear expert.
#[derive(Debug, Clone, Copy)]
pub struct Experts<'a> {
    pub rnn: Option<&'a LstmParams>,
    pub linear: &'a LinearParams,
}

/// Predicts `target_day` for one company from its last observed prices.
pub fn predict_company(
    experts: Experts<'_>,
    standardizer: &Standardizer,
    company: &CompanyProfile,
    window: &[f64],
    target_day: usize,
    cfg: &GateConfig,
) -> Result<MoePrediction> {
    let y_lm = experts.linear.predict(target_day as f64, company.sigma);
    let (y_rnn, weights) = match experts.rnn {
        Some(rnn) => (predict_next(rnn, window, standardizer)?, gate_weights(company.class, cfg)),
        None => (f64::NAN, GateWeights::linear_only()),
    };
    let y_moe = if weights.w_rnn == 0.0 {
        y_lm
    } else if weights.w_lm == 0.0 {
        y_rnn
    } else {
        combine(weights, y_rnn, y_lm)
    };
    Ok(MoePrediction {
        y_moe,
        y_rnn,
        y_lm,
        weights,
    })
}
