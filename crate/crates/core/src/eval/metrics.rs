use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::pairwise_sum;
use crate::simdata::VolatilityClass;

pub const TRADING_DAYS_PER_MONTH: usize = 21;

fn check(preds: &[f64], actuals: &[f64]) -> Result<()> {
    if preds.len() != actuals.len() || preds.is_empty() {
        return Err(Error::Dimension(format!(
            "metric over {} predictions and {} actuals",
            preds.len(),
            actuals.len()
        )));
    }
    Ok(())
}

pub fn mse(preds: &[f64], actuals: &[f64]) -> Result<f64> {
    check(preds, actuals)?;
    let sq: Vec<f64> = preds.iter().zip(actuals).map(|(p, a)| (p - a) * (p - a)).collect();
    Ok(pairwise_sum(&sq) / sq.len() as f64)
}

pub fn rmse(preds: &[f64], actuals: &[f64]) -> Result<f64> {
    mse(preds, actuals).map(f64::sqrt)
}

pub fn mae(preds: &[f64], actuals: &[f64]) -> Result<f64> {
    check(preds, actuals)?;
    let abs: Vec<f64> = preds.iter().zip(actuals).map(|(p, a)| (p - a).abs()).collect();
    Ok(pairwise_sum(&abs) / abs.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Rnn,
    Linear,
    Moe,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::Rnn, Model::Linear, Model::Moe];

    pub fn as_str(self) -> &'static str {
        match self {
            Model::Rnn => "rnn",
            Model::Linear => "linear",
            Model::Moe => "moe",
        }
    }

    /// Row label in the printed tables.
    pub fn label(self) -> &'static str {
        match self {
            Model::Rnn => "RNN",
            Model::Linear => "Linear",
            Model::Moe => "MoE (RNN + Linear)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassGroup {
    Stable,
    Volatile,
    All,
}

impl ClassGroup {
    pub const ALL: [ClassGroup; 3] = [ClassGroup::Stable, ClassGroup::Volatile, ClassGroup::All];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassGroup::Stable => "stable",
            ClassGroup::Volatile => "volatile",
            ClassGroup::All => "all",
        }
    }

    pub fn contains(self, class: VolatilityClass) -> bool {
        match self {
            ClassGroup::Stable => class == VolatilityClass::Stable,
            ClassGroup::Volatile => class == VolatilityClass::Volatile,
            ClassGroup::All => true,
        }
    }
}

/// Forecast horizon in 21-day trading months.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Horizon {
    #[serde(rename = "1m")]
    OneMonth,
    #[serde(rename = "6m")]
    SixMonths,
    #[serde(rename = "12m")]
    TwelveMonths,
    #[serde(rename = "12m+")]
    Beyond,
}

impl Horizon {
    pub fn as_str(self) -> &'static str {
        match self {
            Horizon::OneMonth => "1m",
            Horizon::SixMonths => "6m",
            Horizon::TwelveMonths => "12m",
            Horizon::Beyond => "12m+",
        }
    }
}

macro_rules! display_and_parse {
    ($ty:ty, [$($variant:expr),+]) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
                [$($variant),+]
                    .into_iter()
                    .find(|v| v.as_str() == s)
                    .ok_or_else(|| format!("unknown {} `{s}`", stringify!($ty)))
            }
        }
    };
}

display_and_parse!(Model, [Model::Rnn, Model::Linear, Model::Moe]);
display_and_parse!(ClassGroup, [ClassGroup::Stable, ClassGroup::Volatile, ClassGroup::All]);
display_and_parse!(Horizon, [Horizon::OneMonth, Horizon::SixMonths, Horizon::TwelveMonths, Horizon::Beyond]);

/// Bucket for a forecast made `days_ahead` days after the training window.
pub fn horizon_bucket(days_ahead: usize) -> Result<Horizon> {
    let m = TRADING_DAYS_PER_MONTH;
    Ok(match days_ahead {
        0 => return Err(Error::InvalidParameter("horizon must be >= 1 day".into())),
        d if d <= m => Horizon::OneMonth,
        d if d <= 6 * m => Horizon::SixMonths,
        d if d <= 12 * m => Horizon::TwelveMonths,
        _ => Horizon::Beyond,
    })
}

/// Error statistics for one model × class group × horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricCell {
    pub model: Model,
    pub class: ClassGroup,
    pub horizon: Horizon,
    pub n: usize,
    pub mse: f64,
    pub rmse: f64,
    pub mae: f64,
}

impl MetricCell {
    pub fn from_pairs(model: Model, class: ClassGroup, horizon: Horizon, preds: &[f64], actuals: &[f64]) -> Result<Self> {
        let m = mse(preds, actuals)?;
        Ok(MetricCell {
            model,
            class,
            horizon,
            n: preds.len(),
            mse: m,
            rmse: m.sqrt(),
            mae: mae(preds, actuals)?,
        })
    }
}
