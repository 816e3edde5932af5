//! Volatility-gated mixture of experts for one-step-ahead price forecasting.
//!
//! A synthetic market of random walks with drift ([`simdata`]) feeds two
//! experts: a from-scratch LSTM ([`lstm`]) and a pooled OLS model of price on
//! day and volatility ([`linear`]). A static gate ([`moe`]) mixes them per
//! company according to its volatility class, and [`eval`] scores all three
//! forecasters under expanding-window walk-forward validation.

pub mod config;
pub mod error;
pub mod eval;
pub mod linear;
pub mod lstm;
pub mod moe;
pub mod numkit;
pub mod par;
pub mod simdata;

pub use config::ExperimentConfig;
pub use error::{Error, Result};
pub use par::Execution;
