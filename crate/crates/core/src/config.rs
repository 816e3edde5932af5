//! Experiment configuration: one strict JSON document holding every knob.
//!
//! Unknown keys are rejected; missing keys take defaults that match the
//! original experiment (100 companies × 100 days, 50-unit LSTM, 80/20
//! walk-forward).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lstm::TrainConfig;
use crate::moe::{GateConfig, GateWeights};
use crate::simdata::DatasetConfig;

/// Which companies feed the LSTM that the gate mixes in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpertPool {
    /// Reuse the pooled all-company RNN.
    #[default]
    All,
    /// Train a second LSTM on volatile companies only.
    Volatile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LstmConfig {
    pub window: usize,
    pub hidden: usize,
    pub lr: f64,
    pub batch: usize,
    pub epochs: usize,
    pub patience: usize,
    pub min_delta: f64,
    pub val_fraction: f64,
    pub clip_norm: f64,
    pub moe_expert_pool: ExpertPool,
}

impl Default for LstmConfig {
    fn default() -> Self {
        let t = TrainConfig::default();
        LstmConfig {
            window: 10,
            hidden: t.hidden_size,
            lr: t.learning_rate,
            batch: t.batch_size,
            epochs: t.epochs,
            patience: t.patience,
            min_delta: t.min_delta,
            val_fraction: t.val_fraction,
            clip_norm: t.clip_norm,
            moe_expert_pool: ExpertPool::default(),
        }
    }
}

impl LstmConfig {
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            hidden_size: self.hidden,
            epochs: self.epochs,
            batch_size: self.batch,
            learning_rate: self.lr,
            patience: self.patience,
            min_delta: self.min_delta,
            val_fraction: self.val_fraction,
            clip_norm: self.clip_norm,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window == 0 || self.window > 1000 {
            return Err(Error::config("lstm.window", "must be in 1..=1000"));
        }
        self.train_config().validate()
    }
}

/// Expanding-window walk-forward schedule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WalkForwardConfig {
    pub init_train: usize,
    pub val_len: usize,
    pub step: usize,
}

impl Default for WalkForwardConfig {
    fn default() -> Self {
        WalkForwardConfig {
            init_train: 80,
            val_len: 20,
            step: 20,
        }
    }
}

/// The only two sources of randomness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeedConfig {
    /// Drives dataset generation.
    pub master_seed: u64,
    /// Drives holdout splits, weight init and batch order.
    pub shuffle_seed: u64,
}

impl Default for SeedConfig {
    fn default() -> Self {
        SeedConfig {
            master_seed: 42,
            shuffle_seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dataset_csv: Option<String>,
    pub out_dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub dataset: DatasetConfig,
    pub lstm: LstmConfig,
    pub gate: GateConfig,
    pub walkforward: WalkForwardConfig,
    pub seeds: SeedConfig,
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| {
            let field = unknown_field(&e.to_string()).unwrap_or_else(|| "<document>".to_string());
            Error::config(field, e.to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.dataset.validate()?;
        self.lstm.validate()?;
        self.gate.validate()?;
        let wf = &self.walkforward;
        if wf.init_train == 0 {
            return Err(Error::config("walkforward.init_train", "must be >= 1"));
        }
        if wf.val_len == 0 {
            return Err(Error::config("walkforward.val_len", "must be >= 1"));
        }
        if wf.step == 0 {
            return Err(Error::config("walkforward.step", "must be >= 1"));
        }
        if wf.init_train + wf.val_len > self.dataset.days {
            return Err(Error::config(
                "walkforward.val_len",
                format!(
                    "first fold needs {} days but the series has {}",
                    wf.init_train + wf.val_len,
                    self.dataset.days
                ),
            ));
        }
        if wf.init_train < self.lstm.window + 1 {
            return Err(Error::config(
                "walkforward.init_train",
                format!("must be at least window + 1 = {}", self.lstm.window + 1),
            ));
        }
        Ok(())
    }

    /// Forces both regimes onto one weight pair.
    pub fn with_gate_override(mut self, w: GateWeights) -> Self {
        self.gate = GateConfig::uniform(w);
        self
    }
}

fn unknown_field(msg: &str) -> Option<String> {
    let rest = msg.strip_prefix("unknown field `")?;
    Some(rest[..rest.find('`')?].to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_default() {
        let cfg = ExperimentConfig::from_json("{}").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.dataset.n_companies, 100);
        assert_eq!(cfg.dataset.mu, 0.05);
        assert_eq!(cfg.dataset.sigma_threshold, 0.05);
        assert_eq!(cfg.lstm.hidden, 50);
        assert_eq!(cfg.lstm.window, 10);
        assert_eq!(cfg.lstm.batch, 16);
        assert_eq!(cfg.lstm.epochs, 50);
        assert_eq!(cfg.lstm.lr, 0.001);
        assert_eq!(cfg.walkforward, WalkForwardConfig { init_train: 80, val_len: 20, step: 20 });
        assert_eq!(cfg.gate.weights_volatile, GateWeights { w_rnn: 0.7, w_lm: 0.3 });
    }

    #[test]
    fn unknown_key_rejected() {
        match ExperimentConfig::from_json(r#"{"lstm": {"hiden": 3}}"#) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "hiden"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn out_of_range_rejected() {
        for (doc, field) in [
            (r#"{"dataset": {"n_companies": 0}}"#, "dataset.n_companies"),
            (r#"{"lstm": {"patience": 0}}"#, "lstm.patience"),
            (r#"{"gate": {"weights_stable": {"w_rnn": 0.5, "w_lm": 0.6}}}"#, "gate.weights_stable"),
            (r#"{"walkforward": {"val_len": 21}}"#, "walkforward.val_len"),
            (r#"{"walkforward": {"init_train": 10}}"#, "walkforward.init_train"),
        ] {
            match ExperimentConfig::from_json(doc) {
                Err(Error::Config { field: f, .. }) => assert_eq!(f, field, "{doc}"),
                other => panic!("{doc}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let cfg = ExperimentConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
    }
}
