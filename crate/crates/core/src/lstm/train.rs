use serde::{Deserialize, Serialize};

use super::network::{accumulate_sample_gradient, sum_gradients};
use super::{clip_global_norm, init_params, network_forward, predict_standardized, AdamState, LstmParams, WindowedSample};
use crate::error::{Error, Result};
use crate::numkit::{pairwise_sum, RngStream};
use crate::par::Execution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    #[serde(rename = "hidden")]
    pub hidden_size: usize,
    pub epochs: usize,
    #[serde(rename = "batch")]
    pub batch_size: usize,
    #[serde(rename = "lr")]
    pub learning_rate: f64,
    /// Epochs without an improvement of at least `min_delta` before stopping.
    pub patience: usize,
    pub min_delta: f64,
    /// Fraction of samples held out to monitor early stopping.
    pub val_fraction: f64,
    /// Global L2 norm cap applied to each batch gradient.
    pub clip_norm: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            hidden_size: 50,
            epochs: 50,
            batch_size: 16,
            learning_rate: 0.001,
            patience: 5,
            min_delta: 1e-6,
            val_fraction: 0.1,
            clip_norm: 5.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_size == 0 || self.hidden_size > 4096 {
            return Err(Error::config("lstm.hidden", "must be in 1..=4096"));
        }
        if self.epochs == 0 {
            return Err(Error::config("lstm.epochs", "must be >= 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::config("lstm.batch", "must be >= 1"));
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::config("lstm.lr", "must be finite and > 0"));
        }
        if self.patience == 0 {
            return Err(Error::config("lstm.patience", "must be >= 1"));
        }
        if !(self.min_delta >= 0.0) || !self.min_delta.is_finite() {
            return Err(Error::config("lstm.min_delta", "must be finite and >= 0"));
        }
        if !(0.0..1.0).contains(&self.val_fraction) {
            return Err(Error::config("lstm.val_fraction", "must be in [0, 1)"));
        }
        if !(self.clip_norm > 0.0) {
            return Err(Error::config("lstm.clip_norm", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean squared error over the training split, accumulated batch by batch.
    pub train_loss: f64,
    /// Holdout MSE, or `train_loss` when there is no holdout.
    pub monitor_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epochs: Vec<EpochStats>,
    pub best_epoch: usize,
    pub best_monitor_loss: f64,
    pub stopped_early: bool,
    pub n_train: usize,
    pub n_holdout: usize,
}

pub fn train(samples: &[WindowedSample], cfg: &TrainConfig, rng: &mut RngStream) -> Result<(LstmParams, TrainHistory)> {
    train_with(samples, cfg, rng, Execution::default())
}

/// Mini-batch Adam with early stopping on a shuffled holdout.
///
/// `rng` drives, in order: the holdout split, weight initialisation and the
/// per-epoch batch shuffles. Returns the parameters of the best monitored
/// epoch.
pub fn train_with(
    samples: &[WindowedSample],
    cfg: &TrainConfig,
    rng: &mut RngStream,
    exec: Execution,
) -> Result<(LstmParams, TrainHistory)> {
    cfg.validate()?;
    if samples.is_empty() {
        return Err(Error::InvalidInput("no training samples".into()));
    }
    let window = samples[0].input.len();
    if window == 0 || samples.iter().any(|s| s.input.len() != window) {
        return Err(Error::InvalidInput("samples must share one nonzero window length".into()));
    }

    let mut order: Vec<usize> = (0..samples.len()).collect();
    rng.shuffle(&mut order);
    let n_holdout = ((cfg.val_fraction * samples.len() as f64).floor() as usize).min(samples.len() - 1);
    let (holdout, train_idx) = order.split_at(n_holdout);
    let mut train_idx = train_idx.to_vec();

    let mut params = init_params(cfg.hidden_size, 1, rng)?;
    let mut adam = AdamState::new(params.len(), cfg.learning_rate);

    let mut best = params.clone();
    let mut best_loss = f64::INFINITY;
    let mut best_epoch = 0;
    let mut since_improvement = 0;
    let mut stopped_early = false;
    let mut epochs = Vec::with_capacity(cfg.epochs);

    for epoch in 1..=cfg.epochs {
        rng.shuffle(&mut train_idx);
        let mut sq_errors = Vec::with_capacity(train_idx.len());
        for batch in train_idx.chunks(cfg.batch_size) {
            let scale = 2.0 / batch.len() as f64;
            let snapshot = &params;
            let parts = exec.map_slice(batch, |&idx| -> Result<(f64, Vec<f64>)> {
                let s = &samples[idx];
                let (pred, cache) = network_forward(snapshot, &s.input)?;
                let resid = pred - s.target;
                let mut g = vec![0.0; snapshot.len()];
                accumulate_sample_gradient(snapshot, &cache, scale * resid, &mut g);
                Ok((resid * resid, g))
            });
            let mut grads = Vec::with_capacity(parts.len());
            for part in parts {
                let (sq, g) = part?;
                sq_errors.push(sq);
                grads.push(g);
            }
            let mut grad = sum_gradients(grads, params.len());
            if grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::NumericOverflow(format!("non-finite gradient in epoch {epoch}")));
            }
            clip_global_norm(&mut grad, cfg.clip_norm);
            adam.step(params.as_mut_slice(), &grad)?;
        }
        let train_loss = pairwise_sum(&sq_errors) / sq_errors.len() as f64;
        let monitor_loss = if holdout.is_empty() {
            train_loss
        } else {
            let sq = exec.map_slice(holdout, |&idx| -> Result<f64> {
                let s = &samples[idx];
                let r = predict_standardized(&params, &s.input)? - s.target;
                Ok(r * r)
            });
            let sq = sq.into_iter().collect::<Result<Vec<_>>>()?;
            pairwise_sum(&sq) / sq.len() as f64
        };
        if !monitor_loss.is_finite() {
            return Err(Error::NumericOverflow(format!("non-finite loss in epoch {epoch}")));
        }
        epochs.push(EpochStats {
            epoch,
            train_loss,
            monitor_loss,
        });

        if monitor_loss <= best_loss - cfg.min_delta {
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }
        if monitor_loss < best_loss {
            best_loss = monitor_loss;
            best_epoch = epoch;
            best.clone_from(&params);
        }
        if since_improvement >= cfg.patience {
            stopped_early = epoch < cfg.epochs;
            break;
        }
    }

    let history = TrainHistory {
        epochs,
        best_epoch,
        best_monitor_loss: best_loss,
        stopped_early,
        n_train: train_idx.len(),
        n_holdout,
    };
    Ok((best, history))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_samples(n: usize) -> Vec<WindowedSample> {
        (0..n)
            .map(|k| WindowedSample {
                input: vec![0.5; 4],
                target: 1.5,
                company_id: 0,
                target_day: k + 5,
            })
            .collect()
    }

    fn small_cfg() -> TrainConfig {
        TrainConfig {
            hidden_size: 4,
            epochs: 50,
            batch_size: 4,
            learning_rate: 0.01,
            patience: 50,
            val_fraction: 0.0,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn learns_a_constant() {
        let (_, h) = train(&constant_samples(32), &small_cfg(), &mut RngStream::new(1, 0)).unwrap();
        assert_eq!(h.epochs.len(), 50);
        assert!(h.epochs.last().unwrap().train_loss < h.epochs[0].train_loss);
    }

    #[test]
    fn zero_patience_rejected() {
        let cfg = TrainConfig {
            patience: 0,
            ..small_cfg()
        };
        match train(&constant_samples(8), &cfg, &mut RngStream::new(1, 0)) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "lstm.patience"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_samples_rejected() {
        assert!(matches!(
            train(&[], &small_cfg(), &mut RngStream::new(1, 0)),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn deterministic_across_runs_and_policies() {
        let samples: Vec<WindowedSample> = (0..40)
            .map(|k| {
                let x = k as f64 * 0.1;
                WindowedSample {
                    input: (0..5).map(|j| (x + j as f64 * 0.2).sin()).collect(),
                    target: (x + 1.0).sin(),
                    company_id: 0,
                    target_day: k,
                }
            })
            .collect();
        let cfg = TrainConfig {
            val_fraction: 0.2,
            patience: 3,
            epochs: 15,
            ..small_cfg()
        };
        let a = train_with(&samples, &cfg, &mut RngStream::new(5, 1), Execution::Sequential).unwrap();
        let b = train_with(&samples, &cfg, &mut RngStream::new(5, 1), Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let c = train(&samples, &cfg, &mut RngStream::new(5, 1)).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn best_epoch_snapshot() {
        let samples = constant_samples(40);
        let cfg = TrainConfig {
            val_fraction: 0.25,
            patience: 2,
            learning_rate: 0.05,
            ..small_cfg()
        };
        let (params, h) = train(&samples, &cfg, &mut RngStream::new(2, 2)).unwrap();
        let min = h.epochs.iter().map(|e| e.monitor_loss).fold(f64::INFINITY, f64::min);
        assert_eq!(h.best_monitor_loss, min);
        assert_eq!(h.epochs[h.best_epoch - 1].monitor_loss, min);
        assert_eq!(h.n_holdout, 10);
        // the returned params reproduce the best monitored loss on the holdout
        let mut order: Vec<usize> = (0..samples.len()).collect();
        RngStream::new(2, 2).shuffle(&mut order);
        let sq: Vec<f64> = order[..10]
            .iter()
            .map(|&i| (predict_standardized(&params, &samples[i].input).unwrap() - samples[i].target).powi(2))
            .collect();
        assert_eq!(pairwise_sum(&sq) / 10.0, min);
    }
}
