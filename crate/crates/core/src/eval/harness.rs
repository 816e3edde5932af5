use serde::{Deserialize, Serialize};

use super::report::{aggregate, FoldLinearParams, MetricsReport, Tendencies, TrainingSummary, REPORT_FORMAT, REPORT_VERSION};
use super::splits::{walk_forward_splits, FoldSpec};
use crate::config::{ExperimentConfig, ExpertPool};
use crate::error::{Error, Result};
use crate::linear::{self, LinearParams, LinearRow};
use crate::lstm::{make_windows, predict_next, train_with, LstmParams, TrainHistory, WindowedSample};
use crate::moe::{predict_company, Experts, MoePrediction};
use crate::numkit::{RngStream, Standardizer};
use crate::par::Execution;
use crate::simdata::{Dataset, VolatilityClass};

/// One validation-day forecast from all three models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub company_id: u32,
    pub fold: usize,
    pub day: usize,
    pub actual: f64,
    pub y_rnn: f64,
    pub y_lm: f64,
    pub y_moe: f64,
    pub class: VolatilityClass,
}

/// Everything fitted on one fold's training days.
#[derive(Debug, Clone)]
pub struct FoldModels {
    pub fold: FoldSpec,
    /// Per-company, fitted on training-day prices; aligned with `ds.companies`.
    pub standardizers: Vec<Standardizer>,
    pub rnn: LstmParams,
    pub rnn_history: TrainHistory,
    /// Separate volatile-pool LSTM, present only for `ExpertPool::Volatile`.
    pub volatile_rnn: Option<(LstmParams, TrainHistory)>,
    pub linear: LinearParams,
    pub window: usize,
    pub pool: ExpertPool,
    pub warnings: Vec<String>,
}

impl FoldModels {
    /// The LSTM the gate mixes in, if one could be trained.
    pub fn moe_rnn(&self) -> Option<&LstmParams> {
        match self.pool {
            ExpertPool::All => Some(&self.rnn),
            ExpertPool::Volatile => self.volatile_rnn.as_ref().map(|(p, _)| p),
        }
    }

    /// Teacher-forced forecast of `day` for company index `idx`: returns the
    /// pooled RNN forecast and the gated prediction.
    pub fn predict_day(
        &self,
        ds: &Dataset,
        idx: usize,
        day: usize,
        cfg: &ExperimentConfig,
    ) -> Result<(f64, MoePrediction)> {
        if day <= self.window || day > ds.days() {
            return Err(Error::InvalidParameter(format!(
                "day {day} has no full {}-day history inside the series",
                self.window
            )));
        }
        let history = ds.series[idx].days(day - self.window, day - 1);
        let st = &self.standardizers[idx];
        let y_rnn = predict_next(&self.rnn, history, st)?;
        let experts = Experts {
            rnn: self.moe_rnn(),
            linear: &self.linear,
        };
        let moe = predict_company(experts, st, &ds.companies[idx], history, day, &cfg.gate)?;
        Ok((y_rnn, moe))
    }
}

fn pooled_windows(
    ds: &Dataset,
    standardizers: &[Standardizer],
    last_day: usize,
    window: usize,
    keep: impl Fn(VolatilityClass) -> bool,
) -> Result<Vec<WindowedSample>> {
    let mut out = Vec::new();
    for ((c, s), st) in ds.companies.iter().zip(&ds.series).zip(standardizers) {
        if keep(c.class) {
            out.extend(make_windows(s, 1, last_day, st, window)?.samples);
        }
    }
    Ok(out)
}

/// Fits standardizers and experts for one fold, reading only prices on days
/// `1..=fold.train_last`.
pub fn train_fold_models(ds: &Dataset, fold: &FoldSpec, cfg: &ExperimentConfig, exec: Execution) -> Result<FoldModels> {
    let window = cfg.lstm.window;
    let last = fold.train_last;
    if last < window + 1 {
        return Err(Error::config(
            "walkforward.init_train",
            format!("fold {} has {last} training days; need at least {}", fold.index, window + 1),
        ));
    }
    let standardizers = ds
        .series
        .iter()
        .map(|s| Standardizer::fit(s.days(1, last)))
        .collect::<Result<Vec<_>>>()?;
    let train_cfg = cfg.lstm.train_config();
    let shuffle_seed = cfg.seeds.shuffle_seed;
    let mut warnings = Vec::new();

    let all = pooled_windows(ds, &standardizers, last, window, |_| true)?;
    let mut rng = RngStream::new(shuffle_seed, 2 * fold.index as u64);
    let (rnn, rnn_history) = train_with(&all, &train_cfg, &mut rng, exec)?;

    let volatile_rnn = match cfg.lstm.moe_expert_pool {
        ExpertPool::All => None,
        ExpertPool::Volatile => {
            let pool = pooled_windows(ds, &standardizers, last, window, |c| c == VolatilityClass::Volatile)?;
            if pool.is_empty() {
                warnings.push(format!(
                    "fold {}: no volatile companies; MoE falls back to the linear expert",
                    fold.index
                ));
                None
            } else {
                let mut rng = RngStream::new(shuffle_seed, 2 * fold.index as u64 + 1);
                Some(train_with(&pool, &train_cfg, &mut rng, exec)?)
            }
        }
    };

    let rows: Vec<LinearRow> = ds
        .companies
        .iter()
        .zip(&ds.series)
        .flat_map(|(c, s)| {
            s.days(1, last).iter().enumerate().map(move |(k, &price)| LinearRow {
                day: (k + 1) as f64,
                sigma: c.sigma,
                price,
            })
        })
        .collect();
    let linear = linear::fit(&rows)?;

    Ok(FoldModels {
        fold: *fold,
        standardizers,
        rnn,
        rnn_history,
        volatile_rnn,
        linear,
        window,
        pool: cfg.lstm.moe_expert_pool,
        warnings,
    })
}

pub struct ExperimentOutput {
    pub report: MetricsReport,
    pub records: Vec<PredictionRecord>,
    pub models: Vec<FoldModels>,
}

pub fn run_experiment(ds: &Dataset, cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    run_experiment_with(ds, cfg, Execution::default())
}

/// Walk-forward evaluation: per fold, train on the fold's training days and
/// forecast every validation day of every company, one step ahead.
pub fn run_experiment_with(ds: &Dataset, cfg: &ExperimentConfig, exec: Execution) -> Result<ExperimentOutput> {
    cfg.validate()?;
    ds.validate()?;
    if ds.days() != cfg.dataset.days {
        return Err(Error::config(
            "dataset.days",
            format!("dataset has {} days, config says {}", ds.days(), cfg.dataset.days),
        ));
    }
    let wf = &cfg.walkforward;
    let folds = walk_forward_splits(ds.days(), wf.init_train, wf.val_len, wf.step)?;

    let mut records = Vec::new();
    let mut models = Vec::with_capacity(folds.len());
    let mut warnings = Vec::new();
    for fold in &folds {
        let fm = train_fold_models(ds, fold, cfg, exec)?;
        warnings.extend(fm.warnings.iter().cloned());
        let per_company = exec.map_indexed(ds.len(), |idx| -> Result<Vec<PredictionRecord>> {
            (fold.valid_first..=fold.valid_last)
                .map(|day| {
                    let (y_rnn, moe) = fm.predict_day(ds, idx, day, cfg)?;
                    Ok(PredictionRecord {
                        company_id: ds.companies[idx].id,
                        fold: fold.index,
                        day,
                        actual: ds.series[idx].on_day(day),
                        y_rnn,
                        y_lm: moe.y_lm,
                        y_moe: moe.y_moe,
                        class: ds.companies[idx].class,
                    })
                })
                .collect()
        });
        for recs in per_company {
            records.extend(recs?);
        }
        models.push(fm);
    }

    let cells = aggregate(&records, &folds)?;
    let report = MetricsReport {
        format: REPORT_FORMAT.to_string(),
        version: REPORT_VERSION,
        master_seed: ds.master_seed,
        shuffle_seed: cfg.seeds.shuffle_seed,
        config: cfg.clone(),
        folds: folds.clone(),
        stable_companies: ds.count(VolatilityClass::Stable),
        volatile_companies: ds.count(VolatilityClass::Volatile),
        tendencies: Tendencies::from_cells(&cells),
        cells,
        linear_params: models
            .iter()
            .map(|m| FoldLinearParams {
                fold: m.fold.index,
                beta0: m.linear.beta0,
                beta1: m.linear.beta1,
                beta2: m.linear.beta2,
            })
            .collect(),
        training: models
            .iter()
            .flat_map(|m| {
                let mut v = vec![TrainingSummary::new(m.fold.index, "rnn", &m.rnn_history)];
                if let Some((_, h)) = &m.volatile_rnn {
                    v.push(TrainingSummary::new(m.fold.index, "volatile_rnn", h));
                }
                v
            })
            .collect(),
        warnings,
    };
    Ok(ExperimentOutput {
        report,
        records,
        models,
    })
}
