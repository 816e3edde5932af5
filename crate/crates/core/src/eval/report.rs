use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::harness::PredictionRecord;
use super::metrics::{horizon_bucket, ClassGroup, Horizon, MetricCell, Model};
use super::splits::FoldSpec;
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::lstm::TrainHistory;

pub const REPORT_FORMAT: &str = "volmoe-report";
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldLinearParams {
    pub fold: usize,
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSummary {
    pub fold: usize,
    pub role: String,
    pub n_train: usize,
    pub n_holdout: usize,
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub best_monitor_loss: f64,
    pub stopped_early: bool,
}

impl TrainingSummary {
    pub fn new(fold: usize, role: &str, h: &TrainHistory) -> Self {
        TrainingSummary {
            fold,
            role: role.to_string(),
            n_train: h.n_train,
            n_holdout: h.n_holdout,
            epochs_run: h.epochs.len(),
            best_epoch: h.best_epoch,
            best_monitor_loss: h.best_monitor_loss,
            stopped_early: h.stopped_early,
        }
    }
}

/// Directional checks on one run, pooled over all horizons. `None` when a
/// class group has no predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tendencies {
    /// Stable group: MAE(linear) < MAE(RNN).
    pub linear_beats_rnn_on_stable: Option<bool>,
    /// Stable group: MAE(MoE) ≤ 1.02 · MAE(linear).
    pub moe_within_2pct_of_linear_on_stable: Option<bool>,
    /// MSE(RNN) on volatile companies exceeds MSE(RNN) on stable ones.
    pub volatile_harder_for_rnn: Option<bool>,
}

impl Tendencies {
    pub fn from_cells(cells: &[MetricCell]) -> Self {
        // pool horizons by n-weighting the per-horizon means
        let pooled = |model: Model, class: ClassGroup| -> Option<(f64, f64)> {
            let sel: Vec<&MetricCell> = cells.iter().filter(|c| c.model == model && c.class == class).collect();
            let n: usize = sel.iter().map(|c| c.n).sum();
            (n > 0).then(|| {
                let w = |f: fn(&MetricCell) -> f64| sel.iter().map(|c| f(c) * c.n as f64).sum::<f64>() / n as f64;
                (w(|c| c.mse), w(|c| c.mae))
            })
        };
        let s_rnn = pooled(Model::Rnn, ClassGroup::Stable);
        let s_lin = pooled(Model::Linear, ClassGroup::Stable);
        let s_moe = pooled(Model::Moe, ClassGroup::Stable);
        let v_rnn = pooled(Model::Rnn, ClassGroup::Volatile);
        Tendencies {
            linear_beats_rnn_on_stable: s_lin.zip(s_rnn).map(|(l, r)| l.1 < r.1),
            moe_within_2pct_of_linear_on_stable: s_moe.zip(s_lin).map(|(m, l)| m.1 <= l.1 + 0.02 * l.1),
            volatile_harder_for_rnn: v_rnn.zip(s_rnn).map(|(v, s)| v.0 > s.0),
        }
    }
}

/// Serialized as `report.json`. Carries the fully resolved config so the file
/// is self-describing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsReport {
    pub format: String,
    pub version: u32,
    pub master_seed: u64,
    pub shuffle_seed: u64,
    pub config: ExperimentConfig,
    pub folds: Vec<FoldSpec>,
    pub stable_companies: usize,
    pub volatile_companies: usize,
    pub cells: Vec<MetricCell>,
    pub tendencies: Tendencies,
    pub linear_params: Vec<FoldLinearParams>,
    pub training: Vec<TrainingSummary>,
    pub warnings: Vec<String>,
}

/// Groups records into model × class × horizon cells, skipping empty ones.
/// Order: model, then class group, then horizon.
pub fn aggregate(records: &[PredictionRecord], folds: &[FoldSpec]) -> Result<Vec<MetricCell>> {
    let mut groups: BTreeMap<(ClassGroup, Horizon), Vec<&PredictionRecord>> = BTreeMap::new();
    for r in records {
        let fold = folds
            .iter()
            .find(|f| f.index == r.fold)
            .ok_or_else(|| Error::Validation(format!("record refers to unknown fold {}", r.fold)))?;
        if r.day < fold.valid_first || r.day > fold.valid_last {
            return Err(Error::Validation(format!(
                "record for day {} lies outside fold {} validation days",
                r.day, r.fold
            )));
        }
        let h = horizon_bucket(r.day - fold.train_last)?;
        for g in ClassGroup::ALL {
            if g.contains(r.class) {
                groups.entry((g, h)).or_default().push(r);
            }
        }
    }
    let mut cells = Vec::new();
    for model in Model::ALL {
        for (&(class, horizon), recs) in &groups {
            let actual: Vec<f64> = recs.iter().map(|r| r.actual).collect();
            let preds: Vec<f64> = recs
                .iter()
                .map(|r| match model {
                    Model::Rnn => r.y_rnn,
                    Model::Linear => r.y_lm,
                    Model::Moe => r.y_moe,
                })
                .collect();
            cells.push(MetricCell::from_pairs(model, class, horizon, &preds, &actual)?);
        }
    }
    Ok(cells)
}

impl MetricsReport {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let report: MetricsReport = serde_json::from_str(&text)?;
        report.validate()?;
        Ok(report)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn cell(&self, model: Model, class: ClassGroup, horizon: Horizon) -> Option<&MetricCell> {
        self.cells
            .iter()
            .find(|c| c.model == model && c.class == class && c.horizon == horizon)
    }

    pub fn horizons(&self) -> Vec<Horizon> {
        let mut h: Vec<Horizon> = self.cells.iter().map(|c| c.horizon).collect();
        h.sort_unstable();
        h.dedup();
        h
    }

    /// Structural checks: known format, populated cells satisfying the metric
    /// identities, and all three model rows for every class group present.
    pub fn validate(&self) -> Result<()> {
        if self.format != REPORT_FORMAT || self.version != REPORT_VERSION {
            return Err(Error::Validation(format!(
                "unsupported report {} v{}",
                self.format, self.version
            )));
        }
        if self.cells.is_empty() {
            return Err(Error::Validation("report has no metric cells".into()));
        }
        for c in &self.cells {
            if c.n == 0 {
                return Err(Error::Validation(format!("cell {}/{}/{} has n = 0", c.model, c.class, c.horizon)));
            }
            if !(c.mse.is_finite() && c.rmse.is_finite() && c.mae.is_finite()) {
                return Err(Error::Validation(format!("cell {}/{}/{} is not finite", c.model, c.class, c.horizon)));
            }
        }
        for h in self.horizons() {
            for g in ClassGroup::ALL {
                let present: Vec<Model> = Model::ALL.into_iter().filter(|&m| self.cell(m, g, h).is_some()).collect();
                if !present.is_empty() && present.len() != Model::ALL.len() {
                    let missing: Vec<&str> = Model::ALL
                        .into_iter()
                        .filter(|m| !present.contains(m))
                        .map(Model::as_str)
                        .collect();
                    return Err(Error::Validation(format!(
                        "horizon {h}, class {g}: missing model row(s) {}",
                        missing.join(", ")
                    )));
                }
            }
        }
        Ok(())
    }

    /// Aligned MSE/MAE tables: stable group first, then volatile, then all.
    pub fn render_text(&self) -> Result<String> {
        self.validate()?;
        let width = Model::ALL.iter().map(|m| m.label().len()).max().unwrap_or(0);
        let mut out = String::new();
        for h in self.horizons() {
            for g in ClassGroup::ALL {
                let rows: Vec<&MetricCell> = Model::ALL.iter().filter_map(|&m| self.cell(m, g, h)).collect();
                if rows.is_empty() {
                    continue;
                }
                let title = match g {
                    ClassGroup::Stable => "Non-volatile companies",
                    ClassGroup::Volatile => "Volatile companies",
                    ClassGroup::All => "All companies",
                };
                let _ = writeln!(out, "{title} (horizon {h}, n = {})", rows[0].n);
                let _ = writeln!(out, "{:<width$}  {:>10}  {:>10}", "Model", "MSE", "MAE");
                for c in rows {
                    let _ = writeln!(out, "{:<width$}  {:>10.4}  {:>10.4}", c.model.label(), c.mse, c.mae);
                }
                out.push('\n');
            }
        }
        Ok(out)
    }

    /// Same rows and formatting as `metrics.csv`.
    pub fn render_csv(&self) -> Result<String> {
        self.validate()?;
        let mut out = METRICS_HEADER.join(",");
        out.push('\n');
        for c in &self.cells {
            let _ = writeln!(out, "{},{},{},{},{},{},{}", c.model, c.class, c.horizon, c.n, c.mse, c.rmse, c.mae);
        }
        Ok(out)
    }
}

pub const METRICS_HEADER: [&str; 7] = ["model", "class", "horizon", "n", "mse", "rmse", "mae"];
pub const PREDICTIONS_HEADER: [&str; 8] = ["company_id", "fold", "day", "actual", "y_rnn", "y_lm", "y_moe", "class"];

fn write_rows(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let to_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Validation(format!("csv: {other:?}")),
    };
    let mut w = csv::Writer::from_path(path).map_err(to_err)?;
    w.write_record(header).map_err(to_err)?;
    for row in rows {
        w.write_record(&row).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_metrics_csv(path: &Path, cells: &[MetricCell]) -> Result<()> {
    write_rows(
        path,
        &METRICS_HEADER,
        cells.iter().map(|c| {
            vec![
                c.model.to_string(),
                c.class.to_string(),
                c.horizon.to_string(),
                c.n.to_string(),
                c.mse.to_string(),
                c.rmse.to_string(),
                c.mae.to_string(),
            ]
        }),
    )
}

pub fn write_predictions_csv(path: &Path, records: &[PredictionRecord]) -> Result<()> {
    write_rows(
        path,
        &PREDICTIONS_HEADER,
        records.iter().map(|r| {
            vec![
                r.company_id.to_string(),
                r.fold.to_string(),
                r.day.to_string(),
                r.actual.to_string(),
                r.y_rnn.to_string(),
                r.y_lm.to_string(),
                r.y_moe.to_string(),
                r.class.to_string(),
            ]
        }),
    )
}
