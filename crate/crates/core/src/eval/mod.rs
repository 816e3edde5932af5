//! Walk-forward evaluation of the RNN, linear and MoE forecasters.

mod harness;
mod metrics;
mod report;
mod splits;

pub use harness::{
    run_experiment, run_experiment_with, train_fold_models, ExperimentOutput, FoldModels, PredictionRecord,
};
pub use metrics::{horizon_bucket, mae, mse, rmse, ClassGroup, Horizon, MetricCell, Model, TRADING_DAYS_PER_MONTH};
pub use report::{
    aggregate, write_metrics_csv, write_predictions_csv, FoldLinearParams, MetricsReport, Tendencies, TrainingSummary,
    REPORT_FORMAT, REPORT_VERSION,
};
pub use splits::{walk_forward_splits, FoldSpec};
