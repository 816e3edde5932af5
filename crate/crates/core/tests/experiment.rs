use volmoe::config::ExpertPool;
use volmoe::eval::{run_experiment, run_experiment_with, walk_forward_splits, ClassGroup, Model};
use volmoe::moe::GateWeights;
use volmoe::simdata::{generate_dataset, VolatilityClass};
use volmoe::{Execution, ExperimentConfig};

/// Small enough to train in well under a second per fold.
fn tiny() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.dataset.n_companies = 10;
    cfg.dataset.days = 60;
    cfg.lstm.window = 5;
    cfg.lstm.hidden = 6;
    cfg.lstm.epochs = 4;
    cfg.lstm.batch = 16;
    cfg.walkforward.init_train = 30;
    cfg.walkforward.val_len = 10;
    cfg.walkforward.step = 10;
    cfg
}

#[test]
fn one_record_per_company_and_validation_day() {
    let cfg = tiny();
    let ds = generate_dataset(&cfg.dataset, 1).unwrap();
    let out = run_experiment(&ds, &cfg).unwrap();
    // folds end training on days 30, 40, 50
    assert_eq!(out.report.folds.len(), 3);
    assert_eq!(out.records.len(), 10 * 3 * 10);
    assert_eq!(out.models.len(), 3);
    assert_eq!(out.report.training.len(), 3);
    assert_eq!(out.report.linear_params.len(), 3);
    out.report.validate().unwrap();
}

#[test]
fn sequential_and_parallel_runs_are_identical() {
    let cfg = tiny();
    let ds = generate_dataset(&cfg.dataset, 2).unwrap();
    let a = run_experiment_with(&ds, &cfg, Execution::Sequential).unwrap();
    let b = run_experiment_with(&ds, &cfg, Execution::Parallel).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.report, b.report);
}

#[test]
fn all_group_pools_stable_and_volatile() {
    let cfg = tiny();
    let ds = generate_dataset(&cfg.dataset, 3).unwrap();
    let out = run_experiment(&ds, &cfg).unwrap();
    let r = &out.report;
    assert!(r.stable_companies > 0 && r.volatile_companies > 0);
    for h in r.horizons() {
        for m in [Model::Rnn, Model::Linear, Model::Moe] {
            let s = r.cell(m, ClassGroup::Stable, h).unwrap();
            let v = r.cell(m, ClassGroup::Volatile, h).unwrap();
            let all = r.cell(m, ClassGroup::All, h).unwrap();
            assert_eq!(all.n, s.n + v.n);
            let pooled = (s.mse * s.n as f64 + v.mse * v.n as f64) / all.n as f64;
            assert!((pooled - all.mse).abs() <= 1e-9 * all.mse, "{pooled} vs {}", all.mse);
        }
    }
}

#[test]
fn degenerate_gates_reproduce_single_experts() {
    let cfg = tiny();
    let ds = generate_dataset(&cfg.dataset, 4).unwrap();
    let rnn = run_experiment(&ds, &cfg.clone().with_gate_override(GateWeights::rnn_only())).unwrap();
    assert!(rnn.records.iter().all(|r| r.y_moe.to_bits() == r.y_rnn.to_bits()));
    let lin = run_experiment(&ds, &cfg.with_gate_override(GateWeights::linear_only())).unwrap();
    assert!(lin.records.iter().all(|r| r.y_moe.to_bits() == r.y_lm.to_bits()));
}

#[test]
fn volatile_pool_trains_a_second_network() {
    let mut cfg = tiny();
    cfg.lstm.moe_expert_pool = ExpertPool::Volatile;
    let ds = generate_dataset(&cfg.dataset, 5).unwrap();
    assert!(ds.count(VolatilityClass::Volatile) > 0);
    let out = run_experiment(&ds, &cfg).unwrap();
    assert!(out.models.iter().all(|m| m.volatile_rnn.is_some()));
    assert_eq!(out.report.training.len(), 2 * out.models.len());
    assert!(out.report.warnings.is_empty());
}

#[test]
fn no_volatile_companies_falls_back_to_linear_with_warning() {
    let mut cfg = tiny();
    cfg.lstm.moe_expert_pool = ExpertPool::Volatile;
    cfg.dataset.sigma_max = 0.04;
    let ds = generate_dataset(&cfg.dataset, 6).unwrap();
    assert_eq!(ds.count(VolatilityClass::Volatile), 0);
    let out = run_experiment(&ds, &cfg).unwrap();
    assert_eq!(out.report.warnings.len(), out.models.len());
    assert!(out.records.iter().all(|r| r.y_moe.to_bits() == r.y_lm.to_bits()));
}

#[test]
fn shipped_configs_parse_and_split() {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    let shipped = ExperimentConfig::load(format!("{root}/paper.json").as_ref()).unwrap();
    assert_eq!(shipped, ExperimentConfig {
        output: shipped.output.clone(),
        ..ExperimentConfig::default()
    });
    let wf = &shipped.walkforward;
    let folds = walk_forward_splits(shipped.dataset.days, wf.init_train, wf.val_len, wf.step).unwrap();
    // 100 companies x 20 validation days = 2000 forecasts per model
    assert_eq!(folds.len() * wf.val_len * shipped.dataset.n_companies, 2000);

    let ext = ExperimentConfig::load(format!("{root}/extended.json").as_ref()).unwrap();
    let wf = &ext.walkforward;
    assert_eq!(walk_forward_splits(ext.dataset.days, wf.init_train, wf.val_len, wf.step).unwrap().len(), 6);
}

#[test]
fn run_rejects_dataset_of_wrong_length() {
    let cfg = tiny();
    let mut other = cfg.clone();
    other.dataset.days = 70;
    let ds = generate_dataset(&other.dataset, 1).unwrap();
    assert!(run_experiment(&ds, &cfg).is_err());
}
