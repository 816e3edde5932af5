//! Sequential vs rayon execution of the data-parallel stages. Build without
//! default features to see the `parallel` policy fall back to sequential.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use volmoe::lstm::{make_windows, train_with, TrainConfig, WindowedSample};
use volmoe::numkit::{RngStream, Standardizer};
use volmoe::simdata::{generate_dataset, generate_dataset_with, DatasetConfig};
use volmoe::{eval, Execution, ExperimentConfig};

const POLICIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn generation(c: &mut Criterion) {
    let cfg = DatasetConfig::default();
    let mut g = c.benchmark_group("generate_dataset");
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| generate_dataset_with(black_box(&cfg), 42, exec).unwrap())
        });
    }
    g.finish();
}

fn windows(n_companies: usize) -> Vec<WindowedSample> {
    let ds = generate_dataset(
        &DatasetConfig {
            n_companies,
            ..DatasetConfig::default()
        },
        42,
    )
    .unwrap();
    ds.series
        .iter()
        .flat_map(|s| {
            let st = Standardizer::fit(s.days(1, 80)).unwrap();
            make_windows(s, 1, 80, &st, 10).unwrap().samples
        })
        .collect()
}

fn training_epoch(c: &mut Criterion) {
    let samples = windows(20);
    let cfg = TrainConfig {
        epochs: 1,
        ..TrainConfig::default()
    };
    let mut g = c.benchmark_group("train_one_epoch");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| train_with(black_box(&samples), &cfg, &mut RngStream::new(7, 0), exec).unwrap())
        });
    }
    g.finish();
}

fn small_experiment(c: &mut Criterion) {
    let mut cfg = ExperimentConfig::default();
    cfg.dataset.n_companies = 20;
    cfg.dataset.days = 60;
    cfg.lstm.hidden = 16;
    cfg.lstm.epochs = 3;
    cfg.walkforward.init_train = 40;
    cfg.walkforward.val_len = 10;
    cfg.walkforward.step = 10;
    let ds = generate_dataset(&cfg.dataset, 42).unwrap();
    let mut g = c.benchmark_group("run_experiment");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| eval::run_experiment_with(black_box(&ds), &cfg, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, generation, training_epoch, small_experiment);
criterion_main!(benches);
