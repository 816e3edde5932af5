//! Runs the default experiment for one seed and prints the tables.

use std::time::Instant;

use volmoe::eval::run_experiment;
use volmoe::simdata::generate_dataset;
use volmoe::ExperimentConfig;

fn main() -> volmoe::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(42);
    let mut cfg = ExperimentConfig::default();
    cfg.seeds.master_seed = seed;
    let ds = generate_dataset(&cfg.dataset, seed)?;
    let start = Instant::now();
    let out = run_experiment(&ds, &cfg)?;
    println!("{}", out.report.render_text()?);
    for t in &out.report.training {
        println!(
            "fold {} {}: {} epochs, best {} (holdout mse {:.5})",
            t.fold, t.role, t.epochs_run, t.best_epoch, t.best_monitor_loss
        );
    }
    println!("{:?}", out.report.tendencies);
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
