//! `volmoe` command-line front end: generate a synthetic market, run the
//! walk-forward evaluation, and print the comparison tables.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use volmoe::eval::{run_experiment, write_metrics_csv, write_predictions_csv, MetricsReport};
use volmoe::lstm::save_checkpoint;
use volmoe::moe::GateWeights;
use volmoe::simdata::{export_csv, generate_dataset, import_csv, VolatilityClass};
use volmoe::ExperimentConfig;

#[derive(Parser)]
#[command(name = "volmoe", version, about = "Volatility-gated LSTM + linear forecasting experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic price dataset as long-format CSV.
    Generate {
        /// Experiment config (JSON). Defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides seeds.master_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV path; falls back to output.dataset_csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train and evaluate the RNN, linear and MoE forecasters walk-forward.
    Evaluate {
        /// Dataset CSV written by `generate`.
        dataset: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; falls back to output.out_dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Force one gate for both regimes, as "w_rnn,w_lm".
        #[arg(long, value_name = "W_RNN,W_LM")]
        gate_override: Option<String>,
    },
    /// Print the comparison tables from a report.json.
    Report {
        report: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = match path {
        Some(p) => ExperimentConfig::load(p).with_context(|| format!("loading config {}", p.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seeds.master_seed = s;
    }
    Ok(cfg)
}

fn parse_gate(s: &str) -> Result<GateWeights> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        bail!("--gate-override expects \"w_rnn,w_lm\", got {s:?}");
    }
    let w_rnn: f64 = parts[0].parse().with_context(|| format!("bad w_rnn {:?}", parts[0]))?;
    let w_lm: f64 = parts[1].parse().with_context(|| format!("bad w_lm {:?}", parts[1]))?;
    Ok(GateWeights::new(w_rnn, w_lm)?)
}

fn pick_path(flag: Option<PathBuf>, configured: Option<&String>, what: &str) -> Result<PathBuf> {
    flag.or_else(|| configured.map(PathBuf::from))
        .with_context(|| format!("no {what} given; pass --out or set it in the config's output block"))
}

fn generate(config: Option<PathBuf>, seed: Option<u64>, out: Option<PathBuf>) -> Result<()> {
    let cfg = load_config(config.as_deref(), seed)?;
    let out = pick_path(out, cfg.output.dataset_csv.as_ref(), "dataset path")?;
    let ds = generate_dataset(&cfg.dataset, cfg.seeds.master_seed)?;
    export_csv(&ds, &out).with_context(|| format!("writing {}", out.display()))?;
    println!(
        "wrote {} companies x {} days to {} ({} stable, {} volatile)",
        ds.len(),
        ds.days(),
        out.display(),
        ds.count(VolatilityClass::Stable),
        ds.count(VolatilityClass::Volatile)
    );
    Ok(())
}

fn evaluate(
    dataset: PathBuf,
    config: Option<PathBuf>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    gate_override: Option<String>,
) -> Result<()> {
    let mut cfg = load_config(config.as_deref(), seed)?;
    if let Some(g) = gate_override {
        cfg = cfg.with_gate_override(parse_gate(&g)?);
    }
    let out = pick_path(out, cfg.output.out_dir.as_ref(), "output directory")?;
    let ds = import_csv(&dataset, &cfg.dataset, cfg.seeds.master_seed)
        .with_context(|| format!("reading dataset {}", dataset.display()))?;
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;

    let result = run_experiment(&ds, &cfg)?;
    let train_cfg = cfg.lstm.train_config();
    for m in &result.models {
        let k = m.fold.index;
        save_checkpoint(&out.join(format!("rnn_fold{k}.json")), &m.rnn, m.window, &train_cfg)?;
        if let Some((p, _)) = &m.volatile_rnn {
            save_checkpoint(&out.join(format!("volatile_rnn_fold{k}.json")), p, m.window, &train_cfg)?;
        }
    }
    write_predictions_csv(&out.join("predictions.csv"), &result.records)?;
    write_metrics_csv(&out.join("metrics.csv"), &result.report.cells)?;
    // report.json goes last: its presence marks a complete run
    result.report.save(&out.join("report.json"))?;

    for w in &result.report.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "{} folds, {} predictions written to {}",
        result.report.folds.len(),
        result.records.len(),
        out.display()
    );
    Ok(())
}

fn report(path: PathBuf, format: Format) -> Result<()> {
    let report = MetricsReport::load(&path).with_context(|| format!("reading report {}", path.display()))?;
    let text = match format {
        Format::Text => report.render_text()?,
        Format::Csv => report.render_csv()?,
    };
    print!("{text}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate { config, seed, out } => generate(config, seed, out),
        Command::Evaluate {
            dataset,
            config,
            seed,
            out,
            gate_override,
        } => evaluate(dataset, config, seed, out, gate_override),
        Command::Report { report: path, format } => report(path, format),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
