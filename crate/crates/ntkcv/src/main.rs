//! Command line front end: train a single run, scan an architecture
//! grid, take a one-shot kernel measurement, classify a trajectory, or
//! plot emitted series.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ntkcv::error::{Error, Result};
use ntkcv::harness::{
    classify_regime, resolve_dataset, run_architecture_scan, run_training_experiment,
    DEFAULT_SMOOTHING_WINDOW,
};
use ntkcv::io::config::{config_hash, parse_config, ParsedConfig};
use ntkcv::io::csv::{emit_trajectory_csv, parse_trajectory_csv};
use ntkcv::io::json::emit_scan_json;
use ntkcv::io::manifest::RunManifest;
use ntkcv::io::plot::{write_lineplot, PlotOptions, Series};
use ntkcv::nn::build_network;
use ntkcv::ntk;
use ntkcv::spectral::Split;

#[derive(Parser)]
#[command(name = "ntkcv", version, about = "Tangent-kernel collective-variable diagnostics for small networks")]
struct Cli {
    /// Worker threads for grid scans (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the config's top-level seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Train one network, measuring collective variables on a cadence.
    Train(RunArgs),
    /// Train every cell of the width/depth/activation grid in the config.
    Scan(RunArgs),
    /// Measure the kernel of a freshly initialized network, no training.
    Ntk(RunArgs),
    /// Classify the learning regime of an emitted trajectory CSV.
    Analyze {
        /// trajectory.csv produced by `train`.
        #[arg(long)]
        input: PathBuf,
        /// Smoothing window for the entropy series.
        #[arg(long, default_value_t = DEFAULT_SMOOTHING_WINDOW)]
        window: usize,
        /// Which split's series to classify.
        #[arg(long, default_value = "train")]
        split: String,
    },
    /// Render entropy and trace line plots from a trajectory CSV.
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Log-scale the y axis.
        #[arg(long)]
        log_y: bool,
    },
}

fn load_config(path: &PathBuf, seed_override: Option<u64>) -> Result<ParsedConfig> {
    let text = std::fs::read_to_string(path)?;
    let mut parsed = parse_config(&text)?;
    if let Some(seed) = seed_override {
        parsed.experiment.seed = seed;
    }
    Ok(parsed)
}

fn series_from_records(
    records: &[ntkcv::harness::MeasurementRecord],
    split: Split,
    field: fn(&ntkcv::harness::MeasurementRecord) -> f64,
) -> Vec<(f64, f64)> {
    records
        .iter()
        .filter(|r| r.split == split)
        .map(|r| (r.epoch as f64, field(r)))
        .collect()
}

fn cmd_train(args: &RunArgs) -> Result<()> {
    let parsed = load_config(&args.config, args.seed)?;
    let hash = config_hash(&parsed);
    std::fs::create_dir_all(&args.out)?;
    let mut manifest = RunManifest::new(&hash, std::env::args().collect());
    let record = run_training_experiment(&parsed.experiment)?;
    emit_trajectory_csv(&record, &args.out.join("trajectory.csv"))?;
    manifest.record_output("trajectory.csv");
    manifest.finish();
    manifest.write(&args.out)?;
    if record.diverged {
        eprintln!("warning: training diverged; trajectory is partial");
    }
    let last = record.records.iter().filter(|r| r.split == Split::Train).last();
    if let Some(r) = last {
        println!(
            "trained {} epochs: final train loss {:.6e}, entropy {:.6} nats, trace {:.6e}",
            parsed.experiment.epochs, r.loss, r.cv.entropy, r.cv.trace
        );
    }
    println!("wrote {}", args.out.join("trajectory.csv").display());
    Ok(())
}

fn cmd_scan(args: &RunArgs) -> Result<()> {
    let parsed = load_config(&args.config, args.seed)?;
    let grid = parsed
        .scan
        .clone()
        .ok_or_else(|| Error::Config("config has no [scan] section".into()))?;
    let hash = config_hash(&parsed);
    std::fs::create_dir_all(&args.out)?;
    let mut manifest = RunManifest::new(&hash, std::env::args().collect());
    let scan = run_architecture_scan(&grid, &parsed.experiment)?;
    emit_scan_json(&scan, &hash, &args.out.join("scan.json"))?;
    manifest.record_output("scan.json");
    for cell in &scan.cells {
        if let Some(trajectory) = &cell.trajectory {
            let act = format!("{:?}", cell.activation).to_lowercase();
            let name = format!("cell_w{}_d{}_{}.csv", cell.width, cell.depth, act);
            emit_trajectory_csv(trajectory, &args.out.join(&name))?;
            manifest.record_output(&name);
        }
    }
    manifest.finish();
    manifest.write(&args.out)?;
    let failures = scan.cells.iter().filter(|c| c.error.is_some()).count();
    println!(
        "scanned {} cells ({} failed); wrote {}",
        scan.cells.len(),
        failures,
        args.out.join("scan.json").display()
    );
    Ok(())
}

fn cmd_ntk(args: &RunArgs) -> Result<()> {
    let parsed = load_config(&args.config, args.seed)?;
    let cfg = &parsed.experiment;
    let (train, _) = resolve_dataset(&cfg.data, cfg.network.kind)?;
    let pool_size = cfg.measurement.pool_size.min(train.len());
    let pool = ntkcv::data::subset(
        &train,
        pool_size,
        ntkcv::harness::derive_seed(cfg.seed, &[100]),
    )?;
    let network = build_network(&cfg.network, cfg.seed)?;
    let refs = pool.input_refs();
    let kernel = ntk::compute_ntk(&network, &refs)?;
    let cv = ntk::collective_variables(&kernel, Split::Train, 0)?;
    println!(
        "kernel over {} points: entropy {:.6} nats, trace {:.6e} (max {:.6} nats for this size)",
        cv.n_points,
        cv.entropy,
        cv.trace,
        (cv.n_points as f64).ln()
    );
    Ok(())
}

fn cmd_analyze(input: &PathBuf, window: usize, split: &str) -> Result<()> {
    let split = match split {
        "train" => Split::Train,
        "test" => Split::Test,
        other => return Err(Error::Config(format!("unknown split `{other}`"))),
    };
    let text = std::fs::read_to_string(input)?;
    let records = parse_trajectory_csv(&text)?;
    let series: Vec<(usize, f64)> = records
        .iter()
        .filter(|r| r.split == split)
        .map(|r| (r.epoch, r.cv.entropy))
        .collect();
    let label = classify_regime(&series, window)?;
    match label.change_point {
        Some(cp) => println!("regime: {:?} (change point at epoch {cp})", label.kind),
        None => println!("regime: {:?}", label.kind),
    }
    Ok(())
}

fn cmd_plot(input: &PathBuf, out: &PathBuf, log_y: bool) -> Result<()> {
    let text = std::fs::read_to_string(input)?;
    let records = parse_trajectory_csv(&text)?;
    std::fs::create_dir_all(out)?;
    let opts = PlotOptions { log_x: false, log_y };
    let mut wrote = Vec::new();
    for (name, title, field) in [
        ("entropy.svg", "Spectral entropy", (|r| r.cv.entropy) as fn(&ntkcv::harness::MeasurementRecord) -> f64),
        ("trace.svg", "Kernel trace", |r| r.cv.trace),
        ("loss.svg", "Loss", |r| r.loss),
    ] {
        let mut series = Vec::new();
        for split in [Split::Train, Split::Test] {
            let pts = series_from_records(&records, split, field);
            if !pts.is_empty() {
                series.push(Series {
                    label: split.to_string(),
                    points: pts,
                });
            }
        }
        if series.is_empty() {
            continue;
        }
        let path = out.join(name);
        write_lineplot(&path, title, "epoch", title, &series, opts)?;
        wrote.push(path.display().to_string());
    }
    if wrote.is_empty() {
        return Err(Error::Config("no data rows to plot".into()));
    }
    println!("wrote {}", wrote.join(", "));
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(workers) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    }
    match &cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Ntk(args) => cmd_ntk(args),
        Command::Analyze { input, window, split } => cmd_analyze(input, *window, split),
        Command::Plot { input, out, log_y } => cmd_plot(input, out, *log_y),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
