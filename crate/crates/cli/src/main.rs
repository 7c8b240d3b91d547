use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use harness::{
    cmd_ablate, cmd_baselines, cmd_corrupt, cmd_eval, cmd_generate, cmd_stats, cmd_sweep, cmd_train, dataset_for,
    render_ablation, render_comparison, render_sweep, AblationGrid, EvalPart, Failure, Outcome, RunConfig, Scale,
    SweepGrid,
};
use mocap_core::{CorruptionSpec, Model};

/// Motion-capture denoising, imputation and anomaly scoring experiments.
///
/// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
#[derive(Parser, Debug)]
#[command(name = "mocap", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// `key = value` run configuration, applied on top of the scale preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Built-in dataset profile, e.g. stroke-desk.
    #[arg(long, global = true)]
    profile: Option<String>,
    #[arg(long, global = true)]
    epochs: Option<usize>,
    /// Workstation-sized model preset (the default).
    #[arg(long, global = true, conflicts_with = "paper")]
    desk: bool,
    /// Full-size model preset: 6 layers, 8 heads, width 128.
    #[arg(long, global = true)]
    paper: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate clean and corrupted sequences for a profile.
    Generate,
    /// Observe existing clean sequences under new corruption levels.
    Corrupt {
        #[arg(long)]
        clean: PathBuf,
        #[arg(long)]
        noise: Option<f64>,
        #[arg(long)]
        occlusion: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        anomaly: Option<f64>,
    },
    /// Train the encoder and write its best-validation checkpoint.
    Train {
        /// Dataset directory; generated from profile and seed when absent.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Score a checkpoint on a dataset.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: Option<PathBuf>,
        /// all, train, val or test.
        #[arg(long, default_value = "test")]
        split: String,
    },
    /// Robustness table over noise and occlusion levels.
    Sweep {
        #[arg(long)]
        data: Option<PathBuf>,
        /// Score this checkpoint instead of training one.
        #[arg(long, conflicts_with = "retrain")]
        checkpoint: Option<PathBuf>,
        /// Train a fresh model per cell.
        #[arg(long)]
        retrain: bool,
        /// Comma-separated noise fractions.
        #[arg(long, value_delimiter = ',')]
        noise: Vec<f64>,
        /// Comma-separated occlusion fractions.
        #[arg(long, value_delimiter = ',')]
        occlusion: Vec<f64>,
    },
    /// Train the ablation configurations.
    Ablate {
        #[arg(long)]
        data: Option<PathBuf>,
        /// desk or paper option grid.
        #[arg(long, default_value = "desk")]
        grid: String,
    },
    /// Compare interpolation, the linear model and the encoder.
    Baselines {
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Realized corruption levels of a dataset directory.
    Stats {
        #[arg(long)]
        data: PathBuf,
    },
}

/// Preset, then config file, then flags.
fn resolve(common: &Common) -> Outcome<RunConfig> {
    let scale = if common.paper { Scale::Paper } else { Scale::Desk };
    let mut cfg = RunConfig::new(scale, "stroke-desk")?;
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    if let Some(p) = &common.profile {
        cfg.set_profile(p)?;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(e) = common.epochs {
        cfg.model.epochs = e;
    }
    if let Some(o) = &common.out {
        cfg.out_dir = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Outcome<String> {
    let cfg = resolve(&cli.common)?;
    match cli.command {
        Command::Generate => cmd_generate(&cfg.profile, cfg.seed, &cfg.out_dir),
        Command::Corrupt {
            clean,
            noise,
            occlusion,
            sigma,
            anomaly,
        } => {
            let base = cfg.profile.corruption;
            let spec = CorruptionSpec {
                noise_fraction: noise.unwrap_or(base.noise_fraction),
                occlusion_fraction: occlusion.unwrap_or(base.occlusion_fraction),
                noise_sigma: sigma.unwrap_or(base.noise_sigma),
                anomaly_fraction: anomaly.unwrap_or(base.anomaly_fraction),
                seed: cfg.seed,
            };
            spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            cmd_corrupt(&clean, &spec, &cfg.out_dir)
        }
        Command::Train { data } => {
            let data = dataset_for(&cfg, data.as_deref())?;
            let t = cmd_train(&cfg, &data)?;
            Ok(format!(
                "checkpoint={}\nbest_epoch={}\nbest_val_mse={}\n",
                t.checkpoint.display(),
                t.outcome.best_epoch,
                t.outcome.best_val_mse.map_or("n/a".into(), |v| v.to_string())
            ))
        }
        Command::Eval { checkpoint, data, split } => {
            let which: EvalPart = split.parse()?;
            let data = dataset_for(&cfg, data.as_deref())?;
            Ok(cmd_eval(&cfg, &checkpoint, &data, which)?.render())
        }
        Command::Sweep {
            data,
            checkpoint,
            retrain,
            noise,
            occlusion,
        } => {
            let mut grid = SweepGrid::default();
            if !noise.is_empty() {
                grid.noise = noise;
            }
            if !occlusion.is_empty() {
                grid.occlusion = occlusion;
            }
            let data = dataset_for(&cfg, data.as_deref())?;
            let model = checkpoint.map(|p| Model::load(&p)).transpose()?;
            Ok(render_sweep(&cmd_sweep(&cfg, &data, &grid, retrain, model.as_ref())?))
        }
        Command::Ablate { data, grid } => {
            let grid = match grid.as_str() {
                "desk" => AblationGrid::desk(),
                "paper" => AblationGrid::paper(),
                g => return Err(Failure::Usage(format!("grid must be desk or paper, got {g:?}"))),
            };
            let data = dataset_for(&cfg, data.as_deref())?;
            Ok(render_ablation(&cmd_ablate(&cfg, &data, &grid)?))
        }
        Command::Baselines { data } => {
            let data = dataset_for(&cfg, data.as_deref())?;
            Ok(render_comparison(&cmd_baselines(&cfg, &data)?.methods))
        }
        Command::Stats { data } => cmd_stats(&data),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("mocap: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
