//! The harness commands. Each one is a pure function of its config, seed
//! and input files and writes only into its output directory. Wall-clock
//! measurements go to `timing.txt` and nowhere else.

use std::fs;
use std::path::{Path, PathBuf};

use mocap_core::data::{load_sequences, mix_seed, save_sequences};
use mocap_core::metrics::{paired_test, time_inference, PairedTest};
use mocap_core::model::Checkpoint;
use mocap_core::pipeline::{evaluate, make_samples};
use mocap_core::{
    train, CorruptionSpec, Dataset, DatasetProfile, EvalReport, InterpolationBaseline, LinearBaseline, Model,
    MotionSequence, Predictor, Recorrupted, Sample, TrainOptions, TrainOutcome,
};

use crate::config::{fingerprint_text, RunConfig};
use crate::error::{Failure, Outcome};
use crate::grid::{AblationGrid, SweepGrid};
use crate::split::{ids_hash, Split};

pub const CLEAN_FILE: &str = "clean.jsonl";
pub const CORRUPTED_FILE: &str = "corrupted.jsonl";
pub const STATS_FILE: &str = "stats.txt";
pub const CHECKPOINT_FILE: &str = "checkpoint.json";
pub const TRAIN_LOG_FILE: &str = "train_log.tsv";
pub const SPLIT_FILE: &str = "split.tsv";
pub const CONFIG_FILE: &str = "config.txt";
pub const REPORT_FILE: &str = "report.txt";
pub const TABLE_FILE: &str = "table.tsv";
pub const TIMING_FILE: &str = "timing.txt";
pub const SWEEP_FILE: &str = "sweep.tsv";
pub const ABLATION_FILE: &str = "ablation.tsv";
pub const BASELINES_FILE: &str = "baselines.tsv";

const STREAM_SWEEP: u64 = 0x5EE9;

fn write(dir: &Path, name: &str, text: &str) -> Outcome<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, text)?;
    Ok(path)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x}"))
}

/// Writes ground truth, observations and their stats into `dir`.
pub fn save_dataset(data: &Dataset, dir: &Path) -> Outcome<String> {
    fs::create_dir_all(dir)?;
    save_sequences(&data.clean, &dir.join(CLEAN_FILE))?;
    save_sequences(&data.corrupted, &dir.join(CORRUPTED_FILE))?;
    let stats = data.stats()?.render();
    write(dir, STATS_FILE, &stats)?;
    Ok(stats)
}

pub fn load_dataset(dir: &Path) -> Outcome<Dataset> {
    let data = Dataset {
        clean: load_sequences(&dir.join(CLEAN_FILE))?,
        corrupted: load_sequences(&dir.join(CORRUPTED_FILE))?,
    };
    data.stats()?;
    Ok(data)
}

/// The dataset in `dir`, or a fresh one from the run's profile and seed.
pub fn dataset_for(cfg: &RunConfig, dir: Option<&Path>) -> Outcome<Dataset> {
    let data = match dir {
        Some(d) => load_dataset(d)?,
        None => Dataset::generate(&cfg.profile, cfg.seed)?,
    };
    if let Some(s) = data.clean.first() {
        if s.dim() != cfg.model.input_dim {
            return Err(Failure::Core(mocap_core::Error::ShapeMismatch {
                op: "dataset",
                left: vec![cfg.model.input_dim],
                right: vec![s.dim()],
            }));
        }
    }
    Ok(data)
}

/// `generate`: clean motion for a profile plus its corrupted observation.
pub fn cmd_generate(profile: &DatasetProfile, seed: u64, out: &Path) -> Outcome<String> {
    let data = Dataset::generate(profile, seed)?;
    save_dataset(&data, out)
}

/// `corrupt`: observes existing clean sequences under `spec`.
pub fn cmd_corrupt(clean_path: &Path, spec: &CorruptionSpec, out: &Path) -> Outcome<String> {
    spec.validate()?;
    let clean = load_sequences(clean_path)?;
    save_dataset(&Dataset::recorrupt(&clean, spec)?, out)
}

/// `stats`: realized corruption levels of a dataset directory.
pub fn cmd_stats(data_dir: &Path) -> Outcome<String> {
    Ok(load_dataset(data_dir)?.stats()?.render())
}

pub fn split_for(cfg: &RunConfig, data: &Dataset) -> Outcome<Split> {
    Split::new(data.len(), cfg.split, cfg.seed)
}

fn part(data: &Dataset, idx: &[usize]) -> Outcome<Vec<Sample>> {
    Ok(make_samples(&data.select(idx))?)
}

/// Training source: the training ground truth observed afresh each epoch
/// with the run's corruption settings.
fn train_source(cfg: &RunConfig, data: &Dataset, split: &Split, spec: CorruptionSpec) -> Recorrupted {
    let clean: Vec<MotionSequence> = split.train.iter().map(|&i| data.clean[i].clone()).collect();
    Recorrupted {
        clean,
        spec: CorruptionSpec { seed: cfg.seed, ..spec },
    }
}

/// Trains the encoder on the training part, selecting on the validation part.
pub fn train_transformer(cfg: &RunConfig, data: &Dataset, split: &Split) -> Outcome<(Model, TrainOutcome)> {
    train_transformer_with(cfg, data, split, cfg.profile.corruption, &part(data, &split.val)?)
}

fn train_transformer_with(
    cfg: &RunConfig,
    data: &Dataset,
    split: &Split,
    spec: CorruptionSpec,
    val: &[Sample],
) -> Outcome<(Model, TrainOutcome)> {
    let mc = cfg.model_config();
    let mut model = Model::init(mc.clone())?;
    let source = train_source(cfg, data, split, spec);
    let outcome = train(&mut model, &source, val, &TrainOptions::from(&mc))?;
    Ok((model, outcome))
}

/// Trains the linear reference model with the encoder's objective and optimizer.
pub fn train_linear(cfg: &RunConfig, data: &Dataset, split: &Split) -> Outcome<(LinearBaseline, TrainOutcome)> {
    let mc = cfg.model_config();
    let mut lin = LinearBaseline::new(&mc, cfg.linear_radius)?;
    let source = train_source(cfg, data, split, cfg.profile.corruption);
    let outcome = train(&mut lin, &source, &part(data, &split.val)?, &TrainOptions::from(&mc))?;
    Ok((lin, outcome))
}

/// Result of `train`.
#[derive(Clone, Debug)]
pub struct Trained {
    pub model: Model,
    pub outcome: TrainOutcome,
    pub split: Split,
    pub checkpoint: PathBuf,
}

/// `train`: fits the encoder and writes the best-validation checkpoint, the
/// per-epoch log, the split manifest and the resolved config.
///
/// The checkpoint records the hash of the training ids it saw, which must
/// match the manifest's train line.
pub fn cmd_train(cfg: &RunConfig, data: &Dataset) -> Outcome<Trained> {
    cfg.validate()?;
    let split = split_for(cfg, data)?;
    let (model, outcome) = train_transformer(cfg, data, &split)?;
    let out = &cfg.out_dir;
    let train_ids: Vec<&str> = split.train.iter().map(|&i| data.clean[i].id.as_str()).collect();
    let mut ck = model.checkpoint();
    ck.meta.insert("fingerprint".into(), cfg.fingerprint());
    ck.meta.insert("best_epoch".into(), outcome.best_epoch.to_string());
    ck.meta.insert("train_ids_sha256".into(), ids_hash(&train_ids));
    fs::create_dir_all(out)?;
    let checkpoint = out.join(CHECKPOINT_FILE);
    ck.save(&checkpoint)?;
    write(out, TRAIN_LOG_FILE, &outcome.render_log())?;
    write(out, SPLIT_FILE, &split.manifest(&data.clean))?;
    write(out, CONFIG_FILE, &cfg.render())?;
    Ok(Trained {
        model,
        outcome,
        split,
        checkpoint,
    })
}

/// Which sequences `eval` scores.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalPart {
    All,
    Train,
    Val,
    Test,
}

impl std::str::FromStr for EvalPart {
    type Err = Failure;
    fn from_str(s: &str) -> Outcome<Self> {
        match s {
            "all" => Ok(Self::All),
            "train" => Ok(Self::Train),
            "val" => Ok(Self::Val),
            "test" => Ok(Self::Test),
            _ => Err(Failure::Usage(format!("split must be all, train, val or test, got {s:?}"))),
        }
    }
}

/// `eval`: reconstruction error and ROC area of a checkpoint on one part of
/// a dataset, written as `report.txt` and a one-row `table.tsv`. Inference
/// time goes to `timing.txt`.
pub fn cmd_eval(cfg: &RunConfig, checkpoint: &Path, data: &Dataset, which: EvalPart) -> Outcome<EvalReport> {
    let ck = Checkpoint::load(checkpoint)?;
    let model = Model::from_checkpoint(&ck)?;
    let idx: Vec<usize> = match which {
        EvalPart::All => (0..data.len()).collect(),
        p => {
            let s = split_for(cfg, data)?;
            match p {
                EvalPart::Train => s.train,
                EvalPart::Val => s.val,
                _ => s.test,
            }
        }
    };
    let samples = part(data, &idx)?;
    let fp = ck.meta.get("fingerprint").cloned().unwrap_or_else(|| fingerprint_text(&ck.to_json()));
    let report = evaluate(&model, &samples, &fp)?;
    let out = &cfg.out_dir;
    write(out, REPORT_FILE, &report.render())?;
    write(
        out,
        TABLE_FILE,
        &format!("method\tmse\tauc_roc\ntransformer\t{}\t{}\n", report.mse, opt(report.auc_roc)),
    )?;
    let inputs: Vec<_> = samples.iter().map(|s| s.input.clone()).collect();
    let timing = time_inference(&model, &inputs, cfg.timing_repeats)?;
    write(out, TIMING_FILE, &timing.render())?;
    Ok(report)
}

/// One sweep cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepCell {
    pub noise: f64,
    pub occlusion: f64,
    pub report: EvalReport,
}

/// Test-part ground truth observed under `(noise, occlusion)`. Every cell
/// uses the same corruption seed, so cells differ only in their levels.
pub fn sweep_samples(cfg: &RunConfig, data: &Dataset, idx: &[usize], noise: f64, occlusion: f64) -> Outcome<Vec<Sample>> {
    let clean: Vec<MotionSequence> = idx.iter().map(|&i| data.clean[i].clone()).collect();
    let spec = CorruptionSpec {
        noise_fraction: noise,
        occlusion_fraction: occlusion,
        seed: mix_seed(cfg.seed, STREAM_SWEEP, 0),
        ..cfg.profile.corruption
    };
    Ok(make_samples(&Dataset::recorrupt(&clean, &spec)?)?)
}

/// Evaluates a fixed predictor over every grid cell on the test part.
pub fn sweep_model<P: Predictor + ?Sized>(
    cfg: &RunConfig,
    data: &Dataset,
    split: &Split,
    grid: &SweepGrid,
    model: &P,
) -> Outcome<Vec<SweepCell>> {
    grid.validate()?;
    let fp = cfg.fingerprint();
    grid.cells()
        .into_iter()
        .map(|(noise, occlusion)| {
            let samples = sweep_samples(cfg, data, &split.test, noise, occlusion)?;
            Ok(SweepCell {
                noise,
                occlusion,
                report: evaluate(model, &samples, &fp)?,
            })
        })
        .collect()
}

pub fn render_sweep(cells: &[SweepCell]) -> String {
    let mut s = String::from("noise\tocclusion\tmse\tauc_roc\n");
    for c in cells {
        s.push_str(&format!("{}\t{}\t{}\t{}\n", c.noise, c.occlusion, c.report.mse, opt(c.report.auc_roc)));
    }
    s
}

/// `sweep`: robustness table over corruption levels.
///
/// By default one model (`model`, or one trained at the run's own levels)
/// is scored on the test part re-observed at every cell. With `retrain`
/// each cell trains a fresh model whose training and validation data are
/// observed at that cell's levels.
pub fn cmd_sweep(
    cfg: &RunConfig,
    data: &Dataset,
    grid: &SweepGrid,
    retrain: bool,
    model: Option<&Model>,
) -> Outcome<Vec<SweepCell>> {
    cfg.validate()?;
    grid.validate()?;
    let split = split_for(cfg, data)?;
    let cells = if retrain {
        let fp = cfg.fingerprint();
        grid.cells()
            .into_iter()
            .map(|(noise, occlusion)| {
                let spec = CorruptionSpec {
                    noise_fraction: noise,
                    occlusion_fraction: occlusion,
                    ..cfg.profile.corruption
                };
                let val = sweep_samples(cfg, data, &split.val, noise, occlusion)?;
                let (m, _) = train_transformer_with(cfg, data, &split, spec, &val)?;
                let test = sweep_samples(cfg, data, &split.test, noise, occlusion)?;
                Ok(SweepCell {
                    noise,
                    occlusion,
                    report: evaluate(&m, &test, &fp)?,
                })
            })
            .collect::<Outcome<Vec<_>>>()?
    } else {
        match model {
            Some(m) => sweep_model(cfg, data, &split, grid, m)?,
            None => {
                let (m, _) = train_transformer(cfg, data, &split)?;
                sweep_model(cfg, data, &split, grid, &m)?
            }
        }
    };
    write(&cfg.out_dir, SWEEP_FILE, &render_sweep(&cells))?;
    Ok(cells)
}

/// One trained ablation configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct AblationResult {
    pub name: String,
    pub layers: usize,
    pub heads: usize,
    pub embed: usize,
    pub learning_rate: f64,
    pub fingerprint: String,
    pub report: EvalReport,
}

pub fn render_ablation(rows: &[AblationResult]) -> String {
    let mut s = String::from("configuration\tlayers\theads\tembed_dim\tlearning_rate\tmse\tauc_roc\tfingerprint\n");
    for r in rows {
        s.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.name,
            r.layers,
            r.heads,
            r.embed,
            r.learning_rate,
            r.report.mse,
            opt(r.report.auc_roc),
            r.fingerprint
        ));
    }
    s
}

/// `ablate`: trains every grid row with the run's data and schedule and
/// scores it on the test part.
pub fn cmd_ablate(cfg: &RunConfig, data: &Dataset, grid: &AblationGrid) -> Outcome<Vec<AblationResult>> {
    cfg.validate()?;
    grid.validate()?;
    let split = split_for(cfg, data)?;
    let test = part(data, &split.test)?;
    let rows = grid
        .rows()
        .into_iter()
        .map(|row| {
            let variant = RunConfig {
                model: row.apply(&cfg.model),
                ..cfg.clone()
            };
            variant.validate()?;
            let (m, _) = train_transformer(&variant, data, &split)?;
            let fingerprint = variant.fingerprint();
            Ok(AblationResult {
                name: row.name.to_string(),
                layers: row.layers,
                heads: row.heads,
                embed: row.embed,
                learning_rate: row.lr,
                report: evaluate(&m, &test, &fingerprint)?,
                fingerprint,
            })
        })
        .collect::<Outcome<Vec<_>>>()?;
    write(&cfg.out_dir, ABLATION_FILE, &render_ablation(&rows))?;
    Ok(rows)
}

/// One method in the baseline comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodResult {
    pub method: &'static str,
    pub report: EvalReport,
    /// Paired test of the encoder's per-sequence errors against this
    /// method's; `None` for the encoder itself.
    pub versus_transformer: Option<PairedTest>,
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub methods: Vec<MethodResult>,
    pub model: Model,
    pub split: Split,
}

impl Comparison {
    pub fn mse(&self, method: &str) -> f64 {
        self.methods.iter().find(|m| m.method == method).expect("known method").report.mse
    }

    pub fn report(&self, method: &str) -> &EvalReport {
        &self.methods.iter().find(|m| m.method == method).expect("known method").report
    }
}

pub fn render_comparison(methods: &[MethodResult]) -> String {
    let mut s = String::from("method\tmse\tauc_roc\tt_vs_transformer\tp_vs_transformer\n");
    for m in methods {
        let (t, p) = match m.versus_transformer {
            None => ("n/a".to_string(), "n/a".to_string()),
            Some(PairedTest::Tested { t, p_value, .. }) => (format!("{t}"), format!("{p_value}")),
            Some(PairedTest::Degenerate { .. }) => ("degenerate".to_string(), "degenerate".to_string()),
        };
        s.push_str(&format!("{}\t{}\t{}\t{t}\t{p}\n", m.method, m.report.mse, opt(m.report.auc_roc)));
    }
    s
}

/// `baselines`: interpolation alone, the linear model and the encoder on
/// the test part, with paired tests of the encoder against each.
pub fn cmd_baselines(cfg: &RunConfig, data: &Dataset) -> Outcome<Comparison> {
    cfg.validate()?;
    let split = split_for(cfg, data)?;
    let test = part(data, &split.test)?;
    let fp = cfg.fingerprint();
    let (model, _) = train_transformer(cfg, data, &split)?;
    let (linear, _) = train_linear(cfg, data, &split)?;
    let tf = evaluate(&model, &test, &fp)?;
    let interp = evaluate(&InterpolationBaseline, &test, &fp)?;
    let lin = evaluate(&linear, &test, &fp)?;
    let versus = |other: &EvalReport| paired_test(&tf.per_sequence_errors, &other.per_sequence_errors);
    let methods = vec![
        MethodResult {
            method: "interpolation",
            versus_transformer: Some(versus(&interp)?),
            report: interp,
        },
        MethodResult {
            method: "linear",
            versus_transformer: Some(versus(&lin)?),
            report: lin,
        },
        MethodResult {
            method: "transformer",
            versus_transformer: None,
            report: tf,
        },
    ];
    write(&cfg.out_dir, BASELINES_FILE, &render_comparison(&methods))?;
    Ok(Comparison { methods, model, split })
}
