//! Run configuration and its plain `key = value` file format.
//!
//! One setting per line, `#` starts a comment. Keys are applied in file
//! order, so `scale` and `profile` (which reset groups of settings) belong
//! at the top. Recognized keys:
//!
//! | key | meaning |
//! |-----|---------|
//! | `scale` | `desk` or `paper` model preset |
//! | `profile` | built-in dataset profile name |
//! | `seed` | seed for data, corruption, splits, init and shuffling |
//! | `out` | output directory |
//! | `num_layers`, `num_heads`, `embed_dim`, `ffn_dim`, `head_dim` | encoder shape |
//! | `lambda`, `mu`, `joint_weights` | objective (`joint_weights` is a comma list) |
//! | `learning_rate`, `epochs`, `batch_size` | optimizer |
//! | `positional_encoding`, `input_skip`, `input_norm` | `true` / `false` |
//! | `layer_norm_eps` | layer-norm epsilon |
//! | `num_sequences`, `sequence_length` | dataset size |
//! | `noise_fraction`, `noise_sigma`, `occlusion_fraction`, `anomaly_fraction` | corruption |
//! | `train_fraction`, `val_fraction`, `test_fraction` | split |
//! | `linear_radius` | half-width of the linear baseline's frame window |
//! | `timing_repeats` | timed passes in `eval` |

use std::path::PathBuf;
use std::str::FromStr;

use mocap_core::{DatasetProfile, ModelConfig};
use sha2::{Digest, Sha256};

use crate::error::{Failure, Outcome};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitFractions {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitFractions {
    fn default() -> Self {
        Self {
            train: 0.7,
            val: 0.15,
            test: 0.15,
        }
    }
}

/// Everything a command needs besides its input files.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub profile: DatasetProfile,
    pub split: SplitFractions,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub linear_radius: usize,
    pub timing_repeats: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Desk,
    Paper,
}

impl Scale {
    pub fn preset(self, input_dim: usize) -> ModelConfig {
        match self {
            Scale::Desk => ModelConfig::desk(input_dim),
            Scale::Paper => ModelConfig::paper(input_dim),
        }
    }
}

impl RunConfig {
    /// Desk preset on the `stroke-desk` profile.
    pub fn desk() -> Self {
        Self::new(Scale::Desk, "stroke-desk").expect("built-in profile")
    }

    pub fn new(scale: Scale, profile: &str) -> Outcome<Self> {
        let profile = builtin_profile(profile)?;
        Ok(Self {
            model: scale.preset(profile.dim()),
            profile,
            split: SplitFractions::default(),
            out_dir: PathBuf::from("out"),
            seed: 0,
            linear_radius: 0,
            timing_repeats: 20,
        })
    }

    /// Model config with the run seed applied.
    pub fn model_config(&self) -> ModelConfig {
        ModelConfig {
            seed: self.seed,
            ..self.model.clone()
        }
    }

    pub fn set_scale(&mut self, scale: Scale) {
        self.model = scale.preset(self.profile.dim());
    }

    pub fn set_profile(&mut self, name: &str) -> Outcome<()> {
        self.profile = builtin_profile(name)?;
        self.fit_model_to_profile();
        Ok(())
    }

    fn fit_model_to_profile(&mut self) {
        let dim = self.profile.dim();
        if self.model.input_dim != dim {
            self.model.input_dim = dim;
            self.model.joint_weights = vec![1.0; dim];
        }
    }

    pub fn validate(&self) -> Outcome<()> {
        self.model_config().validate()?;
        self.profile.validate()?;
        if self.model.input_dim != self.profile.dim() {
            return Err(Failure::Usage(format!(
                "model input_dim {} does not match profile width {}",
                self.model.input_dim,
                self.profile.dim()
            )));
        }
        let SplitFractions { train, val, test } = self.split;
        if [train, val, test].iter().any(|f| !(0.0..=1.0).contains(f)) || (train + val + test - 1.0).abs() > 1e-9 {
            return Err(Failure::Usage(format!(
                "split fractions must lie in [0, 1] and sum to 1, got {train}/{val}/{test}"
            )));
        }
        if train == 0.0 {
            return Err(Failure::Usage("train fraction must be positive".into()));
        }
        if self.timing_repeats < 10 {
            return Err(Failure::Usage("timing_repeats must be at least 10".into()));
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of the current settings.
    pub fn apply_text(&mut self, text: &str) -> Outcome<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("config line {}: expected key = value", n + 1)))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Failure::Usage(format!("config line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Outcome<Self> {
        let mut c = Self::desk();
        c.apply_text(text)?;
        Ok(c)
    }

    /// Sets one key; the error is a bare message.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let m = &mut self.model;
        let c = &mut self.profile.corruption;
        match key {
            "scale" => {
                let scale = match value {
                    "desk" => Scale::Desk,
                    "paper" => Scale::Paper,
                    _ => return Err(format!("scale must be desk or paper, got {value:?}")),
                };
                self.set_scale(scale);
            }
            "profile" => self.set_profile(value).map_err(|e| e.to_string())?,
            "seed" => self.seed = num(key, value)?,
            "out" => self.out_dir = PathBuf::from(value),
            "num_layers" => m.num_layers = num(key, value)?,
            "num_heads" => m.num_heads = num(key, value)?,
            "embed_dim" => m.embed_dim = num(key, value)?,
            "ffn_dim" => m.ffn_dim = num(key, value)?,
            "head_dim" => {
                m.head_dim = match value {
                    "auto" | "" => None,
                    v => Some(num(key, v)?),
                }
            }
            "lambda" => m.lambda = num(key, value)?,
            "mu" => m.mu = num(key, value)?,
            "joint_weights" => {
                m.joint_weights = value
                    .split(',')
                    .map(|v| num(key, v.trim()))
                    .collect::<Result<_, _>>()?
            }
            "learning_rate" => m.learning_rate = num(key, value)?,
            "epochs" => m.epochs = num(key, value)?,
            "batch_size" => m.batch_size = num(key, value)?,
            "positional_encoding" => m.positional_encoding = flag(key, value)?,
            "input_skip" => m.input_skip = flag(key, value)?,
            "input_norm" => m.input_norm = flag(key, value)?,
            "layer_norm_eps" => m.layer_norm_eps = num(key, value)?,
            "num_sequences" => self.profile.num_sequences = num(key, value)?,
            "sequence_length" => self.profile.sequence_length = num(key, value)?,
            "noise_fraction" => c.noise_fraction = num(key, value)?,
            "noise_sigma" => c.noise_sigma = num(key, value)?,
            "occlusion_fraction" => c.occlusion_fraction = num(key, value)?,
            "anomaly_fraction" => c.anomaly_fraction = num(key, value)?,
            "train_fraction" => self.split.train = num(key, value)?,
            "val_fraction" => self.split.val = num(key, value)?,
            "test_fraction" => self.split.test = num(key, value)?,
            "linear_radius" => self.linear_radius = num(key, value)?,
            "timing_repeats" => self.timing_repeats = num(key, value)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Canonical `key = value` text; parsing it back gives the same config.
    pub fn render(&self) -> String {
        let m = &self.model;
        let c = &self.profile.corruption;
        let weights: Vec<String> = m.joint_weights.iter().map(|w| format!("{w}")).collect();
        let mut lines = vec![
            format!("profile = {}", self.profile.name),
            format!("seed = {}", self.seed),
            format!("out = {}", self.out_dir.display()),
            format!("num_layers = {}", m.num_layers),
            format!("num_heads = {}", m.num_heads),
            format!("embed_dim = {}", m.embed_dim),
            format!("ffn_dim = {}", m.ffn_dim),
            format!("head_dim = {}", m.head_dim.map_or("auto".to_string(), |h| h.to_string())),
            format!("lambda = {}", m.lambda),
            format!("mu = {}", m.mu),
            format!("joint_weights = {}", weights.join(",")),
            format!("learning_rate = {}", m.learning_rate),
            format!("epochs = {}", m.epochs),
            format!("batch_size = {}", m.batch_size),
            format!("positional_encoding = {}", m.positional_encoding),
            format!("input_skip = {}", m.input_skip),
            format!("input_norm = {}", m.input_norm),
            format!("layer_norm_eps = {}", m.layer_norm_eps),
            format!("num_sequences = {}", self.profile.num_sequences),
            format!("sequence_length = {}", self.profile.sequence_length),
            format!("noise_fraction = {}", c.noise_fraction),
            format!("noise_sigma = {}", c.noise_sigma),
            format!("occlusion_fraction = {}", c.occlusion_fraction),
            format!("anomaly_fraction = {}", c.anomaly_fraction),
            format!("train_fraction = {}", self.split.train),
            format!("val_fraction = {}", self.split.val),
            format!("test_fraction = {}", self.split.test),
            format!("linear_radius = {}", self.linear_radius),
            format!("timing_repeats = {}", self.timing_repeats),
        ];
        lines.push(String::new());
        lines.join("\n")
    }

    /// Short hash of everything that affects results (the output directory
    /// and timing repeats are left out).
    pub fn fingerprint(&self) -> String {
        let text: String = self
            .render()
            .lines()
            .filter(|l| !l.starts_with("out =") && !l.starts_with("timing_repeats ="))
            .map(|l| format!("{l}\n"))
            .collect();
        fingerprint_text(&text)
    }
}

/// First 16 hex digits of the SHA-256 of `text`.
pub fn fingerprint_text(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))[..16].to_string()
}

pub fn builtin_profile(name: &str) -> Outcome<DatasetProfile> {
    DatasetProfile::builtin(name).map_err(|_| {
        let known: Vec<String> = DatasetProfile::paper_profiles()
            .into_iter()
            .chain(DatasetProfile::desk_profiles())
            .map(|p| p.name)
            .collect();
        Failure::Usage(format!("unknown profile {name:?} (known: {})", known.join(", ")))
    })
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("{key}: cannot parse {value:?}"))
}

fn flag(key: &str, value: &str) -> Result<bool, String> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("{key}: expected true or false, got {value:?}")),
    }
}
