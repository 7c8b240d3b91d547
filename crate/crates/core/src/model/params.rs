//! Parameter inventory, initialization and checkpoint files.

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::ModelConfig;
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Indices of one encoder layer's tensors in the flat parameter list.
#[derive(Clone, Debug)]
pub struct LayerSlots {
    pub wq: Vec<usize>,
    pub wk: Vec<usize>,
    pub wv: Vec<usize>,
    pub wo: Vec<usize>,
    pub bo: usize,
    pub ln1_gamma: usize,
    pub ln1_beta: usize,
    pub ffn_w1: usize,
    pub ffn_b1: usize,
    pub ffn_w2: usize,
    pub ffn_b2: usize,
    pub ln2_gamma: usize,
    pub ln2_beta: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Init {
    /// Uniform in ±sqrt(6 / (fan_in + fan_out)).
    Glorot { fan_in: usize, fan_out: usize },
    Zeros,
    Ones,
}

#[derive(Clone, Debug)]
struct Entry {
    name: String,
    shape: Vec<usize>,
    init: Init,
}

/// Names, shapes and positions of every model parameter, in a fixed order.
#[derive(Clone, Debug)]
pub struct ParamLayout {
    entries: Vec<Entry>,
    pub embed_frames: usize,
    pub embed_mask: usize,
    pub embed_bias: usize,
    pub layers: Vec<LayerSlots>,
    pub recon_w: usize,
    pub recon_b: usize,
    pub anom_w: usize,
    pub anom_b: usize,
}

impl ParamLayout {
    pub fn new(config: &ModelConfig) -> Self {
        let d = config.embed_dim;
        let dk = config.head_width();
        let h = config.num_heads;
        let dim = config.input_dim;
        let f = config.ffn_dim;
        let mut entries = Vec::new();
        let mut add = |name: String, shape: Vec<usize>, init: Init| {
            entries.push(Entry { name, shape, init });
            entries.len() - 1
        };
        let glorot = |fan_in, fan_out| Init::Glorot { fan_in, fan_out };

        // frames and mask indicator are one [x ‖ m] projection split in two
        let embed_frames = add("embed.frames".into(), vec![dim, d], glorot(2 * dim, d));
        let embed_mask = add("embed.mask".into(), vec![dim, d], glorot(2 * dim, d));
        let embed_bias = add("embed.bias".into(), vec![d], Init::Zeros);

        let mut layers = Vec::with_capacity(config.num_layers);
        for l in 0..config.num_layers {
            let p = format!("layers.{l}");
            let mut heads = |kind: &str| -> Vec<usize> {
                (0..h)
                    .map(|i| add(format!("{p}.attn.{kind}.{i}"), vec![d, dk], glorot(d, h * dk)))
                    .collect()
            };
            let wq = heads("q");
            let wk = heads("k");
            let wv = heads("v");
            let wo = (0..h)
                .map(|i| add(format!("{p}.attn.o.{i}"), vec![dk, d], glorot(h * dk, d)))
                .collect();
            layers.push(LayerSlots {
                wq,
                wk,
                wv,
                wo,
                bo: add(format!("{p}.attn.o.bias"), vec![d], Init::Zeros),
                ln1_gamma: add(format!("{p}.ln1.gamma"), vec![d], Init::Ones),
                ln1_beta: add(format!("{p}.ln1.beta"), vec![d], Init::Zeros),
                ffn_w1: add(format!("{p}.ffn.w1"), vec![d, f], glorot(d, f)),
                ffn_b1: add(format!("{p}.ffn.b1"), vec![f], Init::Zeros),
                ffn_w2: add(format!("{p}.ffn.w2"), vec![f, d], glorot(f, d)),
                ffn_b2: add(format!("{p}.ffn.b2"), vec![d], Init::Zeros),
                ln2_gamma: add(format!("{p}.ln2.gamma"), vec![d], Init::Ones),
                ln2_beta: add(format!("{p}.ln2.beta"), vec![d], Init::Zeros),
            });
        }
        // a zero correction head starts the model at the interpolated input
        let recon_w = add("recon.weight".into(), vec![d, dim], Init::Zeros);
        let recon_b = add("recon.bias".into(), vec![dim], Init::Zeros);
        let anom_w = add("anomaly.weight".into(), vec![d, 1], glorot(d, 1));
        let anom_b = add("anomaly.bias".into(), vec![1], Init::Zeros);
        Self {
            entries,
            embed_frames,
            embed_mask,
            embed_bias,
            layers,
            recon_w,
            recon_b,
            anom_w,
            anom_b,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.entries[i].name
    }

    pub fn shape(&self, i: usize) -> &[usize] {
        &self.entries[i].shape
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.name.as_str())
    }

    /// Total number of scalar parameters.
    pub fn parameter_count(&self) -> usize {
        self.entries.iter().map(|e| e.shape.iter().product::<usize>()).sum()
    }

    /// Fan-scaled uniform weights, zero biases, unit layer-norm gains, and a
    /// zero reconstruction head.
    /// Deterministic in `seed`.
    pub fn init(&self, seed: u64) -> Vec<Tensor> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.entries
            .iter()
            .map(|e| match e.init {
                Init::Zeros => Tensor::zeros(&e.shape),
                Init::Ones => Tensor::full(&e.shape, 1.0),
                Init::Glorot { fan_in, fan_out } => {
                    let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
                    let n = e.shape.iter().product();
                    let data = (0..n).map(|_| rng.random_range(-a..a)).collect();
                    Tensor::new(e.shape.clone(), data).expect("layout shape")
                }
            })
            .collect()
    }

    /// Checks a parameter list against this layout.
    pub fn check(&self, params: &[Tensor]) -> Result<()> {
        if params.len() != self.entries.len() {
            return Err(Error::Config(format!(
                "expected {} parameter tensors, got {}",
                self.entries.len(),
                params.len()
            )));
        }
        for (e, p) in self.entries.iter().zip(params) {
            if p.shape() != e.shape.as_slice() {
                return Err(Error::ShapeMismatch {
                    op: "parameter",
                    left: e.shape.clone(),
                    right: p.shape().to_vec(),
                });
            }
        }
        Ok(())
    }
}

pub const CHECKPOINT_FORMAT: &str = "mocap-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedTensor {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

/// Serialized model: config, named parameter arrays, free-form metadata.
///
/// Stored as a single JSON document; floats are written with shortest
/// round-trip formatting, so save → load is bit-exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub config: ModelConfig,
    pub params: Vec<NamedTensor>,
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
}

impl Checkpoint {
    pub fn new(config: &ModelConfig, layout: &ParamLayout, params: &[Tensor]) -> Self {
        Self {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            config: config.clone(),
            params: params
                .iter()
                .enumerate()
                .map(|(i, t)| NamedTensor {
                    name: layout.name(i).to_string(),
                    shape: t.shape().to_vec(),
                    data: t.data().to_vec(),
                })
                .collect(),
            meta: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("checkpoint serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ck: Checkpoint = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        if ck.format != CHECKPOINT_FORMAT || ck.version != CHECKPOINT_VERSION {
            return Err(Error::Version {
                found: format!("{}/{}", ck.format, ck.version),
                expected: format!("{CHECKPOINT_FORMAT}/{CHECKPOINT_VERSION}"),
            });
        }
        Ok(ck)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Parameter tensors in layout order, verified against `layout`.
    pub fn tensors(&self, layout: &ParamLayout) -> Result<Vec<Tensor>> {
        let mut out = Vec::with_capacity(self.params.len());
        for (i, p) in self.params.iter().enumerate() {
            if i < layout.len() && p.name != layout.name(i) {
                return Err(Error::Config(format!(
                    "parameter {i} is named {} but layout expects {}",
                    p.name,
                    layout.name(i)
                )));
            }
            out.push(Tensor::new(p.shape.clone(), p.data.clone())?);
        }
        layout.check(&out)?;
        Ok(out)
    }
}
