use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Architecture and training hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub num_layers: usize,
    pub num_heads: usize,
    pub embed_dim: usize,
    pub ffn_dim: usize,
    /// Width of each attention head. `None` means `embed_dim / num_heads`,
    /// which then must divide evenly.
    pub head_dim: Option<usize>,
    /// Frame width D (3 × joint count).
    pub input_dim: usize,
    /// Weight of the anomaly loss in the total objective.
    pub lambda: f64,
    /// Extra reconstruction penalty on imputed cells.
    pub mu: f64,
    /// Per-coordinate reconstruction weights, length `input_dim`.
    pub joint_weights: Vec<f64>,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub positional_encoding: bool,
    /// Reconstruct as interpolated input plus a learned correction.
    pub input_skip: bool,
    /// Standardize each input coordinate over time before embedding and
    /// rescale the correction back to input units.
    #[serde(default)]
    pub input_norm: bool,
    pub layer_norm_eps: f64,
}

impl ModelConfig {
    /// 6 layers, 8 heads, width 128, lr 0.001, 100 epochs, batch 32.
    pub fn paper(input_dim: usize) -> Self {
        Self {
            num_layers: 6,
            num_heads: 8,
            embed_dim: 128,
            ffn_dim: 512,
            head_dim: None,
            input_dim,
            lambda: 1.0,
            mu: 1.0,
            joint_weights: vec![1.0; input_dim],
            learning_rate: 0.001,
            epochs: 100,
            batch_size: 32,
            seed: 0,
            positional_encoding: true,
            input_skip: true,
            input_norm: true,
            layer_norm_eps: 1e-5,
        }
    }

    /// The workstation-sized preset: 2 layers, 4 heads, width 32, 100 epochs
    /// of single-sequence steps at lr 0.002.
    pub fn desk(input_dim: usize) -> Self {
        Self {
            num_layers: 2,
            num_heads: 4,
            embed_dim: 32,
            ffn_dim: 128,
            batch_size: 1,
            learning_rate: 0.002,
            ..Self::paper(input_dim)
        }
    }

    /// Sets the embedding width and keeps the 4× feed-forward ratio.
    pub fn with_embed_dim(mut self, embed_dim: usize) -> Self {
        self.embed_dim = embed_dim;
        self.ffn_dim = 4 * embed_dim;
        self
    }

    pub fn head_width(&self) -> usize {
        self.head_dim.unwrap_or(self.embed_dim / self.num_heads.max(1))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.num_heads == 0 || self.embed_dim == 0 || self.ffn_dim == 0 || self.input_dim == 0 {
            return bad("num_heads, embed_dim, ffn_dim and input_dim must be positive".into());
        }
        if self.embed_dim % 2 != 0 {
            return bad(format!("embed_dim must be even, got {}", self.embed_dim));
        }
        match self.head_dim {
            None if self.embed_dim % self.num_heads != 0 => {
                return bad(format!(
                    "embed_dim {} is not divisible by num_heads {}",
                    self.embed_dim, self.num_heads
                ))
            }
            Some(0) => return bad("head_dim must be positive".into()),
            _ => {}
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return bad(format!("lambda must be >= 0, got {}", self.lambda));
        }
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return bad(format!("mu must be >= 0, got {}", self.mu));
        }
        if self.joint_weights.len() != self.input_dim {
            return bad(format!(
                "joint_weights has {} entries, expected {}",
                self.joint_weights.len(),
                self.input_dim
            ));
        }
        if self.joint_weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return bad("joint weights must be positive".into());
        }
        if !(self.learning_rate > 0.0) {
            return bad(format!("learning_rate must be > 0, got {}", self.learning_rate));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return bad("epochs and batch_size must be positive".into());
        }
        if !(self.layer_norm_eps > 0.0) {
            return bad("layer_norm_eps must be > 0".into());
        }
        Ok(())
    }
}
