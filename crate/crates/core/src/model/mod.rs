//! The dual-head transformer: an encoder over interpolation-filled frames
//! feeding a reconstruction head and a per-frame anomaly classifier.

mod config;
mod encoder;
mod loss;
mod params;

pub use config::ModelConfig;
pub use encoder::{
    cached_positional_encoding, classify_anomaly, embed_input, encoder_forward, encoder_layer, feed_forward,
    multi_head_attention, positional_encoding, reconstruct, EncoderLayer,
};
pub use loss::{anomaly_loss, recon_loss, total_loss, LossReport};
pub use params::{Checkpoint, LayerSlots, NamedTensor, ParamLayout, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};

use std::path::Path;

use crate::autodiff::{Tape, Var};
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Model input: filled frames and the matching imputed-cell indicator.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelInput {
    /// `T × D`, no missing values.
    pub frames: Tensor,
    /// `T × D`, 1.0 where the value was imputed.
    pub imputed: Tensor,
}

/// One supervised example.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub input: ModelInput,
    /// Clean `T × D` frames.
    pub target: Tensor,
    /// Per-frame 0/1 abnormality labels.
    pub labels: Option<Vec<f64>>,
}

/// Reconstructed frames and, when the model has a classifier, per-frame
/// abnormality scores.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub frames: Tensor,
    pub scores: Option<Vec<f64>>,
}

/// Anything that maps a filled input sequence to reconstructed frames.
pub trait Predictor {
    fn predict(&self, input: &ModelInput) -> Result<Prediction>;
}

impl Predictor for Model {
    fn predict(&self, input: &ModelInput) -> Result<Prediction> {
        Model::predict(self, input)
    }
}

/// Per-coordinate standardization over time: returns the standardized
/// frames and a `T × D` tensor holding each column's std (floored at
/// [`NORM_FLOOR`]).
pub fn column_scale(frames: &Tensor) -> Result<(Tensor, Tensor)> {
    let (len, dim) = frames.matrix_dims("column_scale")?;
    let x = frames.data();
    let mut mean = vec![0.0; dim];
    let mut std = vec![0.0; dim];
    for c in 0..dim {
        let m = (0..len).map(|t| x[t * dim + c]).sum::<f64>() / len as f64;
        let v = (0..len).map(|t| (x[t * dim + c] - m).powi(2)).sum::<f64>() / len as f64;
        mean[c] = m;
        std[c] = v.sqrt().max(NORM_FLOOR);
    }
    let normed = x.iter().enumerate().map(|(i, v)| (v - mean[i % dim]) / std[i % dim]).collect();
    let spread = (0..len * dim).map(|i| std[i % dim]).collect();
    Ok((Tensor::new(vec![len, dim], normed)?, Tensor::new(vec![len, dim], spread)?))
}

pub const NORM_FLOOR: f64 = 1e-3;

/// Tape handles produced by one forward pass.
#[derive(Clone, Debug)]
pub struct Forward {
    pub embedded: Var,
    pub hidden: Var,
    pub recon: Var,
    pub probs: Var,
    /// `attention[layer][head]`, each `T × T`.
    pub attention: Vec<Vec<Var>>,
}

/// A parameterized encoder: config, layout and parameter values.
#[derive(Clone, Debug)]
pub struct Model {
    config: ModelConfig,
    layout: ParamLayout,
    params: Vec<Tensor>,
}

impl Model {
    /// Fresh model initialized from `config.seed`.
    pub fn init(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let layout = ParamLayout::new(&config);
        let params = layout.init(config.seed);
        Ok(Self {
            config,
            layout,
            params,
        })
    }

    pub fn from_params(config: ModelConfig, params: Vec<Tensor>) -> Result<Self> {
        config.validate()?;
        let layout = ParamLayout::new(&config);
        layout.check(&params)?;
        Ok(Self {
            config,
            layout,
            params,
        })
    }

    pub fn from_checkpoint(ck: &Checkpoint) -> Result<Self> {
        ck.config.validate()?;
        let layout = ParamLayout::new(&ck.config);
        let params = ck.tensors(&layout)?;
        Ok(Self {
            config: ck.config.clone(),
            layout,
            params,
        })
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint::new(&self.config, &self.layout, &self.params)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.checkpoint().save(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_checkpoint(&Checkpoint::load(path)?)
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn layout(&self) -> &ParamLayout {
        &self.layout
    }

    pub fn params(&self) -> &[Tensor] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [Tensor] {
        &mut self.params
    }

    pub fn parameter_count(&self) -> usize {
        self.layout.parameter_count()
    }

    /// Records every parameter on `tape`, in layout order.
    pub fn register(&self, tape: &Tape) -> Vec<Var> {
        self.params.iter().map(|p| tape.param(p.clone())).collect()
    }

    fn layers(&self, vars: &[Var]) -> Vec<EncoderLayer> {
        let pick = |ix: &[usize]| ix.iter().map(|&i| vars[i]).collect::<Vec<_>>();
        self.layout
            .layers
            .iter()
            .map(|s| EncoderLayer {
                wq: pick(&s.wq),
                wk: pick(&s.wk),
                wv: pick(&s.wv),
                wo: pick(&s.wo),
                bo: vars[s.bo],
                ln1_gamma: vars[s.ln1_gamma],
                ln1_beta: vars[s.ln1_beta],
                ffn_w1: vars[s.ffn_w1],
                ffn_b1: vars[s.ffn_b1],
                ffn_w2: vars[s.ffn_w2],
                ffn_b2: vars[s.ffn_b2],
                ln2_gamma: vars[s.ln2_gamma],
                ln2_beta: vars[s.ln2_beta],
            })
            .collect()
    }

    /// Full forward pass with parameters given as tape handles.
    pub fn forward(&self, tape: &Tape, vars: &[Var], input: &ModelInput) -> Result<Forward> {
        let (len, dim) = input.frames.matrix_dims("forward")?;
        if dim != self.config.input_dim || input.imputed.shape() != input.frames.shape() {
            return Err(Error::ShapeMismatch {
                op: "forward",
                left: vec![len, self.config.input_dim],
                right: input.imputed.shape().to_vec(),
            });
        }
        let l = &self.layout;
        let pe = if self.config.positional_encoding {
            Some(cached_positional_encoding(len, self.config.embed_dim)?)
        } else {
            None
        };
        let frames = tape.constant(input.frames.clone());
        let imputed = tape.constant(input.imputed.clone());
        let scale = if self.config.input_norm {
            Some(column_scale(&input.frames)?)
        } else {
            None
        };
        let features = match &scale {
            Some((normed, _)) => tape.constant(normed.clone()),
            None => frames,
        };
        let embedded = embed_input(
            tape,
            features,
            imputed,
            vars[l.embed_frames],
            vars[l.embed_mask],
            vars[l.embed_bias],
            pe.as_ref(),
        )?;
        let (hidden, attention) =
            encoder_forward(tape, embedded, &self.layers(vars), self.config.layer_norm_eps)?;
        let mut recon = reconstruct(tape, hidden, vars[l.recon_w], vars[l.recon_b])?;
        if let Some((_, std)) = scale {
            recon = tape.mul(recon, tape.constant(std))?;
        }
        if self.config.input_skip {
            recon = tape.add(frames, recon)?;
        }
        let probs = classify_anomaly(tape, hidden, vars[l.anom_w], vars[l.anom_b])?;
        Ok(Forward {
            embedded,
            hidden,
            recon,
            probs,
            attention,
        })
    }

    /// Builds the combined objective on `tape`; returns (recon, anom, total).
    pub fn loss_on_tape(
        &self,
        tape: &Tape,
        fwd: &Forward,
        sample: &Sample,
    ) -> Result<(Var, Option<Var>, Var)> {
        let recon = recon_loss(
            tape,
            &sample.target,
            fwd.recon,
            &self.config.joint_weights,
            &sample.input.imputed,
            self.config.mu,
        )?;
        match &sample.labels {
            Some(labels) => {
                let anom = anomaly_loss(tape, labels, fwd.probs)?;
                let total = tape.add(recon, tape.scale(anom, self.config.lambda))?;
                Ok((recon, Some(anom), total))
            }
            None => Ok((recon, None, recon)),
        }
    }

    /// Loss report and per-parameter gradients for one sample.
    pub fn loss_and_grads(&self, sample: &Sample) -> Result<(LossReport, Vec<Tensor>)> {
        let tape = Tape::new();
        let vars = self.register(&tape);
        let fwd = self.forward(&tape, &vars, &sample.input)?;
        let (recon, anom, total) = self.loss_on_tape(&tape, &fwd, sample)?;
        let recon_v = tape.value(recon).item();
        let anom_v = anom.map_or(0.0, |a| tape.value(a).item());
        let report = LossReport {
            recon: recon_v,
            anom: anom_v,
            total: tape.value(total).item(),
            lambda_used: if anom.is_some() { self.config.lambda } else { 0.0 },
        };
        let mut grads = tape.backward(total)?;
        let g = vars
            .iter()
            .zip(&self.params)
            .map(|(v, p)| grads.take_or_zeros(*v, p.shape()))
            .collect();
        Ok((report, g))
    }

    pub fn predict(&self, input: &ModelInput) -> Result<Prediction> {
        let tape = Tape::new();
        let vars: Vec<Var> = self.params.iter().map(|p| tape.constant(p.clone())).collect();
        let fwd = self.forward(&tape, &vars, input)?;
        Ok(Prediction {
            frames: tape.value(fwd.recon),
            scores: Some(tape.value(fwd.probs).into_data()),
        })
    }

    /// Hidden states `T × d`.
    pub fn encode(&self, input: &ModelInput) -> Result<Tensor> {
        let tape = Tape::new();
        let vars: Vec<Var> = self.params.iter().map(|p| tape.constant(p.clone())).collect();
        let fwd = self.forward(&tape, &vars, input)?;
        Ok(tape.value(fwd.hidden))
    }

    /// Attention weights of every layer and head for one input.
    pub fn attention_maps(&self, input: &ModelInput) -> Result<Vec<Vec<Tensor>>> {
        let tape = Tape::new();
        let vars: Vec<Var> = self.params.iter().map(|p| tape.constant(p.clone())).collect();
        let fwd = self.forward(&tape, &vars, input)?;
        Ok(fwd
            .attention
            .iter()
            .map(|heads| heads.iter().map(|v| tape.value(*v)).collect())
            .collect())
    }
}
