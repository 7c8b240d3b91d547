//! Reference methods: interpolation alone, and a linear refinement model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::autodiff::Tape;
use crate::error::{Error, Result};
use crate::model::{anomaly_loss, column_scale, recon_loss, LossReport, ModelConfig, ModelInput, Prediction, Predictor, Sample};
use crate::tensor::Tensor;
use crate::train::Trainable;

/// Returns the interpolation-filled frames unchanged; no anomaly scores.
#[derive(Clone, Copy, Debug, Default)]
pub struct InterpolationBaseline;

impl Predictor for InterpolationBaseline {
    fn predict(&self, input: &ModelInput) -> Result<Prediction> {
        Ok(Prediction {
            frames: input.frames.clone(),
            scores: None,
        })
    }
}

/// One affine map from a window of filled frames (and their imputed
/// indicators) to the centre frame, used as a correction on top of the
/// interpolated input: `x̂_t = x_t + A·[x ‖ m]_{t−r..t+r} + b`, plus a
/// logistic classifier on the same window.
///
/// When `config.input_norm` is set the window features are standardized
/// per coordinate and the correction is rescaled, as in the encoder.
/// Window edges repeat the first/last frame. With radius 0 the map sees a
/// single frame and has no temporal context. The correction and the
/// classifier start at zero, so an untrained model reproduces
/// interpolation with 0.5 scores.
#[derive(Clone, Debug)]
pub struct LinearBaseline {
    config: ModelConfig,
    radius: usize,
    /// `[A (in × D), b (D), w (in × 1), c (1)]`
    params: Vec<Tensor>,
}

impl LinearBaseline {
    pub fn new(config: &ModelConfig, radius: usize) -> Result<Self> {
        config.validate()?;
        let dim = config.input_dim;
        let width = (2 * radius + 1) * 2 * dim;
        Ok(Self {
            config: config.clone(),
            radius,
            params: vec![
                Tensor::zeros(&[width, dim]),
                Tensor::zeros(&[dim]),
                Tensor::zeros(&[width, 1]),
                Tensor::zeros(&[1]),
            ],
        })
    }

    /// Same as [`new`](Self::new) but with small random weights drawn from
    /// `config.seed`.
    pub fn new_random(config: &ModelConfig, radius: usize) -> Result<Self> {
        let mut m = Self::new(config, radius)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for i in [0, 2] {
            let (fan_in, fan_out) = (m.params[i].rows(), m.params[i].cols());
            let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
            m.params[i].data_mut().iter_mut().for_each(|v| *v = rng.random_range(-a..a));
        }
        Ok(m)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    fn windows(&self, input: &ModelInput, frames: &Tensor) -> Result<Tensor> {
        let (len, dim) = input.frames.matrix_dims("linear baseline")?;
        if dim != self.config.input_dim || input.imputed.shape() != input.frames.shape() {
            return Err(Error::ShapeMismatch {
                op: "linear baseline",
                left: vec![len, self.config.input_dim],
                right: input.frames.shape().to_vec(),
            });
        }
        let r = self.radius as isize;
        let width = (2 * self.radius + 1) * 2 * dim;
        let mut out = Vec::with_capacity(len * width);
        for t in 0..len as isize {
            for k in -r..=r {
                let s = (t + k).clamp(0, len as isize - 1) as usize;
                out.extend_from_slice(frames.row(s));
                out.extend_from_slice(input.imputed.row(s));
            }
        }
        Tensor::new(vec![len, width], out)
    }

    fn forward(&self, tape: &Tape, vars: &[crate::autodiff::Var], input: &ModelInput) -> Result<(crate::autodiff::Var, crate::autodiff::Var)> {
        let scale = if self.config.input_norm {
            Some(column_scale(&input.frames)?)
        } else {
            None
        };
        let features = scale.as_ref().map_or(&input.frames, |(normed, _)| normed);
        let x = tape.constant(self.windows(input, features)?);
        let frames = tape.constant(input.frames.clone());
        let mut corr = tape.add_row(tape.matmul(x, vars[0])?, vars[1])?;
        if let Some((_, std)) = scale {
            corr = tape.mul(corr, tape.constant(std))?;
        }
        let recon = tape.add(frames, corr)?;
        let logits = tape.add_row(tape.matmul(x, vars[2])?, vars[3])?;
        Ok((recon, tape.sigmoid(logits)))
    }
}

impl Predictor for LinearBaseline {
    fn predict(&self, input: &ModelInput) -> Result<Prediction> {
        let tape = Tape::new();
        let vars: Vec<_> = self.params.iter().map(|p| tape.constant(p.clone())).collect();
        let (recon, probs) = self.forward(&tape, &vars, input)?;
        Ok(Prediction {
            frames: tape.value(recon),
            scores: Some(tape.value(probs).into_data()),
        })
    }
}

impl Trainable for LinearBaseline {
    fn params(&self) -> &[Tensor] {
        &self.params
    }

    fn params_mut(&mut self) -> &mut [Tensor] {
        &mut self.params
    }

    fn loss_and_grads(&self, sample: &Sample) -> Result<(LossReport, Vec<Tensor>)> {
        let tape = Tape::new();
        let vars: Vec<_> = self.params.iter().map(|p| tape.param(p.clone())).collect();
        let (recon, probs) = self.forward(&tape, &vars, &sample.input)?;
        let c = &self.config;
        let rl = recon_loss(&tape, &sample.target, recon, &c.joint_weights, &sample.input.imputed, c.mu)?;
        let (total, anom) = match &sample.labels {
            Some(l) => {
                let al = anomaly_loss(&tape, l, probs)?;
                (tape.add(rl, tape.scale(al, c.lambda))?, Some(al))
            }
            None => (rl, None),
        };
        let report = LossReport {
            recon: tape.value(rl).item(),
            anom: anom.map_or(0.0, |a| tape.value(a).item()),
            total: tape.value(total).item(),
            lambda_used: if anom.is_some() { c.lambda } else { 0.0 },
        };
        let mut g = tape.backward(total)?;
        let grads = vars
            .iter()
            .zip(&self.params)
            .map(|(v, p)| g.take_or_zeros(*v, p.shape()))
            .collect();
        Ok((report, grads))
    }
}
