//! Mini-batch Adam training with best-validation selection.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{mix_seed, CorruptionSpec, Dataset, MotionSequence};
use crate::error::{Error, Result};
use crate::model::{LossReport, Model, ModelConfig, Predictor, Sample};
use crate::optim::{adam_step, AdamState};
use crate::pipeline::{evaluate, make_samples};
use crate::tensor::Tensor;

/// A predictor with trainable parameters.
pub trait Trainable: Predictor {
    fn params(&self) -> &[Tensor];
    fn params_mut(&mut self) -> &mut [Tensor];
    fn loss_and_grads(&self, sample: &Sample) -> Result<(LossReport, Vec<Tensor>)>;
}

impl Trainable for Model {
    fn params(&self) -> &[Tensor] {
        Model::params(self)
    }

    fn params_mut(&mut self) -> &mut [Tensor] {
        Model::params_mut(self)
    }

    fn loss_and_grads(&self, sample: &Sample) -> Result<(LossReport, Vec<Tensor>)> {
        Model::loss_and_grads(self, sample)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainOptions {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl From<&ModelConfig> for TrainOptions {
    fn from(c: &ModelConfig) -> Self {
        Self {
            epochs: c.epochs,
            batch_size: c.batch_size,
            learning_rate: c.learning_rate,
            seed: c.seed,
        }
    }
}

/// Mean training losses of one epoch and the validation error after it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    pub recon: f64,
    pub anom: f64,
    pub total: f64,
    pub val_mse: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainOutcome {
    pub log: Vec<EpochLog>,
    /// Epoch whose parameters were kept (1-based; 0 = initial parameters).
    pub best_epoch: usize,
    pub best_val_mse: Option<f64>,
}

impl TrainOutcome {
    /// Tab-separated log with a header row.
    pub fn render_log(&self) -> String {
        let mut s = String::from("epoch\trecon\tanom\ttotal\tval_mse\n");
        for e in &self.log {
            let val = e.val_mse.map_or_else(|| "n/a".into(), |v| format!("{v}"));
            s.push_str(&format!("{}\t{}\t{}\t{}\t{}\n", e.epoch, e.recon, e.anom, e.total, val));
        }
        s
    }
}

const STREAM_SHUFFLE: u64 = 0x5A0F;
const STREAM_RECORRUPT: u64 = 0xAC06;

/// Supplies the training samples for each epoch.
pub trait EpochSource {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// Samples for 1-based `epoch`.
    fn epoch(&self, epoch: usize) -> Result<std::borrow::Cow<'_, [Sample]>>;
}

impl EpochSource for [Sample] {
    fn len(&self) -> usize {
        <[Sample]>::len(self)
    }

    fn epoch(&self, _: usize) -> Result<std::borrow::Cow<'_, [Sample]>> {
        Ok(std::borrow::Cow::Borrowed(self))
    }
}

impl EpochSource for Vec<Sample> {
    fn len(&self) -> usize {
        self.as_slice().len()
    }

    fn epoch(&self, _: usize) -> Result<std::borrow::Cow<'_, [Sample]>> {
        Ok(std::borrow::Cow::Borrowed(self))
    }
}

/// Fresh noise and occlusion on fixed clean sequences every epoch. The
/// corruption seed for epoch `e` is derived from `spec.seed` and `e`.
#[derive(Clone, Debug)]
pub struct Recorrupted {
    pub clean: Vec<MotionSequence>,
    pub spec: CorruptionSpec,
}

impl EpochSource for Recorrupted {
    fn len(&self) -> usize {
        self.clean.len()
    }

    fn epoch(&self, epoch: usize) -> Result<std::borrow::Cow<'_, [Sample]>> {
        let spec = CorruptionSpec {
            seed: mix_seed(self.spec.seed, STREAM_RECORRUPT, epoch as u64),
            ..self.spec
        };
        Ok(std::borrow::Cow::Owned(make_samples(&Dataset::recorrupt(&self.clean, &spec)?)?))
    }
}

/// Trains `model` in place on the samples from `source`, selecting the parameters with the
/// lowest validation MSE (the last epoch when `val` is empty).
///
/// Batch gradients are per-sample gradients summed in batch order and
/// divided by the batch length, so results are reproducible bit for bit.
/// A non-finite loss aborts with the epoch and batch in the message.
pub fn train<M: Trainable, S: EpochSource + ?Sized>(
    model: &mut M,
    source: &S,
    val: &[Sample],
    opts: &TrainOptions,
) -> Result<TrainOutcome> {
    if source.is_empty() {
        return Err(Error::InvalidArgument("training set is empty".into()));
    }
    if opts.batch_size == 0 {
        return Err(Error::InvalidArgument("batch size must be positive".into()));
    }
    let mut state = AdamState::new(model.params());
    let mut order: Vec<usize> = (0..source.len()).collect();
    let mut log = Vec::with_capacity(opts.epochs);

    let mut best_epoch = 0;
    let mut best_val = if val.is_empty() {
        None
    } else {
        Some(evaluate(model, val, "")?.mse)
    };
    let mut best_params = model.params().to_vec();

    for epoch in 1..=opts.epochs {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(opts.seed, STREAM_SHUFFLE, epoch as u64));
        order.shuffle(&mut rng);
        let train = source.epoch(epoch)?;
        let (mut recon, mut anom, mut total) = (0.0, 0.0, 0.0);
        for (b, batch) in order.chunks(opts.batch_size).enumerate() {
            let mut sum: Option<Vec<Tensor>> = None;
            for &i in batch {
                let (rep, grads) = model.loss_and_grads(&train[i])?;
                if !rep.total.is_finite() {
                    return Err(Error::Numerical(format!(
                        "non-finite loss at epoch {epoch}, batch {} (sample {i})",
                        b + 1
                    )));
                }
                recon += rep.recon;
                anom += rep.anom;
                total += rep.total;
                match sum.as_mut() {
                    None => sum = Some(grads),
                    Some(acc) => {
                        for (a, g) in acc.iter_mut().zip(&grads) {
                            for (x, y) in a.data_mut().iter_mut().zip(g.data()) {
                                *x += y;
                            }
                        }
                    }
                }
            }
            let mut grads = sum.expect("non-empty batch");
            let inv = 1.0 / batch.len() as f64;
            for g in &mut grads {
                g.data_mut().iter_mut().for_each(|v| *v *= inv);
            }
            adam_step(model.params_mut(), &grads, &mut state, opts.learning_rate).map_err(|e| {
                Error::Numerical(format!("epoch {epoch}, batch {}: {e}", b + 1))
            })?;
        }
        let n = train.len() as f64;
        let val_mse = if val.is_empty() {
            None
        } else {
            Some(evaluate(model, val, "")?.mse)
        };
        log.push(EpochLog {
            epoch,
            recon: recon / n,
            anom: anom / n,
            total: total / n,
            val_mse,
        });
        let improved = match (val_mse, best_val) {
            (Some(v), Some(b)) => v < b,
            (None, _) => true,
            (Some(_), None) => true,
        };
        if improved {
            best_val = val_mse;
            best_epoch = epoch;
            best_params = model.params().to_vec();
        }
    }
    model.params_mut().clone_from_slice(&best_params);
    Ok(TrainOutcome {
        log,
        best_epoch,
        best_val_mse: best_val,
    })
}
