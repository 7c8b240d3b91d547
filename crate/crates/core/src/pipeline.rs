//! Glue between sequences and the model: input preparation and evaluation.

use crate::data::{linear_interpolate, Dataset, MotionSequence};
use crate::error::{Error, Result};
use crate::metrics::{auc_roc, mse, EvalReport};
use crate::model::{ModelInput, Predictor, Sample};
use crate::tensor::Tensor;

/// Interpolation-filled frames plus the imputed-cell indicator.
pub fn make_input(corrupted: &MotionSequence) -> Result<ModelInput> {
    let frames = linear_interpolate(corrupted)?;
    let imputed = corrupted.mask.iter().map(|&m| if m { 0.0 } else { 1.0 }).collect();
    Ok(ModelInput {
        imputed: Tensor::new(frames.shape().to_vec(), imputed)?,
        frames,
    })
}

pub fn make_sample(clean: &MotionSequence, corrupted: &MotionSequence) -> Result<Sample> {
    if clean.id != corrupted.id || clean.frames.len() != corrupted.frames.len() {
        return Err(Error::InvalidArgument(format!(
            "clean sequence {} does not pair with corrupted {}",
            clean.id, corrupted.id
        )));
    }
    Ok(Sample {
        input: make_input(corrupted)?,
        target: Tensor::new(vec![clean.num_frames, clean.dim()], clean.frames.clone())?,
        labels: clean
            .labels
            .as_ref()
            .map(|l| l.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()),
    })
}

pub fn make_samples(data: &Dataset) -> Result<Vec<Sample>> {
    data.clean
        .iter()
        .zip(&data.corrupted)
        .map(|(c, k)| make_sample(c, k))
        .collect()
}

/// Per-sequence reconstruction error against the clean frames, and pooled
/// per-frame ROC area when labels of both classes exist and the predictor
/// produces scores.
pub fn evaluate<P: Predictor + ?Sized>(model: &P, samples: &[Sample], fingerprint: &str) -> Result<EvalReport> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("cannot evaluate an empty dataset".into()));
    }
    let mut errors = Vec::with_capacity(samples.len());
    let mut labels = Vec::new();
    let mut scores = Vec::new();
    let mut scored = true;
    for s in samples {
        let pred = model.predict(&s.input)?;
        if !pred.frames.is_finite() {
            return Err(Error::Numerical("non-finite reconstruction".into()));
        }
        errors.push(mse(&s.target, &pred.frames)?);
        match (&s.labels, pred.scores) {
            (Some(l), Some(sc)) => {
                labels.extend(l.iter().map(|&v| v == 1.0));
                scores.extend(sc);
            }
            _ => scored = false,
        }
    }
    let both = labels.iter().any(|l| *l) && labels.iter().any(|l| !*l);
    let auc = if scored && both {
        Some(auc_roc(&labels, &scores)?)
    } else {
        None
    };
    Ok(EvalReport::from_errors(errors, auc, fingerprint))
}
