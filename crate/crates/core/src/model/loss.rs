//! Reconstruction, anomaly and combined objectives.

use crate::autodiff::{Tape, Var};
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Loss values of one sequence or batch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossReport {
    pub recon: f64,
    pub anom: f64,
    pub total: f64,
    pub lambda_used: f64,
}

/// Weighted reconstruction loss
/// `(1/T) Σ_t Σ_j w_j (1 + mu·imputed_tj) (x_tj − x̂_tj)²`.
///
/// With unit weights and `mu = 0` this is the mean over frames of the
/// squared L2 frame error.
pub fn recon_loss(
    tape: &Tape,
    target: &Tensor,
    pred: Var,
    joint_weights: &[f64],
    imputed: &Tensor,
    mu: f64,
) -> Result<Var> {
    let shape = tape.shape(pred);
    if target.shape() != shape.as_slice() || imputed.shape() != shape.as_slice() || shape.len() != 2 {
        return Err(Error::ShapeMismatch {
            op: "recon_loss",
            left: target.shape().to_vec(),
            right: shape,
        });
    }
    let (frames, dim) = (shape[0], shape[1]);
    if joint_weights.len() != dim {
        return Err(Error::ShapeMismatch {
            op: "recon_loss",
            left: vec![dim],
            right: vec![joint_weights.len()],
        });
    }
    if joint_weights.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::InvalidArgument("joint weights must be positive".into()));
    }
    if !(mu >= 0.0) {
        return Err(Error::InvalidArgument(format!("mu must be >= 0, got {mu}")));
    }
    let coeff: Vec<f64> = imputed
        .data()
        .iter()
        .enumerate()
        .map(|(i, m)| joint_weights[i % dim] * (1.0 + mu * m))
        .collect();
    let coeff = tape.constant(Tensor::new(shape.clone(), coeff)?);
    let target = tape.constant(target.clone());
    let diff = tape.sub(pred, target)?;
    let weighted = tape.mul(tape.square(diff), coeff)?;
    Ok(tape.scale(tape.sum(weighted), 1.0 / frames as f64))
}

/// Mean per-frame binary cross-entropy of probabilities against 0/1 labels.
pub fn anomaly_loss(tape: &Tape, labels: &[f64], probs: Var) -> Result<Var> {
    if let Some(bad) = labels.iter().find(|y| **y != 0.0 && **y != 1.0) {
        return Err(Error::InvalidArgument(format!("label {bad} is not 0 or 1")));
    }
    tape.bce(probs, labels)
}

/// `total = recon + λ·anom`.
pub fn total_loss(recon: f64, anom: f64, lambda: f64) -> Result<LossReport> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!("lambda must be >= 0, got {lambda}")));
    }
    Ok(LossReport {
        recon,
        anom,
        total: recon + lambda * anom,
        lambda_used: lambda,
    })
}
