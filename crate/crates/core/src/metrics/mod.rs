//! Evaluation primitives: reconstruction error, ROC area, paired
//! significance testing and inference timing.

mod auc;
mod report;
mod significance;
mod timing;

pub use auc::auc_roc;
pub use report::EvalReport;
pub use significance::{paired_test, PairedTest};
pub use timing::{hardware_string, time_inference, TimingReport, TIMING_WINDOW};

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// `(1/T) Σ_t ‖x_t − x̂_t‖²` between clean and reconstructed frames.
pub fn mse(clean: &Tensor, reconstructed: &Tensor) -> Result<f64> {
    if clean.shape() != reconstructed.shape() || clean.shape().len() != 2 {
        return Err(Error::ShapeMismatch {
            op: "mse",
            left: clean.shape().to_vec(),
            right: reconstructed.shape().to_vec(),
        });
    }
    let total: f64 = clean
        .data()
        .iter()
        .zip(reconstructed.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    // scaled like the training loss so the two agree to the last bit
    Ok(total * (1.0 / clean.rows() as f64))
}
