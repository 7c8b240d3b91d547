//! Transformer-based denoising, imputation and per-frame anomaly scoring
//! for multivariate motion-capture sequences.
//!
//! The crate is self-contained: [`autodiff`] provides the tensor tape and
//! [`optim`] the Adam optimizer that [`model`] is trained with; [`data`]
//! produces synthetic trajectories and corrupts them; [`metrics`] and
//! [`pipeline`] evaluate reconstructions against the clean ground truth.

pub mod autodiff;
pub mod baseline;
pub mod data;
pub mod error;
pub mod gradcheck;
pub mod kernels;
pub mod metrics;
pub mod model;
pub mod optim;
pub mod pipeline;
pub mod tensor;
pub mod train;

pub use autodiff::{Gradients, Tape, Var};
pub use baseline::{InterpolationBaseline, LinearBaseline};
pub use data::{CorruptionSpec, Dataset, DatasetProfile, MotionSequence};
pub use error::{Error, Result};
pub use gradcheck::grad_check;
pub use metrics::EvalReport;
pub use model::{LossReport, Model, ModelConfig, ModelInput, Prediction, Predictor, Sample};
pub use optim::{adam_step, AdamState};
pub use tensor::Tensor;
pub use train::{train, EpochLog, EpochSource, Recorrupted, TrainOptions, TrainOutcome, Trainable};
