//! Experiment harness around `mocap-core`: dataset files, training runs,
//! evaluation, corruption sweeps, ablations and baseline comparisons.

pub mod commands;
pub mod config;
pub mod error;
pub mod grid;
pub mod split;

pub use commands::*;
pub use config::{RunConfig, Scale, SplitFractions};
pub use error::{Failure, Outcome};
pub use grid::{AblationGrid, AblationRow, SweepGrid};
pub use split::Split;
