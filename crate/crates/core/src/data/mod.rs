//! Synthetic motion sequences, corruption, interpolation and file I/O.

mod corrupt;
mod generate;
mod interpolate;
mod io;
mod profile;
mod stats;

pub use corrupt::{
    corrupt_sequence, force_anomaly, inject_anomaly, inject_noise, inject_occlusion, AnomalyKind,
    OCCLUSION_MEAN_RUN,
};
pub use generate::{generate_clean, mix_seed, SMOOTHNESS_BOUND};
pub use interpolate::linear_interpolate;
pub use io::{load_sequences, parse_sequences, render_sequences, save_sequences, SEQUENCE_FORMAT, SEQUENCE_VERSION};
pub use profile::{CorruptionSpec, DatasetProfile};
pub use stats::DatasetStats;

use crate::error::{Error, Result};

/// A `T × D` frame matrix with an observation mask and optional per-frame
/// abnormality labels.
///
/// Unobserved cells keep whatever value lies underneath (the clean value
/// after occlusion); they carry no meaning and are ignored by equality.
#[derive(Clone, Debug)]
pub struct MotionSequence {
    pub id: String,
    pub joint_count: usize,
    pub num_frames: usize,
    /// Row-major `num_frames × dim()` coordinates.
    pub frames: Vec<f64>,
    /// `true` = observed.
    pub mask: Vec<bool>,
    /// `true` = abnormal frame.
    pub labels: Option<Vec<bool>>,
}

impl MotionSequence {
    /// Fully observed sequence with every frame labelled normal.
    pub fn new(id: impl Into<String>, joint_count: usize, num_frames: usize, frames: Vec<f64>) -> Result<Self> {
        let seq = Self {
            id: id.into(),
            joint_count,
            num_frames,
            mask: vec![true; frames.len()],
            labels: Some(vec![false; num_frames]),
            frames,
        };
        seq.validate()?;
        Ok(seq)
    }

    /// Coordinates per frame, `3 × joint_count`.
    pub fn dim(&self) -> usize {
        3 * self.joint_count
    }

    pub fn value(&self, t: usize, c: usize) -> f64 {
        self.frames[t * self.dim() + c]
    }

    pub fn observed(&self, t: usize, c: usize) -> bool {
        self.mask[t * self.dim() + c]
    }

    pub fn frame(&self, t: usize) -> &[f64] {
        let d = self.dim();
        &self.frames[t * d..(t + 1) * d]
    }

    pub fn observed_cells(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    pub fn validate(&self) -> Result<()> {
        let cells = self.num_frames * self.dim();
        if self.joint_count == 0 || self.num_frames == 0 {
            return Err(Error::InvalidArgument(format!(
                "sequence {}: joint_count and num_frames must be positive",
                self.id
            )));
        }
        if self.frames.len() != cells || self.mask.len() != cells {
            return Err(Error::InvalidArgument(format!(
                "sequence {}: expected {cells} cells, got {} frames / {} mask",
                self.id,
                self.frames.len(),
                self.mask.len()
            )));
        }
        if let Some(l) = &self.labels {
            if l.len() != self.num_frames {
                return Err(Error::InvalidArgument(format!(
                    "sequence {}: {} labels for {} frames",
                    self.id,
                    l.len(),
                    self.num_frames
                )));
            }
        }
        Ok(())
    }
}

impl PartialEq for MotionSequence {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.joint_count == other.joint_count
            && self.num_frames == other.num_frames
            && self.mask == other.mask
            && self.labels == other.labels
            && self.frames.len() == other.frames.len()
            && self
                .frames
                .iter()
                .zip(&other.frames)
                .zip(&self.mask)
                .all(|((a, b), m)| !m || a.to_bits() == b.to_bits())
    }
}

/// Observes one clean sequence: an anomaly episode (with probability
/// `spec.anomaly_fraction`), then occlusion, then noise.
///
/// Returns the ground truth, which is the clean motion carrying the
/// episode's frame labels, and the corrupted observation. An episode is a
/// deviation from the intended movement, so the ground truth does not
/// contain it and a reconstruction is expected to undo it.
pub fn observe(clean: &MotionSequence, spec: &CorruptionSpec) -> Result<(MotionSequence, MotionSequence)> {
    let mut truth = clean.clone();
    truth.labels = None;
    let deviated = inject_anomaly(&truth, spec)?;
    truth.labels = deviated.labels.clone();
    let corrupted = corrupt_sequence(&deviated, spec)?;
    Ok((truth, corrupted))
}

/// Ground-truth sequences with their corrupted observations, paired by index.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub clean: Vec<MotionSequence>,
    pub corrupted: Vec<MotionSequence>,
}

impl Dataset {
    /// Generates clean motion for `profile` and derives the observations
    /// with the profile's corruption settings (see [`observe`]).
    pub fn generate(profile: &DatasetProfile, seed: u64) -> Result<Self> {
        profile.validate()?;
        let spec = CorruptionSpec {
            seed,
            ..profile.corruption
        };
        Self::recorrupt(&generate_clean(profile, seed)?, &spec)
    }

    /// Observes the clean sequences again under `spec`. Existing labels on
    /// `clean` are discarded; anomaly episodes are redrawn from `spec`.
    pub fn recorrupt(clean: &[MotionSequence], spec: &CorruptionSpec) -> Result<Self> {
        let (clean, corrupted) = clean.iter().map(|s| observe(s, spec)).collect::<Result<Vec<_>>>()?.into_iter().unzip();
        Ok(Self { clean, corrupted })
    }

    pub fn len(&self) -> usize {
        self.clean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clean.is_empty()
    }

    /// Sub-dataset at the given indices.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            clean: indices.iter().map(|&i| self.clean[i].clone()).collect(),
            corrupted: indices.iter().map(|&i| self.corrupted[i].clone()).collect(),
        }
    }

    pub fn stats(&self) -> Result<DatasetStats> {
        DatasetStats::compute(&self.clean, &self.corrupted)
    }
}
