use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a clean dataset is corrupted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorruptionSpec {
    /// Fraction of observed cells receiving additive Gaussian noise.
    pub noise_fraction: f64,
    /// Noise std relative to each coordinate's signal std.
    pub noise_sigma: f64,
    /// Fraction of cells masked, in contiguous per-joint runs.
    pub occlusion_fraction: f64,
    /// Probability that a sequence carries one anomaly episode.
    pub anomaly_fraction: f64,
    pub seed: u64,
}

impl Default for CorruptionSpec {
    fn default() -> Self {
        Self {
            noise_fraction: 0.2,
            noise_sigma: 0.3,
            occlusion_fraction: 0.1,
            anomaly_fraction: 0.5,
            seed: 0,
        }
    }
}

impl CorruptionSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("noise_fraction", self.noise_fraction),
            ("occlusion_fraction", self.occlusion_fraction),
            ("anomaly_fraction", self.anomaly_fraction),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "noise_sigma must be >= 0, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

/// A named dataset recipe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetProfile {
    pub name: String,
    pub num_sequences: usize,
    pub joint_count: usize,
    pub sequence_length: usize,
    pub corruption: CorruptionSpec,
}

/// Sequences per desk-scale profile.
pub const DESK_SEQUENCES: usize = 100;
/// Frames per sequence in every built-in profile.
pub const SEQUENCE_LENGTH: usize = 100;

impl DatasetProfile {
    fn row(name: &str, sequences: usize, joints: usize, noise: f64, occlusion: f64) -> Self {
        Self {
            name: name.into(),
            num_sequences: sequences,
            joint_count: joints,
            sequence_length: SEQUENCE_LENGTH,
            corruption: CorruptionSpec {
                noise_fraction: noise,
                occlusion_fraction: occlusion,
                ..CorruptionSpec::default()
            },
        }
    }

    /// The four full-size dataset recipes.
    pub fn paper_profiles() -> Vec<Self> {
        vec![
            Self::row("stroke", 2000, 10, 0.20, 0.10),
            Self::row("orthopedic", 1000, 8, 0.20, 0.10),
            Self::row("neurological", 1000, 12, 0.15, 0.10),
            Self::row("post-surgery", 1000, 8, 0.20, 0.15),
        ]
    }

    /// Same recipes with `DESK_SEQUENCES` sequences each, named `<name>-desk`.
    pub fn desk_profiles() -> Vec<Self> {
        Self::paper_profiles()
            .into_iter()
            .map(|p| Self {
                name: format!("{}-desk", p.name),
                num_sequences: DESK_SEQUENCES,
                ..p
            })
            .collect()
    }

    /// Looks up a built-in profile by name.
    pub fn builtin(name: &str) -> Result<Self> {
        Self::paper_profiles()
            .into_iter()
            .chain(Self::desk_profiles())
            .find(|p| p.name == name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown profile {name:?}")))
    }

    pub fn dim(&self) -> usize {
        3 * self.joint_count
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_sequences == 0 || self.joint_count == 0 || self.sequence_length < 2 {
            return Err(Error::InvalidArgument(format!(
                "profile {}: needs sequences >= 1, joints >= 1, length >= 2",
                self.name
            )));
        }
        self.corruption.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_reproduce_table_rows() {
        let s = DatasetProfile::builtin("stroke").unwrap();
        assert_eq!((s.num_sequences, s.joint_count), (2000, 10));
        assert_eq!((s.corruption.noise_fraction, s.corruption.occlusion_fraction), (0.20, 0.10));
        let n = DatasetProfile::builtin("neurological").unwrap();
        assert_eq!((n.num_sequences, n.joint_count, n.corruption.noise_fraction), (1000, 12, 0.15));
        let p = DatasetProfile::builtin("post-surgery").unwrap();
        assert_eq!((p.joint_count, p.corruption.occlusion_fraction), (8, 0.15));
        let o = DatasetProfile::builtin("orthopedic-desk").unwrap();
        assert_eq!((o.num_sequences, o.joint_count), (100, 8));
        assert_eq!(DatasetProfile::builtin("stroke-desk").unwrap().dim(), 30);
        assert!(DatasetProfile::builtin("cardio").is_err());
    }

    #[test]
    fn fractions_outside_unit_interval_are_rejected() {
        let mut c = CorruptionSpec::default();
        c.noise_fraction = 1.2;
        assert!(c.validate().is_err());
        c.noise_fraction = 0.2;
        c.occlusion_fraction = -0.01;
        assert!(c.validate().is_err());
    }
}
