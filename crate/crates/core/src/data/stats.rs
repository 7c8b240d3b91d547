use super::MotionSequence;
use crate::error::{Error, Result};

/// Realized corruption levels of a dataset, measured against its clean copy.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetStats {
    pub sequences: usize,
    pub joint_count: usize,
    pub frames: usize,
    pub cells: usize,
    pub occluded_cells: usize,
    /// Occluded cells over all cells.
    pub occlusion_fraction: f64,
    /// Observed cells that differ from the clean value, counted on frames
    /// labeled normal only (anomaly episodes also change values).
    pub noisy_cells: usize,
    /// Noisy cells over observed cells, both on normal frames.
    pub noise_fraction: f64,
    pub anomalous_sequences: usize,
    pub abnormal_frames: usize,
    pub abnormal_frame_fraction: f64,
}

impl DatasetStats {
    pub fn compute(clean: &[MotionSequence], corrupted: &[MotionSequence]) -> Result<Self> {
        if clean.len() != corrupted.len() || clean.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "need equally many clean and corrupted sequences, got {} and {}",
                clean.len(),
                corrupted.len()
            )));
        }
        let mut s = Self {
            sequences: clean.len(),
            joint_count: clean[0].joint_count,
            frames: 0,
            cells: 0,
            occluded_cells: 0,
            occlusion_fraction: 0.0,
            noisy_cells: 0,
            noise_fraction: 0.0,
            anomalous_sequences: 0,
            abnormal_frames: 0,
            abnormal_frame_fraction: 0.0,
        };
        let mut normal_observed = 0usize;
        for (c, k) in clean.iter().zip(corrupted) {
            if c.id != k.id || c.frames.len() != k.frames.len() {
                return Err(Error::InvalidArgument(format!(
                    "sequence {} does not pair with {}",
                    c.id, k.id
                )));
            }
            s.frames += c.num_frames;
            s.cells += c.frames.len();
            let dim = c.dim();
            for i in 0..c.frames.len() {
                let normal = c.labels.as_ref().map_or(true, |l| !l[i / dim]);
                if !k.mask[i] {
                    s.occluded_cells += 1;
                } else if normal {
                    normal_observed += 1;
                    if k.frames[i] != c.frames[i] {
                        s.noisy_cells += 1;
                    }
                }
            }
            let abnormal = c.labels.as_ref().map_or(0, |l| l.iter().filter(|b| **b).count());
            s.abnormal_frames += abnormal;
            s.anomalous_sequences += (abnormal > 0) as usize;
        }
        s.occlusion_fraction = s.occluded_cells as f64 / s.cells as f64;
        s.noise_fraction = if normal_observed == 0 {
            0.0
        } else {
            s.noisy_cells as f64 / normal_observed as f64
        };
        s.abnormal_frame_fraction = s.abnormal_frames as f64 / s.frames as f64;
        Ok(s)
    }

    /// `key=value` lines.
    pub fn render(&self) -> String {
        format!(
            "sequences={}\njoint_count={}\nframes={}\ncells={}\noccluded_cells={}\n\
             occlusion_fraction={:.6}\nnoisy_cells={}\nnoise_fraction={:.6}\n\
             anomalous_sequences={}\nabnormal_frames={}\nabnormal_frame_fraction={:.6}\n",
            self.sequences,
            self.joint_count,
            self.frames,
            self.cells,
            self.occluded_cells,
            self.occlusion_fraction,
            self.noisy_cells,
            self.noise_fraction,
            self.anomalous_sequences,
            self.abnormal_frames,
            self.abnormal_frame_fraction
        )
    }
}

#[cfg(test)]
mod tests {
    use crate::data::{Dataset, DatasetProfile};

    #[test]
    fn realized_fractions_match_profile() {
        let p = DatasetProfile::builtin("post-surgery-desk").unwrap();
        for seed in 0..3 {
            let st = Dataset::generate(&p, seed).unwrap().stats().unwrap();
            assert!((st.occlusion_fraction - 0.15).abs() <= 0.01, "{}", st.occlusion_fraction);
            assert!((st.noise_fraction - 0.20).abs() <= 0.01, "{}", st.noise_fraction);
            assert!(st.anomalous_sequences > 0);
        }
    }
}
