use std::time::Instant;

use crate::error::{Error, Result};
use crate::model::{ModelInput, Predictor};

/// Frames per timed sequence.
pub const TIMING_WINDOW: usize = 30;

#[derive(Clone, Debug, PartialEq)]
pub struct TimingReport {
    /// Median over repeats of the mean wall-clock time per sequence.
    pub ms_per_sequence: f64,
    pub repeats: usize,
    pub sequences: usize,
    pub hardware: String,
}

impl TimingReport {
    pub fn render(&self) -> String {
        format!(
            "inference_ms_per_sequence={:.6}\nrepeats={}\nsequences={}\nwindow_frames={}\nhardware={}\n",
            self.ms_per_sequence, self.repeats, self.sequences, TIMING_WINDOW, self.hardware
        )
    }
}

/// CPU model name where available, plus the target architecture.
pub fn hardware_string() -> String {
    let cpu = std::fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|s| {
            s.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split(':').nth(1))
                .map(|m| m.trim().to_string())
        })
        .unwrap_or_else(|| "unknown cpu".into());
    format!("{cpu} ({}, single thread)", std::env::consts::ARCH)
}

/// Median per-sequence inference time on the first [`TIMING_WINDOW`] frames
/// of each input. One untimed warmup pass precedes the `repeats` timed
/// passes; everything runs on the calling thread.
pub fn time_inference<P: Predictor + ?Sized>(
    model: &P,
    inputs: &[ModelInput],
    repeats: usize,
) -> Result<TimingReport> {
    if inputs.is_empty() {
        return Err(Error::InvalidArgument("cannot time an empty dataset".into()));
    }
    if repeats < 10 {
        return Err(Error::InvalidArgument(format!("need at least 10 repeats, got {repeats}")));
    }
    let windows: Vec<ModelInput> = inputs
        .iter()
        .map(|inp| {
            let end = inp.frames.rows().min(TIMING_WINDOW);
            Ok(ModelInput {
                frames: inp.frames.slice_rows(0, end)?,
                imputed: inp.imputed.slice_rows(0, end)?,
            })
        })
        .collect::<Result<_>>()?;
    for w in &windows {
        std::hint::black_box(model.predict(w)?);
    }
    let mut samples = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        for w in &windows {
            std::hint::black_box(model.predict(w)?);
        }
        samples.push(start.elapsed().as_secs_f64() * 1e3 / windows.len() as f64);
    }
    samples.sort_by(f64::total_cmp);
    let mid = samples.len() / 2;
    let median = if samples.len() % 2 == 0 {
        0.5 * (samples[mid - 1] + samples[mid])
    } else {
        samples[mid]
    };
    Ok(TimingReport {
        ms_per_sequence: median,
        repeats,
        sequences: windows.len(),
        hardware: hardware_string(),
    })
}
