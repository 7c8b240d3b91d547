//! Noise, occlusion and anomaly injection.
//!
//! Every operation is a pure function of its input sequence and the
//! [`CorruptionSpec`]: the random stream is seeded from the spec seed, a
//! per-stage tag and a hash of the sequence id.

use std::f64::consts::PI;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, Normal};

use super::generate::mix_seed;
use super::{CorruptionSpec, MotionSequence};
use crate::error::{Error, Result};

/// Mean occlusion run length in frames.
pub const OCCLUSION_MEAN_RUN: f64 = 5.0;

const STREAM_NOISE: u64 = 0x4E01;
const STREAM_OCCLUSION: u64 = 0x0CC1;
const STREAM_ANOMALY: u64 = 0xA401;

fn id_hash(id: &str) -> u64 {
    // FNV-1a
    id.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

fn stage_rng(spec: &CorruptionSpec, stream: u64, seq: &MotionSequence) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(spec.seed, stream, id_hash(&seq.id)))
}

/// Std of coordinate `c` over the frames not labeled abnormal (all frames
/// when every frame is abnormal), so anomaly episodes do not inflate the
/// noise scale.
fn column_std(seq: &MotionSequence, c: usize) -> f64 {
    let normal = |t: usize| seq.labels.as_ref().map_or(true, |l| !l[t]);
    let mut frames: Vec<usize> = (0..seq.num_frames).filter(|&t| normal(t)).collect();
    if frames.is_empty() {
        frames = (0..seq.num_frames).collect();
    }
    let n = frames.len() as f64;
    let mean = frames.iter().map(|&t| seq.value(t, c)).sum::<f64>() / n;
    let var = frames.iter().map(|&t| (seq.value(t, c) - mean).powi(2)).sum::<f64>() / n;
    var.sqrt()
}

/// Adds Gaussian noise to exactly `round(noise_fraction × observed)` observed
/// cells, chosen uniformly without replacement. The std for coordinate `c`
/// is `noise_sigma × std(c)`, with `std(c)` taken over normal frames.
pub fn inject_noise(seq: &MotionSequence, spec: &CorruptionSpec) -> Result<MotionSequence> {
    spec.validate()?;
    let mut out = seq.clone();
    let observed: Vec<usize> = (0..seq.mask.len()).filter(|&i| seq.mask[i]).collect();
    let k = (spec.noise_fraction * observed.len() as f64).round() as usize;
    if k == 0 || spec.noise_sigma == 0.0 {
        return Ok(out);
    }
    let dim = seq.dim();
    let stds: Vec<f64> = (0..dim).map(|c| column_std(seq, c)).collect();
    let mut rng = stage_rng(spec, STREAM_NOISE, seq);
    let mut chosen = sample(&mut rng, observed.len(), k).into_vec();
    chosen.sort_unstable();
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    for pick in chosen {
        let cell = observed[pick];
        let z: f64 = unit.sample(&mut rng);
        out.frames[cell] += z * spec.noise_sigma * stds[cell % dim];
    }
    Ok(out)
}

/// Masks contiguous runs of frames for single joints (all three
/// coordinates together) until exactly `round(occlusion_fraction × T × J)`
/// joint-frames are hidden. Run lengths are geometric with mean
/// [`OCCLUSION_MEAN_RUN`]; runs are clipped at the target. Frame 0 and
/// frame T−1 are never masked, so every coordinate keeps both
/// interpolation anchors. Values under the mask are left untouched.
pub fn inject_occlusion(seq: &MotionSequence, spec: &CorruptionSpec) -> Result<MotionSequence> {
    spec.validate()?;
    let mut out = seq.clone();
    let (len, joints) = (seq.num_frames, seq.joint_count);
    let interior = len.saturating_sub(2) * joints;
    let target = ((spec.occlusion_fraction * (len * joints) as f64).round() as usize).min(interior);
    if target == 0 {
        return Ok(out);
    }
    let dim = seq.dim();
    let hidden = |out: &MotionSequence, t: usize, j: usize| !out.mask[t * dim + 3 * j];
    let hide = |out: &mut MotionSequence, t: usize, j: usize| {
        for k in 0..3 {
            out.mask[t * dim + 3 * j + k] = false;
        }
    };

    let mut rng = stage_rng(spec, STREAM_OCCLUSION, seq);
    let runs = Geometric::new(1.0 / OCCLUSION_MEAN_RUN).expect("valid probability");
    let mut count = 0;
    let mut attempts = 0usize;
    let max_attempts = 50 * target + 1000;
    while count < target && attempts < max_attempts {
        attempts += 1;
        let j = rng.random_range(0..joints);
        let start = rng.random_range(1..len - 1);
        let run = runs.sample(&mut rng) as usize + 1;
        for t in start..(start + run).min(len - 1) {
            if !hidden(&out, t, j) {
                hide(&mut out, t, j);
                count += 1;
                if count == target {
                    break;
                }
            }
        }
    }
    // near-total occlusion: fill the remainder deterministically
    'fill: for t in 1..len - 1 {
        for j in 0..joints {
            if count == target {
                break 'fill;
            }
            if !hidden(&out, t, j) {
                hide(&mut out, t, j);
                count += 1;
            }
        }
    }
    Ok(out)
}

/// Anomaly archetypes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnomalyKind {
    /// One coordinate pushed 2–4 envelope widths past its clean range for
    /// 5–10 frames.
    Hyperextension,
    /// Oscillation with a 2.5–4 frame period on all three coordinates of
    /// one joint for 10–20 frames, amplitude 0.3–0.6 envelope widths.
    Tremor,
}

/// With probability `anomaly_fraction`, adds one anomaly episode and labels
/// its frames abnormal. Other labels are left as they were (normal when
/// absent).
pub fn inject_anomaly(seq: &MotionSequence, spec: &CorruptionSpec) -> Result<MotionSequence> {
    spec.validate()?;
    let mut out = seq.clone();
    let mut labels = out.labels.take().unwrap_or_else(|| vec![false; seq.num_frames]);
    let mut rng = stage_rng(spec, STREAM_ANOMALY, seq);
    let hit = rng.random::<f64>() < spec.anomaly_fraction;
    if hit && seq.num_frames >= 4 {
        let kind = if rng.random::<bool>() {
            AnomalyKind::Hyperextension
        } else {
            AnomalyKind::Tremor
        };
        add_episode(&mut out, &mut labels, kind, &mut rng);
    }
    out.labels = Some(labels);
    Ok(out)
}

fn envelope(seq: &MotionSequence, c: usize) -> (f64, f64) {
    (0..seq.num_frames)
        .map(|t| seq.value(t, c))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn add_episode(seq: &mut MotionSequence, labels: &mut [bool], kind: AnomalyKind, rng: &mut ChaCha8Rng) {
    let len = seq.num_frames;
    let dim = seq.dim();
    let (lo, hi) = match kind {
        AnomalyKind::Hyperextension => (5, 10),
        AnomalyKind::Tremor => (10, 20),
    };
    let span = rng.random_range(lo..=hi).min(len - 2);
    let start = rng.random_range(1..=len - 1 - span);
    match kind {
        AnomalyKind::Hyperextension => {
            let c = rng.random_range(0..dim);
            let (min, max) = envelope(seq, c);
            let width = (max - min).max(1e-6);
            let upward = rng.random::<bool>();
            for i in 0..span {
                let depth = width * (2.0 + 2.0 * (PI * (i as f64 + 0.5) / span as f64).sin());
                seq.frames[(start + i) * dim + c] = if upward { max + depth } else { min - depth };
            }
        }
        AnomalyKind::Tremor => {
            let j = rng.random_range(0..seq.joint_count);
            let period = rng.random_range(2.5..4.0);
            for k in 0..3 {
                let c = 3 * j + k;
                let (min, max) = envelope(seq, c);
                let amp = (max - min) * rng.random_range(0.3..0.6);
                let phase = rng.random_range(0.0..2.0 * PI);
                for i in 0..span {
                    seq.frames[(start + i) * dim + c] +=
                        amp * (2.0 * PI * i as f64 / period + phase).sin();
                }
            }
        }
    }
    for l in &mut labels[start..start + span] {
        *l = true;
    }
}

/// Occlusion followed by noise on the remaining observed cells.
pub fn corrupt_sequence(clean: &MotionSequence, spec: &CorruptionSpec) -> Result<MotionSequence> {
    inject_noise(&inject_occlusion(clean, spec)?, spec)
}

/// Applies one anomaly episode of the given kind. Exposed for tests and
/// tooling that need a specific archetype.
pub fn force_anomaly(seq: &MotionSequence, kind: AnomalyKind, seed: u64) -> Result<MotionSequence> {
    if seq.num_frames < 4 {
        return Err(Error::InvalidArgument("anomaly episodes need at least 4 frames".into()));
    }
    let mut out = seq.clone();
    let mut labels = out.labels.take().unwrap_or_else(|| vec![false; seq.num_frames]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    add_episode(&mut out, &mut labels, kind, &mut rng);
    out.labels = Some(labels);
    Ok(out)
}
