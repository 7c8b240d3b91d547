//! Smooth quasi-periodic joint trajectories.
//!
//! Joints move together: each sequence draws 2–4 movement sources, sinusoids
//! with periods of 20–80 frames and random phases, and every coordinate is a
//! base offset plus a signed combination of those sources plus a linear
//! drift of at most 0.002 per frame. How strongly each coordinate follows
//! each source (its loading, magnitude 0.05–0.25) is drawn once per dataset,
//! like a shared skeleton performing the same exercise, and varies by up to
//! ±20% between sequences.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DatasetProfile, MotionSequence};
use crate::error::Result;

const MIN_COMPONENTS: usize = 2;
const MAX_COMPONENTS: usize = 4;
const MIN_PERIOD: f64 = 20.0;
const MAX_PERIOD: f64 = 80.0;
const MIN_AMPLITUDE: f64 = 0.05;
const MAX_AMPLITUDE: f64 = 0.25;
const MAX_DRIFT: f64 = 0.002;
const LOADING_JITTER: f64 = 0.2;

/// Upper bound on `|x_{t+1} − x_t|` for any generated coordinate:
/// `MAX_COMPONENTS · MAX_AMPLITUDE · 2π / MIN_PERIOD + MAX_DRIFT`.
pub const SMOOTHNESS_BOUND: f64 =
    MAX_COMPONENTS as f64 * MAX_AMPLITUDE * 2.0 * PI / MIN_PERIOD + MAX_DRIFT;

/// SplitMix64 finalizer over `seed`, a stream tag and an index. Used to
/// give every sequence and every corruption stage an independent seed.
pub fn mix_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed
        ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const STREAM_GENERATE: u64 = 0x6745;
const STREAM_LOADINGS: u64 = 0x10AD;

/// Signed source loadings, `dim × MAX_COMPONENTS`, row-major.
fn loadings(seed: u64, dim: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, STREAM_LOADINGS, dim as u64));
    (0..dim * MAX_COMPONENTS)
        .map(|_| {
            let magnitude = rng.random_range(MIN_AMPLITUDE..MAX_AMPLITUDE);
            if rng.random::<bool>() {
                magnitude
            } else {
                -magnitude
            }
        })
        .collect()
}

/// Fully observed, all-normal sequences for `profile`, deterministic in `seed`.
pub fn generate_clean(profile: &DatasetProfile, seed: u64) -> Result<Vec<MotionSequence>> {
    profile.validate()?;
    let shared = loadings(seed, 3 * profile.joint_count);
    (0..profile.num_sequences)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, STREAM_GENERATE, i as u64));
            let frames = trajectory(&mut rng, &shared, profile.joint_count, profile.sequence_length);
            MotionSequence::new(
                format!("{}-{:05}", profile.name, i),
                profile.joint_count,
                profile.sequence_length,
                frames,
            )
        })
        .collect()
}

fn trajectory(rng: &mut ChaCha8Rng, shared: &[f64], joints: usize, len: usize) -> Vec<f64> {
    let dim = 3 * joints;
    let components = rng.random_range(MIN_COMPONENTS..=MAX_COMPONENTS);
    let sources: Vec<(f64, f64)> = (0..components)
        .map(|_| {
            (
                2.0 * PI / rng.random_range(MIN_PERIOD..MAX_PERIOD),
                rng.random_range(0.0..2.0 * PI),
            )
        })
        .collect();
    let mut frames = vec![0.0; len * dim];
    for c in 0..dim {
        let base = rng.random_range(-1.0..1.0);
        let drift = rng.random_range(-MAX_DRIFT..MAX_DRIFT);
        let weights: Vec<f64> = (0..components)
            .map(|k| {
                let l = shared[c * MAX_COMPONENTS + k];
                let jitter = rng.random_range(1.0 - LOADING_JITTER..1.0 + LOADING_JITTER);
                l.signum() * (l.abs() * jitter).clamp(MIN_AMPLITUDE, MAX_AMPLITUDE)
            })
            .collect();
        for t in 0..len {
            let tf = t as f64;
            let mut v = base + drift * tf;
            for (&(w, phase), &a) in sources.iter().zip(&weights) {
                v += a * (w * tf + phase).sin();
            }
            frames[t * dim + c] = v;
        }
    }
    frames
}
