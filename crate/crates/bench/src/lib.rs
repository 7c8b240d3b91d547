//! Fixtures shared by the benchmarks.

use mocap_core::data::DatasetProfile;
use mocap_core::pipeline::make_sample;
use mocap_core::{Dataset, Model, ModelConfig, Sample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform values in [-1, 1).
pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// A freshly initialised model and one stroke-desk training sample.
pub fn model_and_sample(config: fn(usize) -> ModelConfig) -> (Model, Sample) {
    let profile = DatasetProfile::builtin("stroke-desk").expect("built-in profile");
    let data = Dataset::generate(&profile, 1).expect("generation");
    let sample = make_sample(&data.clean[0], &data.corrupted[0]).expect("sample");
    let model = Model::init(config(profile.dim())).expect("model");
    (model, sample)
}
