//! Fixed inputs shared by the benchmarks.

use gou_core::{corpus, presets, LevyTriplet2D};

pub const CORPUS_SEED: u64 = 42;

/// The two named examples followed by a slice of the random corpus.
pub fn triplets(n_random: usize) -> Vec<(String, LevyTriplet2D)> {
    let mut v = vec![
        ("continuous_example".to_string(), presets::continuous_example(0.0)),
        ("jump_example".to_string(), presets::jump_example(1.0, 1.0)),
    ];
    v.extend(corpus::corpus(CORPUS_SEED, n_random).into_iter().enumerate().map(|(i, t)| (format!("corpus_{i}"), t)));
    v
}
