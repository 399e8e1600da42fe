//! Random streams keyed by `(seed, path_index)`.
//!
//! Every path owns an independent ChaCha stream selected by its index, so the
//! draws of path `i` never depend on how many other paths exist, in which
//! order they run, or on how many worker threads share them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type PathRng = ChaCha8Rng;

pub fn path_rng(seed: u64, path_index: u64) -> PathRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_index);
    rng
}

/// An auxiliary stream for draws that must not perturb the path itself (the
/// Brownian-bridge minima): the same ChaCha stream, far past any position the
/// path can reach.
pub fn aux_rng(seed: u64, path_index: u64) -> PathRng {
    let mut rng = path_rng(seed, path_index);
    rng.set_word_pos(1u128 << 64);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_distinct_and_reproducible() {
        let a: Vec<u64> = path_rng(5, 0).random_iter().take(4).collect();
        let b: Vec<u64> = path_rng(5, 1).random_iter().take(4).collect();
        assert_ne!(a, b);
        assert_eq!(a, path_rng(5, 0).random_iter().take(4).collect::<Vec<u64>>());
        assert_ne!(a, path_rng(6, 0).random_iter().take(4).collect::<Vec<u64>>());
        assert_ne!(a, aux_rng(5, 0).random_iter().take(4).collect::<Vec<u64>>());
    }
}
