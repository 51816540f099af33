//! Fixed inputs shared by the benchmarks.

use coherence_core::{max_conversion_probability, BlochVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform point of the Bloch ball.
pub fn random_bloch<R: Rng>(rng: &mut R) -> BlochVector {
    loop {
        let v: [f64; 3] = [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)];
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return BlochVector::new_unchecked(v[0], v[1], v[2]);
        }
    }
}

/// `n` seeded `(initial, target)` pairs with a positive optimal probability.
pub fn reachable_pairs(n: usize, seed: u64) -> Vec<(BlochVector, BlochVector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let (a, b) = (random_bloch(&mut rng), random_bloch(&mut rng));
        if max_conversion_probability(&a, &b) > 0.0 {
            out.push((a, b));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_are_reproducible_and_reachable() {
        let a = reachable_pairs(50, 3);
        assert_eq!(a, reachable_pairs(50, 3));
        assert!(a.iter().all(|(r, s)| r.norm() <= 1.0 && max_conversion_probability(r, s) > 0.0));
    }
}
