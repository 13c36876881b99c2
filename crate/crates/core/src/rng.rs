//! Seeded random inputs. Trial `i` of a run seeded with `seed` uses the
//! stream `seed + i`, so results do not depend on scheduling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::grid::{GridSignal, GridSpec};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    seeded(seed.wrapping_add(trial))
}

/// Standard complex Gaussian: independent `N(0, 1)` real and imaginary parts.
pub fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn unimodular<R: Rng>(rng: &mut R) -> Complex64 {
    crate::grid::e(rng.random::<f64>())
}

pub fn gaussian_signal<R: Rng>(spec: GridSpec, rng: &mut R) -> GridSignal {
    GridSignal { spec, values: (0..spec.len()).map(|_| complex_gaussian(rng)).collect() }
}

/// Uniform value in `[0, 1)` attached to a lattice point, independent of the
/// grid size: position `point` of stream `stream` in the generator seeded by
/// `seed`. Distinct for coordinates below `2^19` in magnitude and `n <= 3`.
pub fn lattice_uniform(seed: u64, stream: u64, point: &[i64]) -> f64 {
    let index = point.iter().enumerate().fold(0u128, |acc, (axis, &c)| {
        let zigzag = ((c << 1) ^ (c >> 63)) as u64 as u128;
        acc | (zigzag << (20 * axis))
    });
    let mut rng = seeded(seed);
    rng.set_stream(stream);
    rng.set_word_pos(2 * index);
    rng.random::<f64>()
}

pub fn lattice_unimodular(seed: u64, stream: u64, point: &[i64]) -> Complex64 {
    crate::grid::e(lattice_uniform(seed, stream, point))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_values_are_position_bound() {
        let a = lattice_unimodular(5, 2, &[-3]);
        assert_eq!(a, lattice_unimodular(5, 2, &[-3]));
        assert_ne!(a, lattice_unimodular(5, 2, &[3]));
        assert_ne!(a, lattice_unimodular(5, 3, &[-3]));
        assert!((a.norm() - 1.0).abs() < 1e-15);
        assert_ne!(lattice_unimodular(1, 0, &[0, 1]), lattice_unimodular(1, 0, &[1, 0]));
    }
}
