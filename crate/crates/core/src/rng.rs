//! Seedable, splittable random streams.
//!
//! A stream is identified by `(seed, stream_id)`. The seed keys a ChaCha8
//! generator and the stream id selects its 64-bit stream counter, so trial
//! `i` of an experiment can own stream `i` and produce the same variates no
//! matter which worker runs it.

use num_bigint::BigUint;
use rand::distr::{Distribution, Open01};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RandomStream {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on the open interval (0, 1).
    pub fn open01(&mut self) -> f64 {
        Open01.sample(&mut self.rng)
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Exponential with mean 1 by inversion of an open-interval uniform.
    pub fn exponential(&mut self) -> f64 {
        -self.open01().ln()
    }

    pub fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    pub fn below(&mut self, bound: u64) -> u64 {
        self.rng.random_range(0..bound)
    }

    /// Uniform on `0..bound` by masked rejection over 32-bit limbs.
    pub fn biguint_below(&mut self, bound: &BigUint) -> BigUint {
        assert!(bound.bits() > 0, "bound must be positive");
        let bits = bound.bits();
        let limbs = bits.div_ceil(32) as usize;
        let top_bits = bits - 32 * (limbs as u64 - 1);
        let mask = if top_bits == 32 {
            u32::MAX
        } else {
            (1u32 << top_bits) - 1
        };
        loop {
            // little-endian limbs, most significant last
            let mut words: Vec<u32> = (0..limbs).map(|_| self.next_u32()).collect();
            words[limbs - 1] &= mask;
            let candidate = BigUint::from_slice(&words);
            if &candidate < bound {
                return candidate;
            }
        }
    }
}

pub fn sample_exponential(rng: &mut RandomStream) -> f64 {
    rng.exponential()
}

/// Runs `trials` independent trials, trial `t` on stream `(seed, t)`, and
/// counts how many return `true`. The count does not depend on the number of
/// worker threads.
pub fn par_count_hits<F>(trials: u64, seed: u64, trial: F) -> u64
where
    F: Fn(&mut RandomStream) -> bool + Sync,
{
    use rayon::prelude::*;
    (0..trials)
        .into_par_iter()
        .filter(|&t| trial(&mut RandomStream::new(seed, t)))
        .count() as u64
}

/// Maps trial `t` to `f(stream (seed, t))` and collects the results in trial order.
pub fn par_map_trials<T, F>(trials: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RandomStream) -> T + Sync,
{
    use rayon::prelude::*;
    (0..trials)
        .into_par_iter()
        .map(|t| f(&mut RandomStream::new(seed, t)))
        .collect()
}
