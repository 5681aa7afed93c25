//! Seeded random streams. Every random draw in the library goes through a
//! named stream derived from a single master seed so runs are reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::la::normalize;

/// Independent generator for `stream` under `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Well-known stream ids.
pub mod streams {
    pub const POLY_START: u64 = 1;
    pub const RHS: u64 = 2;
    pub const EIG_START: u64 = 3;
    pub const MATRIX: u64 = 4;
    pub const NEWTON_START: u64 = 5;
}

/// Standard normal vector of length `n`.
pub fn normal_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Standard normal vector scaled to unit 2-norm.
pub fn unit_normal_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let mut v = normal_vector(rng, n);
        if normalize(&mut v) > 0.0 {
            return v;
        }
    }
}
