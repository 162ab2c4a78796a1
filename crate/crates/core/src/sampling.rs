//! Seeded uniform sampling.
//!
//! Every random draw in the crate goes through ChaCha8 seeded with
//! `seed_from_u64(seed)`; independent streams (per box, per chunk) are
//! selected with `set_stream`, so results do not depend on thread count.
//! A coordinate is `lower + u * (upper - lower)` with `u` drawn as `f64`
//! in `[0, 1)`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::lattice::InputBox;
use crate::scalar::Scalar;

pub(crate) const CHUNK: usize = 4096;

pub(crate) fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn uniform_point<T: Scalar>(rng: &mut ChaCha8Rng, b: &InputBox<T>) -> Vec<T> {
    b.lower()
        .iter()
        .zip(b.upper())
        .map(|(&lo, &hi)| {
            let u: f64 = rng.gen();
            lo + T::lit(u) * (hi - lo)
        })
        .collect()
}

/// Stream id for chunk `chunk` of box `box_index`.
pub(crate) fn chunk_stream(box_index: usize, chunk: usize) -> u64 {
    ((box_index as u64) << 32) | chunk as u64
}
