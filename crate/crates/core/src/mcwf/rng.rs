//! Per-trajectory random streams.
//!
//! Every trajectory owns the ChaCha8 stream numbered by its index under the
//! master seed, so draws never depend on scheduling.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const SCALE: f64 = 1.0 / (1u64 << 53) as f64;

pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform on `[0, 1)`.
pub(crate) fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * SCALE
}

/// Uniform on `(0, 1]`.
pub(crate) fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * SCALE
}

/// Unit-mean exponential; `−ln` of the same draw as [`open_unit`].
pub(crate) fn exponential(rng: &mut ChaCha8Rng) -> f64 {
    -open_unit(rng).ln()
}
