//! Seeded MESP instance generator.
//!
//! Start times are spread uniformly over `[0, 4n)`, so the number of
//! timeline events grows linearly with `n`. Tasks are drawn from three
//! kinds: positive-only, negative-only and hybrid height ranges.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::MespInstance;

pub const CAPACITY: i64 = 15;
pub const MAX_LENGTH: i64 = 10;
/// Start times range over `[0, START_SPREAD * n)`.
pub const START_SPREAD: i64 = 4;
pub const MAX_POSITIVE_HEIGHT: i64 = 5;
pub const MIN_NEGATIVE_HEIGHT: i64 = -4;
/// Percent of tasks with a negative-only height range.
pub const NEGATIVE_PERCENT: u32 = 20;
/// Percent of tasks with a hybrid height range.
pub const HYBRID_PERCENT: u32 = 30;

pub fn generate_mesp(n: usize, seed: u64) -> MespInstance {
    assert!(n >= 1, "a MESP instance needs at least one task");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = START_SPREAD * n as i64;
    let mut start_min = Vec::with_capacity(n);
    let mut height_min = Vec::with_capacity(n);
    let mut height_max = Vec::with_capacity(n);
    for _ in 0..n {
        start_min.push(rng.random_range(0..span));
        let kind = rng.random_range(0..100);
        let (lo, hi) = if kind < NEGATIVE_PERCENT {
            let lo = rng.random_range(MIN_NEGATIVE_HEIGHT..=-1);
            (lo, rng.random_range(lo..=-1))
        } else if kind < NEGATIVE_PERCENT + HYBRID_PERCENT {
            (rng.random_range(MIN_NEGATIVE_HEIGHT..=-1), rng.random_range(1..=MAX_POSITIVE_HEIGHT))
        } else {
            let lo = rng.random_range(0..=2);
            (lo, rng.random_range(lo.max(1)..=MAX_POSITIVE_HEIGHT))
        };
        height_min.push(lo);
        height_max.push(hi);
    }
    MespInstance { n_tasks: n, capa: CAPACITY, max_length: MAX_LENGTH, start_min, height_min, height_max }
}
