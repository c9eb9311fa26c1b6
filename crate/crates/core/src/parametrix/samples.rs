//! Sample points for pointwise checks of symbol identities.

use crate::mero::MeroMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `count` seeded points in a box around the pole cloud of `symbols`, kept at
/// distance at least `clearance` from every pole translated by each of `shifts`.
pub fn sample_points(symbols: &[&MeroMatrix], shifts: &[f64], count: usize, clearance: f64, seed: u64) -> Vec<Complex64> {
    let mut avoid = Vec::new();
    for s in symbols {
        for p in s.pole_locations() {
            for &t in shifts {
                avoid.push(p - t);
            }
        }
    }
    let (mut lo, mut hi, mut top) = (-1.0f64, 1.0f64, 1.0f64);
    for p in &avoid {
        lo = lo.min(p.re);
        hi = hi.max(p.re);
        top = top.max(p.im.abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0usize;
    let mut clear = clearance;
    while out.len() < count {
        let z = Complex64::new(rng.gen_range(lo - 1.0..hi + 1.0), rng.gen_range(-top - 1.0..top + 1.0));
        if avoid.iter().all(|p| (z - p).norm() >= clear) {
            out.push(z);
        }
        tries += 1;
        if tries.is_multiple_of(10_000) {
            clear *= 0.5;
        }
    }
    out
}
