//! Seeded draws of admissible parameters and time triples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::qcalc::ProcessParams;

/// `q` values visited in turn by every other case of a sweep.
pub const BOUNDARY_Q: [f64; 6] = [-1.0, -0.99, 0.0, 0.5, 0.99, 1.0];

/// Parameters with a start point `x` and times `0 < s < t < u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCase {
    pub params: ProcessParams,
    pub x: f64,
    pub s: f64,
    pub t: f64,
    pub u: f64,
}

/// `count` cases with `theta in [-1.5, 1.5]`, `tau in [0, 1.5]`,
/// `x in [-2, 2]` and times in `[0.2, 3]` at least 0.1 apart. Even-indexed
/// cases take `q` from [`BOUNDARY_Q`], odd ones draw it uniformly.
pub fn parameter_sweep(seed: u64, count: usize) -> Vec<SweepCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let q = if i % 2 == 0 { BOUNDARY_Q[(i / 2) % BOUNDARY_Q.len()] } else { rng.gen_range(-1.0..=1.0) };
            let theta = rng.gen_range(-1.5..=1.5);
            let tau = rng.gen_range(0.0..=1.5);
            let params = ProcessParams::new(theta, tau, q).expect("sweep ranges are admissible");
            let s = rng.gen_range(0.2..1.0);
            let t = s + rng.gen_range(0.1..1.0);
            let u = t + rng.gen_range(0.1..1.0);
            SweepCase { params, x: rng.gen_range(-2.0..=2.0), s, t, u }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_admissible() {
        let a = parameter_sweep(3, 40);
        assert_eq!(a, parameter_sweep(3, 40));
        assert_ne!(a, parameter_sweep(4, 40));
        for c in &a {
            assert!(0.2 <= c.s && c.s < c.t && c.t < c.u && c.u <= 3.0);
            assert!((-2.0..=2.0).contains(&c.x));
        }
        for q in BOUNDARY_Q {
            assert!(a.iter().any(|c| c.params.q() == q));
        }
    }
}
