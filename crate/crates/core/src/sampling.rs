//! Deterministic sample generation: a splitmix64 stream and scrambled Halton
//! directions on the unit sphere.

use alloc::vec::Vec;
use core::f64::consts::PI;

/// splitmix64 (Steele, Lea, Flood).
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

/// `count` unit vectors in `R^n` from a Halton sequence with a seed-dependent
/// Cranley-Patterson shift.
///
/// `n = 2` uses the angle directly, `n = 3` the area-preserving cylinder map;
/// higher dimensions go through a Box-Muller transform of pairs of Halton
/// coordinates.
pub fn sphere_directions(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(n >= 1 && n <= 2 * PRIMES.len());
    let mut rng = SplitMix64::new(seed ^ 0x5EED_D1C3_0000_0000);
    let dims = match n {
        1 | 2 => 1,
        3 => 2,
        _ => 2 * n.div_ceil(2),
    };
    let shift: Vec<f64> = (0..dims).map(|_| rng.next_f64()).collect();
    let coord = |i: usize, d: usize| -> f64 {
        let u = radical_inverse(i as u64 + 1, PRIMES[d]) + shift[d];
        u - libm::floor(u)
    };
    (0..count)
        .map(|i| match n {
            1 => alloc::vec![if coord(i, 0) < 0.5 { -1.0 } else { 1.0 }],
            2 => {
                let t = 2.0 * PI * coord(i, 0);
                alloc::vec![libm::cos(t), libm::sin(t)]
            }
            3 => {
                let z = 2.0 * coord(i, 0) - 1.0;
                let phi = 2.0 * PI * coord(i, 1);
                let r = libm::sqrt((1.0 - z * z).max(0.0));
                alloc::vec![r * libm::cos(phi), r * libm::sin(phi), z]
            }
            _ => {
                let mut g = Vec::with_capacity(dims);
                for p in 0..dims / 2 {
                    let u1 = coord(i, 2 * p).max(1e-300);
                    let u2 = coord(i, 2 * p + 1);
                    let rad = libm::sqrt(-2.0 * libm::log(u1));
                    g.push(rad * libm::cos(2.0 * PI * u2));
                    g.push(rad * libm::sin(2.0 * PI * u2));
                }
                g.truncate(n);
                let norm = libm::sqrt(g.iter().map(|v| v * v).sum::<f64>());
                g.iter().map(|v| v / norm).collect()
            }
        })
        .collect()
}
