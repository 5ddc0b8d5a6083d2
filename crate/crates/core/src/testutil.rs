use alloc::vec::Vec;

use crate::sampling::SplitMix64;

/// Tiny deterministic generator for unit tests.
pub struct Lcg(SplitMix64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg(SplitMix64::new(seed))
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.0.next_f64()
    }

    pub fn vec(&mut self, n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n).map(|_| self.uniform(lo, hi)).collect()
    }

    /// Point in the open ball of radius `r`.
    pub fn ball(&mut self, n: usize, r: f64) -> Vec<f64> {
        loop {
            let v = self.vec(n, -r, r);
            if v.iter().map(|t| t * t).sum::<f64>() < r * r {
                return v;
            }
        }
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
