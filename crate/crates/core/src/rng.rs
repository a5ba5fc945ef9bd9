//! Deterministic, splittable random streams.
//!
//! A stream is a ChaCha8 keystream addressed by `(key, stream id)`. The key
//! is expanded from a 64-bit seed and the 64-bit stream id selects one of
//! 2⁶⁴ non-overlapping keystreams, so siblings never share output.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an unrelated seed for a named sub-experiment.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    mix64(mix64(seed) ^ tag.rotate_left(17) ^ 0xD6E8_FEB8_6659_FD93)
}

#[derive(Clone, Debug)]
pub struct RngStream {
    key: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    /// The master stream for `seed` (stream id 0).
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Stream `stream` under the key expanded from `seed`.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            key: seed,
            stream,
            inner,
        }
    }

    /// Child stream `index`. Children live under a key derived from this
    /// stream's `(key, id)`, so two forks of distinct parents never collide
    /// and forking does not advance the parent.
    pub fn fork(&self, index: u64) -> Self {
        Self::with_stream(mix64(self.key ^ mix64(self.stream)), index)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_uniform(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_uniform()
    }
}

/// `k` streams for `seed`: stream `i` is `RngStream::with_stream(seed, i)`,
/// so stream 0 is the master stream.
pub fn fork_streams(seed: u64, k: usize) -> Vec<RngStream> {
    (0..k as u64)
        .map(|i| RngStream::with_stream(seed, i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn draws(s: &mut RngStream, n: usize) -> Vec<f64> {
        (0..n).map(|_| s.next_uniform()).collect()
    }

    #[test]
    fn same_seed_same_sequence() {
        let a = draws(&mut RngStream::new(42), 100);
        let b = draws(&mut RngStream::new(42), 100);
        assert_eq!(a, b);
        let c = draws(&mut RngStream::new(43), 100);
        assert_ne!(a, c);
    }

    #[test]
    fn single_fork_is_master() {
        let mut forks = fork_streams(42, 1);
        assert_eq!(
            draws(&mut forks[0], 50),
            draws(&mut RngStream::new(42), 50)
        );
    }

    #[test]
    fn fork_lists_are_reproducible() {
        let mut a = fork_streams(42, 4);
        let mut b = fork_streams(42, 4);
        for (x, y) in a.iter_mut().zip(b.iter_mut()) {
            assert_eq!(draws(x, 20), draws(y, 20));
        }
    }

    #[test]
    fn sibling_streams_uncorrelated() {
        let mut s = fork_streams(42, 2);
        let n = 10_000;
        let x = draws(&mut s[0], n);
        let y = draws(&mut s[1], n);
        let mx = x.iter().sum::<f64>() / n as f64;
        let my = y.iter().sum::<f64>() / n as f64;
        let cov: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
        let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
        let corr = cov / (vx * vy).sqrt();
        assert!(corr.abs() < 0.05, "corr = {corr}");
        // lag-1 serial correlation within each stream
        for v in [&x, &y] {
            let m = v.iter().sum::<f64>() / n as f64;
            let num: f64 = v.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
            let den: f64 = v.iter().map(|a| (a - m).powi(2)).sum();
            assert!((num / den).abs() < 0.05);
        }
    }

    #[test]
    fn fork_does_not_touch_parent() {
        let parent = RngStream::new(9);
        let mut before = parent.clone();
        let _child = parent.fork(3);
        let mut after = parent;
        assert_eq!(draws(&mut before, 10), draws(&mut after, 10));
        let mut c1 = RngStream::new(9).fork(3);
        let mut c2 = RngStream::new(9).fork(4);
        assert_ne!(draws(&mut c1, 10), draws(&mut c2, 10));
    }

    #[test]
    fn uniform_range() {
        let mut s = RngStream::new(1);
        for _ in 0..10_000 {
            let u = s.next_uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }
}
