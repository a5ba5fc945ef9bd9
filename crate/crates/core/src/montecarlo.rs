//! Deterministic, parallel trial engine.
//!
//! Trials are cut into fixed blocks of [`BLOCK_TRIALS`]; block `b` always
//! draws from stream `b` of the seed, and per-block partial results are
//! merged in block order. Every reported number is therefore a function of
//! `(seed, n_trials)` alone, whatever the worker count.

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{Chord, Circle, Rejection};
use crate::rng::RngStream;
use crate::samplers::{ChordLaw, Method, SampleResult};
use crate::scalar::Scalar;
use crate::stats::{self, Z_95};

pub const BLOCK_TRIALS: u64 = 4096;

/// Below this many accepted trials, intervals use the Wilson score form.
pub const NORMAL_CI_MIN_N: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid engine configuration: {0}")]
    InvalidConfig(String),
    #[error("no accepted trials out of {n_trials}; estimate undefined")]
    Degenerate { n_trials: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineConfig<T> {
    pub seed: u64,
    pub n_trials: u64,
    pub n_workers: usize,
    pub method: Method,
    pub circle: Circle<T>,
}

impl<T: Scalar> EngineConfig<T> {
    /// Unit circle, one worker.
    pub fn new(method: Method, n_trials: u64, seed: u64) -> Self {
        Self {
            seed,
            n_trials,
            n_workers: 1,
            method,
            circle: Circle::unit(),
        }
    }

    pub fn with_workers(mut self, n_workers: usize) -> Self {
        self.n_workers = n_workers;
        self
    }

    pub fn with_circle(mut self, circle: Circle<T>) -> Self {
        self.circle = circle;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trials(mut self, n_trials: u64) -> Self {
        self.n_trials = n_trials;
        self
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.n_trials == 0 {
            return Err(EngineError::InvalidConfig("n_trials must be at least 1".into()));
        }
        if self.n_workers == 0 {
            return Err(EngineError::InvalidConfig("n_workers must be at least 1".into()));
        }
        Ok(())
    }
}

/// Runs `f(stream, count)` once per block and returns the results in block
/// order.
pub fn par_blocks<A, F>(seed: u64, n_trials: u64, n_workers: usize, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(&mut RngStream, u64) -> A + Sync,
{
    let n_blocks = n_trials.div_ceil(BLOCK_TRIALS);
    let block_len = |b: u64| BLOCK_TRIALS.min(n_trials - b * BLOCK_TRIALS);
    let run = |b: u64| f(&mut RngStream::with_stream(seed, b), block_len(b));
    let workers = (n_workers.max(1) as u64).min(n_blocks.max(1));
    if workers <= 1 {
        return (0..n_blocks).map(run).collect();
    }
    let mut tagged: Vec<(u64, A)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let run = &run;
                scope.spawn(move || {
                    (w..n_blocks)
                        .step_by(workers as usize)
                        .map(|b| (b, run(b)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("engine worker panicked"))
            .collect()
    });
    tagged.sort_by_key(|(b, _)| *b);
    tagged.into_iter().map(|(_, a)| a).collect()
}

/// One value per trial, in trial order.
pub fn collect_trials<R, F>(seed: u64, n_trials: u64, n_workers: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(&mut RngStream) -> R + Sync,
{
    par_blocks(seed, n_trials, n_workers, |rng, count| {
        (0..count).map(|_| f(rng)).collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Accepted chords from `law`, in trial order.
pub fn collect_chords<T: Scalar, L: ChordLaw<T> + ?Sized>(
    config: &EngineConfig<T>,
    law: &L,
) -> Vec<Chord<T>> {
    let circle = config.circle;
    par_blocks(config.seed, config.n_trials, config.n_workers, |rng, count| {
        (0..count)
            .filter_map(|_| match law.draw(&circle, rng) {
                SampleResult::Accepted(c) => Some(c),
                SampleResult::Rejected(_) => None,
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RejectionCounts {
    pub missed_circle: u64,
    pub fell_outside: u64,
    pub diameter: u64,
    pub degenerate: u64,
}

impl RejectionCounts {
    pub fn record(&mut self, r: Rejection) {
        *self.slot(r) += 1;
    }

    fn slot(&mut self, r: Rejection) -> &mut u64 {
        match r {
            Rejection::MissedCircle => &mut self.missed_circle,
            Rejection::FellOutside => &mut self.fell_outside,
            Rejection::Diameter => &mut self.diameter,
            Rejection::Degenerate => &mut self.degenerate,
        }
    }

    pub fn get(&self, r: Rejection) -> u64 {
        match r {
            Rejection::MissedCircle => self.missed_circle,
            Rejection::FellOutside => self.fell_outside,
            Rejection::Diameter => self.diameter,
            Rejection::Degenerate => self.degenerate,
        }
    }

    pub fn total(&self) -> u64 {
        self.missed_circle + self.fell_outside + self.diameter + self.degenerate
    }

    pub fn merge(&mut self, o: &Self) {
        for r in Rejection::ALL {
            *self.slot(r) += o.get(r);
        }
    }
}

/// Raw counts from a run: attempts, acceptances, predicate hits, rejections.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub n_trials: u64,
    pub n_accepted: u64,
    pub n_hits: u64,
    pub rejections: RejectionCounts,
}

impl Tally {
    fn merge(&mut self, o: &Self) {
        self.n_trials += o.n_trials;
        self.n_accepted += o.n_accepted;
        self.n_hits += o.n_hits;
        self.rejections.merge(&o.rejections);
    }

    /// Fraction of attempts that produced a chord.
    pub fn acceptance_rate(&self) -> f64 {
        self.n_accepted as f64 / self.n_trials as f64
    }

    pub fn estimate(&self) -> Result<Estimate, EngineError> {
        Estimate::from_counts(self.n_hits, self.n_accepted, self.n_trials)
    }
}

/// Proportion of accepted chords satisfying a predicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub p_hat: f64,
    pub n_hits: u64,
    pub n_accepted: u64,
    pub n_trials: u64,
    pub std_err: f64,
    pub ci95: (f64, f64),
}

impl Estimate {
    /// Normal-approximation interval for `n_accepted ≥ 1000`, Wilson below.
    pub fn from_counts(n_hits: u64, n_accepted: u64, n_trials: u64) -> Result<Self, EngineError> {
        if n_accepted == 0 {
            return Err(EngineError::Degenerate { n_trials });
        }
        let n = n_accepted as f64;
        let p_hat = n_hits as f64 / n;
        let std_err = (p_hat * (1.0 - p_hat) / n).sqrt();
        let ci95 = if n_accepted >= NORMAL_CI_MIN_N {
            (
                (p_hat - Z_95 * std_err).max(0.0),
                (p_hat + Z_95 * std_err).min(1.0),
            )
        } else {
            stats::wilson_interval(n_hits, n_accepted, Z_95)
        };
        Ok(Self {
            p_hat,
            n_hits,
            n_accepted,
            n_trials,
            std_err,
            ci95,
        })
    }

    pub fn covers(&self, p: f64) -> bool {
        self.ci95.0 <= p && p <= self.ci95.1
    }
}

/// Counts trials of `law` and how many accepted chords satisfy `predicate`.
pub fn run_tally<T, L, P>(config: &EngineConfig<T>, law: &L, predicate: P) -> Result<Tally, EngineError>
where
    T: Scalar,
    L: ChordLaw<T> + ?Sized,
    P: Fn(&Chord<T>) -> bool + Sync,
{
    config.validate()?;
    let circle = config.circle;
    let parts = par_blocks(config.seed, config.n_trials, config.n_workers, |rng, count| {
        let mut t = Tally {
            n_trials: count,
            ..Tally::default()
        };
        for _ in 0..count {
            match law.draw(&circle, rng) {
                SampleResult::Accepted(c) => {
                    t.n_accepted += 1;
                    if predicate(&c) {
                        t.n_hits += 1;
                    }
                }
                SampleResult::Rejected(r) => t.rejections.record(r),
            }
        }
        t
    });
    let mut total = Tally::default();
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}

/// `p_hat = #(accepted ∧ predicate) / #accepted` for `config.method`.
pub fn run_estimate<T, P>(config: &EngineConfig<T>, predicate: P) -> Result<Estimate, EngineError>
where
    T: Scalar,
    P: Fn(&Chord<T>) -> bool + Sync,
{
    run_tally(config, &config.method, predicate)?.estimate()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Sum of `counts`.
    pub total: u64,
    /// Accepted chords whose statistic fell outside the edges.
    pub out_of_range: u64,
    pub rejected: u64,
}

impl Histogram {
    pub fn empty(bin_edges: Vec<f64>) -> Self {
        let bins = bin_edges.len().saturating_sub(1);
        Self {
            bin_edges,
            counts: vec![0; bins],
            total: 0,
            out_of_range: 0,
            rejected: 0,
        }
    }

    /// Bin index for `x`; the last bin includes its upper edge.
    pub fn bin_of(edges: &[f64], x: f64) -> Option<usize> {
        let last = *edges.last()?;
        if !(x >= edges[0] && x <= last) {
            return None;
        }
        if x == last {
            return Some(edges.len() - 2);
        }
        Some(edges.partition_point(|&e| e <= x) - 1)
    }

    pub fn add(&mut self, x: f64) {
        match Self::bin_of(&self.bin_edges, x) {
            Some(i) => {
                self.counts[i] += 1;
                self.total += 1;
            }
            None => self.out_of_range += 1,
        }
    }

    fn merge(&mut self, o: &Self) {
        for (c, d) in self.counts.iter_mut().zip(&o.counts) {
            *c += d;
        }
        self.total += o.total;
        self.out_of_range += o.out_of_range;
        self.rejected += o.rejected;
    }

    pub fn n_trials(&self) -> u64 {
        self.total + self.out_of_range + self.rejected
    }
}

/// `n + 1` equally spaced edges on `[lo, hi]`.
pub fn uniform_edges(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 })
        .collect()
}

pub fn run_histogram<T, S>(
    config: &EngineConfig<T>,
    statistic: S,
    bin_edges: &[f64],
) -> Result<Histogram, EngineError>
where
    T: Scalar,
    S: Fn(&Chord<T>) -> f64 + Sync,
{
    config.validate()?;
    if bin_edges.len() < 2 || bin_edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(EngineError::InvalidConfig(
            "bin edges must be strictly increasing with at least two entries".into(),
        ));
    }
    let circle = config.circle;
    let method = config.method;
    let parts = par_blocks(config.seed, config.n_trials, config.n_workers, |rng, count| {
        let mut h = Histogram::empty(bin_edges.to_vec());
        for _ in 0..count {
            match method.sample(&circle, rng) {
                SampleResult::Accepted(c) => h.add(statistic(&c)),
                SampleResult::Rejected(_) => h.rejected += 1,
            }
        }
        h
    });
    let mut total = Histogram::empty(bin_edges.to_vec());
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worker_count_does_not_change_results() {
        for m in Method::ALL {
            let base = EngineConfig::<f64>::new(m, 10, 3);
            let one = run_estimate(&base, |c| c.is_longer_than_side());
            let four = run_estimate(&base.with_workers(4), |c| c.is_longer_than_side());
            assert_eq!(one, four);
        }
        let big = EngineConfig::<f64>::new(Method::Stick, 50_001, 9);
        let a = run_tally(&big, &Method::Stick, |c| c.is_longer_than_side()).unwrap();
        let b = run_tally(&big.with_workers(7), &Method::Stick, |c| c.is_longer_than_side()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_trials, 50_001);
    }

    #[test]
    fn collected_trials_are_in_order() {
        let a = collect_trials(4, 10_000, 1, |r| r.next_u64());
        let b = collect_trials(4, 10_000, 5, |r| r.next_u64());
        assert_eq!(a, b);
        let mut s = RngStream::with_stream(4, 0);
        assert_eq!(a[0], s.next_u64());
        let mut s1 = RngStream::with_stream(4, 1);
        assert_eq!(a[BLOCK_TRIALS as usize], s1.next_u64());
    }

    #[test]
    fn rejects_bad_config() {
        let c = EngineConfig::<f64>::new(Method::Dart, 0, 1);
        assert!(run_estimate(&c, |_| true).is_err());
        let c = EngineConfig::<f64>::new(Method::Dart, 10, 1).with_workers(0);
        assert!(run_estimate(&c, |_| true).is_err());
    }

    #[test]
    fn degenerate_estimate() {
        let never = |_: &Circle<f64>, _: &mut RngStream| SampleResult::Rejected(Rejection::MissedCircle);
        let c = EngineConfig::<f64>::new(Method::Straw, 100, 1);
        let t = run_tally(&c, &never, |_| true).unwrap();
        assert_eq!(t.rejections.missed_circle, 100);
        assert_eq!(t.estimate(), Err(EngineError::Degenerate { n_trials: 100 }));
    }

    #[test]
    fn estimate_invariants() {
        for (h, n) in [(0, 10), (10, 10), (3, 700), (363, 700), (500, 2000), (0, 5000)] {
            let e = Estimate::from_counts(h, n, n).unwrap();
            assert!(e.ci95.0 <= e.p_hat && e.p_hat <= e.ci95.1, "{e:?}");
            assert!((0.0..=1.0).contains(&e.ci95.0) && (0.0..=1.0).contains(&e.ci95.1));
            let se = (e.p_hat * (1.0 - e.p_hat) / n as f64).sqrt();
            assert_eq!(e.std_err, se);
        }
    }

    #[test]
    fn histogram_conservation() {
        let c = EngineConfig::<f64>::new(Method::Straw, 20_000, 8);
        let edges = uniform_edges(0.0, 0.5, 10);
        let h = run_histogram(&c, |ch| ch.relative_r(), &edges).unwrap();
        assert_eq!(h.counts.len(), 10);
        assert_eq!(h.counts.iter().sum::<u64>(), h.total);
        assert!(h.out_of_range > 0);
        assert_eq!(h.n_trials(), 20_000);
    }

    #[test]
    fn histogram_with_no_acceptances() {
        let h = Histogram::empty(uniform_edges(0.0, 1.0, 4));
        assert_eq!(h.counts, vec![0; 4]);
        assert_eq!(h.total, 0);
    }

    #[test]
    fn histogram_rejects_bad_edges() {
        let c = EngineConfig::<f64>::new(Method::Dart, 10, 1);
        assert!(run_histogram(&c, |ch| ch.r(), &[0.0]).is_err());
        assert!(run_histogram(&c, |ch| ch.r(), &[0.0, 0.5, 0.5, 1.0]).is_err());
    }

    #[test]
    fn bin_lookup() {
        let e = uniform_edges(0.0, 1.0, 4);
        assert_eq!(Histogram::bin_of(&e, 0.0), Some(0));
        assert_eq!(Histogram::bin_of(&e, 0.25), Some(1));
        assert_eq!(Histogram::bin_of(&e, 1.0), Some(3));
        assert_eq!(Histogram::bin_of(&e, 1.01), None);
        assert_eq!(Histogram::bin_of(&e, -0.01), None);
        assert_eq!(Histogram::bin_of(&e, f64::NAN), None);
    }
}
