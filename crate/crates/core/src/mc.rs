//! Seeded, chunked Monte Carlo.
//!
//! Work is split into fixed-size chunks. Chunk `j` draws from a ChaCha8
//! stream keyed by `(seed, j)`, so the random numbers a chunk sees do not
//! depend on how chunks are scheduled across threads. Per-chunk moments are
//! merged with a pairwise tree in chunk order, which makes the aggregate
//! bitwise reproducible for a fixed `(seed, samples, chunk_size)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_CHUNK: usize = 8192;

/// Sampling plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MCConfig {
    pub samples: usize,
    pub seed: u64,
    #[serde(default = "default_chunk")]
    pub chunk_size: usize,
}

fn default_chunk() -> usize {
    DEFAULT_CHUNK
}

impl MCConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            chunk_size: DEFAULT_CHUNK,
        }
    }

    pub fn with_chunk_size(mut self, chunk_size: usize) -> Self {
        self.chunk_size = chunk_size;
        self
    }

    pub(crate) fn validate(&self, op: &'static str) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::domain(op, format!("need at least 2 samples, got {}", self.samples)));
        }
        if self.chunk_size == 0 {
            return Err(Error::domain(op, "chunk size must be positive"));
        }
        Ok(())
    }

    fn chunks(&self) -> impl IndexedParallelIterator<Item = (u64, usize)> + '_ {
        let n_chunks = self.samples.div_ceil(self.chunk_size);
        (0..n_chunks).into_par_iter().map(move |j| {
            let len = self.chunk_size.min(self.samples - j * self.chunk_size);
            (j as u64, len)
        })
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub mean: f64,
    pub std_error: f64,
    #[serde(rename = "n")]
    pub n_samples: usize,
}

impl EstimateWithCI {
    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn contains(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error
    }

    /// Scales mean and standard error by a positive constant.
    pub fn scaled(self, a: f64) -> Self {
        Self {
            mean: self.mean * a,
            std_error: self.std_error * a.abs(),
            n_samples: self.n_samples,
        }
    }
}

/// Running count / mean / sum of squared deviations (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Chan et al. parallel combination.
    pub fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let mean = self.mean + d * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + d * d * (self.n as f64 * other.n as f64) / n as f64;
        Self { n, mean, m2 }
    }

    pub fn estimate(&self) -> EstimateWithCI {
        let var = if self.n > 1 { self.m2 / (self.n - 1) as f64 } else { 0.0 };
        EstimateWithCI {
            mean: self.mean,
            std_error: (var / self.n as f64).sqrt(),
            n_samples: self.n,
        }
    }
}

/// Pairwise reduction in index order.
pub(crate) fn pairwise<T: Copy, F: Fn(T, T) -> T>(items: &[T], zero: T, merge: &F) -> T {
    match items.len() {
        0 => zero,
        1 => items[0],
        n => {
            let (l, r) = items.split_at(n / 2);
            merge(pairwise(l, zero, merge), pairwise(r, zero, merge))
        }
    }
}

/// The generator for chunk `index` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `sample` `cfg.samples` times across chunks and returns the mean and
/// standard error. `sample` may be called from several threads.
pub fn estimate<F>(cfg: &MCConfig, sample: F) -> EstimateWithCI
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let per_chunk: Vec<Moments> = cfg
        .chunks()
        .map(|(j, len)| {
            let mut rng = chunk_rng(cfg.seed, j);
            let mut m = Moments::default();
            for _ in 0..len {
                m.push(sample(&mut rng));
            }
            m
        })
        .collect();
    pairwise(&per_chunk, Moments::default(), &Moments::merge).estimate()
}

/// Like [`estimate`], but each chunk gets a reusable scratch state built
/// by `init` (buffers, precomputed tables).
pub fn estimate_with<S, I, F>(cfg: &MCConfig, init: I, sample: F) -> EstimateWithCI
where
    I: Fn() -> S + Sync,
    F: Fn(&mut S, &mut ChaCha8Rng) -> f64 + Sync,
{
    let per_chunk: Vec<Moments> = cfg
        .chunks()
        .map(|(j, len)| {
            let mut rng = chunk_rng(cfg.seed, j);
            let mut state = init();
            let mut m = Moments::default();
            for _ in 0..len {
                m.push(sample(&mut state, &mut rng));
            }
            m
        })
        .collect();
    pairwise(&per_chunk, Moments::default(), &Moments::merge).estimate()
}
