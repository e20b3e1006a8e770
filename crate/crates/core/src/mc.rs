//! Seeded Monte Carlo simulation of stationary AR(1) segments.
//!
//! Paths are split into fixed blocks of [`PATHS_PER_STREAM`]. Block `b` draws
//! from ChaCha8 stream `b` of the run seed, so the result depends only on
//! `(n, ρ, paths, seed)` and not on how blocks are scheduled across threads.
//! Blocks are reduced as integer histograms, which makes the reduction
//! order-independent.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::orthant::Rho;

pub const PATHS_PER_STREAM: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub rho: Rho,
    pub paths: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub mean_hat: f64,
    pub var_hat: f64,
    pub se_mean: f64,
    pub se_var: f64,
    /// `histogram[k]` counts paths with exactly `k` sign changes.
    pub histogram: Vec<u64>,
}

impl SimResult {
    pub fn paths(&self) -> u64 {
        self.histogram.iter().sum()
    }
}

/// Strict sign change: a zero on either side never counts.
pub fn is_change(a: f64, b: f64) -> bool {
    (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)
}

fn simulate_block(cfg: &SimConfig, block: u64, count: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(block);
    let rho = cfg.rho.value();
    let innov = (1.0 - rho * rho).sqrt();
    let mut hist = vec![0u64; cfg.n];
    for _ in 0..count {
        let mut x: f64 = StandardNormal.sample(&mut rng);
        let mut changes = 0;
        for _ in 1..cfg.n {
            let eps: f64 = StandardNormal.sample(&mut rng);
            let next = rho * x + innov * eps;
            if is_change(x, next) {
                changes += 1;
            }
            x = next;
        }
        hist[changes] += 1;
    }
    hist
}

/// Simulates `paths` independent segments and summarizes `S_n`.
pub fn simulate(cfg: &SimConfig) -> Result<SimResult> {
    if cfg.n < 2 {
        return domain(format!("segment length must be at least 2, got {}", cfg.n));
    }
    if cfg.paths == 0 {
        return domain("need at least one path");
    }
    let blocks = cfg.paths.div_ceil(PATHS_PER_STREAM);
    let histogram = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = PATHS_PER_STREAM.min(cfg.paths - b * PATHS_PER_STREAM);
            simulate_block(cfg, b, count)
        })
        .reduce(
            || vec![0u64; cfg.n],
            |mut acc, h| {
                acc.iter_mut().zip(h).for_each(|(a, b)| *a += b);
                acc
            },
        );
    Ok(summarize(histogram))
}

/// Sample moments and standard errors from a histogram of change counts.
pub fn summarize(histogram: Vec<u64>) -> SimResult {
    let total: u64 = histogram.iter().sum();
    let p = total as f64;
    let mean = histogram.iter().enumerate().map(|(k, &c)| k as f64 * c as f64).sum::<f64>() / p;
    let central = |order: i32| {
        histogram.iter().enumerate().map(|(k, &c)| (k as f64 - mean).powi(order) * c as f64).sum::<f64>() / p
    };
    let m2 = central(2);
    let m4 = central(4);
    let (var_hat, se_mean, se_var) = if total > 1 {
        let var = m2 * p / (p - 1.0);
        let var_of_var = ((m4 - m2 * m2 * (p - 3.0) / (p - 1.0)) / p).max(0.0);
        (var, (var / p).sqrt(), var_of_var.sqrt())
    } else {
        (0.0, 0.0, 0.0)
    };
    SimResult { mean_hat: mean, var_hat, se_mean, se_var, histogram }
}
