//! Multivariate normal orthant probabilities by separation of variables and
//! randomized quasi-Monte Carlo.
//!
//! The orthant `{s_i X_i < 0}` is rewritten as `P{Y < 0}` with
//! `Cov(Y) = S R S`. Variables are reordered so the most constrained ones
//! are conditioned first, the covariance is Cholesky factored, and the
//! resulting `(n-1)`-dimensional integral over the unit cube is evaluated
//! with a rank-1 Korobov lattice. The integrand is periodized with the
//! order-2 sine transform `w = x - sin(2πx)/(2π)`, which makes lattice rules
//! converge far faster than the raw integrand allows. Each estimate averages
//! independent random shifts of the lattice; the reported error is three
//! standard errors across shifts.

use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2};
use std::sync::{Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::function::erf::{erfc, erfc_inv};

use crate::error::{domain, Error, Result};
use crate::orthant::Rho;
use crate::pattern::SignPattern;

/// How a probability was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    Quadrature,
    Qmc,
    MonteCarlo,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::Quadrature => "quadrature",
            Method::Qmc => "qmc",
            Method::MonteCarlo => "mc",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// A probability with its absolute error estimate and provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbEstimate {
    pub value: f64,
    pub error: f64,
    pub method: Method,
    /// Integrand evaluations, quadrature nodes, or simulated paths.
    pub samples: u64,
}

impl ProbEstimate {
    pub fn closed_form(value: f64) -> Self {
        ProbEstimate { value, error: f64::EPSILON, method: Method::ClosedForm, samples: 0 }
    }
}

/// Symmetric, unit-diagonal, positive definite matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CorrelationMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return domain(format!("expected {n}x{n} entries, got {}", data.len()));
        }
        for i in 0..n {
            if data[i * n + i] != 1.0 {
                return domain(format!("diagonal entry {i} is {}, not 1", data[i * n + i]));
            }
            for j in 0..i {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if !a.is_finite() || a != b {
                    return domain(format!("matrix is not symmetric at ({i}, {j})"));
                }
            }
        }
        let m = CorrelationMatrix { n, data };
        m.cholesky()?;
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// `S R S` for a diagonal sign matrix `S`.
    pub fn sign_flipped(&self, signs: &[f64]) -> CorrelationMatrix {
        let n = self.n;
        let mut data = self.data.clone();
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] *= signs[i] * signs[j];
            }
        }
        CorrelationMatrix { n, data }
    }

    /// Lower-triangular Cholesky factor, row-major.
    pub fn cholesky(&self) -> Result<Vec<f64>> {
        let n = self.n;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.data[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s <= 0.0 {
                        return Err(Error::NotPositiveDefinite { pivot: i, value: s });
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(l)
    }
}

/// The `n × n` AR(1) correlation matrix with entries `ρ^|i-j|`.
pub fn ar1_matrix(r: Rho, n: usize) -> Result<CorrelationMatrix> {
    if n == 0 {
        return domain("AR(1) matrix needs n >= 1");
    }
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] = r.lag(i.abs_diff(j));
        }
    }
    CorrelationMatrix::new(n, data)
}

/// Tuning for [`orthant_qmc_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmcConfig {
    /// Target absolute error (three standard errors across shifts).
    pub tol: f64,
    pub seed: u64,
    /// Independent random shifts per lattice size.
    pub shifts: usize,
    /// Cap on total integrand evaluations across all lattice sizes.
    pub max_evals: u64,
}

impl QmcConfig {
    pub const DEFAULT_TOL: f64 = 1e-10;
    pub const DEFAULT_SHIFTS: usize = 12;
    pub const DEFAULT_MAX_EVALS: u64 = 1 << 26;

    pub fn new(tol: f64, seed: u64) -> Self {
        QmcConfig { tol, seed, shifts: Self::DEFAULT_SHIFTS, max_evals: Self::DEFAULT_MAX_EVALS }
    }
}

impl Default for QmcConfig {
    fn default() -> Self {
        QmcConfig::new(Self::DEFAULT_TOL, 0)
    }
}

fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

fn norm_quantile(p: f64) -> f64 {
    -SQRT_2 * erfc_inv(2.0 * p)
}

fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Reorders variables (most constrained first) and returns the Cholesky
/// factor of the permuted covariance. All upper limits are zero, so only
/// the conditional means matter for the ordering.
fn reordered_cholesky(cov: &CorrelationMatrix) -> Result<Vec<f64>> {
    let n = cov.n;
    let mut sigma = cov.data.clone();
    let mut c = vec![0.0; n * n];
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut best = i;
        let mut best_prob = f64::INFINITY;
        for j in i..n {
            let mut var = sigma[j * n + j];
            let mut shift = 0.0;
            for k in 0..i {
                var -= c[j * n + k] * c[j * n + k];
                shift += c[j * n + k] * y[k];
            }
            if var <= 0.0 {
                return Err(Error::NotPositiveDefinite { pivot: j, value: var });
            }
            let prob = norm_cdf(-shift / var.sqrt());
            if prob < best_prob {
                best_prob = prob;
                best = j;
            }
        }
        if best != i {
            for k in 0..n {
                sigma.swap(i * n + k, best * n + k);
            }
            for k in 0..n {
                sigma.swap(k * n + i, k * n + best);
            }
            for k in 0..i {
                c.swap(i * n + k, best * n + k);
            }
        }
        let mut d = sigma[i * n + i];
        for k in 0..i {
            d -= c[i * n + k] * c[i * n + k];
        }
        if d <= 0.0 {
            return Err(Error::NotPositiveDefinite { pivot: i, value: d });
        }
        let d = d.sqrt();
        c[i * n + i] = d;
        for j in i + 1..n {
            let mut s = sigma[j * n + i];
            for k in 0..i {
                s -= c[j * n + k] * c[i * n + k];
            }
            c[j * n + i] = s / d;
        }
        // Expected value of the truncated normal on (-inf, upper].
        let mut shift = 0.0;
        for k in 0..i {
            shift += c[i * n + k] * y[k];
        }
        let upper = -shift / d;
        y[i] = -norm_pdf(upper) / norm_cdf(upper).max(f64::MIN_POSITIVE);
    }
    Ok(c)
}

/// Separation-of-variables integrand on `[0, 1]^{n-1}`.
struct Integrand {
    n: usize,
    chol: Vec<f64>,
}

impl Integrand {
    fn eval(&self, w: &[f64], y: &mut [f64]) -> f64 {
        let n = self.n;
        let c = &self.chol;
        let mut e = 0.5;
        let mut prod = e;
        for i in 1..n {
            let p = (w[i - 1] * e).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
            y[i - 1] = norm_quantile(p);
            let mut s = 0.0;
            for k in 0..i {
                s += c[i * n + k] * y[k];
            }
            e = norm_cdf(-s / c[i * n + i]);
            prod *= e;
            if prod == 0.0 {
                break;
            }
        }
        prod
    }
}

fn largest_prime_below(limit: u64) -> u64 {
    let is_prime = |m: u64| {
        if m < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= m {
            if m.is_multiple_of(d) {
                return false;
            }
            d += 1;
        }
        true
    };
    (2..limit).rev().find(|&m| is_prime(m)).expect("limit > 2")
}

/// Generating vector `(1, a, a², …) mod N`.
fn korobov_vector(n_points: u64, a: u64, dim: usize) -> Vec<u64> {
    let mut z = Vec::with_capacity(dim);
    let mut v = 1u64;
    for _ in 0..dim {
        z.push(v);
        v = v * a % n_points;
    }
    z
}

/// Worst-case error criterion `P₂` for periodic integrands of smoothness 2.
fn p2_criterion(n_points: u64, z: &[u64]) -> f64 {
    let mut total = 0.0;
    for k in 0..n_points {
        let mut prod = 1.0;
        for &zj in z {
            let x = ((k * zj) % n_points) as f64 / n_points as f64;
            prod *= 1.0 + 2.0 * PI * PI * (x * x - x + 1.0 / 6.0);
        }
        total += prod;
    }
    total / n_points as f64 - 1.0
}

const KOROBOV_CANDIDATES: u64 = 48;

/// Korobov multiplier minimizing `P₂` over a fixed candidate set. Results
/// are cached per `(N, dim)`.
fn korobov_multiplier(n_points: u64, dim: usize) -> u64 {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), u64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&a) = cache.lock().expect("cache lock").get(&(n_points, dim)) {
        return a;
    }
    let a = if dim <= 1 {
        1
    } else {
        const GOLDEN: f64 = 0.618_033_988_749_894_9;
        let candidates: Vec<u64> = (1..=KOROBOV_CANDIDATES)
            .map(|c| {
                let frac = (c as f64 * GOLDEN).fract() * 0.5;
                ((frac * n_points as f64) as u64).max(2)
            })
            .collect();
        candidates
            .par_iter()
            .map(|&a| (p2_criterion(n_points, &korobov_vector(n_points, a, dim)), a))
            .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)))
            .expect("non-empty candidate set")
            .1
    };
    cache.lock().expect("cache lock").insert((n_points, dim), a);
    a
}

fn shifted_lattice_mean(f: &Integrand, n_points: u64, z: &[u64], shift: &[f64]) -> f64 {
    let dim = z.len();
    let mut w = vec![0.0; dim];
    let mut y = vec![0.0; f.n];
    let inv = 1.0 / n_points as f64;
    // Neumaier summation.
    let mut sum = 0.0;
    let mut comp = 0.0;
    for k in 0..n_points {
        let mut weight = 1.0;
        for j in 0..dim {
            let x = ((k * z[j]) % n_points) as f64 * inv + shift[j];
            let x = x - x.floor();
            let tx = 2.0 * PI * x;
            w[j] = x - tx.sin() / (2.0 * PI);
            weight *= 1.0 - tx.cos();
        }
        let v = if weight == 0.0 { 0.0 } else { weight * f.eval(&w, &mut y) };
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    (sum + comp) * inv
}

/// `P{(-1)^{e_i} X_i < 0 for all i}` for `X ~ N(0, m)`.
pub fn orthant_qmc(m: &CorrelationMatrix, signs: &SignPattern, tol: f64, seed: u64) -> Result<ProbEstimate> {
    orthant_qmc_with(m, signs, &QmcConfig::new(tol, seed))
}

pub fn orthant_qmc_with(m: &CorrelationMatrix, signs: &SignPattern, cfg: &QmcConfig) -> Result<ProbEstimate> {
    let n = m.dim();
    if signs.len() != n {
        return domain(format!("pattern has {} bits for a {n}-dimensional matrix", signs.len()));
    }
    if cfg.tol.is_nan() || cfg.tol <= 0.0 || cfg.shifts < 2 {
        return domain("QMC needs tol > 0 and at least two shifts");
    }
    // Y_i = -s_i X_i must all be negative, i.e. {s_i X_i > 0}; by central
    // symmetry this equals P{s_i X_i < 0}, so flip by the pattern signs.
    let cov = m.sign_flipped(&signs.signs());
    if n == 1 {
        return Ok(ProbEstimate { value: 0.5, error: 0.0, method: Method::Qmc, samples: 0 });
    }
    let integrand = Integrand { n, chol: reordered_cholesky(&cov)? };
    let dim = n - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut used = 0u64;
    let mut best = (0.5, f64::INFINITY);
    for log2 in 10..=40u32 {
        let n_points = largest_prime_below(1u64 << log2);
        let cost = n_points * cfg.shifts as u64;
        if used + cost > cfg.max_evals {
            break;
        }
        let a = korobov_multiplier(n_points, dim);
        let z = korobov_vector(n_points, a, dim);
        let shifts: Vec<Vec<f64>> = (0..cfg.shifts).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect();
        let means: Vec<f64> = shifts.par_iter().map(|s| shifted_lattice_mean(&integrand, n_points, &z, s)).collect();
        used += cost;
        let q = means.len() as f64;
        let mean = means.iter().sum::<f64>() / q;
        let var = means.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (q - 1.0);
        let error = 3.0 * (var / q).sqrt();
        best = (mean, error);
        if error <= cfg.tol {
            return Ok(ProbEstimate { value: mean.clamp(0.0, 1.0), error, method: Method::Qmc, samples: used });
        }
    }
    Err(Error::Convergence { estimate: best.0, error: best.1, tol: cfg.tol })
}
