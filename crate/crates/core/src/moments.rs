//! Mean and variance of `S_n`, the number of sign changes in
//! `(X_1, …, X_n)`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::mvn::{ar1_matrix, orthant_qmc_with, Method, ProbEstimate, QmcConfig};
use crate::orthant::{f4, g4, orthant2, orthant3, FourDimFactor, Rho};
use crate::pattern::SignPattern;

/// Largest segment length accepted by [`variance_numeric`].
pub const MAX_NUMERIC_N: usize = 10;

/// Mean, second moment and variance of `S_n` with per-entry provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub n: usize,
    pub rho: Rho,
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
    pub mean_method: Method,
    pub second_moment_method: Method,
    pub variance_method: Method,
    pub mean_error: f64,
    pub second_moment_error: f64,
    pub variance_error: f64,
}

/// `E(S_n) = (n - 1) arccos(ρ) / π`.
pub fn mean_sign_changes(n: usize, r: Rho) -> Result<f64> {
    if n < 2 {
        return domain(format!("segment length must be at least 2, got {n}"));
    }
    Ok((n - 1) as f64 * r.value().acos() / PI)
}

/// Closed-form `V(S_n)` for `n ∈ {2, 3, 4}`.
pub fn variance_exact(n: usize, r: Rho) -> Result<f64> {
    let p = r.value();
    let as1 = p.asin();
    match n {
        2 => Ok(0.25 - as1 * as1 / (PI * PI)),
        3 => Ok(0.5 - 4.0 * as1 * as1 / (PI * PI) + (p * p).asin() / PI),
        4 => {
            let f = |a, b| FourDimFactor::new(a, b).map(f4);
            let g = |a, b| FourDimFactor::new(a, b).map(g4);
            let half = 0.5 - as1 / PI;
            Ok(4.0 * g(p, p)? + 2.0 * f(p, -p)? + 16.0 * g(p, -p)? + 8.0 * f(-p, p)? + 18.0 * f(-p, -p)?
                - 9.0 * half * half)
        }
        _ => domain(format!("closed-form variance exists only for n in 2..=4, got {n}")),
    }
}

/// Closed-form pattern probability for `n ≤ 4`.
fn pattern_closed(e: &SignPattern, r: Rho) -> Result<f64> {
    let p = r.value();
    let s = e.signs();
    match e.len() {
        1 => Ok(0.5),
        2 => Ok(orthant2(Rho::new(s[0] * s[1] * p)?)),
        3 => orthant3(s[0] * s[1] * p, s[0] * s[2] * p * p, s[1] * s[2] * p),
        4 => {
            // Normalize to a leading 1; complements share probabilities.
            let e = if e.bits()[0] { e.clone() } else { e.complement() };
            let f = |a, b| FourDimFactor::new(a, b).map(f4);
            let g = |a, b| FourDimFactor::new(a, b).map(g4);
            match e.to_string().as_str() {
                "1111" => f(p, p),
                "1000" | "1110" => g(p, p),
                "1011" | "1101" => g(p, -p),
                "1100" => f(p, -p),
                "1001" => f(-p, p),
                "1010" => f(-p, -p),
                _ => unreachable!("all leading-1 patterns of length 4 are listed"),
            }
        }
        n => domain(format!("no closed form for {n}-point patterns")),
    }
}

/// `p_e(R)` for the AR(1) correlation matrix, with default QMC settings for
/// `n ≥ 5`.
pub fn pattern_probability(e: &SignPattern, r: Rho) -> Result<ProbEstimate> {
    pattern_probability_with(e, r, &QmcConfig::default())
}

pub fn pattern_probability_with(e: &SignPattern, r: Rho, cfg: &QmcConfig) -> Result<ProbEstimate> {
    if e.len() <= 4 {
        return pattern_closed(e, r).map(ProbEstimate::closed_form);
    }
    orthant_qmc_with(&ar1_matrix(r, e.len())?, e, cfg)
}

/// Moments of `S_n` assembled from all `2^n` pattern probabilities.
///
/// Patterns are paired with their complements, so only the `2^(n-1)`
/// patterns starting with a 1 are evaluated. Errors add linearly.
pub fn variance_numeric(n: usize, r: Rho, tol: f64, seed: u64) -> Result<MomentReport> {
    if !(2..=MAX_NUMERIC_N).contains(&n) {
        return domain(format!("variance_numeric supports 2 <= n <= {MAX_NUMERIC_N}, got {n}"));
    }
    let cfg = QmcConfig::new(tol, seed);
    let half: Vec<SignPattern> = SignPattern::all(n).filter(|e| e.bits()[0]).collect();
    let probs: Vec<ProbEstimate> =
        half.par_iter().map(|e| pattern_probability_with(e, r, &cfg)).collect::<Result<_>>()?;
    let (mut m1, mut m2, mut e1, mut e2) = (0.0, 0.0, 0.0, 0.0);
    for (e, p) in half.iter().zip(&probs) {
        let c = e.changes() as f64;
        m1 += 2.0 * c * p.value;
        m2 += 2.0 * c * c * p.value;
        e1 += 2.0 * c * p.error;
        e2 += 2.0 * c * c * p.error;
    }
    let method = if n <= 4 { Method::ClosedForm } else { Method::Qmc };
    Ok(MomentReport {
        n,
        rho: r,
        mean: m1,
        second_moment: m2,
        variance: m2 - m1 * m1,
        mean_method: method,
        second_moment_method: method,
        variance_method: method,
        mean_error: e1,
        second_moment_error: e2,
        variance_error: e2 + 2.0 * m1.abs() * e1,
    })
}
