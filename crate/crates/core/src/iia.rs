//! Independent interval approximation (IIA) for the second moment of `S_n`.
//!
//! Under the assumption that the gaps between successive sign changes are
//! independent, `c_n ≈ E(S_n²)` satisfies
//!
//! ```text
//! c_n = arccos(ρ)/(6π) (n-1) n (n+1)
//!       - π/arccos(ρ) Σ_{k=2}^{n-1} [1/2 - arcsin(ρ^{n-k+1})/π] c_k,   c_1 = 0.
//! ```
//!
//! The literal recursion is not symmetric in `ρ`. The symmetrized variant
//! replaces `ρ` by `|ρ|` throughout, including in the mean that is
//! subtracted to form the variance.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::moments::{mean_sign_changes, variance_exact};
use crate::orthant::Rho;

#[derive(Debug, Clone, PartialEq)]
pub struct IiaSequence {
    pub rho: Rho,
    /// `values[k - 1] = c_k`.
    pub values: Vec<f64>,
    pub symmetrized: bool,
}

impl IiaSequence {
    pub fn c(&self, k: usize) -> f64 {
        self.values[k - 1]
    }
}

pub fn iia_second_moment(n: usize, r: Rho, symmetrized: bool) -> Result<IiaSequence> {
    if n < 1 {
        return domain("IIA recursion needs n >= 1");
    }
    let eff = if symmetrized { r.abs() } else { r };
    let p = eff.value();
    let acos = p.acos();
    let mut c = vec![0.0; n];
    for m in 2..=n {
        let mut sum = 0.0;
        for k in 2..m {
            sum += (0.5 - eff.lag(m - k + 1).asin() / PI) * c[k - 1];
        }
        let mf = m as f64;
        c[m - 1] = acos / (6.0 * PI) * (mf - 1.0) * mf * (mf + 1.0) - PI / acos * sum;
    }
    Ok(IiaSequence { rho: r, values: c, symmetrized })
}

/// `c_n - E(S_n)²`.
pub fn iia_variance(n: usize, r: Rho, symmetrized: bool) -> Result<f64> {
    if n < 2 {
        return domain(format!("IIA variance needs n >= 2, got {n}"));
    }
    let seq = iia_second_moment(n, r, symmetrized)?;
    let eff = if symmetrized { r.abs() } else { r };
    let mean = mean_sign_changes(n, eff)?;
    Ok(seq.c(n) - mean * mean)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Positive,
    Negative,
}

/// Location and size of the largest model-vs-theory gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separation {
    pub rho_star: f64,
    pub separation: f64,
}

const RHO_EDGE: f64 = 0.999;
const REFINE_TOL: f64 = 1e-5;

fn gap(rho: f64, symmetrized: bool) -> Result<f64> {
    let r = Rho::new(rho)?;
    Ok((iia_variance(4, r, symmetrized)? - variance_exact(4, r)?).abs())
}

/// Maximizes `|IIA variance - exact variance|` for `n = 4` over one side of
/// `ρ = 0` by a grid scan followed by golden-section refinement.
pub fn separation_search(n: usize, side: Side, grid_step: f64, symmetrized: bool) -> Result<Separation> {
    if n != 4 {
        return domain(format!("separation search needs the exact n = 4 variance, got n = {n}"));
    }
    if !(grid_step > 0.0 && grid_step <= 1e-3) {
        return domain(format!("grid step must lie in (0, 1e-3], got {grid_step}"));
    }
    let sign = match side {
        Side::Positive => 1.0,
        Side::Negative => -1.0,
    };
    let steps = (RHO_EDGE / grid_step).floor() as usize;
    let mut best = (0.0, f64::NEG_INFINITY);
    let mut best_i = 1;
    for i in 1..=steps {
        let x = i as f64 * grid_step;
        let v = gap(sign * x, symmetrized)?;
        if v > best.1 {
            best = (x, v);
            best_i = i;
        }
    }
    // Golden-section search on the bracketing grid cells.
    let mut lo = ((best_i - 1) as f64 * grid_step).max(grid_step * 1e-3);
    let mut hi = ((best_i + 1) as f64 * grid_step).min(RHO_EDGE);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = gap(sign * x1, symmetrized)?;
    let mut f2 = gap(sign * x2, symmetrized)?;
    while hi - lo > REFINE_TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = gap(sign * x2, symmetrized)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = gap(sign * x1, symmetrized)?;
        }
    }
    let x = 0.5 * (lo + hi);
    let v = gap(sign * x, symmetrized)?;
    let (x, v) = if v >= best.1 { (x, v) } else { best };
    Ok(Separation { rho_star: sign * x, separation: v })
}
