//! Closed-form and quadrature Gaussian orthant probabilities in two to five
//! dimensions for AR(1)-type correlation structures.
//!
//! Four-dimensional orthants reduce to Cheng's integral
//!
//! ```text
//! I(h, x) = ∫₀ˣ arcsin((1 - h²) t / (h² - t²)) / √(1 - t²) dt
//! ```
//!
//! which has a dilogarithm closed form. Two of the five four-point marginals
//! of a length-5 AR(1) segment need the two-parameter generalization
//! `J(h, k, x)`, which is only available numerically (apart from one special
//! curve at `h = √3/2`).
//!
//! Both integrands are odd in `t` and depend on `h`, `k` only through their
//! squares, so `I` and `J` are even in every argument.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::quadrature::{self, QuadResult};
use crate::specfun::li2;

/// Absolute tolerance used for every quadrature in this module.
pub const QUAD_TOL: f64 = 1e-12;

/// Lag-one serial correlation, strictly inside `(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Rho(f64);

impl Rho {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value.abs() < 1.0 {
            Ok(Rho(value))
        } else {
            domain(format!("correlation must satisfy |rho| < 1, got {value}"))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn abs(self) -> Rho {
        Rho(self.0.abs())
    }

    /// `ρ^k`, the AR(1) correlation at lag `k`.
    pub fn lag(self, k: usize) -> f64 {
        self.0.powi(k as i32)
    }
}

impl TryFrom<f64> for Rho {
    type Error = crate::Error;
    fn try_from(v: f64) -> Result<Self> {
        Rho::new(v)
    }
}

/// Arguments of Cheng's integral, `0 ≤ x < h² < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChengArgs {
    h: f64,
    x: f64,
}

impl ChengArgs {
    pub fn new(h: f64, x: f64) -> Result<Self> {
        let h2 = h * h;
        if !(h.is_finite() && x.is_finite()) || !(0.0 <= x && x < h2 && h2 < 1.0) {
            return domain(format!("Cheng integral needs 0 <= x < h^2 < 1, got h = {h}, x = {x}"));
        }
        Ok(ChengArgs { h, x })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn x(&self) -> f64 {
        self.x
    }
}

/// Arguments of `J(h, k, x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JArgs {
    h: f64,
    k: f64,
    x: f64,
}

impl JArgs {
    /// Requires `0 < |h|, |k| < 1`, `|x| < min(|h|, |k|)` and the arcsine
    /// argument of the integrand to stay within `[-1, 1]` on `(0, x)`.
    pub fn new(h: f64, k: f64, x: f64) -> Result<Self> {
        let (ha, ka, xa) = (h.abs(), k.abs(), x.abs());
        if !(h.is_finite() && k.is_finite() && x.is_finite()) {
            return domain("J arguments must be finite");
        }
        if !(ha > 0.0 && ha < 1.0 && ka > 0.0 && ka < 1.0) {
            return domain(format!("J needs 0 < |h|, |k| < 1, got h = {h}, k = {k}"));
        }
        if xa >= ha.min(ka) {
            return domain(format!("J needs |x| < min(|h|, |k|), got x = {x}"));
        }
        // The arcsine argument increases monotonically in t.
        if j_arcsin_arg(ha, ka, xa) > 1.0 + 4.0 * f64::EPSILON {
            return domain(format!("J integrand leaves the arcsine domain at t = {x}"));
        }
        Ok(JArgs { h, k, x })
    }

    /// The special curve `h = √3/2`, `x = √((1 - √(1 - k²)) / 2)`.
    pub fn special(k: f64) -> Result<Self> {
        if !(k > 0.0 && k < 1.0) {
            return domain(format!("special J curve needs 0 < k < 1, got {k}"));
        }
        let ell = (1.0 - k * k).sqrt();
        JArgs::new(0.75f64.sqrt(), k, ((1.0 - ell) / 2.0).sqrt())
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    /// `ℓ = √(1 - k²)`.
    pub fn ell(&self) -> f64 {
        (1.0 - self.k * self.k).sqrt()
    }

    /// `m = (1 + ℓ - √(1 + 3ℓ) √(1 - ℓ)) / (2ℓ)`.
    pub fn m(&self) -> f64 {
        let ell = self.ell();
        (1.0 + ell - (1.0 + 3.0 * ell).sqrt() * (1.0 - ell).sqrt()) / (2.0 * ell)
    }
}

/// Parameters `(a, b)` of the four-point correlation matrices
///
/// ```text
/// R⁺ = | 1    a    ab   a²b |      R⁻ = flip the sign of row/column 1 of R⁺
///      | a    1    b    ab  |
///      | ab   b    1    a   |
///      | a²b  ab   a    1   |
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourDimFactor {
    a: f64,
    b: f64,
}

impl FourDimFactor {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_finite() && b.is_finite() && a.abs() < 1.0 && b.abs() < 1.0 {
            Ok(FourDimFactor { a, b })
        } else {
            domain(format!("four-point factor needs |a|, |b| < 1, got a = {a}, b = {b}"))
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

/// `P{X₁ > 0, X₂ > 0}` for a standard bivariate normal with correlation `r`.
pub fn orthant2(r: Rho) -> f64 {
    0.25 + r.value().asin() / (2.0 * PI)
}

/// `P{X₁ > 0, X₂ > 0, X₃ > 0}` for a standard trivariate normal.
pub fn orthant3(r12: f64, r13: f64, r23: f64) -> Result<f64> {
    let ok = [r12, r13, r23].iter().all(|r| r.is_finite() && r.abs() < 1.0);
    let det = 1.0 + 2.0 * r12 * r13 * r23 - r12 * r12 - r13 * r13 - r23 * r23;
    if !ok || det <= 0.0 {
        return domain(format!("correlations ({r12}, {r13}, {r23}) do not form a positive definite matrix"));
    }
    Ok(0.125 + (r12.asin() + r13.asin() + r23.asin()) / (4.0 * PI))
}

fn cheng_integrand(h2: f64, t: f64) -> f64 {
    let arg = ((1.0 - h2) * t / (h2 - t * t)).min(1.0);
    arg.asin() / (1.0 - t * t).sqrt()
}

/// Dilogarithm evaluation of `I(h, x)` for `0 < x < h² < 1`, with `h ≥ 0`.
fn cheng_dilog(h: f64, x: f64) -> f64 {
    let h2 = h * h;
    // (h² - √(h⁴ - x²)) / x without cancellation.
    let u = x / (h2 + (h2 * h2 - x * x).sqrt());
    let cx = Complex64::new(x, (1.0 - x * x).sqrt());
    let ch = Complex64::new(h, (1.0 - h2).sqrt());
    let asx = x.asin();
    -0.5 * asx * asx + 0.5 * li2(Complex64::new(-u * u, 0.0)).re + 2.0 * li2(cx * u).re - li2(ch * ch * (u * u)).re
}

/// Cheng's integral `I(h, x)` in closed form.
pub fn cheng_i(args: ChengArgs) -> f64 {
    if args.x == 0.0 {
        return 0.0;
    }
    cheng_dilog(args.h.abs(), args.x)
}

/// Cheng's integral by adaptive quadrature of its defining integrand.
pub fn cheng_i_quadrature(args: ChengArgs) -> Result<QuadResult> {
    let h2 = args.h * args.h;
    let x = args.x;
    if x > 0.9 {
        let theta = x.asin();
        quadrature::integrate(
            |th: f64| {
                let s = th.sin();
                ((1.0 - h2) * s / (h2 - s * s)).min(1.0).asin()
            },
            0.0,
            theta,
            QUAD_TOL,
        )
    } else {
        quadrature::integrate(|t| cheng_integrand(h2, t), 0.0, x, QUAD_TOL)
    }
}

/// `I(h, x)` for any sign of `h` and `x` with `|x| < h²`, using evenness.
fn cheng_even(h: f64, x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        cheng_dilog(h.abs(), x.abs())
    }
}

/// `p₁₁₁₁(R⁺)`.
pub fn f4(factor: FourDimFactor) -> f64 {
    let FourDimFactor { a, b } = factor;
    let x = a * a * b;
    let asa = a.asin();
    1.0 / 16.0
        + (2.0 * asa + b.asin() + 2.0 * (a * b).asin() + x.asin()) / (8.0 * PI)
        + (asa * asa + cheng_even(a, x)) / (4.0 * PI * PI)
}

/// `p₁₁₁₁(R⁻)`.
pub fn g4(factor: FourDimFactor) -> f64 {
    let FourDimFactor { a, b } = factor;
    let x = a * a * b;
    let asa = a.asin();
    1.0 / 16.0 + (b.asin() - x.asin()) / (8.0 * PI) - (asa * asa + cheng_even(a, x)) / (4.0 * PI * PI)
}

fn j_arcsin_arg(h: f64, k: f64, t: f64) -> f64 {
    let (h2, k2, t2) = (h * h, k * k, t * t);
    (1.0 - h2).sqrt() * (1.0 - k2).sqrt() * t / ((h2 - t2).sqrt() * (k2 - t2).sqrt())
}

/// `J(h, k, x)` by adaptive quadrature, with its error estimate.
pub fn quadrature_j_detailed(args: JArgs) -> Result<QuadResult> {
    let (h, k) = (args.h.abs(), args.k.abs());
    let x = args.x.abs();
    let integrand = |t: f64| j_arcsin_arg(h, k, t).min(1.0).asin() / (1.0 - t * t).sqrt();
    if x > 0.9 {
        quadrature::integrate(|th: f64| j_arcsin_arg(h, k, th.sin()).min(1.0).asin(), 0.0, x.asin(), QUAD_TOL)
    } else {
        quadrature::integrate(integrand, 0.0, x, QUAD_TOL)
    }
}

/// `J(h, k, x) = ∫₀ˣ arcsin(√(1-h²)√(1-k²) t / (√(h²-t²)√(k²-t²))) / √(1-t²) dt`.
pub fn quadrature_j(args: JArgs) -> Result<f64> {
    quadrature_j_detailed(args).map(|r| r.value)
}

/// Closed form of `J(√3/2, k, √((1 - √(1 - k²)) / 2))`.
pub fn special_j_closed(k: f64) -> Result<f64> {
    let args = JArgs::special(k)?;
    let ell = args.ell();
    let m = args.m();
    let asl = ell.asin();
    let w = Complex64::new(ell, k);
    let pair = |z: Complex64| 2.0 * li2(z).re;
    Ok(PI * PI / 8.0 - PI / 6.0 * asl + asl * asl / 6.0
        - PI / 2.0 * ((1.0 - ell) / 2.0).sqrt().asin()
        - li2(Complex64::new(-m * m, 0.0)).re / 3.0
        - 2.0 / 3.0 * pair(w * m)
        + pair(w * (m * m)) / 3.0)
}

/// `P{X_i > 0, X_j > 0, X_k > 0, X_l > 0}` for the 4-point outlier pattern
/// (1,2,3,5) or (1,3,4,5) of a length-5 AR(1) segment.
fn outlier_orthant(r: Rho) -> Result<f64> {
    let p = r.value();
    if p == 0.0 {
        return Ok(1.0 / 16.0);
    }
    let (p2, p3, p4) = (p * p, p.powi(3), p.powi(4));
    let j = quadrature_j(JArgs::new(p.abs(), p2, p4)?)?;
    let as1 = p.asin();
    let as2 = p2.asin();
    Ok(1.0 / 16.0
        + (2.0 * as1 + 2.0 * as2 + p3.asin() + p4.asin()) / (8.0 * PI)
        + (as1 * as2 + p.signum() * j) / (4.0 * PI * PI))
}

/// Positive-orthant probability of four of the five points of a length-5
/// AR(1) segment. `indices` are 1-based time points.
pub fn q_pattern_4of5(indices: [usize; 4], r: Rho) -> Result<f64> {
    let mut idx = indices;
    idx.sort_unstable();
    if idx[0] < 1 || idx[3] > 5 || idx.windows(2).any(|w| w[0] == w[1]) {
        return domain(format!("need four distinct time points in 1..=5, got {indices:?}"));
    }
    let omitted = (1..=5).find(|i| !idx.contains(i)).expect("one index is omitted");
    let p = r.value();
    match omitted {
        1 | 5 => Ok(f4(FourDimFactor::new(p, p)?)),
        3 => Ok(f4(FourDimFactor::new(p, p * p)?)),
        _ => outlier_orthant(r),
    }
}

/// `p₁₁₁₁₁` for a length-5 AR(1) segment by inclusion-exclusion over the
/// lower-order positive orthants.
pub fn p11111(r: Rho) -> Result<f64> {
    let lag = |i: usize, j: usize| r.lag(j - i);
    let mut pairs = 0.0;
    let mut triples = 0.0;
    let mut quads = 0.0;
    for i in 1..=5 {
        for j in i + 1..=5 {
            pairs += orthant2(Rho::new(lag(i, j))?);
            for k in j + 1..=5 {
                triples += orthant3(lag(i, j), lag(i, k), lag(j, k))?;
            }
        }
    }
    for omit in 1..=5 {
        let idx: Vec<usize> = (1..=5).filter(|&i| i != omit).collect();
        quads += q_pattern_4of5([idx[0], idx[1], idx[2], idx[3]], r)?;
    }
    Ok(0.5 * (1.0 - 2.5 + pairs - triples + quads))
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn rho(v: f64) -> Rho {
        Rho::new(v).unwrap()
    }

    #[test]
    fn rho_domain() {
        assert!(Rho::new(1.0).is_err());
        assert!(Rho::new(-1.0).is_err());
        assert!(Rho::new(f64::NAN).is_err());
        assert_eq!(rho(-0.5).abs().value(), 0.5);
        assert_eq!(rho(0.5).lag(3), 0.125);
    }

    #[test]
    fn bivariate() {
        assert_eq!(orthant2(rho(0.0)), 0.25);
        assert!((orthant2(rho(0.5)) - 1.0 / 3.0).abs() < 1e-15);
        assert!((orthant2(rho(-0.5)) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn trivariate() {
        assert_eq!(orthant3(0.0, 0.0, 0.0).unwrap(), 0.125);
        let r = 0.5f64;
        let want = 0.125 + (PI / 6.0 + 0.25f64.asin() + PI / 6.0) / (4.0 * PI);
        assert!((orthant3(r, r * r, r).unwrap() - want).abs() < 1e-15);
        let p010 = 0.125 + (-2.0 * r.asin() + (r * r).asin()) / (4.0 * PI);
        assert!((orthant3(-r, r * r, -r).unwrap() - p010).abs() < 1e-15);
        assert!(orthant3(0.9, -0.9, 0.9).is_err());
        assert!(orthant3(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn cheng_args_domain() {
        assert!(ChengArgs::new(0.5, 0.25).is_err());
        assert!(ChengArgs::new(0.5, -0.1).is_err());
        assert!(ChengArgs::new(1.0, 0.5).is_err());
        assert_eq!(cheng_i(ChengArgs::new(0.7, 0.0).unwrap()), 0.0);
    }

    #[test]
    fn cheng_closed_form_matches_quadrature() {
        for &(h, x) in &[(0.5, 0.125), (0.9, 0.5), (0.3, 0.08), (0.99, 0.97), (0.999, 0.998), (0.1, 1e-4)] {
            let args = ChengArgs::new(h, x).unwrap();
            let q = cheng_i_quadrature(args).unwrap();
            assert!((cheng_i(args) - q.value).abs() < 1e-10, "h={h} x={x}");
        }
    }

    #[test]
    fn cheng_reference_value() {
        // 30-digit quadrature of the defining integral.
        let v = cheng_i(ChengArgs::new(0.5, 0.125).unwrap());
        assert!((v - 0.024_628_434_626_372_812).abs() < 1e-15);
    }

    #[test]
    fn four_point_constants() {
        let f = |a, b| f4(FourDimFactor::new(a, b).unwrap());
        let g = |a, b| g4(FourDimFactor::new(a, b).unwrap());
        assert_eq!(f(0.0, 0.0), 0.0625);
        assert_eq!(g(0.0, 0.0), 0.0625);
        assert!((f(0.5, 0.5) - 0.157_662_581_754_482_541_6).abs() < 1e-15);
        assert!((f(-0.5, -0.5) - 0.022_689_309_835_790_484_2).abs() < 1e-15);
        assert!((f(0.5, -0.5) - 0.065_807_331_541_540_695_7).abs() < 1e-15);
        assert!((g(0.5, 0.5) - 0.070_778_407_392_642_352_7).abs() < 1e-15);
        assert!((g(0.5, -0.5) - 0.039_085_012_644_667_743_4).abs() < 1e-15);
        assert!(FourDimFactor::new(1.0, 0.0).is_err());
    }

    #[test]
    fn j_reduces_to_i_on_diagonal() {
        for &(h, x) in &[(0.5, 0.1), (0.8, 0.6), (0.95, 0.85)] {
            let j = quadrature_j(JArgs::new(h, h, x).unwrap()).unwrap();
            let i = cheng_i(ChengArgs::new(h, x).unwrap());
            assert!((j - i).abs() < 1e-10);
        }
        assert_eq!(quadrature_j(JArgs::new(0.5, 0.3, 0.0).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn j_domain() {
        assert!(JArgs::new(0.5, 0.25, 0.3).is_err());
        assert!(JArgs::new(0.0, 0.25, 0.1).is_err());
        // Arcsine argument exceeds one before t reaches x.
        assert!(JArgs::new(0.3, 0.3, 0.295).is_err());
        assert!(JArgs::special(0.0).is_err());
        assert!(JArgs::special(1.0).is_err());
    }

    #[test]
    fn special_curve() {
        for k in [1e-3, 0.1, 0.5, 0.9] {
            let closed = special_j_closed(k).unwrap();
            let quad = quadrature_j(JArgs::special(k).unwrap()).unwrap();
            assert!((closed - quad).abs() < 1e-10, "k={k}: {closed} vs {quad}");
        }
        // x → 0 as k → 0, so the closed form must vanish.
        let tiny = special_j_closed(1e-7).unwrap();
        assert!(tiny.abs() < 1e-7, "{tiny}");
        assert!(special_j_closed(1.2).is_err());
    }

    #[test]
    fn five_point_constants() {
        let r = rho(0.5);
        let q1245 = q_pattern_4of5([1, 2, 4, 5], r).unwrap();
        assert!((q1245 - 0.133_776_821_269_470_249_4).abs() < 1e-14);
        let q1235 = q_pattern_4of5([5, 3, 2, 1], r).unwrap();
        assert!((q1235 - 0.135_445_152_066_138_699_9).abs() < 1e-11);
        let q1345 = q_pattern_4of5([1, 3, 4, 5], r).unwrap();
        assert!((q1235 - q1345).abs() < 1e-15);
        for idx in [[1, 2, 3, 4], [2, 3, 4, 5], [1, 2, 4, 5], [1, 2, 3, 5]] {
            assert_eq!(q_pattern_4of5(idx, rho(0.0)).unwrap(), 1.0 / 16.0);
        }
        assert!(q_pattern_4of5([1, 1, 2, 3], r).is_err());
        assert!(q_pattern_4of5([0, 1, 2, 3], r).is_err());
        assert!(q_pattern_4of5([2, 3, 4, 6], r).is_err());
    }

    #[test]
    fn five_point_independent() {
        assert!((p11111(rho(0.0)).unwrap() - 1.0 / 32.0).abs() < 1e-16);
    }
}
