//! Complex dilogarithm on the principal branch.
//!
//! `Li₂(z) = Σ z^k / k²` for `|z| ≤ 1`, continued analytically to the plane
//! cut along the real interval `(1, ∞)`. Small arguments use the defining
//! series directly. Everything else is mapped by inversion or reflection
//! into `{|z| ≤ 1, Re z ≤ 1/2}` and summed as a Bernoulli series in
//! `u = -ln(1 - z)`, which converges for `|u| < 2π`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};

pub type ComplexValue = Complex64;

const PI2_6: f64 = PI * PI / 6.0;

/// `B_{2k} / (2k+1)!` for k = 1..10.
const BERNOULLI_COEFFS: [f64; 10] = [
    1.0 / 36.0,
    -1.0 / 3600.0,
    1.0 / 211_680.0,
    -1.0 / 10_886_400.0,
    5.0 / 66.0 / 39_916_800.0,
    -691.0 / 2730.0 / 6_227_020_800.0,
    7.0 / 6.0 / 1_307_674_368_000.0,
    -3617.0 / 510.0 / 355_687_428_096_000.0,
    43867.0 / 798.0 / 121_645_100_408_832_000.0,
    -174_611.0 / 330.0 / 51_090_942_171_709_440_000.0,
];

fn power_series(z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut zk = z;
    for k in 1..200u32 {
        let term = zk / f64::from(k * k);
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
        zk *= z;
    }
    sum
}

fn bernoulli_series(u: Complex64) -> Complex64 {
    let u2 = u * u;
    let mut sum = u - 0.25 * u2;
    let mut p = u * u2;
    for c in BERNOULLI_COEFFS {
        sum += c * p;
        p *= u2;
    }
    sum
}

/// Real part of `Li₂(x)` for real `x > 1`.
fn dilog_above_one(x: f64) -> f64 {
    if x <= 2.0 {
        PI2_6 - x.ln() * (x - 1.0).ln() - li2(Complex64::new(1.0 - x, 0.0)).re
    } else {
        let l = x.ln();
        2.0 * PI2_6 - 0.5 * l * l - li2(Complex64::new(1.0 / x, 0.0)).re
    }
}

/// Unchecked evaluation; callers guarantee finite input.
pub(crate) fn li2(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    if y == 0.0 {
        if x == 1.0 {
            return Complex64::new(PI2_6, 0.0);
        }
        if x > 1.0 {
            // Limit from below the cut.
            return Complex64::new(dilog_above_one(x), -PI * x.ln());
        }
    }
    let nz = z.norm_sqr();
    if nz == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if nz <= 0.25 {
        return power_series(z);
    }
    let one = Complex64::new(1.0, 0.0);
    if x <= 0.5 {
        if nz <= 1.0 {
            bernoulli_series(-(one - z).ln())
        } else {
            // Li₂(z) = -Li₂(1/z) - π²/6 - ½ ln²(-z)
            let lz = (-z).ln();
            -bernoulli_series(-(one - one / z).ln()) - PI2_6 - 0.5 * lz * lz
        }
    } else if nz <= 2.0 * x {
        // |1 - z| ≤ 1: Li₂(z) = -Li₂(1-z) + π²/6 - ln z ln(1-z)
        let w = one - z;
        let u = -z.ln();
        let rest = PI2_6 + u * w.ln();
        if w.norm_sqr() <= 0.25 {
            -power_series(w) + rest
        } else {
            -bernoulli_series(u) + rest
        }
    } else {
        let lz = (-z).ln();
        -bernoulli_series(-(one - one / z).ln()) - PI2_6 - 0.5 * lz * lz
    }
}

/// Principal-branch complex dilogarithm.
///
/// On the cut `(1, ∞)` the value below the cut is returned
/// (`Im Li₂(x) = -π ln x`).
pub fn dilog(z: ComplexValue) -> Result<ComplexValue> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return domain(format!("dilog argument must be finite, got {z}"));
    }
    Ok(li2(z))
}

/// `Li₂(z) + Li₂(z̄) = 2 Re Li₂(z)`, defined for `z ∉ (1, ∞)`.
pub fn dilog_real_part_pair(z: ComplexValue) -> Result<f64> {
    if z.im == 0.0 && z.re > 1.0 {
        return domain(format!("conjugate pair undefined on the cut, z = {}", z.re));
    }
    dilog(z).map(|v| 2.0 * v.re)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Independent route: truncated defining series.
    fn brute_series(z: Complex64, terms: u32) -> Complex64 {
        let mut s = c(0.0, 0.0);
        let mut zk = c(1.0, 0.0);
        for k in 1..=terms {
            zk *= z;
            s += zk / f64::from(k).powi(2);
        }
        s
    }

    #[test]
    fn basel_and_alternating_values() {
        assert_eq!(dilog(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        // Σ 1/k² with Euler-Maclaurin tail 1/N - 1/(2N²) + 1/(6N³).
        let n = 100_000u32;
        let nf = f64::from(n);
        let head: f64 = (1..=n).rev().map(|k| 1.0 / f64::from(k).powi(2)).sum();
        let basel = head + 1.0 / nf - 0.5 / (nf * nf) + 1.0 / (6.0 * nf.powi(3));
        assert!((basel - 1.644_934_066_848_226).abs() < 1e-14);
        assert!((dilog(c(1.0, 0.0)).unwrap().re - basel).abs() < 1e-14);
        let alt = dilog(c(-1.0, 0.0)).unwrap();
        assert!((alt.re + 0.822_467_033_424_113).abs() < 1e-14);
        assert_eq!(alt.im, 0.0);
    }

    #[test]
    fn pair_at_i() {
        // Σ Re(i^k)/k² = Σ (-1)^j / (2j)² = -π²/48, doubled.
        let v = dilog_real_part_pair(c(0.0, 1.0)).unwrap();
        assert!((v + 0.411_233_516_712_056).abs() < 1e-14);
    }

    #[test]
    fn pair_on_real_segment_is_twice_real_value() {
        for x in [-0.9, -0.3, 0.0, 0.2, 0.7, 0.99] {
            let z = c(x, 0.0);
            let v = dilog(z).unwrap();
            assert_eq!(v.im, 0.0);
            assert_eq!(dilog_real_part_pair(z).unwrap(), 2.0 * v.re);
        }
    }

    #[test]
    fn rejects_non_finite_and_cut() {
        assert!(dilog(c(f64::NAN, 0.0)).is_err());
        assert!(dilog(c(0.0, f64::INFINITY)).is_err());
        assert!(dilog_real_part_pair(c(1.5, 0.0)).is_err());
        assert!(dilog_real_part_pair(c(1.5, 1e-300)).is_ok());
    }

    #[test]
    fn matches_direct_series_inside_disk() {
        for &(r, t) in &[(0.3, 0.4), (0.6, 1.1), (0.8, -2.0), (0.95, 1.05), (0.7, 3.0)] {
            let z = Complex64::from_polar(r, t);
            let brute = brute_series(z, 4000);
            let v = li2(z);
            assert!((v - brute).norm() < 1e-14 * brute.norm().max(1.0), "{z}: {v} vs {brute}");
        }
    }

    #[test]
    fn reference_values_off_disk() {
        // 25-digit reference values, rounded to f64.
        let cases = [
            (c(2.0, 0.0), c(2.467_401_100_272_339_7, -2.177_586_090_303_602_1)),
            (c(-3.0, 0.0), c(-1.939_375_420_766_709, 0.0)),
            (c(0.5, 0.866_025_403_784_438_6), c(0.274_155_677_808_037_8, 1.014_941_606_409_653_6)),
            (c(1.5, 1.5), c(0.526_632_751_241_378_1, 2.168_047_404_485_939_6)),
        ];
        for (z, want) in cases {
            let got = li2(z);
            assert!((got - want).norm() < 1e-14 * want.norm(), "{z}: {got} vs {want}");
        }
    }

    proptest! {
        #[test]
        fn reflection_identity(r in 0.01f64..0.99, t in -3.1f64..3.1) {
            let z = Complex64::from_polar(r, t);
            let one = c(1.0, 0.0);
            let lhs = li2(z) + li2(one - z);
            let rhs = PI2_6 - z.ln() * (one - z).ln();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn conjugate_symmetry(re in -5.0f64..5.0, im in 1e-6f64..5.0) {
            let z = c(re, im);
            let a = li2(z.conj());
            let b = li2(z).conj();
            prop_assert!((a - b).norm() <= 1e-15 * b.norm().max(1.0));
        }

        #[test]
        fn inversion_identity(re in -4.0f64..4.0, im in 0.05f64..4.0) {
            // Li₂(z) + Li₂(1/z) = -π²/6 - ½ ln²(-z) off the positive real axis.
            let z = c(re, im);
            let lz = (-z).ln();
            let lhs = li2(z) + li2(c(1.0, 0.0) / z);
            let rhs = -PI2_6 - 0.5 * lz * lz;
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}
