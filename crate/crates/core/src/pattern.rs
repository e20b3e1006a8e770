use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};

/// Sign pattern `e` selecting the orthant `{(-1)^{e_i} X_i < 0 for all i}`.
///
/// A `1` bit means `X_i > 0`, a `0` bit means `X_i < 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignPattern {
    bits: Vec<bool>,
}

impl SignPattern {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return domain("sign pattern must have at least one bit");
        }
        Ok(SignPattern { bits })
    }

    /// Pattern of length `n` whose bit `i` (0-based, first time point first)
    /// is bit `n - 1 - i` of `mask`, so `0b1000` reads as "1000".
    pub fn from_mask(mask: u32, n: usize) -> Result<Self> {
        if n == 0 || n > 32 || (n < 32 && mask >> n != 0) {
            return domain(format!("mask {mask:#b} does not fit {n} bits"));
        }
        Ok(SignPattern { bits: (0..n).map(|i| mask >> (n - 1 - i) & 1 == 1).collect() })
    }

    /// Every pattern of length `n`, in mask order.
    pub fn all(n: usize) -> impl Iterator<Item = SignPattern> {
        (0..1u32 << n).map(move |m| SignPattern::from_mask(m, n).expect("mask fits"))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// `+1` where `X_i > 0` is required, `-1` otherwise.
    pub fn signs(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| if b { 1.0 } else { -1.0 }).collect()
    }

    /// Number of adjacent positions whose bits differ.
    pub fn changes(&self) -> usize {
        self.bits.windows(2).filter(|w| w[0] != w[1]).count()
    }

    pub fn complement(&self) -> SignPattern {
        SignPattern { bits: self.bits.iter().map(|b| !b).collect() }
    }
}

impl FromStr for SignPattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => domain(format!("sign pattern digit must be 0 or 1, got {other:?}")),
            })
            .collect::<Result<Vec<_>>>()?;
        SignPattern::new(bits)
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}
