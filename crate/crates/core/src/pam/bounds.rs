//! Parameter windows for the number of consecutive LAOs / SAOs in periodic
//! orbits of the normal-form map `aZ + mu` / `bZ + mu + l` with `0 < a, b < 1`,
//! `l < 0`.

use serde::{Deserialize, Serialize};

use super::TransformedPam;
use crate::error::Result;
use crate::scalar::Real;

/// Interval of `mu` values with independently open or closed ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuInterval<T> {
    pub lower: T,
    pub upper: T,
    pub lower_closed: bool,
    pub upper_closed: bool,
}

impl<T: Real> MuInterval<T> {
    pub fn is_empty(&self) -> bool {
        if self.lower < self.upper {
            false
        } else if self.lower == self.upper {
            !(self.lower_closed && self.upper_closed)
        } else {
            true
        }
    }

    pub fn contains(&self, mu: T) -> bool {
        let above = if self.lower_closed { mu >= self.lower } else { mu > self.lower };
        let below = if self.upper_closed { mu <= self.upper } else { mu < self.upper };
        above && below
    }
}

/// Thresholds on `mu` for runs of LAOs of length `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaoBounds<T> {
    /// `mu <= at_least` forces at least `L` consecutive LAOs.
    pub at_least: T,
    /// `mu > at_most` allows at most `L` consecutive LAOs.
    pub at_most: T,
}

/// Thresholds on `mu` for runs of SAOs of length `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaoBounds<T> {
    /// `mu < at_most` allows at most `s` consecutive SAOs.
    pub at_most: T,
    /// `mu >= at_least` forces at least `s` consecutive SAOs.
    pub at_least: T,
}

// sum_{k=0}^{n} x^k
fn geometric_sum<T: Real>(x: T, n: u32) -> T {
    let mut acc = T::zero();
    let mut term = T::one();
    for _ in 0..=n {
        acc += term;
        term *= x;
    }
    acc
}

impl<T: Real> TransformedPam<T> {
    /// LAO-run thresholds for a run length `lao >= 1`.
    pub fn lao_bounds(&self, lao: u32) -> Result<LaoBounds<T>> {
        self.check_bounds_domain()?;
        assert!(lao >= 1, "LAO run length must be positive");
        let (a, b, neg_l) = (self.a, self.b, -self.l);
        let a_pow = a.powi(lao as i32 - 1);
        Ok(LaoBounds {
            at_least: neg_l * a_pow / (a_pow * b + geometric_sum(a, lao - 1)),
            at_most: neg_l * a_pow * a / geometric_sum(a, lao),
        })
    }

    /// SAO-run thresholds for a run length `sao >= 1`.
    pub fn sao_bounds(&self, sao: u32) -> Result<SaoBounds<T>> {
        self.check_bounds_domain()?;
        assert!(sao >= 1, "SAO run length must be positive");
        let (a, b, neg_l) = (self.a, self.b, -self.l);
        let head = geometric_sum(b, sao - 1);
        let b_pow = b.powi(sao as i32 - 1);
        Ok(SaoBounds {
            at_most: neg_l * head / geometric_sum(b, sao),
            at_least: neg_l * (head + b_pow * (a - T::one())) / (b_pow * a + head),
        })
    }

    /// `mu` window on which the only periodic pattern is `L^1`: `(at_most, at_least]`.
    pub fn lao_window(&self, lao: u32) -> Result<MuInterval<T>> {
        let b = self.lao_bounds(lao)?;
        Ok(MuInterval {
            lower: b.at_most,
            upper: b.at_least,
            lower_closed: false,
            upper_closed: true,
        })
    }

    /// `mu` window on which the only periodic pattern is `1^s`: `[at_least, at_most)`.
    pub fn sao_window(&self, sao: u32) -> Result<MuInterval<T>> {
        let b = self.sao_bounds(sao)?;
        Ok(MuInterval {
            lower: b.at_least,
            upper: b.at_most,
            lower_closed: true,
            upper_closed: false,
        })
    }
}

/// Windows for the pure `L^1` and pure `1^s` patterns.
pub fn atmost_atleast_bounds<T: Real>(
    tp: &TransformedPam<T>,
    lao: u32,
    sao: u32,
) -> Result<(MuInterval<T>, MuInterval<T>)> {
    Ok((tp.lao_window(lao)?, tp.sao_window(sao)?))
}
