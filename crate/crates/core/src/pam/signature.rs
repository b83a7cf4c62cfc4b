use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cyclic MMO pattern `L1^s1 L2^s2 ... Lk^sk`.
///
/// Stored in canonical rotation: the lexicographically smallest rotation of
/// the `(L, s)` pair list, so that cyclically equal patterns compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Signature {
    segments: Vec<(u32, u32)>,
}

impl Signature {
    /// Builds a signature from `(L, s)` pairs and rotates it into canonical form.
    pub fn new(segments: Vec<(u32, u32)>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidSignature("empty pattern".into()));
        }
        if segments.iter().any(|&(l, _)| l == 0) {
            return Err(Error::InvalidSignature("LAO counts must be positive".into()));
        }
        if segments.iter().any(|&(_, s)| s == 0) && segments != [(1, 0)] {
            return Err(Error::InvalidSignature(
                "zero SAO count only allowed for the pure-LAO pattern 1^0".into(),
            ));
        }
        Ok(Self {
            segments: canonical_rotation(segments),
        })
    }

    /// Groups a cyclic sequence of oscillation types (`true` = LAO) into a signature.
    ///
    /// A cycle consisting only of LAOs is the fixed-point pattern `1^0`; a cycle
    /// with no LAO has no signature and is rejected.
    pub fn from_cycle(is_lao: &[bool]) -> Result<Self> {
        if is_lao.is_empty() {
            return Err(Error::InvalidSignature("empty cycle".into()));
        }
        if is_lao.iter().all(|&l| l) {
            return Self::new(vec![(1, 0)]);
        }
        if !is_lao.iter().any(|&l| l) {
            return Err(Error::InvalidSignature(
                "cycle contains no large-amplitude oscillation".into(),
            ));
        }
        // Start at the first LAO that follows an SAO so runs are not split.
        let n = is_lao.len();
        let start = (0..n)
            .find(|&i| is_lao[i] && !is_lao[(i + n - 1) % n])
            .expect("mixed cycle has an SAO->LAO transition");
        let mut segments = Vec::new();
        let mut i = 0;
        while i < n {
            let mut lao = 0;
            while i < n && is_lao[(start + i) % n] {
                lao += 1;
                i += 1;
            }
            let mut sao = 0;
            while i < n && !is_lao[(start + i) % n] {
                sao += 1;
                i += 1;
            }
            segments.push((lao, sao));
        }
        Self::new(segments)
    }

    pub fn segments(&self) -> &[(u32, u32)] {
        &self.segments
    }

    /// Total `(L, s)` counts over one period.
    pub fn totals(&self) -> (u32, u32) {
        self.segments
            .iter()
            .fold((0, 0), |(l, s), &(li, si)| (l + li, s + si))
    }

    /// Number of map iterates in one period.
    pub fn period(&self) -> u32 {
        let (l, s) = self.totals();
        l + s
    }

    /// True for a single `L^s` block.
    pub fn is_simple(&self) -> bool {
        self.segments.len() == 1
    }

    /// True if some block has `L >= 2` and some block has `s >= 2`.
    pub fn mixes_repeated_lao_and_sao(&self) -> bool {
        self.segments.iter().any(|&(l, _)| l >= 2) && self.segments.iter().any(|&(_, s)| s >= 2)
    }

    pub fn max_lao_run(&self) -> u32 {
        self.segments.iter().map(|&(l, _)| l).max().unwrap_or(0)
    }

    pub fn min_lao_run(&self) -> u32 {
        self.segments.iter().map(|&(l, _)| l).min().unwrap_or(0)
    }

    pub fn max_sao_run(&self) -> u32 {
        self.segments.iter().map(|&(_, s)| s).max().unwrap_or(0)
    }

    pub fn min_sao_run(&self) -> u32 {
        self.segments.iter().map(|&(_, s)| s).min().unwrap_or(0)
    }
}

fn canonical_rotation(segments: Vec<(u32, u32)>) -> Vec<(u32, u32)> {
    let n = segments.len();
    (0..n)
        .map(|r| {
            let mut rotated = segments.clone();
            rotated.rotate_left(r);
            rotated
        })
        .min()
        .unwrap_or(segments)
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (l, s)) in self.segments.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}^{s}")?;
        }
        Ok(())
    }
}

impl FromStr for Signature {
    type Err = Error;

    /// Parses space- or comma-separated `L^s` blocks, e.g. `"1^4 1^5"`.
    fn from_str(s: &str) -> Result<Self> {
        let segments = s
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|tok| {
                let (l, s) = tok
                    .split_once('^')
                    .ok_or_else(|| Error::InvalidSignature(format!("expected L^s, got {tok:?}")))?;
                let parse = |v: &str| {
                    v.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::InvalidSignature(format!("bad count in {tok:?}")))
                };
                Ok((parse(l)?, parse(s)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(segments)
    }
}

impl TryFrom<String> for Signature {
    type Error = Error;
    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

impl From<Signature> for String {
    fn from(value: Signature) -> Self {
        value.to_string()
    }
}
