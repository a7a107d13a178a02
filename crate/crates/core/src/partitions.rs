//! Integer partitions with the operations needed for unipotent class
//! combinatorics: conjugation, multiplicities, dominance and the
//! `Λ`-bound `Σ_{c_j ≥ i} (c_j − i)`.
//!
//! A partition is stored as its finite list of positive parts. Every accessor
//! reads the list as an infinite sequence that is zero past the last part, so
//! `part(j)` and `conjugate_part(i)` accept any index `≥ 1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weakly decreasing sequence of positive integers.
///
/// Serializes as a plain JSON array, e.g. `[4,2,1,1]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Builds a partition from parts that are already weakly decreasing and positive.
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::Parse(format!("zero part in {parts:?}")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Parse(format!("parts {parts:?} are not weakly decreasing")));
        }
        Ok(Partition { parts })
    }

    /// Builds a partition from positive parts in any order.
    pub fn from_unsorted(mut parts: Vec<u32>) -> Result<Self> {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(parts)
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn total(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn largest(&self) -> u32 {
        self.parts.first().copied().unwrap_or(0)
    }

    /// `c_j` for `j ≥ 1`, zero past the last part.
    pub fn part(&self, j: usize) -> u32 {
        debug_assert!(j >= 1, "parts are indexed from 1");
        self.parts.get(j.wrapping_sub(1)).copied().unwrap_or(0)
    }

    /// `c*_i = |{j : c_j ≥ i}|` for `i ≥ 1`.
    pub fn conjugate_part(&self, i: u32) -> u32 {
        debug_assert!(i >= 1, "conjugate parts are indexed from 1");
        // parts are sorted, so the count is a partition point
        self.parts.partition_point(|&p| p >= i) as u32
    }

    pub fn conjugate(&self) -> Partition {
        let parts = (1..=self.largest()).map(|i| self.conjugate_part(i)).collect();
        Partition { parts }
    }

    /// `μ_i`, the number of parts equal to `i`.
    pub fn multiplicity(&self, i: u32) -> u32 {
        if i == 0 {
            return 0;
        }
        self.conjugate_part(i) - self.conjugate_part(i + 1)
    }

    /// `Σ_{j ≤ i} c_j`.
    pub fn prefix_sum(&self, i: usize) -> u32 {
        self.parts.iter().take(i).sum()
    }

    /// `Σ_{j ≤ i} c*_j`.
    pub fn conjugate_prefix_sum(&self, i: u32) -> u32 {
        self.parts.iter().map(|&p| p.min(i)).sum()
    }

    /// `Λ_i = Σ_{j ≤ c*_i} (c_j − i)`; the rank of `N^i` for a nilpotent `N`
    /// of Jordan type `self`.
    pub fn lambda_bound(&self, i: u32) -> u32 {
        self.parts.iter().filter(|&&p| p >= i).map(|&p| p - i).sum()
    }

    /// Dominance order: every prefix sum of `self` is at most the
    /// corresponding prefix sum of `other`.
    pub fn dominance_leq(&self, other: &Partition) -> Result<bool> {
        let (left, right) = (self.total(), other.total());
        if left != right {
            return Err(Error::TotalMismatch { left, right });
        }
        let len = self.len().max(other.len());
        let mut a = 0;
        let mut b = 0;
        for j in 1..=len {
            a += self.part(j);
            b += other.part(j);
            if a > b {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Parts grouped as `(value, multiplicity)` in decreasing order of value.
    pub fn multiplicities(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((v, m)) if *v == p => *m += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// Multiplies every part by `factor`.
    pub fn scaled(&self, factor: u32) -> Partition {
        Partition { parts: self.parts.iter().map(|p| p * factor).collect() }
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, p) in self.parts.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

/// All partitions of `total`, in decreasing lexicographic order.
pub fn enumerate_partitions(total: u32) -> Vec<Partition> {
    fn go(remaining: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition { parts: prefix.clone() });
            return;
        }
        for p in (1..=remaining.min(max_part)).rev() {
            prefix.push(p);
            go(remaining - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(total, total, &mut Vec::new(), &mut out);
    out
}
