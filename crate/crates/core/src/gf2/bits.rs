//! Bit-packed vectors and dense matrices over the two-element field.
//!
//! Coordinates are 0-based. Bit `k` of a vector lives in bit `k % 64` of word
//! `k / 64`; unused high bits of the last word are always zero.

use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector { len, words: vec![0; words_for(len)] }
    }

    /// The standard basis vector with a single 1 at `k`.
    pub fn unit(len: usize, k: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(k, true);
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (k, &b) in bits.iter().enumerate() {
            v.set(k, b);
        }
        v
    }

    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &k in ones {
            v.flip(k);
        }
        v
    }

    /// Low `len` bits of `word`; `len ≤ 64`.
    pub fn from_u64(len: usize, word: u64) -> Self {
        assert!(len <= WORD);
        let mask = if len == WORD { u64::MAX } else { (1u64 << len) - 1 };
        BitVector { len, words: if len == 0 { vec![] } else { vec![word & mask] } }
    }

    /// The single packed word of a vector of length at most 64.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= WORD);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, k: usize) -> bool {
        assert!(k < self.len, "index {k} out of range for length {}", self.len);
        (self.words[k / WORD] >> (k % WORD)) & 1 == 1
    }

    pub fn set(&mut self, k: usize, b: bool) {
        assert!(k < self.len, "index {k} out of range for length {}", self.len);
        let bit = 1u64 << (k % WORD);
        if b {
            self.words[k / WORD] |= bit;
        } else {
            self.words[k / WORD] &= !bit;
        }
    }

    pub fn flip(&mut self, k: usize) {
        assert!(k < self.len);
        self.words[k / WORD] ^= 1u64 << (k % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words.iter().enumerate().find(|(_, &w)| w != 0).map(|(k, w)| k * WORD + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * WORD + t)
            })
        })
    }

    /// Standard dot product `Σ x_k y_k`.
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len);
        parity_and(&self.words, &other.words)
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len);
        xor_into(&mut self.words, &other.words);
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|k| self.get(k) as u8).collect()
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|k| if self.get(k) { '1' } else { '0' }).collect();
        write!(f, "BitVector({s})")
    }
}

impl AddAssign<&BitVector> for BitVector {
    fn add_assign(&mut self, rhs: &BitVector) {
        self.xor_assign(rhs);
    }
}

impl Add<&BitVector> for &BitVector {
    type Output = BitVector;

    fn add(self, rhs: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(rhs);
        out
    }
}

impl Serialize for BitVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_bits().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let bits = Vec::<u8>::deserialize(deserializer)?;
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(D::Error::custom(format!("vector entry {b} is not 0 or 1")));
        }
        Ok(BitVector::from_bits(&bits.iter().map(|&b| b == 1).collect::<Vec<_>>()))
    }
}

fn parity_and(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).fold(0u32, |acc, (x, y)| acc ^ (x & y).count_ones()) & 1 == 1
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// Dense row-major matrix over the two-element field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m.set(k, k, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[BitVector]) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, v) in rows.iter().enumerate() {
            if v.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: v.len() });
            }
            m.row_words_mut(r).copy_from_slice(v.words());
        }
        Ok(m)
    }

    /// Matrix whose `k`-th column is `columns[k]`.
    pub fn from_columns(rows: usize, columns: &[BitVector]) -> Result<Self> {
        Ok(Self::from_rows(rows, columns)?.transpose())
    }

    /// Rows given as 0/1 integers.
    pub fn from_bit_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: row.len() });
            }
            for (c, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => m.set(r, c, true),
                    other => return Err(Error::Parse(format!("matrix entry {other} is not 0 or 1"))),
                }
            }
        }
        Ok(m)
    }

    /// Rows given as hexadecimal integers; column `c` is bit `c` of the integer.
    pub fn from_hex_rows(cols: usize, rows: &[String]) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, text) in rows.iter().enumerate() {
            let digits = text.trim().trim_start_matches("0x");
            for (pos, ch) in digits.chars().rev().enumerate() {
                let nibble =
                    ch.to_digit(16).ok_or_else(|| Error::Parse(format!("bad hex digit {ch:?} in {text:?}")))?;
                for b in 0..4 {
                    if nibble >> b & 1 == 1 {
                        let c = pos * 4 + b;
                        if c >= cols {
                            return Err(Error::Parse(format!("hex row {text:?} wider than {cols} columns")));
                        }
                        m.set(r, c, true);
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, b: bool) {
        assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / WORD];
        let bit = 1u64 << (c % WORD);
        if b {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector { len: self.cols, words: self.row_words(r).to_vec() }
    }

    pub fn column(&self, c: usize) -> BitVector {
        let mut v = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for (k, &w) in self.row_words(r).iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let c = k * WORD + w.trailing_zeros() as usize;
                    w &= w - 1;
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        assert_eq!(self.cols, v.len());
        let mut out = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            if parity_and(self.row_words(r), v.words()) {
                out.set(r, true);
            }
        }
        out
    }

    pub fn try_mul(&self, rhs: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: rhs.rows });
        }
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            let (lhs_row, out_row) = (r * self.stride, r * out.stride);
            for k in 0..self.cols {
                if (self.data[lhs_row + k / WORD] >> (k % WORD)) & 1 == 1 {
                    let src = rhs.row_words(k);
                    xor_into(&mut out.data[out_row..out_row + out.stride], src);
                }
            }
        }
        Ok(out)
    }

    /// `self + I`, i.e. `self − I` over the two-element field.
    pub fn plus_identity(&self) -> Result<BitMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut m = self.clone();
        for k in 0..self.rows {
            let w = &mut m.data[k * m.stride + k / WORD];
            *w ^= 1u64 << (k % WORD);
        }
        Ok(m)
    }

    pub fn pow(&self, mut e: u32) -> Result<BitMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut acc = BitMatrix::identity(self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Reduced row-echelon form and its pivot columns.
    pub fn rref(&self) -> (BitMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&k| m.get(k, c)) else { continue };
            if p != r {
                for w in 0..m.stride {
                    m.data.swap(p * m.stride + w, r * m.stride + w);
                }
            }
            let pivot: Vec<u64> = m.row_words(r).to_vec();
            for k in 0..self.rows {
                if k != r && m.get(k, c) {
                    xor_into(m.row_words_mut(k), &pivot);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        // forward elimination only; rref does more work than needed
        let mut rows: Vec<Vec<u64>> = (0..self.rows).map(|r| self.row_words(r).to_vec()).collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let (w, bit) = (c / WORD, 1u64 << (c % WORD));
            let Some(p) = (rank..rows.len()).find(|&k| rows[k][w] & bit != 0) else { continue };
            rows.swap(p, rank);
            let pivot = rows[rank].clone();
            for row in rows.iter_mut().skip(rank + 1) {
                if row[w] & bit != 0 {
                    xor_into(row, &pivot);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Basis of `{x : self·x = 0}`.
    pub fn kernel(&self) -> Vec<BitVector> {
        let (reduced, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = BitVector::unit(self.cols, free);
                for (r, &p) in pivots.iter().enumerate() {
                    if reduced.get(r, free) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<BitMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = BitMatrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                if self.get(r, c) {
                    aug.set(r, c, true);
                }
            }
            aug.set(r, n + r, true);
        }
        let (reduced, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = BitMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                if reduced.get(r, n + c) {
                    inv.set(r, c, true);
                }
            }
        }
        Some(inv)
    }

    pub fn to_bit_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row(r).to_bits()).collect()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let s: String = (0..self.cols).map(|c| if self.get(r, c) { '1' } else { '.' }).collect();
            writeln!(f, "  {s}")?;
        }
        write!(f, "]")
    }
}

impl Mul<&BitMatrix> for &BitMatrix {
    type Output = BitMatrix;

    fn mul(self, rhs: &BitMatrix) -> BitMatrix {
        self.try_mul(rhs).expect("matrix shapes do not match")
    }
}

impl Add<&BitMatrix> for &BitMatrix {
    type Output = BitMatrix;

    fn add(self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        xor_into(&mut out.data, &rhs.data);
        out
    }
}

impl Serialize for BitMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_bit_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BitMatrix {
    /// Accepts `[[0,1],[1,0]]` or `{"cols": 2, "hex": ["2", "1"]}`.
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Rows(Vec<Vec<u8>>),
            Hex { cols: usize, hex: Vec<String> },
        }
        match Repr::deserialize(deserializer)? {
            Repr::Rows(rows) => BitMatrix::from_bit_rows(&rows),
            Repr::Hex { cols, hex } => BitMatrix::from_hex_rows(cols, &hex),
        }
        .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::zeros(3, 5).rank(), 0);
        assert_eq!(BitMatrix::identity(4).rank(), 4);
        assert_eq!(BitMatrix::from_bit_rows(&[vec![1, 1], vec![1, 1]]).unwrap().rank(), 1);
    }

    #[test]
    fn wide_matrices_cross_word_boundaries() {
        let n = 130;
        let mut m = BitMatrix::identity(n);
        m.set(0, 129, true);
        m.set(100, 3, true);
        assert_eq!(m.rank(), n);
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, BitMatrix::identity(n));
        assert_eq!(m.transpose().transpose(), m);
        let v = BitVector::from_indices(n, &[3, 129]);
        assert_eq!(m.mul_vec(&v), BitVector::from_indices(n, &[3, 100, 129, 0]));
    }

    #[test]
    fn kernel_and_rank_nullity() {
        let m = BitMatrix::from_bit_rows(&[vec![1, 1, 0, 1], vec![0, 1, 1, 0], vec![1, 0, 1, 1]]).unwrap();
        let ker = m.kernel();
        assert_eq!(ker.len() + m.rank(), 4);
        for v in &ker {
            assert!(m.mul_vec(v).is_zero());
        }
    }

    #[test]
    fn singular_has_no_inverse() {
        let m = BitMatrix::from_bit_rows(&[vec![1, 1], vec![1, 1]]).unwrap();
        assert!(m.inverse().is_none());
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let m = BitMatrix::from_bit_rows(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap();
        let mut acc = BitMatrix::identity(3);
        for e in 0..7 {
            assert_eq!(m.pow(e).unwrap(), acc);
            acc = &acc * &m;
        }
    }

    #[test]
    fn hex_rows() {
        let m = BitMatrix::from_hex_rows(5, &["0x11".into(), "2".into()]).unwrap();
        assert_eq!(m.to_bit_rows(), vec![vec![1, 0, 0, 0, 1], vec![0, 1, 0, 0, 0]]);
        assert!(BitMatrix::from_hex_rows(3, &["f".into()]).is_err());
        let parsed: BitMatrix = serde_json::from_str(r#"{"cols":5,"hex":["11","2"]}"#).unwrap();
        assert_eq!(parsed, m);
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, "[[1,0,0,0,1],[0,1,0,0,0]]");
        assert_eq!(serde_json::from_str::<BitMatrix>(&json).unwrap(), m);
    }

    #[test]
    fn vector_basics() {
        let v = BitVector::from_indices(70, &[1, 65, 69]);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![1, 65, 69]);
        assert_eq!(v.first_one(), Some(1));
        assert_eq!(v.count_ones(), 3);
        assert!(v.dot(&BitVector::unit(70, 65)));
        assert_eq!(BitVector::from_u64(4, 0b11111).to_u64(), 0b1111);
    }
}
