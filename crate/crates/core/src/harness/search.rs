//! Backtracking enumeration of isometries, packed into `u64` words.
//!
//! An isometry is determined by the images `v_0, …, v_{2n−1}` of a source
//! basis `u_0, …, u_{2n−1}`. Level `j` of the search picks `v_j` from an
//! affine candidate set `base_j + ⟨span_j⟩` and keeps it when
//! `(v_j, v_k) = (u_j, u_k)` for all `k < j` and `Q(v_j) = Q(u_j)`. Matching
//! Gram matrices force the images to be independent, so every leaf is an
//! isometry.
//!
//! For the coset `{g : g V_i = V'_i}` the source basis is adapted to `V_*`
//! and level `j` draws from `V'_{j+1} ∖ V'_j`; for the whole group every level
//! draws from the whole space.

use crate::error::{Error, Result};
use crate::flags::FlagPair;
use crate::gf2::{BitMatrix, BitVector, FormedSpace};

#[inline]
fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

#[derive(Clone, Debug)]
struct Level {
    base: u64,
    span: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct IsometrySearch {
    dim: usize,
    gram_rows: Vec<u64>,
    /// Row `k` of the Gram matrix restricted to columns `> k`.
    upper_rows: Vec<u64>,
    q: Option<u64>,
    /// `target_gram[j]` has bit `k` set iff `(u_j, u_k) = 1`.
    target_gram: Vec<u64>,
    /// Bit `j` is `Q(u_j)`.
    target_q: u64,
    levels: Vec<Level>,
    /// Columns `u_j`; the isometry is `[v] · [u]^{-1}`. `None` for the standard basis.
    source_inverse: Option<BitMatrix>,
    /// Reject `v_j = 0` early; only useful when the candidate set contains zero.
    skip_zero: bool,
}

fn pack(v: &BitVector) -> u64 {
    v.to_u64()
}

impl IsometrySearch {
    fn with_source(space: &FormedSpace, source: &[BitVector], levels: Vec<Level>) -> Result<Self> {
        let dim = space.dim();
        if dim > 64 {
            return Err(Error::TooLarge(dim));
        }
        let gram_rows: Vec<u64> = (0..dim).map(|k| pack(&space.gram().row(k))).collect();
        let upper_rows = gram_rows
            .iter()
            .enumerate()
            .map(|(k, &row)| if k + 1 >= 64 { 0 } else { row & !((1u64 << (k + 1)) - 1) })
            .collect();
        let q = space.q_values().map(pack);
        let mut search = IsometrySearch {
            dim,
            gram_rows,
            upper_rows,
            q,
            target_gram: vec![0; dim],
            target_q: 0,
            levels,
            source_inverse: None,
            skip_zero: false,
        };
        let packed: Vec<u64> = source.iter().map(pack).collect();
        for j in 0..dim {
            for k in 0..dim {
                if search.form(packed[j], packed[k]) {
                    search.target_gram[j] |= 1 << k;
                }
            }
            if search.quadratic(packed[j]) {
                search.target_q |= 1 << j;
            }
        }
        let is_standard = source.iter().enumerate().all(|(j, u)| u.count_ones() == 1 && u.get(j));
        if !is_standard {
            let u = BitMatrix::from_columns(dim, source)?;
            search.source_inverse =
                Some(u.inverse().ok_or_else(|| Error::InvalidFlag("source basis is singular".into()))?);
        }
        Ok(search)
    }

    /// All isometries of `space` (preserving `Q` when present).
    pub fn whole_group(space: &FormedSpace) -> Result<Self> {
        let dim = space.dim();
        // 2^dim candidates per level
        if dim > 20 {
            return Err(Error::TooLarge(dim));
        }
        let standard: Vec<BitVector> = (0..dim).map(|k| BitVector::unit(dim, k)).collect();
        let all: Vec<u64> = (0..dim).map(|k| 1u64 << k).collect();
        let levels = (0..dim).map(|_| Level { base: 0, span: all.clone() }).collect();
        let mut s = Self::with_source(space, &standard, levels)?;
        s.skip_zero = true;
        Ok(s)
    }

    /// Isometries `g` with `g V_i = V'_i` for every `i`, where `(V, V') = (pair.a, pair.b)`.
    pub fn coset(pair: &FlagPair) -> Result<Self> {
        let source = pair.a.adapted_basis();
        let target: Vec<u64> = pair.b.adapted_basis().iter().map(pack).collect();
        let levels = (0..target.len()).map(|j| Level { base: target[j], span: target[..j].to_vec() }).collect();
        Self::with_source(pair.space(), &source, levels)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn apply_gram(&self, y: u64) -> u64 {
        let mut out = 0;
        for (k, &row) in self.gram_rows.iter().enumerate() {
            if parity(row & y) {
                out |= 1 << k;
            }
        }
        out
    }

    #[inline]
    fn form(&self, x: u64, y: u64) -> bool {
        parity(x & self.apply_gram(y))
    }

    #[inline]
    fn quadratic(&self, x: u64) -> bool {
        let Some(q) = self.q else { return false };
        let mut value = parity(q & x);
        let mut rest = x;
        while rest != 0 {
            let k = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            value ^= parity(self.upper_rows[k] & x);
        }
        value
    }

    /// Calls `visit` on each admissible `v_j` given the images `chosen[..j]`
    /// and their Gram images `gram_chosen[..j]`.
    fn candidates(&self, chosen_gram: &[u64], mut visit: impl FnMut(u64, u64)) {
        let j = chosen_gram.len();
        let level = &self.levels[j];
        let want = self.target_gram[j];
        let want_q = (self.target_q >> j) & 1 == 1;
        let mut v = level.base;
        let count = 1u64 << level.span.len();
        for step in 0..count {
            if step > 0 {
                // Gray code: flip one span vector per step
                v ^= level.span[step.trailing_zeros() as usize];
            }
            if self.skip_zero && v == 0 {
                continue;
            }
            let mut got = 0u64;
            for (k, &gk) in chosen_gram.iter().enumerate() {
                if parity(v & gk) {
                    got |= 1 << k;
                }
            }
            let mask = if j == 0 { 0 } else { (1u64 << j) - 1 };
            if got != want & mask {
                continue;
            }
            if self.q.is_some() && self.quadratic(v) != want_q {
                continue;
            }
            visit(v, self.apply_gram(v));
        }
    }

    fn descend(&self, images: &mut Vec<u64>, grams: &mut Vec<u64>, stop: usize, leaf: &mut dyn FnMut(&[u64])) {
        if images.len() == stop {
            leaf(images);
            return;
        }
        let mut next = Vec::new();
        self.candidates(grams, |v, gv| next.push((v, gv)));
        for (v, gv) in next {
            images.push(v);
            grams.push(gv);
            self.descend(images, grams, stop, leaf);
            images.pop();
            grams.pop();
        }
    }

    /// Admissible partial assignments of the first `depth` images, in search order.
    pub fn prefixes(&self, depth: usize) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        self.descend(&mut Vec::new(), &mut Vec::new(), depth.min(self.dim), &mut |p| out.push(p.to_vec()));
        out
    }

    /// Smallest depth with at least `min_tasks` prefixes (or the full depth).
    pub fn split(&self, min_tasks: usize) -> Vec<Vec<u64>> {
        let mut depth = 0;
        loop {
            let p = self.prefixes(depth);
            if p.len() >= min_tasks || depth == self.dim {
                return p;
            }
            depth += 1;
        }
    }

    /// Visits every complete assignment extending `prefix`, in search order.
    pub fn walk_from(&self, prefix: &[u64], leaf: &mut dyn FnMut(&[u64])) {
        let mut images = prefix.to_vec();
        let mut grams: Vec<u64> = prefix.iter().map(|&v| self.apply_gram(v)).collect();
        self.descend(&mut images, &mut grams, self.dim, leaf);
    }

    pub fn for_each(&self, leaf: &mut dyn FnMut(&[u64])) {
        self.walk_from(&[], leaf);
    }

    /// The isometry with the given basis images.
    pub fn to_matrix(&self, images: &[u64]) -> BitMatrix {
        let columns: Vec<BitVector> = images.iter().map(|&v| BitVector::from_u64(self.dim, v)).collect();
        let m = BitMatrix::from_columns(self.dim, &columns).expect("square");
        match &self.source_inverse {
            None => m,
            Some(inv) => &m * inv,
        }
    }
}
