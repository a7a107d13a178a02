//! Invariants of unipotent isometries: Jordan type, the `ε` invariant and
//! the resulting class label, plus isometry-group membership and the Dickson
//! invariant.

use std::collections::BTreeMap;

use super::bits::{BitMatrix, BitVector};
use super::space::{quadratic_vanishes_on, FormedSpace, Subspace};
use crate::class_labels::SpLabel;
use crate::error::{Error, Result};
use crate::partitions::Partition;

fn square_dim(g: &BitMatrix) -> Result<usize> {
    if !g.is_square() {
        return Err(Error::NotSquare { rows: g.rows(), cols: g.cols() });
    }
    Ok(g.rows())
}

/// Whether `(g − 1)^dim = 0`, by repeated squaring of `g − 1`.
pub fn is_unipotent(g: &BitMatrix) -> Result<bool> {
    let dim = square_dim(g)?;
    let mut power = g.plus_identity()?;
    let mut exponent = 1;
    while exponent < dim && !power.is_zero() {
        power = &power * &power;
        exponent *= 2;
    }
    Ok(power.is_zero())
}

/// Jordan partition of a unipotent `g`, read off the ranks of powers of `N = g − 1`:
/// the number of blocks of size `≥ i` is `rank N^{i−1} − rank N^i`.
pub fn jordan_type_of_unipotent(g: &BitMatrix) -> Result<Partition> {
    let dim = square_dim(g)?;
    let n = g.plus_identity()?;
    let mut ranks = vec![dim];
    let mut power = n.clone();
    while *ranks.last().unwrap() > 0 {
        if ranks.len() > dim {
            return Err(Error::NotUnipotent);
        }
        let r = power.rank();
        if r == *ranks.last().unwrap() {
            // rank stalled above zero: N is not nilpotent
            return Err(Error::NotUnipotent);
        }
        ranks.push(r);
        power = &power * &n;
    }
    // conjugate parts c*_i = ranks[i-1] - ranks[i]
    let conj: Vec<u32> = ranks.windows(2).map(|w| (w[0] - w[1]) as u32).collect();
    let conj = Partition::new(conj).map_err(|_| Error::NotUnipotent)?;
    Ok(conj.conjugate())
}

/// `ε_g(i)`: 0 iff `x ↦ ((g−1)^{i−1} x, x)` vanishes on `ker (g−1)^i`.
///
/// Defined only for even `i` that occur as a Jordan block size of `g`.
pub fn epsilon_invariant(g: &BitMatrix, space: &FormedSpace, i: u32) -> Result<u8> {
    let jordan = jordan_type_of_unipotent(g)?;
    epsilon_with_jordan(g, space, i, &jordan)
}

fn epsilon_with_jordan(g: &BitMatrix, space: &FormedSpace, i: u32, jordan: &Partition) -> Result<u8> {
    if i == 0 || i % 2 == 1 || jordan.multiplicity(i) == 0 {
        return Err(Error::EpsilonUndefined(i));
    }
    if space.dim() != g.rows() {
        return Err(Error::DimensionMismatch { expected: space.dim(), found: g.rows() });
    }
    let n = g.plus_identity()?;
    let lower = n.pow(i - 1)?;
    let kernel = (&lower * &n).kernel();
    let twisted = |x: &BitVector, y: &BitVector| space.form(&lower.mul_vec(x), y);
    let vanishes = quadratic_vanishes_on(&kernel, |x| twisted(x, x), |x, y| twisted(x, y) ^ twisted(y, x));
    Ok(if vanishes { 0 } else { 1 })
}

/// Exhaustive counterpart of the `ε` test: evaluates `((g−1)^{i−1}x, x)` on
/// every vector of `ker (g−1)^i`. Exponential in the kernel dimension.
pub fn epsilon_invariant_exhaustive(g: &BitMatrix, space: &FormedSpace, i: u32) -> Result<u8> {
    let jordan = jordan_type_of_unipotent(g)?;
    if i == 0 || i % 2 == 1 || jordan.multiplicity(i) == 0 {
        return Err(Error::EpsilonUndefined(i));
    }
    let n = g.plus_identity()?;
    let lower = n.pow(i - 1)?;
    let kernel = (&lower * &n).kernel();
    let nonzero = span_elements(g.rows(), &kernel).any(|x| space.form(&lower.mul_vec(&x), &x));
    Ok(nonzero as u8)
}

/// Every vector of length `len` in the span of `basis` (assumed independent), `2^k` of them.
pub fn span_elements(len: usize, basis: &[BitVector]) -> impl Iterator<Item = BitVector> + '_ {
    assert!(basis.len() < 64);
    (0u64..(1u64 << basis.len())).map(move |mask| {
        let mut v = BitVector::zeros(len);
        for (k, b) in basis.iter().enumerate() {
            if mask >> k & 1 == 1 {
                v.xor_assign(b);
            }
        }
        v
    })
}

/// The class label `(c, ε_g)` of a unipotent symplectic `g`.
pub fn sp_label_of(g: &BitMatrix, space: &FormedSpace) -> Result<SpLabel> {
    let jordan = jordan_type_of_unipotent(g)?;
    let mut eps = BTreeMap::new();
    for (value, _) in jordan.multiplicities() {
        if value % 2 == 0 {
            eps.insert(value, epsilon_with_jordan(g, space, value, &jordan)?);
        }
    }
    SpLabel::checked(jordan, eps)
}

/// Whether `g` preserves the alternating form and, when present, `Q`.
///
/// `Q∘g − Q` has zero polarization once the form is preserved, so it is
/// additive and checking it on a basis suffices.
pub fn preserves_forms(g: &BitMatrix, space: &FormedSpace) -> Result<bool> {
    let dim = square_dim(g)?;
    if dim != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), found: dim });
    }
    let pulled = &(&g.transpose() * space.gram()) * g;
    if &pulled != space.gram() {
        return Ok(false);
    }
    if let Some(q) = space.q_values() {
        for k in 0..dim {
            if space.quadratic(&g.column(k)) != Some(q.get(k)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Dickson invariant `rank(g − 1) mod 2` of an orthogonal `g`; 0 exactly on
/// the identity component.
pub fn dickson_invariant(g: &BitMatrix, space: &FormedSpace) -> Result<u8> {
    if !space.has_quadratic_form() {
        return Err(Error::NoQuadraticForm);
    }
    if !preserves_forms(g, space)? {
        return Err(Error::NotIsometry);
    }
    Ok((g.plus_identity()?.rank() % 2) as u8)
}

/// The transvection `x ↦ x + (x, a) a`. Symplectic for every `a`; orthogonal
/// when `Q(a) = 1`.
pub fn transvection(space: &FormedSpace, a: &BitVector) -> BitMatrix {
    let dim = space.dim();
    let columns: Vec<BitVector> = (0..dim)
        .map(|k| {
            let mut x = BitVector::unit(dim, k);
            if space.form(&x, a) {
                x.xor_assign(a);
            }
            x
        })
        .collect();
    BitMatrix::from_columns(dim, &columns).expect("square by construction")
}

/// Block-diagonal matrix of unipotent Jordan blocks with the given sizes
/// (no form is implied).
pub fn jordan_blocks(sizes: &[usize]) -> BitMatrix {
    let dim = sizes.iter().sum();
    let mut m = BitMatrix::identity(dim);
    let mut start = 0;
    for &s in sizes {
        for k in start..start + s.saturating_sub(1) {
            m.set(k, k + 1, true);
        }
        start += s;
    }
    m
}

/// `ker (g − 1)^i` as a subspace.
pub fn kernel_of_power(g: &BitMatrix, i: u32) -> Result<Subspace> {
    let power = g.plus_identity()?.pow(i)?;
    Subspace::span(g.rows(), &power.kernel())
}
