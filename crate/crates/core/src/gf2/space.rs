use serde::{Deserialize, Serialize};

use super::bits::{BitMatrix, BitVector};
use crate::error::{Error, Result};

/// A `2n`-dimensional space with a nondegenerate alternating form and,
/// optionally, a quadratic form `Q` whose polarization is that form.
///
/// `Q` is determined by its values on the basis:
/// `Q(x) = Σ_k q_k x_k + Σ_{k<l} gram[k][l] x_k x_l`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormedSpace {
    gram: BitMatrix,
    q_values: Option<BitVector>,
}

impl FormedSpace {
    pub fn new(gram: BitMatrix, q_values: Option<BitVector>) -> Result<Self> {
        let n = gram.rows();
        if !gram.is_square() {
            return Err(Error::NotSquare { rows: n, cols: gram.cols() });
        }
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::InvalidSpace(format!("dimension {n} is not a positive even number")));
        }
        if gram != gram.transpose() || (0..n).any(|k| gram.get(k, k)) {
            return Err(Error::InvalidSpace("gram matrix is not alternating".into()));
        }
        if gram.rank() != n {
            return Err(Error::InvalidSpace("form is degenerate".into()));
        }
        if let Some(q) = &q_values {
            if q.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: q.len() });
            }
        }
        Ok(FormedSpace { gram, q_values })
    }

    /// Hyperbolic basis `e_1, …, e_n, f_n, …, f_1` with `(e_i, f_i) = 1`.
    ///
    /// With `with_q`, `Q` vanishes on every basis vector (the split form of
    /// Witt index `n`). The Gram matrix is the antidiagonal.
    pub fn standard(n: usize, with_q: bool) -> Self {
        let dim = 2 * n;
        let mut gram = BitMatrix::zeros(dim, dim);
        for k in 0..dim {
            gram.set(k, dim - 1 - k, true);
        }
        let q_values = with_q.then(|| BitVector::zeros(dim));
        FormedSpace { gram, q_values }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &BitMatrix {
        &self.gram
    }

    pub fn q_values(&self) -> Option<&BitVector> {
        self.q_values.as_ref()
    }

    pub fn has_quadratic_form(&self) -> bool {
        self.q_values.is_some()
    }

    /// The alternating form `(x, y)`.
    pub fn form(&self, x: &BitVector, y: &BitVector) -> bool {
        x.dot(&self.gram.mul_vec(y))
    }

    /// `Q(x)`, or `None` on a purely symplectic space.
    pub fn quadratic(&self, x: &BitVector) -> Option<bool> {
        let q = self.q_values.as_ref()?;
        let mut value = x.dot(q);
        let ones: Vec<usize> = x.iter_ones().collect();
        for (a, &k) in ones.iter().enumerate() {
            for &l in &ones[a + 1..] {
                value ^= self.gram.get(k, l);
            }
        }
        Some(value)
    }
}

/// Whether a quadratic function vanishes identically on the span of `basis`.
///
/// `value` is the function and `polar(x, y) = value(x+y) + value(x) + value(y)`
/// its (bilinear) polarization. The function vanishes on the span iff it
/// vanishes on each basis vector and the polarization vanishes on each pair
/// of basis vectors, which costs `O(k²)` evaluations instead of `2^k`.
pub fn quadratic_vanishes_on<F, P>(basis: &[BitVector], value: F, polar: P) -> bool
where
    F: Fn(&BitVector) -> bool,
    P: Fn(&BitVector, &BitVector) -> bool,
{
    basis.iter().enumerate().all(|(a, x)| !value(x) && basis[a + 1..].iter().all(|y| !polar(x, y)))
}

/// A linear subspace stored by its reduced row-echelon basis, so equal
/// subspaces have equal representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<BitVector>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn whole(ambient: usize) -> Self {
        Subspace { ambient, basis: (0..ambient).map(|k| BitVector::unit(ambient, k)).collect() }
    }

    pub fn span(ambient: usize, vectors: &[BitVector]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient) {
            return Err(Error::DimensionMismatch { expected: ambient, found: v.len() });
        }
        let m = BitMatrix::from_rows(ambient, vectors)?;
        let (reduced, pivots) = m.rref();
        let basis = (0..pivots.len()).map(|r| reduced.row(r)).collect();
        Ok(Subspace { ambient, basis })
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(ambient: usize, indices: &[usize]) -> Self {
        let vectors: Vec<BitVector> = indices.iter().map(|&k| BitVector::unit(ambient, k)).collect();
        Self::span(ambient, &vectors).expect("unit vectors have the ambient length")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BitVector] {
        &self.basis
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: other.ambient });
        }
        Ok(())
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        let mut r = v.clone();
        // the basis is reduced: clear each pivot in turn
        for b in &self.basis {
            let pivot = b.first_one().expect("basis vectors are nonzero");
            if r.get(pivot) {
                r.xor_assign(b);
            }
        }
        r.is_zero()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let all: Vec<BitVector> = self.basis.iter().chain(&other.basis).cloned().collect();
        Subspace::span(self.ambient, &all)
    }

    /// Annihilator under the standard dot product.
    fn dot_annihilator(&self) -> Vec<BitVector> {
        if self.basis.is_empty() {
            return Subspace::whole(self.ambient).basis;
        }
        BitMatrix::from_rows(self.ambient, &self.basis).expect("lengths checked").kernel()
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        // U ∩ W = (U° + W°)° for the dot-product annihilator
        let both: Vec<BitVector> = self.dot_annihilator().into_iter().chain(other.dot_annihilator()).collect();
        let sum = Subspace::span(self.ambient, &both)?;
        Subspace::span(self.ambient, &sum.dot_annihilator())
    }

    pub fn image_under(&self, g: &BitMatrix) -> Result<Subspace> {
        if g.cols() != self.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: g.cols() });
        }
        let images: Vec<BitVector> = self.basis.iter().map(|b| g.mul_vec(b)).collect();
        Subspace::span(g.rows(), &images)
    }

    /// `{x : (x, s) = 0 for all s in self}` under the alternating form of `space`.
    pub fn perp(&self, space: &FormedSpace) -> Result<Subspace> {
        if space.dim() != self.ambient {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: self.ambient });
        }
        let gs: Vec<BitVector> = self.basis.iter().map(|b| space.gram().mul_vec(b)).collect();
        Subspace::span(self.ambient, &gs).map(|s| Subspace::span(self.ambient, &s.dot_annihilator()))?
    }

    /// Whether `Q` vanishes on every vector of the subspace (requires a quadratic form).
    pub fn q_restriction_zero(&self, space: &FormedSpace) -> Result<bool> {
        if space.dim() != self.ambient {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: self.ambient });
        }
        if !space.has_quadratic_form() {
            return Err(Error::NoQuadraticForm);
        }
        Ok(quadratic_vanishes_on(&self.basis, |x| space.quadratic(x).expect("checked above"), |x, y| space.form(x, y)))
    }

    /// Whether the alternating form vanishes on the subspace.
    pub fn is_totally_isotropic(&self, space: &FormedSpace) -> bool {
        self.basis.iter().enumerate().all(|(a, x)| self.basis[a..].iter().all(|y| !space.form(x, y)))
    }
}
