//! Subspaces of ℚⁿ in reduced echelon form and deterministic quotient coordinates.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::{MatrixQ, VectorQ};
use crate::rational::Rational;

/// A subspace of ℚⁿ held as the nonzero rows of its reduced row echelon basis.
///
/// Two equal subspaces always have identical bases, so `==` is subspace equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: MatrixQ,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: MatrixQ::zeros(0, ambient), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: MatrixQ::identity(ambient), pivots: (0..ambient).collect() }
    }

    pub fn span(ambient: usize, vectors: &[VectorQ]) -> Result<Self> {
        if vectors.is_empty() {
            return Ok(Self::zero(ambient));
        }
        let m = MatrixQ::from_rows(ambient, vectors.to_vec())?;
        Ok(Self::from_rows(&m))
    }

    /// Row space of `m`.
    pub fn from_rows(m: &MatrixQ) -> Self {
        let (r, pivots) = m.rref();
        let basis = r.block(0, 0, pivots.len(), m.cols());
        Subspace { ambient: m.cols(), basis, pivots }
    }

    /// Right kernel of `m`.
    pub fn kernel_of(m: &MatrixQ) -> Self {
        let k = m.kernel();
        Self::span(m.cols(), &k).expect("kernel vectors have the column dimension")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Echelon basis, one row per basis vector.
    pub fn basis_matrix(&self) -> &MatrixQ {
        &self.basis
    }

    pub fn basis(&self) -> Vec<VectorQ> {
        self.basis.row_vectors()
    }

    /// `v` minus its echelon expansion along this subspace: zero at every pivot column,
    /// and zero everywhere iff `v` lies in the subspace.
    pub fn reduce(&self, v: &[Rational]) -> Result<VectorQ> {
        if v.len() != self.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: v.len() });
        }
        let mut r = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            if r[p].is_zero() {
                continue;
            }
            let f = r[p].clone();
            for (x, b) in r.iter_mut().zip(self.basis.row(i)) {
                if !b.is_zero() {
                    *x -= &f * b;
                }
            }
        }
        Ok(r)
    }

    pub fn contains(&self, v: &[Rational]) -> Result<bool> {
        Ok(self.reduce(v)?.iter().all(Zero::is_zero))
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Rational]) -> Result<Option<VectorQ>> {
        if !self.contains(v)? {
            return Ok(None);
        }
        Ok(Some(self.pivots.iter().map(|&p| v[p].clone()).collect()))
    }

    pub fn contains_subspace(&self, other: &Subspace) -> Result<bool> {
        for v in other.basis() {
            if !self.contains(&v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        let m = self.basis.vstack(&other.basis)?;
        Ok(Self::from_rows(&m))
    }
}

/// Coordinates on `big / sub`, built by completing the echelon basis of `sub`
/// inside `big` with pivots chosen left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientBasis {
    sub: Subspace,
    complement: Subspace,
    projector: MatrixQ,
}

impl QuotientBasis {
    /// Requires `sub ⊆ big`.
    pub fn new(big: &Subspace, sub: &Subspace) -> Result<Self> {
        if big.ambient != sub.ambient {
            return Err(Error::DimensionMismatch { expected: big.ambient, found: sub.ambient });
        }
        debug_assert!(big.contains_subspace(sub)?);
        let reduced: Vec<VectorQ> =
            big.basis().iter().map(|v| sub.reduce(v)).collect::<Result<_>>()?;
        let complement = Subspace::span(big.ambient, &reduced)?;
        let n = big.ambient;
        let mut projector = MatrixQ::zeros(complement.dim(), n);
        for (j, &q) in complement.pivots.iter().enumerate() {
            projector[(j, q)] += Rational::from_integer(1.into());
            for (i, &p) in sub.pivots.iter().enumerate() {
                let b = &sub.basis[(i, q)];
                if !b.is_zero() {
                    projector[(j, p)] -= b;
                }
            }
        }
        Ok(QuotientBasis { sub: sub.clone(), complement, projector })
    }

    pub fn dim(&self) -> usize {
        self.complement.dim()
    }

    /// `dim × ambient` matrix sending an element of `big` to its quotient coordinates.
    pub fn projector(&self) -> &MatrixQ {
        &self.projector
    }

    pub fn complement(&self) -> &Subspace {
        &self.complement
    }

    pub fn sub(&self) -> &Subspace {
        &self.sub
    }

    pub fn coordinates(&self, v: &[Rational]) -> Result<VectorQ> {
        self.projector.mul_vec(v)
    }

    /// Canonical representative in `big` of the class with the given coordinates.
    pub fn representative(&self, coords: &[Rational]) -> Result<VectorQ> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: coords.len() });
        }
        let mut v = vec![Rational::zero(); self.complement.ambient];
        for (c, row) in coords.iter().zip(self.complement.basis()) {
            if c.is_zero() {
                continue;
            }
            for (x, b) in v.iter_mut().zip(row) {
                *x += c * b;
            }
        }
        Ok(v)
    }
}
