//! The affine group of ℚⁿ and maps that preserve a base/fiber splitting.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::{self, MatrixQ, VectorQ};
use crate::rational::Rational;

/// An invertible affine transformation `x ↦ linear·x + translation` of ℚⁿ.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineMap {
    linear: MatrixQ,
    translation: VectorQ,
}

impl AffineMap {
    /// Validates shape and invertibility of the linear part.
    pub fn new(linear: MatrixQ, translation: VectorQ) -> Result<Self> {
        if !linear.is_square() {
            return Err(Error::DimensionMismatch { expected: linear.rows(), found: linear.cols() });
        }
        if translation.len() != linear.rows() {
            return Err(Error::DimensionMismatch { expected: linear.rows(), found: translation.len() });
        }
        if linear.determinant()?.is_zero() {
            return Err(Error::Singular);
        }
        Ok(AffineMap { linear, translation })
    }

    pub fn identity(dim: usize) -> Self {
        AffineMap { linear: MatrixQ::identity(dim), translation: matrix::zero_vector(dim) }
    }

    pub fn translation_by(v: VectorQ) -> Self {
        AffineMap { linear: MatrixQ::identity(v.len()), translation: v }
    }

    pub fn linear_map(linear: MatrixQ) -> Result<Self> {
        let n = linear.rows();
        Self::new(linear, matrix::zero_vector(n))
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn linear(&self) -> &MatrixQ {
        &self.linear
    }

    pub fn translation(&self) -> &[Rational] {
        &self.translation
    }

    pub fn into_parts(self) -> (MatrixQ, VectorQ) {
        (self.linear, self.translation)
    }

    /// `self ∘ g`: applies `g` first.
    pub fn compose(&self, g: &AffineMap) -> Result<AffineMap> {
        if self.dim() != g.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: g.dim() });
        }
        let linear = self.linear.mul(&g.linear)?;
        let translation = matrix::vec_add(&self.linear.mul_vec(&g.translation)?, &self.translation);
        Ok(AffineMap { linear, translation })
    }

    pub fn invert(&self) -> AffineMap {
        let inv = self.linear.inverse().expect("AffineMap linear parts are invertible");
        let t = inv.mul_vec(&self.translation).expect("square linear part");
        AffineMap { linear: inv, translation: matrix::vec_neg(&t) }
    }

    pub fn apply(&self, p: &[Rational]) -> Result<VectorQ> {
        Ok(matrix::vec_add(&self.linear.mul_vec(p)?, &self.translation))
    }

    pub fn is_identity(&self) -> bool {
        self.linear.is_identity() && matrix::vec_is_zero(&self.translation)
    }

    /// Identity linear part.
    pub fn is_translation(&self) -> bool {
        self.linear.is_identity()
    }

    pub fn determinant(&self) -> Rational {
        self.linear.determinant().expect("square linear part")
    }

    /// The same map in permuted coordinates: new coordinate `i` is old coordinate `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<AffineMap> {
        check_permutation(perm, self.dim())?;
        let linear = self.linear.permute_symmetric(perm);
        let translation = perm.iter().map(|&p| self.translation[p].clone()).collect();
        Ok(AffineMap { linear, translation })
    }
}

pub fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: perm.len() });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidFibration(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Split `ℚⁿ = ℚᵐ ⊕ ℚˡ` with base coordinates first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockSplit {
    base: usize,
    fiber: usize,
}

impl BlockSplit {
    pub fn new(base: usize, fiber: usize) -> Result<Self> {
        if base == 0 || fiber == 0 {
            return Err(Error::InvalidSplit { base, fiber });
        }
        Ok(BlockSplit { base, fiber })
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn fiber(&self) -> usize {
        self.fiber
    }

    pub fn dim(&self) -> usize {
        self.base + self.fiber
    }
}

/// `(x, y) ↦ (A·x + a, B·y + C·x + d)`: an affine map preserving the fibers of the
/// projection onto the base coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockAffineMap {
    split: BlockSplit,
    base_linear: MatrixQ,
    fiber_linear: MatrixQ,
    coupling: MatrixQ,
    base_translation: VectorQ,
    fiber_translation: VectorQ,
}

impl BlockAffineMap {
    pub fn new(
        split: BlockSplit,
        base_linear: MatrixQ,
        fiber_linear: MatrixQ,
        coupling: MatrixQ,
        base_translation: VectorQ,
        fiber_translation: VectorQ,
    ) -> Result<Self> {
        let (m, l) = (split.base, split.fiber);
        let shapes = [
            (base_linear.rows(), m),
            (base_linear.cols(), m),
            (fiber_linear.rows(), l),
            (fiber_linear.cols(), l),
            (coupling.rows(), l),
            (coupling.cols(), m),
            (base_translation.len(), m),
            (fiber_translation.len(), l),
        ];
        for (found, expected) in shapes {
            if found != expected {
                return Err(Error::DimensionMismatch { expected, found });
            }
        }
        if base_linear.determinant()?.is_zero() || fiber_linear.determinant()?.is_zero() {
            return Err(Error::Singular);
        }
        Ok(BlockAffineMap { split, base_linear, fiber_linear, coupling, base_translation, fiber_translation })
    }

    pub fn split(&self) -> BlockSplit {
        self.split
    }

    /// `A`.
    pub fn base_linear(&self) -> &MatrixQ {
        &self.base_linear
    }

    /// `B`.
    pub fn fiber_linear(&self) -> &MatrixQ {
        &self.fiber_linear
    }

    /// `C`, of shape `fiber × base`.
    pub fn coupling(&self) -> &MatrixQ {
        &self.coupling
    }

    /// `a`.
    pub fn base_translation(&self) -> &[Rational] {
        &self.base_translation
    }

    /// `d`.
    pub fn fiber_translation(&self) -> &[Rational] {
        &self.fiber_translation
    }

    /// Trivial on the base: `A = I` and `a = 0`.
    pub fn acts_trivially_on_base(&self) -> bool {
        self.base_linear.is_identity() && matrix::vec_is_zero(&self.base_translation)
    }

    pub fn assemble(&self) -> AffineMap {
        let (m, n) = (self.split.base, self.split.dim());
        let mut linear = MatrixQ::zeros(n, n);
        linear.set_block(0, 0, &self.base_linear);
        linear.set_block(m, 0, &self.coupling);
        linear.set_block(m, m, &self.fiber_linear);
        let mut translation = self.base_translation.clone();
        translation.extend(self.fiber_translation.iter().cloned());
        AffineMap { linear, translation }
    }

    /// Base part `x ↦ A·x + a`.
    pub fn base_map(&self) -> AffineMap {
        AffineMap { linear: self.base_linear.clone(), translation: self.base_translation.clone() }
    }

    /// Restriction to the fiber over base point `x`: `y ↦ B·y + (C·x + d)`.
    pub fn fiber_map_at(&self, x: &[Rational]) -> Result<AffineMap> {
        let shift = matrix::vec_add(&self.coupling.mul_vec(x)?, &self.fiber_translation);
        Ok(AffineMap { linear: self.fiber_linear.clone(), translation: shift })
    }
}

/// Splits `f` along `split`, failing with the offending upper-right positions when
/// `f` mixes fiber coordinates into the base.
pub fn block_decompose(f: &AffineMap, split: BlockSplit) -> Result<BlockAffineMap> {
    let (m, l) = (split.base, split.fiber);
    if f.dim() != split.dim() {
        return Err(Error::DimensionMismatch { expected: split.dim(), found: f.dim() });
    }
    let bad: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (m..m + l).map(move |j| (i, j)))
        .filter(|&(i, j)| !f.linear[(i, j)].is_zero())
        .collect();
    if !bad.is_empty() {
        return Err(Error::NotBlockTriangular(bad));
    }
    Ok(BlockAffineMap {
        split,
        base_linear: f.linear.block(0, 0, m, m),
        fiber_linear: f.linear.block(m, m, l, l),
        coupling: f.linear.block(m, 0, l, m),
        base_translation: f.translation[..m].to_vec(),
        fiber_translation: f.translation[m..].to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::vec_from_i64;
    use crate::rational::frac;
    use proptest::prelude::*;

    fn f3() -> AffineMap {
        AffineMap::new(MatrixQ::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]), vec_from_i64(&[0, 0, 1])).unwrap()
    }

    fn t(v: &[i64]) -> AffineMap {
        AffineMap::translation_by(vec_from_i64(v))
    }

    #[test]
    fn compose_examples() {
        let f = t(&[1, 0, 0]);
        assert_eq!(AffineMap::identity(3).compose(&f).unwrap(), f);
        assert_eq!(f.compose(&t(&[0, 1, 0])).unwrap(), t(&[1, 1, 0]));
        let f2 = t(&[0, 1, 0]);
        let comm = f3().compose(&f2).unwrap().compose(&f3().invert()).unwrap().compose(&f2.invert()).unwrap();
        assert_eq!(comm, t(&[1, 0, 0]));
        assert!(matches!(f.compose(&AffineMap::identity(2)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(AffineMap::identity(3).invert(), AffineMap::identity(3));
        assert_eq!(t(&[1, 0, 0]).invert(), t(&[-1, 0, 0]));
        let inv = f3().invert();
        let a_inv = MatrixQ::from_i64(&[&[1, -1, 0], &[0, 1, 0], &[0, 0, 1]]);
        let expected = AffineMap::new(a_inv.clone(), a_inv.mul_vec(&vec_from_i64(&[0, 0, -1])).unwrap()).unwrap();
        assert_eq!(inv, expected);
        assert!(f3().compose(&inv).unwrap().is_identity());
    }

    #[test]
    fn apply_examples() {
        let p = vec_from_i64(&[4, -1, 7]);
        assert_eq!(AffineMap::identity(3).apply(&p).unwrap(), p);
        assert_eq!(f3().apply(&vec_from_i64(&[0, 0, 0])).unwrap(), vec_from_i64(&[0, 0, 1]));
        assert_eq!(f3().apply(&vec_from_i64(&[2, 3, 0])).unwrap(), vec_from_i64(&[5, 3, 1]));
    }

    #[test]
    fn singular_rejected() {
        let s = MatrixQ::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(AffineMap::new(s, vec_from_i64(&[0, 0])), Err(Error::Singular));
    }

    #[test]
    fn block_decompose_examples() {
        let split = BlockSplit::new(1, 2).unwrap();
        let id = block_decompose(&AffineMap::identity(3), split).unwrap();
        assert!(id.acts_trivially_on_base());
        assert!(id.coupling().is_zero() && id.fiber_linear().is_identity());

        // f3 with coordinates reordered as (z | x, y).
        let g = block_decompose(&f3().permuted(&[2, 0, 1]).unwrap(), split).unwrap();
        assert_eq!(g.base_linear(), &MatrixQ::from_i64(&[&[1]]));
        assert_eq!(g.fiber_linear(), &MatrixQ::from_i64(&[&[1, 1], &[0, 1]]));
        assert!(g.coupling().is_zero());
        assert_eq!(g.base_translation(), &vec_from_i64(&[1])[..]);
        assert_eq!(g.fiber_translation(), &vec_from_i64(&[0, 0])[..]);

        let rot = AffineMap::linear_map(MatrixQ::from_i64(&[&[0, -1], &[1, 0]])).unwrap();
        assert_eq!(
            block_decompose(&rot, BlockSplit::new(1, 1).unwrap()),
            Err(Error::NotBlockTriangular(vec![(0, 1)]))
        );
    }

    #[test]
    fn split_requires_both_parts() {
        assert!(BlockSplit::new(0, 2).is_err());
        assert!(BlockSplit::new(2, 0).is_err());
    }

    fn entry() -> impl proptest::strategy::Strategy<Value = Rational> {
        (-5i64..=5, 1i64..=5).prop_map(|(a, b)| frac(a, b))
    }

    fn matrix(n: usize, m: usize) -> impl proptest::strategy::Strategy<Value = MatrixQ> {
        proptest::collection::vec(entry(), n * m).prop_map(move |v| MatrixQ::new(n, m, v).unwrap())
    }

    fn affine(n: usize) -> impl proptest::strategy::Strategy<Value = AffineMap> {
        (matrix(n, n), proptest::collection::vec(entry(), n))
            .prop_filter_map("singular", |(m, t)| AffineMap::new(m, t).ok())
    }

    fn block(m: usize, l: usize) -> impl proptest::strategy::Strategy<Value = BlockAffineMap> {
        let split = BlockSplit::new(m, l).unwrap();
        (matrix(m, m), matrix(l, l), matrix(l, m), proptest::collection::vec(entry(), m), proptest::collection::vec(entry(), l))
            .prop_filter_map("singular", move |(a, b, c, x, d)| BlockAffineMap::new(split, a, b, c, x, d).ok())
    }

    proptest! {
        #[test]
        fn compose_is_associative(f in affine(3), g in affine(3), h in affine(3)) {
            let left = f.compose(&g).unwrap().compose(&h).unwrap();
            let right = f.compose(&g.compose(&h).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn invert_is_two_sided(f in affine(3)) {
            prop_assert!(f.compose(&f.invert()).unwrap().is_identity());
            prop_assert!(f.invert().compose(&f).unwrap().is_identity());
        }

        #[test]
        fn determinant_is_multiplicative(f in affine(3), g in affine(3)) {
            prop_assert_eq!(f.compose(&g).unwrap().determinant(), f.determinant() * g.determinant());
        }

        #[test]
        fn decompose_assemble_round_trip(b in block(1, 2)) {
            prop_assert_eq!(block_decompose(&b.assemble(), b.split()).unwrap(), b);
        }

        #[test]
        fn block_maps_closed(b in block(2, 1), c in block(2, 1)) {
            let prod = b.assemble().compose(&c.assemble()).unwrap();
            prop_assert!(block_decompose(&prod, b.split()).is_ok());
            prop_assert!(block_decompose(&b.assemble().invert(), b.split()).is_ok());
        }
    }
}
