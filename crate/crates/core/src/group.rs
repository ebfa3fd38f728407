//! Words in free groups, finite presentations and affine representations.

use std::fmt;

use crate::affine::AffineMap;
use crate::cohomology::CoefficientModule;
use crate::error::{Error, Result};
use crate::matrix::MatrixQ;
use crate::par::{self, Strategy};

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn gen(generator: usize) -> Self {
        Letter { generator, inverse: false }
    }

    pub fn inv(generator: usize) -> Self {
        Letter { generator, inverse: true }
    }

    pub fn inverted(self) -> Self {
        Letter { generator: self.generator, inverse: !self.inverse }
    }

    /// `+1` or `-1`.
    pub fn exponent(self) -> i8 {
        if self.inverse { -1 } else { 1 }
    }

    pub fn from_signed(generator: usize, exponent: i64) -> Option<Self> {
        match exponent {
            1 => Some(Letter::gen(generator)),
            -1 => Some(Letter::inv(generator)),
            _ => None,
        }
    }
}

/// A word in signed generator indices. Not reduced unless produced by [`Word::free_reduce`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn gen(i: usize) -> Self {
        Word(vec![Letter::gen(i)])
    }

    /// Parses `(generator, ±1)` pairs.
    pub fn from_signed(pairs: &[(usize, i64)]) -> Option<Self> {
        pairs.iter().map(|&(g, e)| Letter::from_signed(g, e)).collect::<Option<Vec<_>>>().map(Word)
    }

    /// `a·b·a⁻¹·b⁻¹`.
    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.concat(b).concat(&a.inverse()).concat(&b.inverse())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverted()).collect())
    }

    /// Cancels adjacent `g·g⁻¹` pairs until none remain.
    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverted()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1].inverted())
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.generator).max()
    }

    fn check_generators(&self, count: usize) -> Result<()> {
        match self.max_generator() {
            Some(index) if index >= count => Err(Error::GeneratorOutOfRange { index, count }),
            _ => Ok(()),
        }
    }

    /// Replaces every generator `i` by `images[i]` (inverse letters by inverse words).
    pub fn substitute(&self, images: &[Word]) -> Result<Word> {
        self.check_generators(images.len())?;
        let mut out = Vec::new();
        for l in &self.0 {
            let w = &images[l.generator];
            if l.inverse {
                out.extend(w.inverse().0);
            } else {
                out.extend_from_slice(&w.0);
            }
        }
        Ok(Word(out).free_reduce())
    }

    /// Sum of exponents of each generator.
    pub fn exponent_sums(&self, count: usize) -> Vec<i64> {
        let mut sums = vec![0i64; count];
        for l in &self.0 {
            if l.generator < count {
                sums[l.generator] += i64::from(l.exponent());
            }
        }
        sums
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            write!(f, "g{}", l.generator)?;
            if l.inverse {
                write!(f, "⁻¹")?;
            }
        }
        Ok(())
    }
}

/// `⟨g₀ … g_{k−1} | relators⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Presentation {
    generators: usize,
    relators: Vec<Word>,
}

impl Presentation {
    /// Stores relators freely reduced; a relator that reduces to the empty word is rejected.
    pub fn new(generators: usize, relators: Vec<Word>) -> Result<Self> {
        let mut reduced = Vec::with_capacity(relators.len());
        for (i, r) in relators.iter().enumerate() {
            r.check_generators(generators)?;
            let w = r.free_reduce();
            if w.is_empty() {
                return Err(Error::InvalidPresentation(format!("relator {i} reduces to the empty word")));
            }
            reduced.push(w);
        }
        Ok(Presentation { generators, relators: reduced })
    }

    pub fn free(generators: usize) -> Self {
        Presentation { generators, relators: Vec::new() }
    }

    /// `ℤᵏ`: all pairwise commutators `[gᵢ, gⱼ]`, `i < j`.
    pub fn free_abelian(rank: usize) -> Self {
        let relators = (0..rank)
            .flat_map(|i| (i + 1..rank).map(move |j| Word::commutator(&Word::gen(i), &Word::gen(j))))
            .collect();
        Presentation { generators: rank, relators }
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        w.check_generators(self.generators)
    }

    /// Free abelian of rank `generators`: exactly the commutator relators `[gᵢ,gⱼ]`, `i<j`
    /// (as produced by [`Presentation::free_abelian`]), up to inversion of each relator.
    pub fn is_standard_free_abelian(&self) -> bool {
        let std = Presentation::free_abelian(self.generators);
        self.relators.len() == std.relators.len()
            && std.relators.iter().all(|r| {
                let ri = r.inverse().free_reduce();
                self.relators.iter().any(|s| s == r || *s == ri)
            })
    }
}

/// Generator images in `Aff(ℚⁿ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineRepresentation {
    presentation: Presentation,
    dim: usize,
    images: Vec<AffineMap>,
}

impl AffineRepresentation {
    /// Checks counts and dimensions only; relators are checked by [`Self::verify`].
    pub fn new(presentation: Presentation, dim: usize, images: Vec<AffineMap>) -> Result<Self> {
        if images.len() != presentation.generators {
            return Err(Error::DimensionMismatch { expected: presentation.generators, found: images.len() });
        }
        if let Some(bad) = images.iter().find(|f| f.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        Ok(AffineRepresentation { presentation, dim, images })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn images(&self) -> &[AffineMap] {
        &self.images
    }

    /// Linear parts of the generator images.
    pub fn linear_parts(&self) -> Vec<MatrixQ> {
        self.images.iter().map(|f| f.linear().clone()).collect()
    }

    /// Product of generator images in word order (`g₀g₁` evaluates to `f₀∘f₁`).
    pub fn evaluate_word(&self, w: &Word) -> Result<AffineMap> {
        self.presentation.check_word(w)?;
        let inverses: Vec<Option<AffineMap>> = self.images.iter().map(|_| None).collect();
        let mut inverses = inverses;
        let mut acc = AffineMap::identity(self.dim);
        for l in w.letters() {
            let f = if l.inverse {
                inverses[l.generator].get_or_insert_with(|| self.images[l.generator].invert()).clone()
            } else {
                self.images[l.generator].clone()
            };
            acc = acc.compose(&f)?;
        }
        Ok(acc)
    }

    pub fn verify(&self) -> RepresentationReport {
        let failures = self
            .presentation
            .relators
            .iter()
            .enumerate()
            .filter_map(|(i, r)| {
                let f = self.evaluate_word(r).expect("relators were range-checked");
                (!f.is_identity()).then_some(RelatorFailure { relator: i, word: r.clone(), value: f })
            })
            .collect();
        RepresentationReport { failures }
    }

    /// Same representation in permuted coordinates (see [`AffineMap::permuted`]).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let images = self.images.iter().map(|f| f.permuted(perm)).collect::<Result<_>>()?;
        Ok(AffineRepresentation { presentation: self.presentation.clone(), dim: self.dim, images })
    }

    /// Replaces one generator image without re-verifying relators.
    pub fn with_image(&self, generator: usize, f: AffineMap) -> Result<Self> {
        if generator >= self.images.len() {
            return Err(Error::GeneratorOutOfRange { index: generator, count: self.images.len() });
        }
        let mut images = self.images.clone();
        images[generator] = f;
        Self::new(self.presentation.clone(), self.dim, images)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelatorFailure {
    pub relator: usize,
    pub word: Word,
    pub value: AffineMap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentationReport {
    pub failures: Vec<RelatorFailure>,
}

impl RepresentationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Homomorphism between presentations given by generator images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupHom {
    source: Presentation,
    target: Presentation,
    images: Vec<Word>,
}

impl GroupHom {
    pub fn new(source: Presentation, target: Presentation, images: Vec<Word>) -> Result<Self> {
        if images.len() != source.generators {
            return Err(Error::DimensionMismatch { expected: source.generators, found: images.len() });
        }
        for w in &images {
            target.check_word(w)?;
        }
        let images = images.iter().map(Word::free_reduce).collect();
        Ok(GroupHom { source, target, images })
    }

    pub fn identity(p: &Presentation) -> Self {
        GroupHom { source: p.clone(), target: p.clone(), images: (0..p.generators).map(Word::gen).collect() }
    }

    pub fn source(&self) -> &Presentation {
        &self.source
    }

    pub fn target(&self) -> &Presentation {
        &self.target
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        self.source.check_word(w)?;
        w.substitute(&self.images)
    }

    /// Source relators whose image does not freely reduce to the empty word. Those are
    /// recorded as assumptions: triviality in the target is not decided here.
    pub fn unverified_relators(&self) -> Vec<usize> {
        self.source
            .relators
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.substitute(&self.images).expect("range-checked").is_empty())
            .map(|(i, _)| i)
            .collect()
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &GroupHom) -> Result<GroupHom> {
        let images = other.images.iter().map(|w| self.apply(w)).collect::<Result<_>>()?;
        GroupHom::new(other.source.clone(), self.target.clone(), images)
    }
}

/// Evaluates `w` in a linear action given per generator (with cached inverses).
pub fn evaluate_linear(action: &[MatrixQ], inverses: &[MatrixQ], w: &Word) -> Result<MatrixQ> {
    let n = action.first().map_or(0, MatrixQ::rows);
    let mut acc = MatrixQ::identity(n);
    for l in w.letters() {
        if l.generator >= action.len() {
            return Err(Error::GeneratorOutOfRange { index: l.generator, count: action.len() });
        }
        let m = if l.inverse { &inverses[l.generator] } else { &action[l.generator] };
        acc = acc.mul(m)?;
    }
    Ok(acc)
}

/// Relator constraint matrix: block row `r`, block column `i` is `∂rᵣ/∂gᵢ` evaluated in the
/// module, with the left-transport rule `∂(uv) = ∂u + ρ(u)·∂v`. Its kernel is Z¹ in the
/// stacked coordinates `(c(g₀), …, c(g_{k−1}))`.
pub fn fox_jacobian(p: &Presentation, module: &CoefficientModule) -> MatrixQ {
    fox_jacobian_with(p, module, Strategy::Auto)
}

pub fn fox_jacobian_with(p: &Presentation, module: &CoefficientModule, strategy: Strategy) -> MatrixQ {
    let l = module.dim();
    let k = p.generators;
    let action = module.action();
    let inverses = module.inverse_action();
    let blocks: Vec<MatrixQ> = par::map(strategy, &p.relators, |r| {
        let mut row = MatrixQ::zeros(l, k * l);
        let mut prefix = MatrixQ::identity(l);
        for letter in r.letters() {
            let g = letter.generator;
            let contribution = if letter.inverse {
                prefix.mul(&inverses[g]).expect("square").neg()
            } else {
                prefix.clone()
            };
            let current = row.block(0, g * l, l, l);
            row.set_block(0, g * l, &current.add(&contribution).expect("same shape"));
            let step = if letter.inverse { &inverses[g] } else { &action[g] };
            prefix = prefix.mul(step).expect("square");
        }
        row
    });
    let mut out = MatrixQ::zeros(0, k * l);
    for b in blocks {
        out = out.vstack(&b).expect("same width");
    }
    out
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::matrix::vec_from_i64;
    use crate::subspace::Subspace;
    use proptest::prelude::*;
    use proptest::strategy::Strategy;

    fn w(pairs: &[(usize, i64)]) -> Word {
        Word::from_signed(pairs).unwrap()
    }

    #[test]
    fn free_reduce_examples() {
        assert_eq!(w(&[(0, 1), (0, -1)]).free_reduce(), Word::empty());
        assert_eq!(w(&[(0, 1), (1, 1), (1, -1), (0, 1)]).free_reduce(), w(&[(0, 1), (0, 1)]));
        assert_eq!(
            w(&[(0, 1), (1, 1), (0, -1), (1, -1), (1, 1)]).free_reduce(),
            w(&[(0, 1), (1, 1), (0, -1)])
        );
    }

    #[test]
    fn presentation_rejects_trivial_relator() {
        assert!(Presentation::new(1, vec![w(&[(0, 1), (0, -1)])]).is_err());
        assert!(matches!(
            Presentation::new(1, vec![w(&[(3, 1)])]),
            Err(Error::GeneratorOutOfRange { index: 3, count: 1 })
        ));
    }

    fn torus(t1: &[i64], t2: &[i64]) -> AffineRepresentation {
        AffineRepresentation::new(
            Presentation::free_abelian(2),
            2,
            vec![AffineMap::translation_by(vec_from_i64(t1)), AffineMap::translation_by(vec_from_i64(t2))],
        )
        .unwrap()
    }

    #[test]
    fn commuting_translations_verify() {
        assert!(torus(&[1, 0], &[0, 1]).verify().passed());
        assert!(torus(&[1, 0], &[0, 1]).evaluate_word(&Word::empty()).unwrap().is_identity());
    }

    #[test]
    fn trivial_module_fox_matrix_vanishes() {
        let p = Presentation::free_abelian(2);
        let m = CoefficientModule::trivial(p.clone(), 2);
        let j = fox_jacobian(&p, &m);
        assert_eq!((j.rows(), j.cols()), (2, 4));
        assert!(j.is_zero());
        let free = Presentation::free(3);
        let j = fox_jacobian(&free, &CoefficientModule::trivial(free.clone(), 2));
        assert_eq!((j.rows(), j.cols()), (0, 6));
    }

    #[test]
    fn group_hom_composition() {
        let p = Presentation::free_abelian(2);
        let swap = GroupHom::new(p.clone(), p.clone(), vec![Word::gen(1), Word::gen(0)]).unwrap();
        let twice = swap.compose(&swap).unwrap();
        assert_eq!(twice, GroupHom::identity(&p));
        assert_eq!(swap.unverified_relators(), vec![0]);
    }

    fn word(k: usize, max_len: usize) -> impl proptest::strategy::Strategy<Value = Word> {
        proptest::collection::vec((0..k, any::<bool>()), 0..=max_len)
            .prop_map(|v| Word::new(v.into_iter().map(|(g, i)| Letter { generator: g, inverse: i }).collect()))
    }

    proptest! {
        #[test]
        fn free_reduce_idempotent(x in word(3, 12)) {
            let r = x.free_reduce();
            prop_assert!(r.len() <= x.len());
            prop_assert!(r.is_reduced());
            prop_assert_eq!(r.free_reduce(), r);
        }

        #[test]
        fn evaluation_is_multiplicative(u in word(3, 6), v in word(3, 6)) {
            let rep = crate::group::tests::gamma();
            let lhs = rep.evaluate_word(&u.concat(&v)).unwrap();
            let rhs = rep.evaluate_word(&u).unwrap().compose(&rep.evaluate_word(&v).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn reduction_preserves_value(u in word(3, 10)) {
            let rep = crate::group::tests::gamma();
            prop_assert_eq!(rep.evaluate_word(&u).unwrap(), rep.evaluate_word(&u.free_reduce()).unwrap());
        }
    }

    pub(crate) fn gamma() -> AffineRepresentation {
        let f1 = AffineMap::translation_by(vec_from_i64(&[1, 0, 0]));
        let f2 = AffineMap::translation_by(vec_from_i64(&[0, 1, 0]));
        let f3 = AffineMap::new(MatrixQ::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]), vec_from_i64(&[0, 0, 1]))
            .unwrap();
        let rels = vec![
            Word::commutator(&Word::gen(0), &Word::gen(1)),
            Word::commutator(&Word::gen(0), &Word::gen(2)),
            Word::commutator(&Word::gen(2), &Word::gen(1)).concat(&Word::gen(0).inverse()),
        ];
        AffineRepresentation::new(Presentation::new(3, rels).unwrap(), 3, vec![f1, f2, f3]).unwrap()
    }

    #[test]
    fn gamma_examples() {
        let rep = gamma();
        assert!(rep.verify().passed());
        assert_eq!(rep.evaluate_word(&Word::gen(2)).unwrap(), rep.images()[2]);
        let comm = Word::commutator(&Word::gen(2), &Word::gen(1));
        assert_eq!(rep.evaluate_word(&comm).unwrap(), rep.images()[0]);

        // ℤ² with images f₂, f₃ fails on the commutator.
        let bad = AffineRepresentation::new(
            Presentation::free_abelian(2),
            3,
            vec![rep.images()[1].clone(), rep.images()[2].clone()],
        )
        .unwrap();
        let report = bad.verify();
        assert!(!report.passed());
        assert_eq!(report.failures[0].relator, 0);
        assert!(report.failures[0].value.is_translation());
    }

    /// Independent route to Z¹: `c` is a crossed homomorphism iff `g ↦ (ρ(g), c(g))`
    /// is an affine representation, so each relator's translation part, which is
    /// linear in the stacked unknowns, must vanish. Columns come from evaluating the
    /// affine word on unit cochains.
    pub(crate) fn affine_oracle_constraints(p: &Presentation, module: &CoefficientModule) -> MatrixQ {
        let l = module.dim();
        let k = p.generators();
        let n = k * l;
        let mut out = MatrixQ::zeros(p.relators().len() * l, n);
        for col in 0..n {
            let images: Vec<AffineMap> = (0..k)
                .map(|g| {
                    let t: Vec<_> = (0..l).map(|i| if g * l + i == col { crate::rational::one() } else { crate::rational::zero() }).collect();
                    AffineMap::new(module.action()[g].clone(), t).unwrap()
                })
                .collect();
            let rep = AffineRepresentation::new(p.clone(), l, images).unwrap();
            for (r, rel) in p.relators().iter().enumerate() {
                let f = rep.evaluate_word(rel).unwrap();
                for i in 0..l {
                    out[(r * l + i, col)] = f.translation()[i].clone();
                }
            }
        }
        out
    }

    #[test]
    fn heisenberg_relator_matches_oracle() {
        // g₀g₁g₀⁻¹g₁⁻¹g₀⁻¹ with the unipotent fiber action of f₃ on g₁.
        let rel = w(&[(0, 1), (1, 1), (0, -1), (1, -1), (0, -1)]);
        let p = Presentation::new(2, vec![rel]).unwrap();
        let action = vec![MatrixQ::identity(2), MatrixQ::from_i64(&[&[1, 1], &[0, 1]])];
        let m = CoefficientModule::new_unchecked(p.clone(), 2, action).unwrap();
        let fox = Subspace::kernel_of(&fox_jacobian(&p, &m));
        let oracle = Subspace::kernel_of(&affine_oracle_constraints(&p, &m));
        assert_eq!(fox, oracle);
        // Block 0 collapses to −ρ(g₁) and block 1 to 0, so c(g₀) = 0 and c(g₁) is free.
        assert_eq!(fox.dim(), 2);
    }
}
