//! Holonomy data of flat affine bundles: block form, normality witnesses, the radiance
//! map `r: ℚᵐ → H¹(π₁F, ℚˡ)`, the affinely-locally-trivial test and the action of the
//! base group on fiber cohomology.
//!
//! Coordinates are base first. Raw data is permuted on construction; the permutation
//! is kept so results can be related back to the original coordinates.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::affine::{block_decompose, check_permutation, AffineMap, BlockAffineMap, BlockSplit};
use crate::cohomology::{h0, h1, cocycle_extend, CoefficientModule, CohomologySpaces};
use crate::error::{Error, Result};
use crate::group::{AffineRepresentation, GroupHom, Letter, Presentation, Word};
use crate::matrix::{self, MatrixQ, VectorQ};
use crate::par::{self, Strategy};
use crate::rational::Rational;

/// Claim that `ambient · fiber · ambient⁻¹` equals `word`, a word in fiber generators.
/// All indices are ambient generator indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub ambient: usize,
    pub fiber: usize,
    pub word: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibrationData {
    ambient: AffineRepresentation,
    permutation: Vec<usize>,
    split: BlockSplit,
    fiber_generators: Vec<usize>,
    fiber_relators: Vec<Word>,
    witnesses: Vec<Witness>,
    quotient: Option<GroupHom>,
}

impl FibrationData {
    /// `permutation[i]` is the original coordinate that becomes coordinate `i`.
    ///
    /// The fiber group is presented on `fiber_generators` (in the given order) by the
    /// ambient relators involving only fiber generators.
    pub fn new(
        representation: &AffineRepresentation,
        permutation: Vec<usize>,
        split: BlockSplit,
        fiber_generators: Vec<usize>,
        witnesses: Vec<Witness>,
        quotient: Option<GroupHom>,
    ) -> Result<Self> {
        let k = representation.presentation().generators();
        if split.dim() != representation.dim() {
            return Err(Error::DimensionMismatch { expected: representation.dim(), found: split.dim() });
        }
        check_permutation(&permutation, representation.dim())?;
        for &g in &fiber_generators {
            if g >= k {
                return Err(Error::GeneratorOutOfRange { index: g, count: k });
            }
        }
        let mut seen = fiber_generators.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != fiber_generators.len() {
            return Err(Error::InvalidFibration("repeated fiber generator".into()));
        }
        for w in &witnesses {
            for idx in [w.ambient, w.fiber] {
                if idx >= k {
                    return Err(Error::GeneratorOutOfRange { index: idx, count: k });
                }
            }
            representation.presentation().check_word(&w.word)?;
        }
        if let Some(q) = &quotient {
            if q.source() != representation.presentation() {
                return Err(Error::InvalidFibration("quotient map has the wrong source".into()));
            }
        }
        let ambient = representation.permuted(&permutation)?;
        let mut data = FibrationData {
            ambient,
            permutation,
            split,
            fiber_generators,
            fiber_relators: Vec::new(),
            witnesses,
            quotient,
        };
        data.fiber_relators = representation
            .presentation()
            .relators()
            .iter()
            .filter_map(|r| data.to_fiber_word(r))
            .collect();
        Ok(data)
    }

    /// Replaces the derived fiber relators (words in fiber-generator positions).
    pub fn with_fiber_relators(mut self, relators: Vec<Word>) -> Result<Self> {
        Presentation::new(self.fiber_generators.len(), relators.clone())?;
        self.fiber_relators = relators;
        Ok(self)
    }

    /// Replaces one generator image (given in split coordinates) without any checks.
    pub fn with_image(&self, generator: usize, f: AffineMap) -> Result<Self> {
        let mut out = self.clone();
        out.ambient = self.ambient.with_image(generator, f)?;
        Ok(out)
    }

    /// The representation in split coordinates.
    pub fn ambient(&self) -> &AffineRepresentation {
        &self.ambient
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn split(&self) -> BlockSplit {
        self.split
    }

    pub fn fiber_generators(&self) -> &[usize] {
        &self.fiber_generators
    }

    pub fn fiber_relators(&self) -> &[Word] {
        &self.fiber_relators
    }

    pub fn witnesses(&self) -> &[Witness] {
        &self.witnesses
    }

    pub fn quotient(&self) -> Option<&GroupHom> {
        self.quotient.as_ref()
    }

    pub fn fiber_presentation(&self) -> Result<Presentation> {
        Presentation::new(self.fiber_generators.len(), self.fiber_relators.clone())
    }

    fn fiber_position(&self, ambient: usize) -> Option<usize> {
        self.fiber_generators.iter().position(|&g| g == ambient)
    }

    /// Rewrites an ambient word in fiber-generator positions, if it only uses fiber generators.
    fn to_fiber_word(&self, w: &Word) -> Option<Word> {
        w.letters()
            .iter()
            .map(|l| self.fiber_position(l.generator).map(|p| Letter { generator: p, inverse: l.inverse }))
            .collect::<Option<Vec<_>>>()
            .map(Word::new)
    }

    fn to_ambient_word(&self, w: &Word) -> Word {
        Word::new(
            w.letters()
                .iter()
                .map(|l| Letter { generator: self.fiber_generators[l.generator], inverse: l.inverse })
                .collect(),
        )
    }

    /// The witness word for `ambient · fiber · ambient⁻¹`. For a fiber generator
    /// `ambient` the literal conjugate is used when no witness was supplied.
    pub fn witness(&self, ambient: usize, fiber: usize) -> Option<Word> {
        if let Some(w) = self.witnesses.iter().find(|w| w.ambient == ambient && w.fiber == fiber) {
            return Some(w.word.clone());
        }
        self.fiber_position(ambient)?;
        Some(Word::gen(ambient).concat(&Word::gen(fiber)).concat(&Word::gen(ambient).inverse()).free_reduce())
    }

    fn blocks(&self) -> Result<Vec<BlockAffineMap>> {
        self.ambient.images().iter().map(|f| block_decompose(f, self.split)).collect()
    }

    /// `π₁F` acting on `ℚˡ` through the fiber linear parts.
    pub fn fiber_module(&self) -> Result<CoefficientModule> {
        let blocks = self.blocks()?;
        let action = self.fiber_generators.iter().map(|&g| blocks[g].fiber_linear().clone()).collect();
        CoefficientModule::new(self.fiber_presentation()?, self.split.fiber(), action)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Relators (by index) whose image is not the identity.
    Representation(Vec<usize>),
    NotBlockTriangular { generator: usize, positions: Vec<(usize, usize)> },
    /// A fiber generator with `A ≠ I` or `a ≠ 0`.
    FiberMovesBase(usize),
    FiberModule(String),
    MissingWitness { ambient: usize, fiber: usize },
    /// The witness word uses a non-fiber generator.
    WitnessOutsideFiber { ambient: usize, fiber: usize },
    WitnessMismatch { ambient: usize, fiber: usize },
    /// The coupling `C` of this generator has columns outside `H⁰(π₁F, ℚˡ)`.
    CouplingNotInvariant(usize),
    Quotient(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FibrationReport {
    pub violations: Vec<Violation>,
}

impl FibrationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_fibration(d: &FibrationData) -> FibrationReport {
    let mut violations = Vec::new();
    let report = d.ambient.verify();
    if !report.passed() {
        violations.push(Violation::Representation(report.failures.iter().map(|f| f.relator).collect()));
    }

    let mut blocks = Vec::new();
    for (g, f) in d.ambient.images().iter().enumerate() {
        match block_decompose(f, d.split) {
            Ok(b) => blocks.push(Some(b)),
            Err(Error::NotBlockTriangular(positions)) => {
                violations.push(Violation::NotBlockTriangular { generator: g, positions });
                blocks.push(None);
            }
            Err(e) => {
                violations.push(Violation::FiberModule(e.to_string()));
                blocks.push(None);
            }
        }
    }
    for &g in &d.fiber_generators {
        if let Some(b) = &blocks[g] {
            if !b.acts_trivially_on_base() {
                violations.push(Violation::FiberMovesBase(g));
            }
        }
    }

    let k = d.ambient.presentation().generators();
    for a in 0..k {
        for &f in &d.fiber_generators {
            let Some(word) = d.witness(a, f) else {
                violations.push(Violation::MissingWitness { ambient: a, fiber: f });
                continue;
            };
            if d.to_fiber_word(&word).is_none() {
                violations.push(Violation::WitnessOutsideFiber { ambient: a, fiber: f });
                continue;
            }
            let conj = Word::gen(a).concat(&Word::gen(f)).concat(&Word::gen(a).inverse());
            let lhs = d.ambient.evaluate_word(&conj).expect("range-checked");
            let rhs = d.ambient.evaluate_word(&word).expect("range-checked");
            if lhs != rhs {
                violations.push(Violation::WitnessMismatch { ambient: a, fiber: f });
            }
        }
    }

    if blocks.iter().all(Option::is_some) {
        match d.fiber_module() {
            Ok(module) => {
                let invariants = h0(&module);
                for (g, b) in blocks.iter().enumerate() {
                    let c = b.as_ref().expect("checked").coupling();
                    let inside = (0..c.cols()).all(|j| invariants.contains(&c.col(j)).expect("fiber dim"));
                    if !inside {
                        violations.push(Violation::CouplingNotInvariant(g));
                    }
                }
            }
            Err(e) => violations.push(Violation::FiberModule(e.to_string())),
        }
    }

    if let Some(q) = &d.quotient {
        check_quotient(d, q, &blocks, &mut violations);
    }
    FibrationReport { violations }
}

/// The quotient map must kill the fiber generators, and generators with the same image
/// must act identically on the base.
fn check_quotient(d: &FibrationData, q: &GroupHom, blocks: &[Option<BlockAffineMap>], out: &mut Vec<Violation>) {
    for &f in &d.fiber_generators {
        if !q.images()[f].is_empty() {
            out.push(Violation::Quotient(format!("fiber generator {f} maps to {}", q.images()[f])));
        }
    }
    let mut by_image: BTreeMap<String, (usize, AffineMap)> = BTreeMap::new();
    for (g, b) in blocks.iter().enumerate() {
        let Some(b) = b else { continue };
        let key = q.images()[g].to_string();
        match by_image.get(&key) {
            Some((h, base)) if *base != b.base_map() => out.push(Violation::Quotient(format!(
                "generators {h} and {g} share the image {key} but act differently on the base"
            ))),
            Some(_) => {}
            None => {
                by_image.insert(key, (g, b.base_map()));
            }
        }
    }
}

/// `r(x) = constant_part + linear_part·x` in H¹ coordinates of the fiber module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadianceMap {
    pub spaces: Arc<CohomologySpaces>,
    pub constant_part: VectorQ,
    pub linear_part: MatrixQ,
}

impl RadianceMap {
    pub fn evaluate(&self, x: &[Rational]) -> Result<VectorQ> {
        Ok(matrix::vec_add(&self.constant_part, &self.linear_part.mul_vec(x)?))
    }

    pub fn is_constant(&self) -> bool {
        self.linear_part.is_zero()
    }
}

fn require_valid(d: &FibrationData) -> Result<()> {
    let report = validate_fibration(d);
    if report.passed() {
        Ok(())
    } else {
        Err(Error::InvalidFibration(format!("{:?}", report.violations)))
    }
}

pub fn radiance_map(d: &FibrationData) -> Result<RadianceMap> {
    require_valid(d)?;
    radiance_map_unchecked(d)
}

/// Fiber cocycle `γ ↦ C_γ·x + d_γ` over the base point `x`.
pub fn fiber_cocycle_at(d: &FibrationData, x: &[Rational]) -> Result<Vec<VectorQ>> {
    let blocks = d.blocks()?;
    d.fiber_generators
        .iter()
        .map(|&g| Ok(blocks[g].fiber_map_at(x)?.translation().to_vec()))
        .collect()
}

fn radiance_map_unchecked(d: &FibrationData) -> Result<RadianceMap> {
    let module = d.fiber_module()?;
    let spaces = Arc::new(h1(&module));
    let blocks = d.blocks()?;
    let to_class = |values: Vec<VectorQ>| -> Result<VectorQ> {
        let stacked: VectorQ = values.into_iter().flatten().collect();
        spaces.coordinates_of_stacked(&stacked).map_err(|e| match e {
            Error::NotACocycle { .. } => Error::InvalidFibration("fiber translations are not a cocycle".into()),
            e => e,
        })
    };
    let fiber: Vec<&BlockAffineMap> = d.fiber_generators.iter().map(|&g| &blocks[g]).collect();
    let constant_part = to_class(fiber.iter().map(|b| b.fiber_translation().to_vec()).collect())?;
    let m = d.split.base();
    let columns: Vec<VectorQ> = (0..m)
        .map(|j| to_class(fiber.iter().map(|b| b.coupling().col(j)).collect()))
        .collect::<Result<_>>()?;
    let linear_part = MatrixQ::from_columns(spaces.h1_dim(), &columns)?;
    Ok(RadianceMap { spaces, constant_part, linear_part })
}

/// Affinely locally trivial: the radiance map is constant.
pub fn is_alt(d: &FibrationData) -> Result<bool> {
    Ok(radiance_map(d)?.is_constant())
}

/// Action of `γ₁` on `H¹(π₁F, ℚˡ)`: the gauge transformation for the automorphism
/// `γ ↦ γ₁γγ₁⁻¹` (given by the witnesses) and `B_g` = fiber linear part of `γ₁`.
pub fn induced_h1_action(d: &FibrationData, ambient_gen: usize) -> Result<MatrixQ> {
    require_valid(d)?;
    induced_action_word_unchecked(d, &Word::gen(ambient_gen))
}

/// As [`induced_h1_action`] for a positive word `γ = γ_{a₁}⋯γ_{a_s}`, building the
/// conjugation automorphism by substituting witnesses rather than multiplying matrices.
pub fn induced_h1_action_word(d: &FibrationData, word: &Word) -> Result<MatrixQ> {
    require_valid(d)?;
    induced_action_word_unchecked(d, word)
}

fn induced_action_word_unchecked(d: &FibrationData, word: &Word) -> Result<MatrixQ> {
    d.ambient.presentation().check_word(word)?;
    let module = d.fiber_module()?;
    let spaces = h1(&module);
    let f = d.fiber_generators.len();

    // Conjugation by the word, in fiber positions: start from the identity and
    // apply letters right to left so that conj_{ab} = conj_a ∘ conj_b.
    let mut images: Vec<Word> = (0..f).map(Word::gen).collect();
    for letter in word.letters().iter().rev() {
        if letter.inverse {
            return Err(Error::InvalidFibration("induced action is computed for positive words".into()));
        }
        let step: Vec<Word> = d
            .fiber_generators
            .iter()
            .map(|&fg| {
                let w = d.witness(letter.generator, fg).ok_or_else(|| {
                    Error::InvalidFibration(format!("no witness for {}·{fg}·{}⁻¹", letter.generator, letter.generator))
                })?;
                d.to_fiber_word(&w)
                    .ok_or_else(|| Error::InvalidFibration("witness leaves the fiber group".into()))
            })
            .collect::<Result<_>>()?;
        images = images.iter().map(|w| w.substitute(&step)).collect::<Result<_>>()?;
        images = images.iter().map(Word::free_reduce).collect();
    }

    let gamma = d.ambient.evaluate_word(word)?;
    let bg = block_decompose(&gamma, d.split)?.fiber_linear().clone();
    let bg_inv = bg.inverse()?;
    for (i, w) in images.iter().enumerate() {
        let lhs = module.evaluate(w)?;
        let rhs = bg.mul(&module.action()[i])?.mul(&bg_inv)?;
        if lhs != rhs {
            return Err(Error::NotIntertwining(i));
        }
    }

    // Pull back c ↦ B_g⁻¹·c(g(·)); the induced action is its inverse.
    let h = spaces.h1_dim();
    let columns: Vec<VectorQ> = (0..h)
        .map(|j| {
            let rep = spaces.representative(&matrix::unit_vector(h, j))?;
            let pulled: VectorQ = images
                .iter()
                .map(|w| bg_inv.mul_vec(&cocycle_extend(&module, rep.values(), w)?))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect();
            spaces.coordinates_of_stacked(&pulled)
        })
        .collect::<Result<_>>()?;
    let pullback = MatrixQ::from_columns(h, &columns)?;
    pullback.inverse().map_err(|_| Error::InvalidFibration("conjugation is not an automorphism on H¹".into()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivarianceFailure {
    pub point: VectorQ,
    /// `r(A·x + a)`.
    pub moved: VectorQ,
    /// `i(γ₁)·r(x)`.
    pub acted: VectorQ,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivarianceReport {
    pub ambient_gen: usize,
    pub points: usize,
    pub failures: Vec<EquivarianceFailure>,
}

impl EquivarianceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `r(A·x + a) = i(γ₁)·r(x)` at every sample point. The data is not re-validated,
/// so inconsistent holonomy shows up as point failures.
pub fn equivariance_check(d: &FibrationData, ambient_gen: usize, samples: &[VectorQ]) -> Result<EquivarianceReport> {
    equivariance_check_with(d, ambient_gen, samples, Strategy::Auto)
}

pub fn equivariance_check_with(
    d: &FibrationData,
    ambient_gen: usize,
    samples: &[VectorQ],
    strategy: Strategy,
) -> Result<EquivarianceReport> {
    let k = d.ambient.presentation().generators();
    if ambient_gen >= k {
        return Err(Error::GeneratorOutOfRange { index: ambient_gen, count: k });
    }
    let m = d.split.base();
    if let Some(bad) = samples.iter().find(|x| x.len() != m) {
        return Err(Error::DimensionMismatch { expected: m, found: bad.len() });
    }
    let r = radiance_map_unchecked(d)?;
    let action = induced_action_word_unchecked(d, &Word::gen(ambient_gen))?;
    let base = block_decompose(&d.ambient.images()[ambient_gen], d.split)?.base_map();
    let results = par::map(strategy, samples, |x| -> Result<Option<EquivarianceFailure>> {
        let moved = r.evaluate(&base.apply(x)?)?;
        let acted = action.mul_vec(&r.evaluate(x)?)?;
        Ok((moved != acted).then(|| EquivarianceFailure { point: x.clone(), moved, acted }))
    });
    let failures = results.into_iter().filter_map(Result::transpose).collect::<Result<_>>()?;
    Ok(EquivarianceReport { ambient_gen, points: samples.len(), failures })
}

/// Ambient word in fiber-generator positions mapped back to ambient indices.
pub fn fiber_word_to_ambient(d: &FibrationData, w: &Word) -> Word {
    d.to_ambient_word(w)
}
