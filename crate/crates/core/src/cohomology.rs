//! H⁰ and H¹ of finitely presented groups with rational linear coefficients,
//! radiance classes of affine representations and their gauge transformations.
//!
//! Cocycles follow the left convention `c(γδ) = c(γ) + ρ(γ)·c(δ)`. One-cochains are
//! stored stacked as `(c(g₀), …, c(g_{k−1}))` in `ℚ^{k·l}`.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::group::{evaluate_linear, fox_jacobian, AffineRepresentation, GroupHom, Presentation, Word};
use crate::matrix::{self, MatrixQ, VectorQ};
use crate::rational::Rational;
use crate::subspace::{QuotientBasis, Subspace};

/// `ℚˡ` with a linear action of a presented group, one invertible matrix per generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientModule {
    presentation: Presentation,
    dim: usize,
    action: Vec<MatrixQ>,
    inverse_action: Vec<MatrixQ>,
}

impl CoefficientModule {
    /// Validates shapes, invertibility, and that every relator acts as the identity.
    pub fn new(presentation: Presentation, dim: usize, action: Vec<MatrixQ>) -> Result<Self> {
        let m = Self::new_unchecked(presentation, dim, action)?;
        for (i, r) in m.presentation.relators().iter().enumerate() {
            if !m.evaluate(r)?.is_identity() {
                return Err(Error::NotAModule { relator: i });
            }
        }
        Ok(m)
    }

    /// Shape and invertibility checks only; relators are not evaluated.
    pub fn new_unchecked(presentation: Presentation, dim: usize, action: Vec<MatrixQ>) -> Result<Self> {
        if action.len() != presentation.generators() {
            return Err(Error::DimensionMismatch { expected: presentation.generators(), found: action.len() });
        }
        let mut inverse_action = Vec::with_capacity(action.len());
        for a in &action {
            if a.rows() != dim || a.cols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: a.rows().max(a.cols()) });
            }
            inverse_action.push(a.inverse()?);
        }
        Ok(CoefficientModule { presentation, dim, action, inverse_action })
    }

    pub fn trivial(presentation: Presentation, dim: usize) -> Self {
        let k = presentation.generators();
        CoefficientModule {
            presentation,
            dim,
            action: vec![MatrixQ::identity(dim); k],
            inverse_action: vec![MatrixQ::identity(dim); k],
        }
    }

    /// The linear holonomy of an affine representation.
    pub fn linear_holonomy(rep: &AffineRepresentation) -> Result<Self> {
        Self::new(rep.presentation().clone(), rep.dim(), rep.linear_parts())
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn generators(&self) -> usize {
        self.presentation.generators()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn action(&self) -> &[MatrixQ] {
        &self.action
    }

    pub fn inverse_action(&self) -> &[MatrixQ] {
        &self.inverse_action
    }

    pub fn evaluate(&self, w: &Word) -> Result<MatrixQ> {
        self.presentation.check_word(w)?;
        if self.action.is_empty() {
            return Ok(MatrixQ::identity(self.dim));
        }
        evaluate_linear(&self.action, &self.inverse_action, w)
    }

    /// Stacked length `k·l` of a one-cochain.
    pub fn cochain_len(&self) -> usize {
        self.generators() * self.dim
    }
}

/// Value of the crossed homomorphism with generator values `values` on the word `w`:
/// `c(uv) = c(u) + ρ(u)·c(v)`, `c(g⁻¹) = −ρ(g)⁻¹·c(g)`, `c(1) = 0`.
pub fn cocycle_extend(module: &CoefficientModule, values: &[VectorQ], w: &Word) -> Result<VectorQ> {
    module.presentation.check_word(w)?;
    if values.len() != module.generators() {
        return Err(Error::DimensionMismatch { expected: module.generators(), found: values.len() });
    }
    let l = module.dim;
    let mut acc = matrix::zero_vector(l);
    let mut prefix = MatrixQ::identity(l);
    for letter in w.letters() {
        let g = letter.generator;
        if values[g].len() != l {
            return Err(Error::DimensionMismatch { expected: l, found: values[g].len() });
        }
        let term = if letter.inverse {
            matrix::vec_neg(&prefix.mul(&module.inverse_action[g])?.mul_vec(&values[g])?)
        } else {
            prefix.mul_vec(&values[g])?
        };
        acc = matrix::vec_add(&acc, &term);
        let step = if letter.inverse { &module.inverse_action[g] } else { &module.action[g] };
        prefix = prefix.mul(step)?;
    }
    Ok(acc)
}

/// A crossed homomorphism, given by its values on generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cocycle1 {
    values: Vec<VectorQ>,
}

impl Cocycle1 {
    /// Checks the relator constraints.
    pub fn new(module: &CoefficientModule, values: Vec<VectorQ>) -> Result<Self> {
        let stacked = stack(module, &values)?;
        let constraints = fox_jacobian(&module.presentation, module);
        if !matrix::vec_is_zero(&constraints.mul_vec(&stacked)?) {
            return Err(Error::NotACocycle { degree: 1 });
        }
        Ok(Cocycle1 { values })
    }

    pub fn from_stacked(module: &CoefficientModule, stacked: &[Rational]) -> Result<Self> {
        Self::new(module, unstack(module, stacked)?)
    }

    pub fn values(&self) -> &[VectorQ] {
        &self.values
    }

    pub fn stacked(&self) -> VectorQ {
        self.values.iter().flatten().cloned().collect()
    }

    pub fn extend(&self, module: &CoefficientModule, w: &Word) -> Result<VectorQ> {
        cocycle_extend(module, &self.values, w)
    }
}

fn stack(module: &CoefficientModule, values: &[VectorQ]) -> Result<VectorQ> {
    if values.len() != module.generators() {
        return Err(Error::DimensionMismatch { expected: module.generators(), found: values.len() });
    }
    let mut out = Vec::with_capacity(module.cochain_len());
    for v in values {
        if v.len() != module.dim {
            return Err(Error::DimensionMismatch { expected: module.dim, found: v.len() });
        }
        out.extend(v.iter().cloned());
    }
    Ok(out)
}

fn unstack(module: &CoefficientModule, stacked: &[Rational]) -> Result<Vec<VectorQ>> {
    if stacked.len() != module.cochain_len() {
        return Err(Error::DimensionMismatch { expected: module.cochain_len(), found: stacked.len() });
    }
    if module.dim == 0 {
        return Ok(vec![Vec::new(); module.generators()]);
    }
    Ok(stacked.chunks(module.dim).map(<[Rational]>::to_vec).collect())
}

/// Invariants `∩ᵢ ker(ρ(gᵢ) − I)`.
pub fn h0(module: &CoefficientModule) -> Subspace {
    let l = module.dim;
    let mut stacked = MatrixQ::zeros(0, l);
    for a in &module.action {
        let d = a.sub(&MatrixQ::identity(l)).expect("square");
        stacked = stacked.vstack(&d).expect("same width");
    }
    Subspace::kernel_of(&stacked)
}

/// Z¹, B¹ and deterministic coordinates on H¹ = Z¹/B¹.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologySpaces {
    module: CoefficientModule,
    z1: Subspace,
    b1: Subspace,
    quotient: QuotientBasis,
}

impl CohomologySpaces {
    pub fn module(&self) -> &CoefficientModule {
        &self.module
    }

    pub fn z1(&self) -> &Subspace {
        &self.z1
    }

    pub fn b1(&self) -> &Subspace {
        &self.b1
    }

    pub fn z1_basis(&self) -> Vec<Cocycle1> {
        self.z1.basis().into_iter().map(|v| self.wrap(&v)).collect()
    }

    pub fn b1_basis(&self) -> Vec<Cocycle1> {
        self.b1.basis().into_iter().map(|v| self.wrap(&v)).collect()
    }

    fn wrap(&self, stacked: &[Rational]) -> Cocycle1 {
        Cocycle1 { values: unstack(&self.module, stacked).expect("stacked length") }
    }

    pub fn h1_dim(&self) -> usize {
        self.quotient.dim()
    }

    /// `h1_dim × (k·l)` matrix taking a stacked cocycle to its H¹ coordinates.
    pub fn h1_projector(&self) -> &MatrixQ {
        self.quotient.projector()
    }

    /// H¹ coordinates of a stacked one-cochain, which must lie in Z¹.
    pub fn coordinates_of_stacked(&self, stacked: &[Rational]) -> Result<VectorQ> {
        if !self.z1.contains(stacked)? {
            return Err(Error::NotACocycle { degree: 1 });
        }
        self.quotient.coordinates(stacked)
    }

    pub fn coordinates(&self, c: &Cocycle1) -> Result<VectorQ> {
        self.coordinates_of_stacked(&c.stacked())
    }

    /// Canonical cocycle representing the given coordinates.
    pub fn representative(&self, coords: &[Rational]) -> Result<Cocycle1> {
        Ok(self.wrap(&self.quotient.representative(coords)?))
    }

    /// Coboundary `γ ↦ (ρ(γ) − I)·v`.
    pub fn coboundary_of(&self, v: &[Rational]) -> Result<Cocycle1> {
        let values = coboundary_values(&self.module, v)?;
        Ok(Cocycle1 { values })
    }
}

fn coboundary_values(module: &CoefficientModule, v: &[Rational]) -> Result<Vec<VectorQ>> {
    module
        .action
        .iter()
        .map(|a| Ok(matrix::vec_sub(&a.mul_vec(v)?, v)))
        .collect()
}

pub fn h1(module: &CoefficientModule) -> CohomologySpaces {
    let z1 = Subspace::kernel_of(&fox_jacobian(&module.presentation, module));
    let n = module.cochain_len();
    let images: Vec<VectorQ> = (0..module.dim)
        .map(|i| {
            let vals = coboundary_values(module, &matrix::unit_vector(module.dim, i)).expect("dims");
            vals.into_iter().flatten().collect()
        })
        .collect();
    let b1 = Subspace::span(n, &images).expect("stacked length");
    let quotient = QuotientBasis::new(&z1, &b1).expect("B¹ ⊆ Z¹");
    CohomologySpaces { module: module.clone(), z1, b1, quotient }
}

/// An H¹ class in coordinates relative to shared [`CohomologySpaces`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadianceClass {
    spaces: Arc<CohomologySpaces>,
    coordinates: VectorQ,
}

impl RadianceClass {
    pub fn new(spaces: Arc<CohomologySpaces>, coordinates: VectorQ) -> Result<Self> {
        if coordinates.len() != spaces.h1_dim() {
            return Err(Error::DimensionMismatch { expected: spaces.h1_dim(), found: coordinates.len() });
        }
        Ok(RadianceClass { spaces, coordinates })
    }

    pub fn of_cocycle(spaces: Arc<CohomologySpaces>, c: &Cocycle1) -> Result<Self> {
        let coordinates = spaces.coordinates(c)?;
        Ok(RadianceClass { spaces, coordinates })
    }

    pub fn spaces(&self) -> &Arc<CohomologySpaces> {
        &self.spaces
    }

    pub fn coordinates(&self) -> &[Rational] {
        &self.coordinates
    }

    pub fn is_zero(&self) -> bool {
        self.coordinates.iter().all(Zero::is_zero)
    }
}

/// Class of the translation parts of `rep` over its linear holonomy.
pub fn radiance_class(rep: &AffineRepresentation) -> Result<RadianceClass> {
    let report = rep.verify();
    if !report.passed() {
        return Err(Error::InvalidRepresentation(report.failures.iter().map(|f| f.relator).collect()));
    }
    let module = CoefficientModule::linear_holonomy(rep)?;
    let spaces = Arc::new(h1(&module));
    let values: Vec<VectorQ> = rep.images().iter().map(|f| f.translation().to_vec()).collect();
    let c = Cocycle1::new(&module, values)?;
    RadianceClass::of_cocycle(spaces, &c)
}

/// An automorphism `g` of the acting group, its inverse, and `B_g` with
/// `ρ(g(γ)) = B_g·ρ(γ)·B_g⁻¹`. Acts on cocycles by `c ↦ B_g·c(g⁻¹(·))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaugeElement {
    automorphism: GroupHom,
    inverse: GroupHom,
    bg: MatrixQ,
    bg_inverse: MatrixQ,
}

impl GaugeElement {
    /// `inverse_images[i]` is `g⁻¹(gᵢ)`.
    pub fn new(automorphism: GroupHom, inverse_images: Vec<Word>, bg: MatrixQ) -> Result<Self> {
        let p = automorphism.source().clone();
        if automorphism.target() != &p {
            return Err(Error::InvalidGauge("automorphism must map the presentation to itself".into()));
        }
        let inverse = GroupHom::new(p.clone(), p, inverse_images)?;
        let bg_inverse = bg.inverse().map_err(|_| Error::InvalidGauge("B_g is singular".into()))?;
        Ok(GaugeElement { automorphism, inverse, bg, bg_inverse })
    }

    pub fn identity(p: &Presentation, dim: usize) -> Self {
        GaugeElement {
            automorphism: GroupHom::identity(p),
            inverse: GroupHom::identity(p),
            bg: MatrixQ::identity(dim),
            bg_inverse: MatrixQ::identity(dim),
        }
    }

    /// Inner automorphism `γ ↦ h·γ·h⁻¹` with `B_g = ρ(h)`.
    pub fn inner(module: &CoefficientModule, h: &Word) -> Result<Self> {
        let p = module.presentation();
        let conj = |w: &Word| -> Vec<Word> {
            (0..p.generators()).map(|i| w.concat(&Word::gen(i)).concat(&w.inverse()).free_reduce()).collect()
        };
        let forward = GroupHom::new(p.clone(), p.clone(), conj(h))?;
        Self::new(forward, conj(&h.inverse()), module.evaluate(h)?)
    }

    pub fn automorphism(&self) -> &GroupHom {
        &self.automorphism
    }

    pub fn inverse(&self) -> &GroupHom {
        &self.inverse
    }

    pub fn bg(&self) -> &MatrixQ {
        &self.bg
    }

    /// `ρ(g(gᵢ)) = B_g·ρ(gᵢ)·B_g⁻¹` on every generator, and `g(g⁻¹(gᵢ))` acting as `gᵢ`.
    pub fn check(&self, module: &CoefficientModule) -> Result<()> {
        if self.automorphism.source() != module.presentation() {
            return Err(Error::InvalidGauge("automorphism is over a different presentation".into()));
        }
        if self.bg.rows() != module.dim() {
            return Err(Error::DimensionMismatch { expected: module.dim(), found: self.bg.rows() });
        }
        for i in 0..module.generators() {
            let lhs = module.evaluate(&self.automorphism.images()[i])?;
            let rhs = self.bg.mul(&module.action()[i])?.mul(&self.bg_inverse)?;
            if lhs != rhs {
                return Err(Error::NotIntertwining(i));
            }
            let round_trip = self.automorphism.apply(&self.inverse.images()[i])?;
            if module.evaluate(&round_trip)? != module.action()[i] {
                return Err(Error::InvalidGauge(format!("inverse images disagree at generator {i}")));
            }
        }
        Ok(())
    }

    /// `γᵢ ↦ B_g·c(g⁻¹(γᵢ))` on a cocycle given by generator values.
    pub fn act_on_values(&self, module: &CoefficientModule, values: &[VectorQ]) -> Result<Vec<VectorQ>> {
        self.inverse
            .images()
            .iter()
            .map(|w| self.bg.mul_vec(&cocycle_extend(module, values, w)?))
            .collect()
    }

    /// The pullback `γᵢ ↦ B_g⁻¹·c(g(γᵢ))`, inverse to [`Self::act_on_values`].
    pub fn pull_back_values(&self, module: &CoefficientModule, values: &[VectorQ]) -> Result<Vec<VectorQ>> {
        self.automorphism
            .images()
            .iter()
            .map(|w| self.bg_inverse.mul_vec(&cocycle_extend(module, values, w)?))
            .collect()
    }
}

/// Gauge action on a class: act on its canonical representative and reduce.
pub fn gauge_act(gauge: &GaugeElement, cls: &RadianceClass) -> Result<RadianceClass> {
    let spaces = cls.spaces.clone();
    gauge.check(spaces.module())?;
    let rep = spaces.representative(&cls.coordinates)?;
    let moved = gauge.act_on_values(spaces.module(), rep.values())?;
    let coordinates = spaces.coordinates_of_stacked(&moved.into_iter().flatten().collect::<Vec<_>>())?;
    Ok(RadianceClass { spaces, coordinates })
}

/// Matrix of the gauge action on H¹ coordinates (column `j` is the image of basis class `j`).
pub fn gauge_matrix(gauge: &GaugeElement, spaces: &Arc<CohomologySpaces>) -> Result<MatrixQ> {
    gauge.check(spaces.module())?;
    let h = spaces.h1_dim();
    let columns: Vec<VectorQ> = (0..h)
        .map(|j| {
            let cls = RadianceClass { spaces: spaces.clone(), coordinates: matrix::unit_vector(h, j) };
            gauge_act(gauge, &cls).map(|c| c.coordinates)
        })
        .collect::<Result<_>>()?;
    MatrixQ::from_columns(h, &columns)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GaugeVerdict {
    /// Index into the candidate list.
    Equivalent(usize),
    NotFoundAmongCandidates,
}

/// First candidate whose action sends `cls1` to `cls2`.
pub fn gauge_equivalent(
    cls1: &RadianceClass,
    cls2: &RadianceClass,
    candidates: &[GaugeElement],
) -> Result<GaugeVerdict> {
    if cls1.spaces.module() != cls2.spaces.module() {
        return Err(Error::InvalidGauge("classes live over different modules".into()));
    }
    for (i, g) in candidates.iter().enumerate() {
        if gauge_act(g, cls1)?.coordinates == cls2.coordinates {
            return Ok(GaugeVerdict::Equivalent(i));
        }
    }
    Ok(GaugeVerdict::NotFoundAmongCandidates)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterminantTest {
    pub determinant: Rational,
    /// The class lies in `{Λˡc ≠ 0}`.
    pub nonzero: bool,
}

/// `Λˡc` for a free abelian group of rank `l` acting by translations on `ℚˡ`: the
/// determinant of the matrix whose columns are the generator translations.
pub fn completeness_det_test(rep: &AffineRepresentation) -> Result<DeterminantTest> {
    let l = rep.dim();
    let p = rep.presentation();
    if p.generators() != l || !p.is_standard_free_abelian() {
        return Err(Error::UnsupportedHolonomy(format!(
            "needs a free abelian presentation of rank {l}, got {} generators",
            p.generators()
        )));
    }
    if let Some(i) = rep.images().iter().position(|f| !f.is_translation()) {
        return Err(Error::UnsupportedHolonomy(format!("generator {i} has a nontrivial linear part")));
    }
    let columns: Vec<VectorQ> = rep.images().iter().map(|f| f.translation().to_vec()).collect();
    let determinant = MatrixQ::from_columns(l, &columns)?.determinant()?;
    let nonzero = !determinant.is_zero();
    Ok(DeterminantTest { determinant, nonzero })
}
