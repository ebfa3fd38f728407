//! Recursive obstruction ladder for towers of affine gluings.
//!
//! Level `ℓ` contributes a gluing `u^ℓ` in `Aff(ℚ^{v_ℓ})` and a declared coefficient
//! system `S_ℓ`. Rung `r` works on the Whitney sum `W_r = S_r ⊕ W_{r−1}` (later level
//! first) with the assembled gluing
//!
//! ```text
//! Φʳ_ij = ( [[L(uʳ_ij), K_ij], [0, L(Φʳ⁻¹_ij)]] , (t(uʳ_ij), t(Φʳ⁻¹_ij)) )
//! ```
//!
//! where `K` is the level's coupling into the lower levels. The chain at rung `r` is
//! `z_r = a + v`: `a` the defect of `Φʳ`, `v = δ(0; A_{r−1})` carrying the previous
//! correction up one level. If `δY = −z_r` is solvable, `A_r = (0; A_{r−1}) + Y` and
//! `τ(A_r)∘Φʳ` is a strict cocycle; otherwise the class of `z_r` is the obstruction.

use std::collections::BTreeMap;

use crate::affine::AffineMap;
use crate::cech::{
    coboundary, lift_raw, nonabelian_defect, solve_coboundary, validate_system, Cochain, CoboundarySolution,
    Extension, Gluing, LocalSystem, Nerve,
};
use crate::error::{Error, Result};
use crate::matrix::{MatrixQ, VectorQ};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelData {
    /// 1-based.
    pub level: usize,
    pub system: LocalSystem,
    pub gluing: Gluing,
}

/// Coupling `K_ij` (`v_ℓ × D_{ℓ−1}`, where `D_{ℓ−1}` is the total dimension of the
/// lower levels) of level `ℓ ≥ 2`, on edges `i < j`. Missing edges couple by zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhitneyCoupling {
    pub level: usize,
    pub coupling: BTreeMap<(usize, usize), MatrixQ>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderSpec {
    pub nerve: Nerve,
    pub levels: Vec<LevelData>,
    pub whitney: Vec<WhitneyCoupling>,
}

impl LadderSpec {
    pub fn new(nerve: Nerve, levels: Vec<LevelData>, whitney: Vec<WhitneyCoupling>) -> Result<Self> {
        let spec = LadderSpec { nerve, levels, whitney };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.nerve.is_closed() {
            return Err(Error::InvalidLadder("base nerve is not closed under faces".into()));
        }
        if self.levels.is_empty() {
            return Err(Error::InvalidLadder("no levels".into()));
        }
        for (i, l) in self.levels.iter().enumerate() {
            let r = i + 1;
            if l.level != r {
                return Err(Error::InvalidLadder(format!("level {} listed in position {r}", l.level)));
            }
            if l.system.nerve() != &self.nerve || l.gluing.nerve() != &self.nerve {
                return Err(Error::InvalidLadder(format!("level {r} is over a different nerve")));
            }
            if l.system.dim() != l.gluing.dim() {
                return Err(Error::DimensionMismatch { expected: l.gluing.dim(), found: l.system.dim() }.at_rung(r));
            }
            let report = validate_system(&l.system);
            if !report.passed() {
                return Err(Error::InvalidSystem(format!("level {r}: {report:?}")).at_rung(r));
            }
        }
        let mut seen = Vec::new();
        for w in &self.whitney {
            if w.level < 2 || w.level > self.levels.len() || seen.contains(&w.level) {
                return Err(Error::InvalidLadder(format!("coupling for level {} is invalid or repeated", w.level)));
            }
            seen.push(w.level);
            let (rows, cols) = (self.levels[w.level - 1].gluing.dim(), self.lower_dim(w.level));
            for (&(i, j), k) in &w.coupling {
                if i >= j || !self.nerve.contains(&[i, j]) {
                    return Err(Error::InvalidLadder(format!("coupling on {i}-{j} is not on an edge i<j")));
                }
                if k.rows() != rows || k.cols() != cols {
                    return Err(Error::DimensionMismatch { expected: rows * cols, found: k.rows() * k.cols() }
                        .at_rung(w.level));
                }
            }
        }
        Ok(())
    }

    /// `D_{ℓ−1}`: total dimension of the levels below `ℓ`.
    pub fn lower_dim(&self, level: usize) -> usize {
        self.levels[..level - 1].iter().map(|l| l.gluing.dim()).sum()
    }

    /// `D_r`.
    pub fn whitney_dim(&self, rung: usize) -> usize {
        self.lower_dim(rung + 1)
    }

    fn coupling(&self, level: usize, i: usize, j: usize) -> MatrixQ {
        self.whitney
            .iter()
            .find(|w| w.level == level)
            .and_then(|w| w.coupling.get(&(i, j)).cloned())
            .unwrap_or_else(|| MatrixQ::zeros(self.levels[level - 1].gluing.dim(), self.lower_dim(level)))
    }

    /// Ladder truncated to its first `n` levels.
    pub fn truncated(&self, n: usize) -> LadderSpec {
        LadderSpec {
            nerve: self.nerve.clone(),
            levels: self.levels[..n].to_vec(),
            whitney: self.whitney.iter().filter(|w| w.level <= n).cloned().collect(),
        }
    }

    /// `Φʳ` on `W_r`.
    pub fn assembled_gluing(&self, rung: usize) -> Result<Gluing> {
        let top = &self.levels[rung - 1].gluing;
        if rung == 1 {
            return Ok(top.clone());
        }
        let lower = self.assembled_gluing(rung - 1)?;
        let (v, d) = (top.dim(), lower.dim());
        let maps = top
            .edge_maps()
            .map(|((i, j), u)| {
                let low = lower.get(i, j)?;
                let mut linear = MatrixQ::zeros(v + d, v + d);
                linear.set_block(0, 0, u.linear());
                linear.set_block(0, v, &self.coupling(rung, i, j));
                linear.set_block(v, v, low.linear());
                let translation = [u.translation(), low.translation()].concat();
                Ok(((i, j), AffineMap::new(linear, translation)?))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Gluing::new(self.nerve.clone(), v + d, maps)
    }

    /// `W_r` as an extension of `W_{r−1}` by `S_r`, with the coupling induced by `K`.
    pub fn whitney_system(&self, rung: usize) -> Result<WhitneySystem> {
        let top = self.levels[rung - 1].system.clone();
        if rung == 1 {
            return Ok(WhitneySystem { system: top, extension: None });
        }
        let lower = self.whitney_system(rung - 1)?.system;
        let coupling = self
            .nerve
            .simplices(1)
            .iter()
            .map(|e| {
                let (i, j) = (e[0], e[1]);
                let x = top.transition(i, j)?.mul(&self.coupling(rung, i, j))?.mul(&lower.transition(i, j)?)?.neg();
                Ok(((i, j), x))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        let ext = Extension::new(top, lower, &coupling).map_err(|e| e.at_rung(rung))?;
        Ok(WhitneySystem { system: ext.total().clone(), extension: Some(ext) })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhitneySystem {
    pub system: LocalSystem,
    /// `S_r ⊕ W_{r−1}` for rungs above the first.
    pub extension: Option<Extension>,
}

/// Defect of the level's own gluing, as a 2-cochain in its declared system.
pub fn level_defect(ld: &LevelData) -> Result<Cochain> {
    let d = nonabelian_defect(&ld.gluing)?;
    Cochain::from_stacked(&ld.system, 2, &d.cochain.stacked())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LadderStatus {
    Solvable,
    ObstructedAtRung(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RungOutcome {
    pub rung: usize,
    /// `z_r`, a 2-cocycle in `W_r`.
    pub cocycle: Cochain,
    /// `A_r`, when the rung is solvable.
    pub correction: Option<Cochain>,
    /// Coordinates of the nonzero class of `z_r` in `H²(W_r)`, when it is not.
    pub certificate: Option<VectorQ>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderVerdict {
    pub status: LadderStatus,
    pub rungs: Vec<RungOutcome>,
}

impl LadderVerdict {
    /// Final correction `A_L` when solvable.
    pub fn correction(&self) -> Option<&Cochain> {
        match self.status {
            LadderStatus::Solvable => self.rungs.last()?.correction.as_ref(),
            LadderStatus::ObstructedAtRung(_) => None,
        }
    }
}

/// `(0; c)` in `W_r = S_r ⊕ W_{r−1}`.
fn pad_top(ext: &Extension, c: &Cochain) -> Result<Cochain> {
    ext.combine(&Cochain::zero(ext.sub(), c.degree()), c)
}

/// Restriction of a `W_L` cochain to its last `D_r` coordinates, as a `W_r` cochain.
fn restrict(c: &Cochain, target: &LocalSystem) -> Result<Cochain> {
    let d = target.dim();
    let off = c.dim() - d;
    let stacked: VectorQ = c.values().iter().flat_map(|v| v[off..].iter().cloned()).collect();
    Cochain::from_stacked(target, c.degree(), &stacked)
}

pub fn run_ladder(spec: &LadderSpec) -> Result<LadderVerdict> {
    spec.validate()?;
    let mut rungs = Vec::new();
    let mut previous: Option<Cochain> = None;
    for r in 1..=spec.levels.len() {
        let w = spec.whitney_system(r)?;
        let phi = spec.assembled_gluing(r).map_err(|e| e.at_rung(r))?;
        let a = nonabelian_defect(&phi).map_err(|e| e.at_rung(r))?;
        let a = Cochain::from_stacked(&w.system, 2, &a.cochain.stacked())?;
        let (z, base) = match (&previous, &w.extension) {
            (Some(prev), Some(ext)) => {
                let padded = pad_top(ext, prev)?;
                let v = coboundary(&w.system, &padded)?;
                debug_assert_eq!(ext.split(&v)?.0, lift_raw(ext, prev)?);
                (a.add(&v)?, padded)
            }
            _ => (a, Cochain::zero(&w.system, 1)),
        };
        if !coboundary(&w.system, &z)?.is_zero() {
            return Err(Error::NotACocycle { degree: 2 }.at_rung(r));
        }
        match solve_coboundary(&w.system, &z).map_err(|e| e.at_rung(r))? {
            CoboundarySolution::Solved(y) => {
                let correction = base.sub(&y)?;
                rungs.push(RungOutcome { rung: r, cocycle: z, correction: Some(correction.clone()), certificate: None });
                previous = Some(correction);
            }
            CoboundarySolution::NoSolution(cls) => {
                rungs.push(RungOutcome { rung: r, cocycle: z, correction: None, certificate: Some(cls) });
                return Ok(LadderVerdict { status: LadderStatus::ObstructedAtRung(r), rungs });
            }
        }
    }
    let verdict = LadderVerdict { status: LadderStatus::Solvable, rungs };
    let failures = replay(spec, &verdict)?;
    if let Some((r, t)) = failures.first() {
        return Err(Error::InvalidLadder(format!(
            "corrected gluing is not strict on {t:?}: the declared system does not match the gluing"
        ))
        .at_rung(*r));
    }
    Ok(verdict)
}

/// Rungs and triangles where `τ(A_L|W_r)∘Φʳ` fails the strict cocycle condition.
pub fn replay(spec: &LadderSpec, verdict: &LadderVerdict) -> Result<Vec<(usize, Vec<usize>)>> {
    let total = verdict
        .correction()
        .ok_or_else(|| Error::InvalidLadder("only solvable verdicts can be replayed".into()))?;
    let mut failures = Vec::new();
    for r in 1..=spec.levels.len() {
        let w = spec.whitney_system(r)?;
        let corrected = spec.assembled_gluing(r)?.corrected(&restrict(total, &w.system)?)?;
        failures.extend(corrected.strict_failures().into_iter().map(|t| (r, t)));
    }
    Ok(failures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::{cohomology, Simplex};
    use crate::matrix::{vec_from_i64, vec_is_zero};
    use crate::rational::{frac, int};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tetra() -> Nerve {
        Nerve::simplex_boundary(3)
    }

    fn translations(nerve: &Nerve, dim: usize, rng: &mut ChaCha8Rng) -> Gluing {
        let maps = nerve
            .simplices(1)
            .iter()
            .map(|e| {
                let t = (0..dim).map(|_| frac(rng.gen_range(-6..=6), rng.gen_range(1..=3))).collect();
                ((e[0], e[1]), AffineMap::translation_by(t))
            })
            .collect();
        Gluing::new(nerve.clone(), dim, maps).unwrap()
    }

    fn level(r: usize, gluing: Gluing) -> LevelData {
        let system = gluing.linear_system().unwrap();
        LevelData { level: r, system, gluing }
    }

    /// Scaling by 2 on the edges out of vertex 0 and a unit shift on 1-2, read with
    /// constant coefficients: the defect pairs to 1 with the fundamental cycle.
    pub(crate) fn planted_obstruction() -> LadderSpec {
        let nerve = tetra();
        let mut maps: BTreeMap<_, _> =
            nerve.simplices(1).iter().map(|e| ((e[0], e[1]), AffineMap::identity(1))).collect();
        for j in 1..4 {
            maps.insert((0, j), AffineMap::linear_map(MatrixQ::from_i64(&[&[2]])).unwrap());
        }
        maps.insert((1, 2), AffineMap::translation_by(vec_from_i64(&[-1])));
        let gluing = Gluing::new(nerve.clone(), 1, maps).unwrap();
        let system = LocalSystem::constant(nerve.clone(), 1);
        LadderSpec::new(nerve, vec![LevelData { level: 1, system, gluing }], vec![]).unwrap()
    }

    fn pairing_with_fundamental_cycle(z: &Cochain) -> crate::rational::Rational {
        let cycle: [(Simplex, i64); 4] =
            [(vec![1, 2, 3], 1), (vec![0, 2, 3], -1), (vec![0, 1, 3], 1), (vec![0, 1, 2], -1)];
        cycle.iter().map(|(s, c)| &z.get(s).unwrap()[0] * int(*c)).sum()
    }

    #[test]
    fn identity_levels_are_solvable() {
        let levels = vec![level(1, Gluing::identity(tetra(), 2)), level(2, Gluing::identity(tetra(), 1))];
        let v = run_ladder(&LadderSpec::new(tetra(), levels, vec![]).unwrap()).unwrap();
        assert_eq!(v.status, LadderStatus::Solvable);
        assert!(v.rungs.iter().all(|r| r.correction.as_ref().unwrap().is_zero()));
    }

    #[test]
    fn level_defect_examples() {
        assert!(level_defect(&level(1, Gluing::identity(tetra(), 2))).unwrap().is_zero());
        let mut maps: BTreeMap<_, _> =
            tetra().simplices(1).iter().map(|e| ((e[0], e[1]), AffineMap::identity(1))).collect();
        maps.insert((0, 2), AffineMap::translation_by(vec![int(5)]));
        let d = level_defect(&level(1, Gluing::new(tetra(), 1, maps).unwrap())).unwrap();
        assert_eq!(d.stacked(), vec_from_i64(&[-5, 0, 5, 0]));
    }

    #[test]
    fn single_level_corrections_restore_strictness() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ld = level(1, translations(&tetra(), 2, &mut rng));
        assert!(!level_defect(&ld).unwrap().is_zero());
        let spec = LadderSpec::new(tetra(), vec![ld.clone()], vec![]).unwrap();
        let v = run_ladder(&spec).unwrap();
        assert_eq!(v.status, LadderStatus::Solvable);
        // (g_ik + w_ik) = (g_ij + w_ij)(g_jk + w_jk) on every triangle.
        let w = v.correction().unwrap();
        let g = &ld.gluing;
        for t in tetra().simplices(2) {
            let corrected = |i: usize, j: usize| {
                AffineMap::translation_by(w.get(&[i, j]).unwrap().clone()).compose(&g.get(i, j).unwrap()).unwrap()
            };
            let lhs = corrected(t[0], t[2]);
            let rhs = corrected(t[0], t[1]).compose(&corrected(t[1], t[2])).unwrap();
            assert_eq!(lhs, rhs);
        }
        assert!(replay(&spec, &v).unwrap().is_empty());
    }

    #[test]
    fn planted_class_obstructs() {
        let spec = planted_obstruction();
        let z = level_defect(&spec.levels[0]).unwrap();
        assert_eq!(pairing_with_fundamental_cycle(&z), int(1));
        let v = run_ladder(&spec).unwrap();
        assert_eq!(v.status, LadderStatus::ObstructedAtRung(1));
        let cert = v.rungs[0].certificate.as_ref().unwrap();
        assert!(!vec_is_zero(cert));
        let h2 = cohomology(&spec.levels[0].system, 2).unwrap();
        assert_eq!(&h2.coordinates(&z).unwrap(), cert);
    }

    #[test]
    fn mismatched_declared_system_is_caught_on_replay() {
        // Linear parts f_i/f_j with f = (1,2,1,1,1) and unit translations, read with
        // constant coefficients on the boundary of a 4-simplex (where H² = 0): the
        // linear solve succeeds, yet the corrected gluing is not strict.
        let nerve = Nerve::simplex_boundary(4);
        let f = [1, 2, 1, 1, 1];
        let maps = nerve
            .simplices(1)
            .iter()
            .map(|e| {
                let a = MatrixQ::new(1, 1, vec![frac(f[e[0]], f[e[1]])]).unwrap();
                ((e[0], e[1]), AffineMap::new(a, vec![int(1)]).unwrap())
            })
            .collect();
        let gluing = Gluing::new(nerve.clone(), 1, maps).unwrap();
        let system = LocalSystem::constant(nerve.clone(), 1);
        let spec = LadderSpec::new(nerve, vec![LevelData { level: 1, system, gluing: gluing.clone() }], vec![]).unwrap();
        assert!(matches!(run_ladder(&spec), Err(Error::AtRung { rung: 1, .. })));

        // With the gluing's own system the same data is solvable and replays.
        let spec = LadderSpec::new(spec.nerve.clone(), vec![level(1, gluing)], vec![]).unwrap();
        assert_eq!(run_ladder(&spec).unwrap().status, LadderStatus::Solvable);
    }

    fn two_level_spec(seed: u64, extra_levels: usize) -> LadderSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nerve = tetra();
        let mut levels = vec![level(1, translations(&nerve, 1, &mut rng))];
        let mut whitney = Vec::new();
        for r in 2..=2 + extra_levels {
            levels.push(level(r, translations(&nerve, 1, &mut rng)));
            let lower: usize = r - 1;
            let coupling = nerve
                .simplices(1)
                .iter()
                .map(|e| {
                    let k = (0..lower).map(|_| int(rng.gen_range(-2..=2))).collect();
                    ((e[0], e[1]), MatrixQ::new(1, lower, k).unwrap())
                })
                .collect();
            whitney.push(WhitneyCoupling { level: r, coupling });
        }
        LadderSpec::new(nerve, levels, whitney).unwrap()
    }

    #[test]
    fn coupled_levels() {
        for seed in 0..10 {
            let spec = two_level_spec(seed, 0);
            // Unipotent couplings of translation gluings keep the Whitney systems flat
            // only when the coupling is itself flat; otherwise the ladder is rejected.
            match run_ladder(&spec) {
                Ok(v) => {
                    if v.status == LadderStatus::Solvable {
                        assert!(replay(&spec, &v).unwrap().is_empty());
                    }
                }
                Err(Error::AtRung { rung: 2, source }) => {
                    assert!(matches!(*source, Error::InvalidSystem(_)), "{source:?}");
                }
                Err(e) => panic!("{e:?}"),
            }
        }
    }

    /// Couplings `K_ij = G_j − G_i·T_{W_{r−1}}(j,i)` for vertex rows `G`, which make every
    /// Whitney system flat.
    fn flat_coupled_spec(seed: u64, levels_n: usize) -> LadderSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nerve = tetra();
        let mut spec = LadderSpec { nerve: nerve.clone(), levels: vec![level(1, translations(&nerve, 1, &mut rng))], whitney: vec![] };
        for r in 2..=levels_n {
            let lower = spec.whitney_system(r - 1).unwrap().system;
            let g: Vec<MatrixQ> = (0..nerve.vertex_count())
                .map(|_| MatrixQ::new(1, r - 1, (0..r - 1).map(|_| int(rng.gen_range(-2..=2))).collect()).unwrap())
                .collect();
            let coupling = nerve
                .simplices(1)
                .iter()
                .map(|e| {
                    let (i, j) = (e[0], e[1]);
                    ((i, j), g[j].sub(&g[i].mul(&lower.transition(j, i).unwrap()).unwrap()).unwrap())
                })
                .collect();
            spec.levels.push(level(r, translations(&nerve, 1, &mut rng)));
            spec.whitney.push(WhitneyCoupling { level: r, coupling });
        }
        spec.validate().unwrap();
        spec
    }

    #[test]
    fn flat_couplings_are_solvable_and_replay() {
        for seed in 0..8 {
            let spec = flat_coupled_spec(seed, 3);
            let v = run_ladder(&spec).unwrap();
            assert_eq!(v.status, LadderStatus::Solvable);
            assert_eq!(v.rungs.len(), 3);
            assert!(replay(&spec, &v).unwrap().is_empty());
            assert_eq!(run_ladder(&spec).unwrap(), v);
        }
    }

    #[test]
    fn appending_levels_keeps_earlier_rungs() {
        for seed in 0..8 {
            let long = flat_coupled_spec(seed, 3);
            let short = long.truncated(2);
            let (a, b) = (run_ladder(&short).unwrap(), run_ladder(&long).unwrap());
            assert_eq!(a.rungs[..], b.rungs[..2]);
        }
        // An obstruction at rung 1 stays at rung 1 when a level is appended.
        let mut spec = planted_obstruction();
        let nerve = spec.nerve.clone();
        spec.levels.push(level(2, Gluing::identity(nerve, 1)));
        let v = run_ladder(&spec).unwrap();
        assert_eq!(v.status, LadderStatus::ObstructedAtRung(1));
    }

    #[test]
    fn spec_validation() {
        let nerve = tetra();
        let bad_order = vec![level(2, Gluing::identity(nerve.clone(), 1))];
        assert!(matches!(LadderSpec::new(nerve.clone(), bad_order, vec![]), Err(Error::InvalidLadder(_))));
        let levels = vec![level(1, Gluing::identity(nerve.clone(), 1)), level(2, Gluing::identity(nerve.clone(), 1))];
        let wrong = WhitneyCoupling { level: 2, coupling: [((0, 1), MatrixQ::zeros(1, 2))].into_iter().collect() };
        assert!(LadderSpec::new(nerve, levels, vec![wrong]).is_err());
    }
}
