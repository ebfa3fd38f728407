//! Čech cochains on abstract nerves with flat rational coefficients.
//!
//! `transition(i, j)` carries the fiber over vertex `i` to the fiber over vertex `j`,
//! so flatness reads `T(i,k) = T(j,k)·T(i,j)`. A cochain value on `(i₀…i_k)` lives in
//! the fiber over its leading vertex `i₀`, and
//!
//! ```text
//! (δc)(i₀…i_{k+1}) = T(i₁,i₀)·c(i₁…i_{k+1}) + Σ_{j≥1} (−1)ʲ c(i₀…îⱼ…i_{k+1})
//! ```

use std::collections::{BTreeMap, BTreeSet};

use crate::affine::AffineMap;
use crate::error::{Error, Result};
use crate::matrix::{self, MatrixQ, VectorQ};
use crate::par::{self, Strategy};
use crate::rational::Rational;
use crate::subspace::{QuotientBasis, Subspace};

/// Strictly increasing vertex tuple.
pub type Simplex = Vec<usize>;

/// The faces obtained by deleting one vertex, in deletion order.
pub fn faces(s: &[usize]) -> Vec<Simplex> {
    (0..s.len())
        .map(|j| s.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &v)| v).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nerve {
    vertex_count: usize,
    /// `by_degree[k]` lists the k-simplices in lexicographic order.
    by_degree: Vec<Vec<Simplex>>,
    index: Vec<BTreeMap<Simplex, usize>>,
}

impl Nerve {
    /// Exactly the given simplices; face closure is not enforced (see [`Nerve::missing_faces`]).
    pub fn from_simplices(vertex_count: usize, simplices: &[Simplex]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for s in simplices {
            if s.is_empty() {
                return Err(Error::InvalidNerve("empty simplex".into()));
            }
            if s.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidNerve(format!("{s:?} is not strictly increasing")));
            }
            if let Some(&v) = s.iter().find(|&&v| v >= vertex_count) {
                return Err(Error::InvalidNerve(format!("vertex {v} out of range in {s:?}")));
            }
            set.insert(s.clone());
        }
        let top = set.iter().map(Vec::len).max().unwrap_or(0);
        let mut by_degree = vec![Vec::new(); top];
        for s in set {
            by_degree[s.len() - 1].push(s);
        }
        let index = by_degree
            .iter()
            .map(|list| list.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        Ok(Nerve { vertex_count, by_degree, index })
    }

    /// The given simplices together with all their faces and all vertices.
    pub fn closure(vertex_count: usize, simplices: &[Simplex]) -> Result<Self> {
        let mut all: BTreeSet<Simplex> = (0..vertex_count).map(|v| vec![v]).collect();
        let mut stack: Vec<Simplex> = simplices.iter().map(|s| {
            let mut s = s.clone();
            s.sort_unstable();
            s
        }).collect();
        while let Some(s) = stack.pop() {
            if s.len() > 1 {
                stack.extend(faces(&s));
            }
            all.insert(s);
        }
        let all: Vec<Simplex> = all.into_iter().collect();
        Self::from_simplices(vertex_count, &all)
    }

    /// Cycle on `n ≥ 3` vertices: edges `{i, i+1 mod n}`, no triangles.
    pub fn cycle(n: usize) -> Self {
        let edges: Vec<Simplex> = (0..n).map(|i| {
            let (a, b) = (i, (i + 1) % n);
            vec![a.min(b), a.max(b)]
        }).collect();
        Self::closure(n, &edges).expect("valid cycle")
    }

    /// All proper faces of the `d`-simplex on `d + 1` vertices (a `(d−1)`-sphere).
    pub fn simplex_boundary(d: usize) -> Self {
        let full: Simplex = (0..=d).collect();
        Self::closure(d + 1, &faces(&full)).expect("valid boundary")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Largest k with a k-simplex, if any.
    pub fn max_degree(&self) -> Option<usize> {
        self.by_degree.len().checked_sub(1)
    }

    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.by_degree.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices(k).len()
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        self.position(s).is_some()
    }

    pub fn position(&self, s: &[usize]) -> Option<usize> {
        let k = s.len().checked_sub(1)?;
        self.index.get(k)?.get(s).copied()
    }

    pub fn all_simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.by_degree.iter().flatten()
    }

    /// Faces of listed simplices (and vertices) that are not listed.
    pub fn missing_faces(&self) -> Vec<Simplex> {
        let mut missing = BTreeSet::new();
        for v in 0..self.vertex_count {
            if !self.contains(&[v]) {
                missing.insert(vec![v]);
            }
        }
        for s in self.all_simplices().filter(|s| s.len() > 1) {
            for f in faces(s) {
                if !self.contains(&f) {
                    missing.insert(f);
                }
            }
        }
        missing.into_iter().collect()
    }

    pub fn is_closed(&self) -> bool {
        self.missing_faces().is_empty()
    }

    fn require_closed(&self) -> Result<()> {
        match self.missing_faces().first() {
            None => Ok(()),
            Some(s) => Err(Error::MissingSimplex(s.clone())),
        }
    }
}

/// Flat system of `ℚᵛ` fibers over the vertices of a nerve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSystem {
    nerve: Nerve,
    dim: usize,
    /// Keyed by edges `i < j`: `(T(i,j), T(j,i))`.
    transitions: BTreeMap<(usize, usize), (MatrixQ, MatrixQ)>,
}

impl LocalSystem {
    /// `transitions` must cover every edge in at least one orientation; when both
    /// orientations are given they must be mutually inverse.
    pub fn new(nerve: Nerve, dim: usize, transitions: BTreeMap<(usize, usize), MatrixQ>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (&(i, j), m) in &transitions {
            if i == j || !nerve.contains(&[i.min(j), i.max(j)]) {
                return Err(Error::InvalidSystem(format!("{i}-{j} is not an edge of the nerve")));
            }
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: m.rows().max(m.cols()) });
            }
            let inv = m.inverse().map_err(|_| Error::InvalidSystem(format!("transition {i}-{j} is singular")))?;
            let (key, pair) = if i < j { ((i, j), (m.clone(), inv)) } else { ((j, i), (inv, m.clone())) };
            if let Some(prev) = out.get(&key) {
                if prev != &pair {
                    return Err(Error::InvalidSystem(format!("transitions {i}-{j} and {j}-{i} are not inverse")));
                }
            }
            out.insert(key, pair);
        }
        if let Some(e) = nerve.simplices(1).iter().find(|e| !out.contains_key(&(e[0], e[1]))) {
            return Err(Error::MissingSimplex(e.clone()));
        }
        Ok(LocalSystem { nerve, dim, transitions: out })
    }

    /// Every transition is the identity.
    pub fn constant(nerve: Nerve, dim: usize) -> Self {
        let transitions = nerve
            .simplices(1)
            .iter()
            .map(|e| ((e[0], e[1]), (MatrixQ::identity(dim), MatrixQ::identity(dim))))
            .collect();
        LocalSystem { nerve, dim, transitions }
    }

    /// `T(i,j) = F_j·F_i⁻¹` from invertible vertex frames: flat by construction.
    pub fn from_frames(nerve: Nerve, frames: &[MatrixQ]) -> Result<Self> {
        if frames.len() != nerve.vertex_count() {
            return Err(Error::DimensionMismatch { expected: nerve.vertex_count(), found: frames.len() });
        }
        let dim = frames.first().map_or(0, MatrixQ::rows);
        let inverses: Vec<MatrixQ> = frames.iter().map(MatrixQ::inverse).collect::<Result<_>>()?;
        let transitions = nerve
            .simplices(1)
            .iter()
            .map(|e| Ok(((e[0], e[1]), frames[e[1]].mul(&inverses[e[0]])?)))
            .collect::<Result<_>>()?;
        Self::new(nerve, dim, transitions)
    }

    pub fn nerve(&self) -> &Nerve {
        &self.nerve
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `T(i,j)`; the identity when `i == j`.
    pub fn transition(&self, i: usize, j: usize) -> Result<MatrixQ> {
        if i == j {
            return Ok(MatrixQ::identity(self.dim));
        }
        let (a, b) = (i.min(j), i.max(j));
        let (fwd, back) = self.transitions.get(&(a, b)).ok_or_else(|| Error::MissingSimplex(vec![a, b]))?;
        Ok(if i < j { fwd.clone() } else { back.clone() })
    }

    /// Transitions on edges `i < j`.
    pub fn edge_transitions(&self) -> impl Iterator<Item = ((usize, usize), &MatrixQ)> {
        self.transitions.iter().map(|(&k, (m, _))| (k, m))
    }

    /// Same transitions over the face-closure of the nerve (new edges get identities).
    pub fn over(&self, nerve: Nerve) -> Result<Self> {
        let mut t: BTreeMap<(usize, usize), MatrixQ> =
            self.edge_transitions().map(|(k, m)| (k, m.clone())).collect();
        for e in nerve.simplices(1) {
            t.entry((e[0], e[1])).or_insert_with(|| MatrixQ::identity(self.dim));
        }
        Self::new(nerve, self.dim, t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SystemReport {
    pub missing_faces: Vec<Simplex>,
    /// Triangles `{i<j<k}` with `T(i,k) ≠ T(j,k)·T(i,j)`.
    pub non_flat: Vec<Simplex>,
}

impl SystemReport {
    pub fn passed(&self) -> bool {
        self.missing_faces.is_empty() && self.non_flat.is_empty()
    }
}

pub fn validate_system(s: &LocalSystem) -> SystemReport {
    let non_flat = s
        .nerve
        .simplices(2)
        .iter()
        .filter(|t| {
            let (i, j, k) = (t[0], t[1], t[2]);
            let via = match (s.transition(j, k), s.transition(i, j)) {
                (Ok(a), Ok(b)) => a.mul(&b).expect("square"),
                _ => return true,
            };
            s.transition(i, k).map_or(true, |direct| direct != via)
        })
        .cloned()
        .collect();
    SystemReport { missing_faces: s.nerve.missing_faces(), non_flat }
}

fn require_valid(s: &LocalSystem) -> Result<()> {
    let report = validate_system(s);
    if let Some(m) = report.missing_faces.first() {
        return Err(Error::MissingSimplex(m.clone()));
    }
    if let Some(t) = report.non_flat.first() {
        return Err(Error::InvalidSystem(format!("not flat on {t:?}")));
    }
    Ok(())
}

/// Values on the k-simplices, aligned with `nerve.simplices(k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    degree: usize,
    dim: usize,
    simplices: Vec<Simplex>,
    values: Vec<VectorQ>,
}

impl Cochain {
    /// Must be defined exactly on the k-simplices of the nerve.
    pub fn new(s: &LocalSystem, degree: usize, values: BTreeMap<Simplex, VectorQ>) -> Result<Self> {
        let simplices = s.nerve.simplices(degree).to_vec();
        if let Some(extra) = values.keys().find(|k| k.len() != degree + 1 || !s.nerve.contains(k)) {
            return Err(Error::InvalidSystem(format!("{extra:?} is not a {degree}-simplex of the nerve")));
        }
        let mut out = Vec::with_capacity(simplices.len());
        for sigma in &simplices {
            let v = values.get(sigma).ok_or_else(|| Error::MissingSimplex(sigma.clone()))?;
            if v.len() != s.dim {
                return Err(Error::DimensionMismatch { expected: s.dim, found: v.len() });
            }
            out.push(v.clone());
        }
        Ok(Cochain { degree, dim: s.dim, simplices, values: out })
    }

    pub fn zero(s: &LocalSystem, degree: usize) -> Self {
        let simplices = s.nerve.simplices(degree).to_vec();
        let values = vec![matrix::zero_vector(s.dim); simplices.len()];
        Cochain { degree, dim: s.dim, simplices, values }
    }

    /// Inverse of [`Self::stacked`].
    pub fn from_stacked(s: &LocalSystem, degree: usize, stacked: &[Rational]) -> Result<Self> {
        let simplices = s.nerve.simplices(degree).to_vec();
        let n = simplices.len() * s.dim;
        if stacked.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: stacked.len() });
        }
        let values = if s.dim == 0 {
            vec![Vec::new(); simplices.len()]
        } else {
            stacked.chunks(s.dim).map(<[Rational]>::to_vec).collect()
        };
        Ok(Cochain { degree, dim: s.dim, simplices, values })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn values(&self) -> &[VectorQ] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Simplex, &VectorQ)> {
        self.simplices.iter().zip(&self.values)
    }

    pub fn get(&self, simplex: &[usize]) -> Option<&VectorQ> {
        self.simplices.iter().position(|s| s == simplex).map(|i| &self.values[i])
    }

    pub fn to_map(&self) -> BTreeMap<Simplex, VectorQ> {
        self.iter().map(|(s, v)| (s.clone(), v.clone())).collect()
    }

    /// Values concatenated in simplex order.
    pub fn stacked(&self) -> VectorQ {
        self.values.iter().flatten().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| matrix::vec_is_zero(v))
    }

    fn check_shape(&self, s: &LocalSystem) -> Result<()> {
        if self.dim != s.dim {
            return Err(Error::DimensionMismatch { expected: s.dim, found: self.dim });
        }
        if self.simplices.as_slice() != s.nerve.simplices(self.degree) {
            return Err(Error::InvalidSystem(format!("cochain is not over this nerve in degree {}", self.degree)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        if self.degree != other.degree || self.simplices != other.simplices || self.dim != other.dim {
            return Err(Error::InvalidSystem("adding cochains of different shapes".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| matrix::vec_add(a, b)).collect();
        Ok(Cochain { values, ..self.clone() })
    }

    pub fn neg(&self) -> Cochain {
        Cochain { values: self.values.iter().map(|v| matrix::vec_neg(v)).collect(), ..self.clone() }
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        self.add(&other.neg())
    }
}

fn value_on(c: &Cochain, nerve: &Nerve, s: &[usize]) -> Result<VectorQ> {
    let i = nerve.position(s).ok_or_else(|| Error::MissingSimplex(s.to_vec()))?;
    Ok(c.values[i].clone())
}

pub fn coboundary(s: &LocalSystem, c: &Cochain) -> Result<Cochain> {
    coboundary_with(s, c, Strategy::Auto)
}

pub fn coboundary_with(s: &LocalSystem, c: &Cochain, strategy: Strategy) -> Result<Cochain> {
    c.check_shape(s)?;
    let targets = s.nerve.simplices(c.degree + 1).to_vec();
    let values = par::map(strategy, &targets, |sigma| -> Result<VectorQ> {
        let fs = faces(sigma);
        let lead = s.transition(sigma[1], sigma[0])?.mul_vec(&value_on(c, &s.nerve, &fs[0])?)?;
        let mut acc = lead;
        for (j, f) in fs.iter().enumerate().skip(1) {
            let v = value_on(c, &s.nerve, f)?;
            acc = if j % 2 == 0 { matrix::vec_add(&acc, &v) } else { matrix::vec_sub(&acc, &v) };
        }
        Ok(acc)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    Ok(Cochain { degree: c.degree + 1, dim: s.dim, simplices: targets, values })
}

/// Matrix of `δ: Cᵏ → Cᵏ⁺¹` in stacked coordinates.
pub fn coboundary_matrix(s: &LocalSystem, k: usize) -> Result<MatrixQ> {
    coboundary_matrix_with(s, k, Strategy::Auto)
}

pub fn coboundary_matrix_with(s: &LocalSystem, k: usize, strategy: Strategy) -> Result<MatrixQ> {
    let v = s.dim;
    let cols = s.nerve.count(k) * v;
    let targets = s.nerve.simplices(k + 1);
    let blocks = par::map(strategy, targets, |sigma| -> Result<MatrixQ> {
        let mut row = MatrixQ::zeros(v, cols);
        for (j, f) in faces(sigma).iter().enumerate() {
            let pos = s.nerve.position(f).ok_or_else(|| Error::MissingSimplex(f.clone()))?;
            let block = if j == 0 {
                s.transition(sigma[1], sigma[0])?
            } else if j % 2 == 0 {
                MatrixQ::identity(v)
            } else {
                MatrixQ::identity(v).neg()
            };
            row.set_block(0, pos * v, &block);
        }
        Ok(row)
    });
    let mut out = MatrixQ::zeros(0, cols);
    for b in blocks {
        out = out.vstack(&b?)?;
    }
    Ok(out)
}

/// Zᵏ, Bᵏ and echelon coordinates on Hᵏ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CechCohomology {
    pub degree: usize,
    cocycles: Subspace,
    coboundaries: Subspace,
    quotient: QuotientBasis,
    system: LocalSystem,
}

impl CechCohomology {
    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    pub fn cocycles(&self) -> &Subspace {
        &self.cocycles
    }

    pub fn coboundaries(&self) -> &Subspace {
        &self.coboundaries
    }

    pub fn cocycle_basis(&self) -> Vec<Cochain> {
        self.wrap(self.cocycles.basis())
    }

    pub fn coboundary_basis(&self) -> Vec<Cochain> {
        self.wrap(self.coboundaries.basis())
    }

    /// Canonical representatives of the basis classes.
    pub fn class_basis(&self) -> Vec<Cochain> {
        self.wrap(self.quotient.complement().basis())
    }

    fn wrap(&self, vs: Vec<VectorQ>) -> Vec<Cochain> {
        vs.iter()
            .map(|v| Cochain::from_stacked(&self.system, self.degree, v).expect("stacked length"))
            .collect()
    }

    /// Class coordinates of a cocycle.
    pub fn coordinates(&self, z: &Cochain) -> Result<VectorQ> {
        z.check_shape(&self.system)?;
        if z.degree != self.degree {
            return Err(Error::DimensionMismatch { expected: self.degree, found: z.degree });
        }
        let stacked = z.stacked();
        if !self.cocycles.contains(&stacked)? {
            return Err(Error::NotACocycle { degree: self.degree });
        }
        self.quotient.coordinates(&stacked)
    }

    pub fn representative(&self, coords: &[Rational]) -> Result<Cochain> {
        Cochain::from_stacked(&self.system, self.degree, &self.quotient.representative(coords)?)
    }
}

/// Requires a face-closed nerve and a flat system.
pub fn cohomology(s: &LocalSystem, k: usize) -> Result<CechCohomology> {
    require_valid(s)?;
    let n = s.nerve.count(k) * s.dim;
    let cocycles = Subspace::kernel_of(&coboundary_matrix(s, k)?);
    let coboundaries = if k == 0 {
        Subspace::zero(n)
    } else {
        Subspace::from_rows(&coboundary_matrix(s, k - 1)?.transpose())
    };
    let quotient = QuotientBasis::new(&cocycles, &coboundaries)?;
    Ok(CechCohomology { degree: k, cocycles, coboundaries, quotient, system: s.clone() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoboundarySolution {
    /// `a` with `δa = z`.
    Solved(Cochain),
    /// Coordinates of the nonzero class of `z`.
    NoSolution(VectorQ),
}

/// Solves `δa = z` for a cocycle `z` of degree ≥ 1.
pub fn solve_coboundary(s: &LocalSystem, z: &Cochain) -> Result<CoboundarySolution> {
    solve_coboundary_with(s, z, Strategy::Auto)
}

pub fn solve_coboundary_with(s: &LocalSystem, z: &Cochain, strategy: Strategy) -> Result<CoboundarySolution> {
    require_valid(s)?;
    z.check_shape(s)?;
    if !coboundary_with(s, z, strategy)?.is_zero() {
        return Err(Error::NotACocycle { degree: z.degree });
    }
    let k = z.degree;
    if k == 0 {
        return if z.is_zero() {
            Err(Error::InvalidSystem("degree-0 cochains have no primitive".into()))
        } else {
            Ok(CoboundarySolution::NoSolution(cohomology(s, 0)?.coordinates(z)?))
        };
    }
    let d = coboundary_matrix_with(s, k - 1, strategy)?;
    match d.solve_with(&z.stacked(), strategy)? {
        Some(a) => Ok(CoboundarySolution::Solved(Cochain::from_stacked(s, k - 1, &a)?)),
        None => Ok(CoboundarySolution::NoSolution(cohomology(s, k)?.coordinates(z)?)),
    }
}

/// Affine maps on the edges of a nerve with `u(j,i) = u(i,j)⁻¹`; `u(i,j)` carries
/// chart `j` coordinates to chart `i` coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gluing {
    nerve: Nerve,
    dim: usize,
    maps: BTreeMap<(usize, usize), (AffineMap, AffineMap)>,
}

impl Gluing {
    /// Every edge must be covered in at least one orientation; given both, they must be inverse.
    pub fn new(nerve: Nerve, dim: usize, maps: BTreeMap<(usize, usize), AffineMap>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (&(i, j), f) in &maps {
            if i == j || !nerve.contains(&[i.min(j), i.max(j)]) {
                return Err(Error::InvalidSystem(format!("{i}-{j} is not an edge of the nerve")));
            }
            if f.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: f.dim() });
            }
            let pair = if i < j { (f.clone(), f.invert()) } else { (f.invert(), f.clone()) };
            let key = (i.min(j), i.max(j));
            if let Some(prev) = out.get(&key) {
                if prev != &pair {
                    return Err(Error::InvalidSystem(format!("gluing maps {i}-{j} and {j}-{i} are not inverse")));
                }
            }
            out.insert(key, pair);
        }
        if let Some(e) = nerve.simplices(1).iter().find(|e| !out.contains_key(&(e[0], e[1]))) {
            return Err(Error::MissingSimplex(e.clone()));
        }
        Ok(Gluing { nerve, dim, maps: out })
    }

    pub fn identity(nerve: Nerve, dim: usize) -> Self {
        let maps = nerve
            .simplices(1)
            .iter()
            .map(|e| ((e[0], e[1]), (AffineMap::identity(dim), AffineMap::identity(dim))))
            .collect();
        Gluing { nerve, dim, maps }
    }

    pub fn nerve(&self) -> &Nerve {
        &self.nerve
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Result<AffineMap> {
        if i == j {
            return Ok(AffineMap::identity(self.dim));
        }
        let (fwd, back) =
            self.maps.get(&(i.min(j), i.max(j))).ok_or_else(|| Error::MissingSimplex(vec![i.min(j), i.max(j)]))?;
        Ok(if i < j { fwd.clone() } else { back.clone() })
    }

    /// Maps on edges `i < j`.
    pub fn edge_maps(&self) -> impl Iterator<Item = ((usize, usize), &AffineMap)> {
        self.maps.iter().map(|(&k, (f, _))| (k, f))
    }

    /// Every map post-composed with a translation: `u'(i,j) = τ(w(i,j))∘u(i,j)` for the
    /// 1-cochain `w` (values at the leading vertex).
    pub fn corrected(&self, w: &Cochain) -> Result<Gluing> {
        if w.degree != 1 || w.dim != self.dim {
            return Err(Error::InvalidSystem("correction must be a 1-cochain in the gluing dimension".into()));
        }
        let maps = self
            .edge_maps()
            .map(|((i, j), f)| {
                let t = value_on(w, &self.nerve, &[i, j])?;
                Ok(((i, j), AffineMap::translation_by(t).compose(f)?))
            })
            .collect::<Result<_>>()?;
        Gluing::new(self.nerve.clone(), self.dim, maps)
    }

    /// Triangles where `u(i,k) ≠ u(i,j)∘u(j,k)`.
    pub fn strict_failures(&self) -> Vec<Simplex> {
        self.nerve
            .simplices(2)
            .iter()
            .filter(|t| {
                let via = self.get(t[0], t[1]).and_then(|a| a.compose(&self.get(t[1], t[2])?));
                match (via, self.get(t[0], t[2])) {
                    (Ok(a), Ok(b)) => a != b,
                    _ => true,
                }
            })
            .cloned()
            .collect()
    }

    /// The local system `T(i,j) = linear(u(i,j))⁻¹` acting on translations.
    pub fn linear_system(&self) -> Result<LocalSystem> {
        let t = self
            .edge_maps()
            .map(|(k, f)| Ok((k, f.linear().inverse()?)))
            .collect::<Result<_>>()?;
        LocalSystem::new(self.nerve.clone(), self.dim, t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Defect {
    /// `h_ijk = u(i,k)⁻¹∘u(i,j)∘u(j,k)` per triangle.
    pub h: Vec<(Simplex, AffineMap)>,
    /// Translation of `u(i,j)∘u(j,k)∘u(i,k)⁻¹` at the leading vertex.
    pub cochain: Cochain,
    /// The induced system on translations, [`Gluing::linear_system`].
    pub system: LocalSystem,
}

/// Defect of a gluing family. Fails with the triangles whose `h` is not a translation.
pub fn nonabelian_defect(g: &Gluing) -> Result<Defect> {
    g.nerve.require_closed()?;
    let mut h = Vec::new();
    let mut values = BTreeMap::new();
    let mut bad = Vec::new();
    for t in g.nerve.simplices(2) {
        let (uij, ujk, uik) = (g.get(t[0], t[1])?, g.get(t[1], t[2])?, g.get(t[0], t[2])?);
        let hijk = uik.invert().compose(&uij.compose(&ujk)?)?;
        if !hijk.is_translation() {
            bad.push(t.clone());
        }
        let lead = uij.compose(&ujk)?.compose(&uik.invert())?;
        values.insert(t.clone(), lead.translation().to_vec());
        h.push((t.clone(), hijk));
    }
    if !bad.is_empty() {
        return Err(Error::NotTranslational(bad));
    }
    let system = g.linear_system()?;
    let cochain = Cochain::new(&system, 2, values)?;
    Ok(Defect { h, cochain, system })
}

/// `E = Sub ⊕ Quot` with `T_E(i,j) = [[T_S(i,j), X(i,j)], [0, T_Q(i,j)]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    sub: LocalSystem,
    quot: LocalSystem,
    total: LocalSystem,
}

impl Extension {
    /// `coupling` gives `X(i,j)` (`sub × quot`) on edges `i < j`; missing edges get zero.
    /// The total system must be flat.
    pub fn new(sub: LocalSystem, quot: LocalSystem, coupling: &BTreeMap<(usize, usize), MatrixQ>) -> Result<Self> {
        if sub.nerve != quot.nerve {
            return Err(Error::InvalidSystem("extension of systems over different nerves".into()));
        }
        let (a, b) = (sub.dim, quot.dim);
        let mut t = BTreeMap::new();
        for e in sub.nerve.simplices(1) {
            let (i, j) = (e[0], e[1]);
            let x = coupling.get(&(i, j)).cloned().unwrap_or_else(|| MatrixQ::zeros(a, b));
            if x.rows() != a || x.cols() != b {
                return Err(Error::DimensionMismatch { expected: a * b, found: x.rows() * x.cols() });
            }
            let mut m = MatrixQ::zeros(a + b, a + b);
            m.set_block(0, 0, &sub.transition(i, j)?);
            m.set_block(0, a, &x);
            m.set_block(a, a, &quot.transition(i, j)?);
            t.insert((i, j), m);
        }
        if let Some(k) = coupling.keys().find(|&&(i, j)| i >= j || !sub.nerve.contains(&[i, j])) {
            return Err(Error::InvalidSystem(format!("coupling on {}-{} is not on an edge i<j", k.0, k.1)));
        }
        let total = LocalSystem::new(sub.nerve.clone(), a + b, t)?;
        require_valid(&total)?;
        Ok(Extension { sub, quot, total })
    }

    pub fn sub(&self) -> &LocalSystem {
        &self.sub
    }

    pub fn quot(&self) -> &LocalSystem {
        &self.quot
    }

    pub fn total(&self) -> &LocalSystem {
        &self.total
    }

    /// `X(i,j)` for any ordered edge.
    pub fn coupling(&self, i: usize, j: usize) -> Result<MatrixQ> {
        let a = self.sub.dim;
        Ok(self.total.transition(i, j)?.block(0, a, a, self.quot.dim))
    }

    /// `(s, q) ↦` a total cochain.
    pub fn combine(&self, s: &Cochain, q: &Cochain) -> Result<Cochain> {
        s.check_shape(&self.sub)?;
        q.check_shape(&self.quot)?;
        if s.degree != q.degree {
            return Err(Error::DimensionMismatch { expected: s.degree, found: q.degree });
        }
        let values = s.values.iter().zip(&q.values).map(|(x, y)| [x.clone(), y.clone()].concat()).collect();
        Ok(Cochain { degree: s.degree, dim: self.total.dim, simplices: s.simplices.clone(), values })
    }

    /// Splits a total cochain into its sub and quotient parts.
    pub fn split(&self, c: &Cochain) -> Result<(Cochain, Cochain)> {
        c.check_shape(&self.total)?;
        let a = self.sub.dim;
        let part = |lo: usize, hi: usize, dim: usize| Cochain {
            degree: c.degree,
            dim,
            simplices: c.simplices.clone(),
            values: c.values.iter().map(|v| v[lo..hi].to_vec()).collect(),
        };
        Ok((part(0, a, a), part(a, self.total.dim, self.quot.dim)))
    }
}

/// Sub part of `δ_E(0, q)`: `(i₀…i_{k+1}) ↦ X(i₁,i₀)·q(i₁…i_{k+1})`. No cocycle condition.
pub fn lift_raw(ext: &Extension, q: &Cochain) -> Result<Cochain> {
    q.check_shape(&ext.quot)?;
    let nerve = &ext.sub.nerve;
    let targets = nerve.simplices(q.degree + 1).to_vec();
    let values = targets
        .iter()
        .map(|sigma| ext.coupling(sigma[1], sigma[0])?.mul_vec(&value_on(q, nerve, &sigma[1..])?))
        .collect::<Result<_>>()?;
    Ok(Cochain { degree: q.degree + 1, dim: ext.sub.dim, simplices: targets, values })
}

/// Connecting map: lifts a cocycle of the quotient to a cocycle of the sub system one
/// degree higher.
pub fn lift_defect(ext: &Extension, prev: &Cochain) -> Result<Cochain> {
    if !coboundary(&ext.quot, prev)?.is_zero() {
        return Err(Error::NotACocycle { degree: prev.degree });
    }
    lift_raw(ext, prev)
}

/// Lift of the corrected representative `prev − δa`.
pub fn lift_defect_corrected(ext: &Extension, prev: &Cochain, a: &Cochain) -> Result<Cochain> {
    lift_defect(ext, &prev.sub(&coboundary(&ext.quot, a)?)?)
}
