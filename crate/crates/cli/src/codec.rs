//! JSON interchange. Rationals travel as `"p/q"` strings (integers are accepted on
//! input), words as `"g0 g1^-1 g2"` (`"1"` is the empty word), simplices as map keys
//! `"i-j-k"`.

use std::collections::BTreeMap;
use std::fmt;

use flataff::affine::BlockSplit;
use flataff::cech::{Cochain, Gluing, LocalSystem, Nerve, Simplex};
use flataff::fibration::{FibrationData, Witness};
use flataff::group::{AffineRepresentation, GroupHom, Letter, Presentation, Word};
use flataff::ladder::{LadderSpec, LevelData, WhitneyCoupling};
use flataff::rational;
use flataff::{AffineMap, MatrixQ, Rational, VectorQ};
use serde::de::{self, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational::format(&self.0))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Q;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational as \"p/q\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Q, E> {
                rational::parse(v).map(Q).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Q, E> {
                Ok(Q(rational::int(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Q, E> {
                i64::try_from(v).map(|v| Q(rational::int(v))).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

pub type VecJson = Vec<Q>;
pub type MatJson = Vec<Vec<Q>>;

pub fn vec_to_json(v: &[Rational]) -> VecJson {
    v.iter().cloned().map(Q).collect()
}

pub fn vec_from_json(v: &[Q]) -> VectorQ {
    v.iter().map(|q| q.0.clone()).collect()
}

pub fn mat_to_json(m: &MatrixQ) -> MatJson {
    m.row_vectors().iter().map(|r| vec_to_json(r)).collect()
}

pub fn mat_from_json(m: &[Vec<Q>], rows: usize, cols: usize) -> Result<MatrixQ, CliError> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(CliError::Schema(format!("expected a {rows}x{cols} matrix")));
    }
    Ok(MatrixQ::from_rows(cols, m.iter().map(|r| vec_from_json(r)).collect())?)
}

/// Rationals as strings, for hand-built reports.
pub fn vec_value(v: &[Rational]) -> Value {
    serde_json::to_value(vec_to_json(v)).expect("strings serialize")
}

pub fn mat_value(m: &MatrixQ) -> Value {
    serde_json::to_value(mat_to_json(m)).expect("strings serialize")
}

pub fn parse_word(s: &str) -> Result<Word, CliError> {
    let bad = || CliError::Schema(format!("cannot parse word {s:?}"));
    let t = s.trim();
    if t.is_empty() || t == "1" {
        return Ok(Word::empty());
    }
    let mut letters = Vec::new();
    for tok in t.split(|c: char| c.is_whitespace() || c == '*').filter(|t| !t.is_empty()) {
        let body = tok.strip_prefix('g').ok_or_else(bad)?;
        let (g, e) = match body.split_once('^') {
            Some((g, e)) => (g, e.parse::<i64>().map_err(|_| bad())?),
            None => (body, 1),
        };
        let g: usize = g.parse().map_err(|_| bad())?;
        if e == 0 {
            return Err(bad());
        }
        let l = if e > 0 { Letter::gen(g) } else { Letter::inv(g) };
        letters.extend(std::iter::repeat_n(l, e.unsigned_abs() as usize));
    }
    Ok(Word::new(letters))
}

pub fn format_word(w: &Word) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.letters()
        .iter()
        .map(|l| if l.inverse { format!("g{}^-1", l.generator) } else { format!("g{}", l.generator) })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn simplex_key(s: &[usize]) -> String {
    s.iter().map(usize::to_string).collect::<Vec<_>>().join("-")
}

pub fn parse_simplex_key(k: &str) -> Result<Simplex, CliError> {
    k.split('-')
        .map(|p| p.trim().parse::<usize>().map_err(|_| CliError::Schema(format!("bad simplex key {k:?}"))))
        .collect()
}

/// Values keyed by simplex, serialized as a JSON object in insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexMap<T>(pub Vec<(Simplex, T)>);

impl<T> Default for SimplexMap<T> {
    fn default() -> Self {
        SimplexMap(Vec::new())
    }
}

impl<T: Serialize> Serialize for SimplexMap<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(&simplex_key(k), v)?;
        }
        m.end()
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for SimplexMap<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = serde_json::Map::<String, Value>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                let s = parse_simplex_key(&k).map_err(de::Error::custom)?;
                let t = T::deserialize(v).map_err(de::Error::custom)?;
                Ok((s, t))
            })
            .collect::<Result<_, _>>()
            .map(SimplexMap)
    }
}

impl<T> SimplexMap<T> {
    fn edges(&self) -> Result<impl Iterator<Item = ((usize, usize), &T)>, CliError> {
        for (s, _) in &self.0 {
            if s.len() != 2 {
                return Err(CliError::Schema(format!("{:?} is not an edge key", simplex_key(s))));
            }
        }
        Ok(self.0.iter().map(|(s, t)| ((s[0], s[1]), t)))
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationJson {
    pub generators: usize,
    #[serde(default)]
    pub relators: Vec<String>,
}

impl PresentationJson {
    pub fn to_core(&self) -> Result<Presentation, CliError> {
        let rels = self.relators.iter().map(|r| parse_word(r)).collect::<Result<_, _>>()?;
        Ok(Presentation::new(self.generators, rels)?)
    }

    pub fn from_core(p: &Presentation) -> Self {
        PresentationJson { generators: p.generators(), relators: p.relators().iter().map(format_word).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineJson {
    pub linear: MatJson,
    pub translation: VecJson,
}

impl AffineJson {
    pub fn to_core(&self, dim: usize) -> Result<AffineMap, CliError> {
        if self.translation.len() != dim {
            return Err(CliError::Schema(format!("translation must have {dim} entries")));
        }
        Ok(AffineMap::new(mat_from_json(&self.linear, dim, dim)?, vec_from_json(&self.translation))?)
    }

    pub fn from_core(f: &AffineMap) -> Self {
        AffineJson { linear: mat_to_json(f.linear()), translation: vec_to_json(f.translation()) }
    }
}

pub fn affine_value(f: &AffineMap) -> Value {
    serde_json::to_value(AffineJson::from_core(f)).expect("strings serialize")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationJson {
    pub generators: usize,
    #[serde(default)]
    pub relators: Vec<String>,
    pub dim: usize,
    pub images: Vec<AffineJson>,
}

impl RepresentationJson {
    pub fn to_core(&self) -> Result<AffineRepresentation, CliError> {
        let p = PresentationJson { generators: self.generators, relators: self.relators.clone() }.to_core()?;
        let images = self.images.iter().map(|f| f.to_core(self.dim)).collect::<Result<_, _>>()?;
        Ok(AffineRepresentation::new(p, self.dim, images)?)
    }

    pub fn from_core(r: &AffineRepresentation) -> Self {
        let p = PresentationJson::from_core(r.presentation());
        RepresentationJson {
            generators: p.generators,
            relators: p.relators,
            dim: r.dim(),
            images: r.images().iter().map(AffineJson::from_core).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitJson {
    pub base: usize,
    pub fiber: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessJson {
    pub ambient: usize,
    pub fiber: usize,
    pub word: String,
}

/// Quotient map onto the base group: target presentation and generator images.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomJson {
    pub target: PresentationJson,
    pub images: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibrationJson {
    pub representation: RepresentationJson,
    pub permutation: Vec<usize>,
    pub split: SplitJson,
    pub fiber_generators: Vec<usize>,
    #[serde(default)]
    pub witnesses: Vec<WitnessJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quotient: Option<HomJson>,
    /// Base points for the equivariance check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<VecJson>>,
}

impl FibrationJson {
    pub fn to_core(&self) -> Result<FibrationData, CliError> {
        let rep = self.representation.to_core()?;
        let witnesses = self
            .witnesses
            .iter()
            .map(|w| Ok(Witness { ambient: w.ambient, fiber: w.fiber, word: parse_word(&w.word)? }))
            .collect::<Result<_, CliError>>()?;
        let quotient = self
            .quotient
            .as_ref()
            .map(|q| {
                let images = q.images.iter().map(|w| parse_word(w)).collect::<Result<_, _>>()?;
                Ok::<_, CliError>(GroupHom::new(rep.presentation().clone(), q.target.to_core()?, images)?)
            })
            .transpose()?;
        Ok(FibrationData::new(
            &rep,
            self.permutation.clone(),
            BlockSplit::new(self.split.base, self.split.fiber)?,
            self.fiber_generators.clone(),
            witnesses,
            quotient,
        )?)
    }

    pub fn from_core(d: &FibrationData) -> Result<Self, CliError> {
        let perm = d.permutation();
        let mut inverse = vec![0; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        let original = d.ambient().permuted(&inverse)?;
        Ok(FibrationJson {
            representation: RepresentationJson::from_core(&original),
            permutation: perm.to_vec(),
            split: SplitJson { base: d.split().base(), fiber: d.split().fiber() },
            fiber_generators: d.fiber_generators().to_vec(),
            witnesses: d
                .witnesses()
                .iter()
                .map(|w| WitnessJson { ambient: w.ambient, fiber: w.fiber, word: format_word(&w.word) })
                .collect(),
            quotient: d.quotient().map(|q| HomJson {
                target: PresentationJson::from_core(q.target()),
                images: q.images().iter().map(format_word).collect(),
            }),
            samples: None,
        })
    }

    pub fn samples(&self) -> Option<Vec<VectorQ>> {
        self.samples.as_ref().map(|s| s.iter().map(|p| vec_from_json(p)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NerveJson {
    pub vertices: usize,
    pub simplices: Vec<Simplex>,
    /// Add all faces of the listed simplices.
    #[serde(default, skip_serializing_if = "is_false")]
    pub closure: bool,
}

impl NerveJson {
    pub fn to_core(&self) -> Result<Nerve, CliError> {
        Ok(if self.closure {
            Nerve::closure(self.vertices, &self.simplices)?
        } else {
            Nerve::from_simplices(self.vertices, &self.simplices)?
        })
    }

    pub fn from_core(n: &Nerve) -> Self {
        NerveJson { vertices: n.vertex_count(), simplices: n.all_simplices().cloned().collect(), closure: false }
    }
}

fn transitions_to_core(
    t: &SimplexMap<MatJson>,
    dim: usize,
) -> Result<BTreeMap<(usize, usize), MatrixQ>, CliError> {
    t.edges()?.map(|(e, m)| Ok((e, mat_from_json(m, dim, dim)?))).collect()
}

fn transitions_from_core(s: &LocalSystem) -> SimplexMap<MatJson> {
    SimplexMap(s.edge_transitions().map(|((i, j), m)| (vec![i, j], mat_to_json(m))).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemJson {
    pub nerve: NerveJson,
    pub dim: usize,
    /// `T(i,j)` from the fiber at `i` to the fiber at `j`, on edges.
    pub transitions: SimplexMap<MatJson>,
}

impl SystemJson {
    pub fn to_core(&self) -> Result<LocalSystem, CliError> {
        Ok(LocalSystem::new(self.nerve.to_core()?, self.dim, transitions_to_core(&self.transitions, self.dim)?)?)
    }

    pub fn from_core(s: &LocalSystem) -> Self {
        SystemJson { nerve: NerveJson::from_core(s.nerve()), dim: s.dim(), transitions: transitions_from_core(s) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CochainJson {
    pub degree: usize,
    pub values: SimplexMap<VecJson>,
}

impl CochainJson {
    pub fn to_core(&self, s: &LocalSystem) -> Result<Cochain, CliError> {
        let values = self.values.0.iter().map(|(k, v)| (k.clone(), vec_from_json(v))).collect();
        Ok(Cochain::new(s, self.degree, values)?)
    }

    pub fn from_core(c: &Cochain) -> Self {
        CochainJson {
            degree: c.degree(),
            values: SimplexMap(c.iter().map(|(s, v)| (s.clone(), vec_to_json(v))).collect()),
        }
    }
}

pub fn cochain_value(c: &Cochain) -> Value {
    serde_json::to_value(CochainJson::from_core(c)).expect("strings serialize")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoboundaryProblemJson {
    pub system: SystemJson,
    pub cochain: CochainJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluingJson {
    pub nerve: NerveJson,
    pub dim: usize,
    /// `u(i,j)` on edges `i < j`, carrying chart `j` to chart `i`.
    pub maps: SimplexMap<AffineJson>,
}

fn maps_to_core(m: &SimplexMap<AffineJson>, dim: usize) -> Result<BTreeMap<(usize, usize), AffineMap>, CliError> {
    m.edges()?.map(|(e, f)| Ok((e, f.to_core(dim)?))).collect()
}

fn maps_from_core(g: &Gluing) -> SimplexMap<AffineJson> {
    SimplexMap(g.edge_maps().map(|((i, j), f)| (vec![i, j], AffineJson::from_core(f))).collect())
}

impl GluingJson {
    pub fn to_core(&self) -> Result<Gluing, CliError> {
        Ok(Gluing::new(self.nerve.to_core()?, self.dim, maps_to_core(&self.maps, self.dim)?)?)
    }

    pub fn from_core(g: &Gluing) -> Self {
        GluingJson { nerve: NerveJson::from_core(g.nerve()), dim: g.dim(), maps: maps_from_core(g) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelSystemJson {
    pub dim: usize,
    pub transitions: SimplexMap<MatJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelGluingJson {
    pub dim: usize,
    pub maps: SimplexMap<AffineJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelJson {
    pub system: LevelSystemJson,
    pub gluing: LevelGluingJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhitneyJson {
    pub level: usize,
    pub coupling: SimplexMap<MatJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderJson {
    pub nerve: NerveJson,
    /// Level 1 first.
    pub levels: Vec<LevelJson>,
    #[serde(default)]
    pub whitney: Vec<WhitneyJson>,
}

impl LadderJson {
    pub fn to_core(&self) -> Result<LadderSpec, CliError> {
        let nerve = self.nerve.to_core()?;
        let levels: Vec<LevelData> = self
            .levels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let system = LocalSystem::new(
                    nerve.clone(),
                    l.system.dim,
                    transitions_to_core(&l.system.transitions, l.system.dim)?,
                )?;
                let gluing = Gluing::new(nerve.clone(), l.gluing.dim, maps_to_core(&l.gluing.maps, l.gluing.dim)?)?;
                Ok(LevelData { level: i + 1, system, gluing })
            })
            .collect::<Result<_, CliError>>()?;
        let whitney = self
            .whitney
            .iter()
            .map(|w| {
                let level = levels
                    .get(w.level.wrapping_sub(1))
                    .filter(|_| w.level >= 2)
                    .ok_or_else(|| CliError::Schema(format!("coupling for missing level {}", w.level)))?;
                let rows = level.gluing.dim();
                let cols: usize = levels[..w.level - 1].iter().map(|l| l.gluing.dim()).sum();
                let coupling = w.coupling.edges()?.map(|(e, m)| Ok((e, mat_from_json(m, rows, cols)?))).collect::<Result<
                    _,
                    CliError,
                >>(
                )?;
                Ok(WhitneyCoupling { level: w.level, coupling })
            })
            .collect::<Result<_, CliError>>()?;
        Ok(LadderSpec::new(nerve, levels, whitney)?)
    }

    pub fn from_core(spec: &LadderSpec) -> Self {
        LadderJson {
            nerve: NerveJson::from_core(&spec.nerve),
            levels: spec
                .levels
                .iter()
                .map(|l| LevelJson {
                    system: LevelSystemJson { dim: l.system.dim(), transitions: transitions_from_core(&l.system) },
                    gluing: LevelGluingJson { dim: l.gluing.dim(), maps: maps_from_core(&l.gluing) },
                })
                .collect(),
            whitney: spec
                .whitney
                .iter()
                .map(|w| WhitneyJson {
                    level: w.level,
                    coupling: SimplexMap(w.coupling.iter().map(|(&(i, j), m)| (vec![i, j], mat_to_json(m))).collect()),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeCandidateJson {
    /// Images `g(gᵢ)`.
    pub automorphism: Vec<String>,
    /// Images `g⁻¹(gᵢ)`.
    pub inverse: Vec<String>,
    pub bg: MatJson,
}

/// Two radiance classes over the linear holonomy of `representation`, each given either
/// by H¹ coordinates or by cocycle values on the generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeJson {
    pub representation: RepresentationJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_a: Option<VecJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_b: Option<VecJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle_a: Option<Vec<VecJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle_b: Option<Vec<VecJson>>,
    pub candidates: Vec<GaugeCandidateJson>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Representation(RepresentationJson),
    Fibration(FibrationJson),
    Nerve(NerveJson),
    System(SystemJson),
    CoboundaryProblem(CoboundaryProblemJson),
    Gluing(GluingJson),
    Ladder(LadderJson),
    Gauge(GaugeJson),
}

const KINDS: [&str; 8] =
    ["representation", "fibration", "nerve", "system", "coboundary_problem", "gluing", "ladder", "gauge"];

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Representation(_) => KINDS[0],
            Payload::Fibration(_) => KINDS[1],
            Payload::Nerve(_) => KINDS[2],
            Payload::System(_) => KINDS[3],
            Payload::CoboundaryProblem(_) => KINDS[4],
            Payload::Gluing(_) => KINDS[5],
            Payload::Ladder(_) => KINDS[6],
            Payload::Gauge(_) => KINDS[7],
        }
    }

    /// Uses the `"kind"` field when present, otherwise infers the kind from the keys.
    pub fn from_value(v: &Value) -> Result<Payload, CliError> {
        let mut obj = v.as_object().cloned().ok_or_else(|| CliError::Schema("payload must be an object".into()))?;
        let kind = match obj.remove("kind") {
            Some(Value::String(k)) => k,
            Some(_) => return Err(CliError::Schema("\"kind\" must be a string".into())),
            None => infer_kind(&obj)?.to_string(),
        };
        let body = Value::Object(obj);
        Ok(match kind.as_str() {
            "representation" => Payload::Representation(serde_json::from_value(body)?),
            "fibration" => Payload::Fibration(serde_json::from_value(body)?),
            "nerve" => Payload::Nerve(serde_json::from_value(body)?),
            "system" => Payload::System(serde_json::from_value(body)?),
            "coboundary_problem" => Payload::CoboundaryProblem(serde_json::from_value(body)?),
            "gluing" => Payload::Gluing(serde_json::from_value(body)?),
            "ladder" => Payload::Ladder(serde_json::from_value(body)?),
            "gauge" => Payload::Gauge(serde_json::from_value(body)?),
            other => return Err(CliError::Schema(format!("unknown kind {other:?}; expected one of {KINDS:?}"))),
        })
    }

    pub fn to_value(&self) -> Value {
        let body = match self {
            Payload::Representation(p) => serde_json::to_value(p),
            Payload::Fibration(p) => serde_json::to_value(p),
            Payload::Nerve(p) => serde_json::to_value(p),
            Payload::System(p) => serde_json::to_value(p),
            Payload::CoboundaryProblem(p) => serde_json::to_value(p),
            Payload::Gluing(p) => serde_json::to_value(p),
            Payload::Ladder(p) => serde_json::to_value(p),
            Payload::Gauge(p) => serde_json::to_value(p),
        }
        .expect("payloads serialize");
        let mut out = serde_json::Map::new();
        out.insert("kind".into(), Value::String(self.kind().into()));
        out.extend(body.as_object().cloned().unwrap_or_default());
        Value::Object(out)
    }
}

fn infer_kind(obj: &serde_json::Map<String, Value>) -> Result<&'static str, CliError> {
    let has = |k: &str| obj.contains_key(k);
    Ok(if has("candidates") {
        "gauge"
    } else if has("representation") {
        "fibration"
    } else if has("images") {
        "representation"
    } else if has("levels") {
        "ladder"
    } else if has("cochain") {
        "coboundary_problem"
    } else if has("transitions") {
        "system"
    } else if has("maps") {
        "gluing"
    } else if has("simplices") {
        "nerve"
    } else {
        return Err(CliError::Schema("cannot infer the payload kind; add a \"kind\" field".into()));
    })
}
