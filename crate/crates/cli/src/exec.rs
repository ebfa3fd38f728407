use std::path::PathBuf;
use std::sync::Arc;

use flataff::cech::{
    cohomology, nonabelian_defect, solve_coboundary_with, validate_system, CoboundarySolution, LocalSystem,
};
use flataff::cohomology::{
    completeness_det_test, gauge_equivalent, h0, h1, radiance_class, CoefficientModule, Cocycle1, GaugeElement,
    GaugeVerdict, RadianceClass,
};
use flataff::fibration::{
    equivariance_check_with, induced_h1_action, radiance_map, validate_fibration, FibrationData,
};
use flataff::group::GroupHom;
use flataff::ladder::{run_ladder, LadderStatus};
use flataff::matrix::unit_vector;
use flataff::rational;
use flataff::{Error, Strategy, VectorQ};
use serde_json::{json, Map, Value};

use crate::codec::{
    affine_value, cochain_value, format_word, mat_from_json, mat_value, parse_word, simplex_key, vec_from_json,
    vec_value, CochainJson, Payload,
};
use crate::datasets;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    VerifyRep,
    H0,
    H1,
    Radiance,
    GaugeCheck,
    CompleteDet,
    FibrationCheck,
    AltCheck,
    InducedAction,
    Equivariance,
    CechValidate,
    CechCohomology,
    SolveCoboundary,
    Defect,
    Ladder,
    Example,
}

impl Command {
    pub const ALL: [Command; 16] = [
        Command::VerifyRep,
        Command::H0,
        Command::H1,
        Command::Radiance,
        Command::GaugeCheck,
        Command::CompleteDet,
        Command::FibrationCheck,
        Command::AltCheck,
        Command::InducedAction,
        Command::Equivariance,
        Command::CechValidate,
        Command::CechCohomology,
        Command::SolveCoboundary,
        Command::Defect,
        Command::Ladder,
        Command::Example,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyRep => "verify-rep",
            Command::H0 => "h0",
            Command::H1 => "h1",
            Command::Radiance => "radiance",
            Command::GaugeCheck => "gauge-check",
            Command::CompleteDet => "complete-det",
            Command::FibrationCheck => "fibration-check",
            Command::AltCheck => "alt-check",
            Command::InducedAction => "induced-action",
            Command::Equivariance => "equivariance",
            Command::CechValidate => "cech-validate",
            Command::CechCohomology => "cech-cohomology",
            Command::SolveCoboundary => "solve-coboundary",
            Command::Defect => "defect",
            Command::Ladder => "ladder",
            Command::Example => "example",
        }
    }

    pub fn from_name(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Example(String),
    Path(PathBuf),
    /// JSON text.
    Inline(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Options {
    /// Cohomological degree.
    pub k: Option<usize>,
    /// Ambient generator for induced-action / equivariance.
    pub generator: Option<usize>,
    /// Ladder level for defect.
    pub level: Option<usize>,
    pub strategy: Strategy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandRequest {
    pub command: Command,
    pub source: Option<Source>,
    pub options: Options,
}

impl CommandRequest {
    pub fn new(command: Command, source: Source) -> Self {
        CommandRequest { command, source: Some(source), options: Options::default() }
    }

    pub fn example(command: Command, name: &str) -> Self {
        Self::new(command, Source::Example(name.into()))
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.options.k = Some(k);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    /// PASS and solvable-style outcomes.
    Pass = 0,
    /// FAIL, obstructed, not found.
    Negative = 1,
    Malformed = 2,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn from_code(c: i64) -> Option<ExitStatus> {
        [ExitStatus::Pass, ExitStatus::Negative, ExitStatus::Malformed].into_iter().find(|s| s.code() as i64 == c)
    }

    fn check(ok: bool) -> ExitStatus {
        if ok {
            ExitStatus::Pass
        } else {
            ExitStatus::Negative
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: ExitStatus,
    pub report: Value,
}

impl Outcome {
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Runs one request. Never panics on bad input: errors become exit 2 with an
/// `{"status": "ERROR"}` report.
pub fn exec(req: &CommandRequest) -> Outcome {
    let mut report = Map::new();
    report.insert("command".into(), Value::String(req.command.name().into()));
    match run(req) {
        Ok((status, body)) => {
            report.extend(body);
            Outcome { status, report: Value::Object(report) }
        }
        Err(e) => {
            report.insert("status".into(), Value::String("ERROR".into()));
            report.insert("error".into(), Value::String(e.to_string()));
            Outcome { status: ExitStatus::Malformed, report: Value::Object(report) }
        }
    }
}

type Body = Map<String, Value>;

fn body(v: Value) -> Body {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("report bodies are objects"),
    }
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Parses an input document: a bare payload, or a dataset object with a `"payload"` field.
pub fn parse_input(text: &str) -> Result<Payload, CliError> {
    let v: Value = serde_json::from_str(text)?;
    match v.get("payload") {
        Some(p) => Payload::from_value(p),
        None => Payload::from_value(&v),
    }
}

fn load(req: &CommandRequest) -> Result<Payload, CliError> {
    match &req.source {
        None => Err(CliError::MissingInput { command: req.command.name().into() }),
        Some(Source::Example(name)) => Ok(datasets::builtin_example(name)?.payload),
        Some(Source::Path(p)) => {
            let text = std::fs::read_to_string(p)
                .map_err(|source| CliError::Io { path: p.display().to_string(), source })?;
            parse_input(&text)
        }
        Some(Source::Inline(s)) => parse_input(s),
    }
}

fn run(req: &CommandRequest) -> Result<(ExitStatus, Body), CliError> {
    if req.command == Command::Example {
        return example(req);
    }
    let payload = load(req)?;
    let wrong = || CliError::WrongKind { command: req.command.name().into(), kind: payload.kind().into() };
    let o = &req.options;
    match req.command {
        Command::VerifyRep => verify_rep(&payload).ok_or_else(wrong)?,
        Command::H0 => {
            let module = module_of(&payload)?.ok_or_else(wrong)?;
            let s = h0(&module);
            let basis: Vec<Value> = s.basis().iter().map(|v| vec_value(v)).collect();
            Ok((ExitStatus::Pass, body(json!({"status": "OK", "dim": s.dim(), "basis": basis}))))
        }
        Command::H1 => {
            let module = module_of(&payload)?.ok_or_else(wrong)?;
            let s = h1(&module);
            let reps = (0..s.h1_dim())
                .map(|j| s.representative(&unit_vector(s.h1_dim(), j)).map(|c| cocycle_value(&c)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((
                ExitStatus::Pass,
                body(json!({
                    "status": "OK",
                    "dim": s.h1_dim(),
                    "z1_dim": s.z1().dim(),
                    "b1_dim": s.b1().dim(),
                    "representatives": reps,
                })),
            ))
        }
        Command::Radiance => radiance(&payload).ok_or_else(wrong)?,
        Command::GaugeCheck => match &payload {
            Payload::Gauge(g) => gauge_check(g),
            _ => Err(wrong()),
        },
        Command::CompleteDet => match &payload {
            Payload::Representation(r) => {
                let t = completeness_det_test(&r.to_core()?)?;
                let status = if t.nonzero { "NONZERO" } else { "ZERO" };
                Ok((
                    ExitStatus::check(t.nonzero),
                    body(json!({
                        "status": status,
                        "determinant": rational::format(&t.determinant),
                        "nonzero": t.nonzero,
                    })),
                ))
            }
            _ => Err(wrong()),
        },
        Command::FibrationCheck => {
            let d = fibration_of(&payload)?.ok_or_else(wrong)?;
            let report = validate_fibration(&d);
            let violations: Vec<String> = report.violations.iter().map(|v| format!("{v:?}")).collect();
            Ok((
                ExitStatus::check(report.passed()),
                body(json!({"status": pass_fail(report.passed()), "violations": violations})),
            ))
        }
        Command::AltCheck => {
            let d = fibration_of(&payload)?.ok_or_else(wrong)?;
            let r = radiance_map(&d)?;
            let alt = r.is_constant();
            Ok((
                ExitStatus::check(alt),
                body(json!({
                    "status": pass_fail(alt),
                    "alt": alt,
                    "h1_dim": r.spaces.h1_dim(),
                    "constant_part": vec_value(&r.constant_part),
                    "linear_part": mat_value(&r.linear_part),
                })),
            ))
        }
        Command::InducedAction => {
            let d = fibration_of(&payload)?.ok_or_else(wrong)?;
            let gens = generators(&d, o.generator)?;
            let actions = gens
                .iter()
                .map(|&g| Ok(json!({"generator": g, "matrix": mat_value(&induced_h1_action(&d, g)?)})))
                .collect::<Result<Vec<_>, Error>>()?;
            let h1_dim = h1(&d.fiber_module()?).h1_dim();
            Ok((ExitStatus::Pass, body(json!({"status": "OK", "h1_dim": h1_dim, "actions": actions}))))
        }
        Command::Equivariance => equivariance(&payload, o).ok_or_else(wrong)?,
        Command::CechValidate => cech_validate(&payload).ok_or_else(wrong)?,
        Command::CechCohomology => {
            let s = system_of(&payload)?.ok_or_else(wrong)?;
            cech_cohomology(&s, o.k)
        }
        Command::SolveCoboundary => match &payload {
            Payload::CoboundaryProblem(p) => {
                let s = p.system.to_core()?;
                let z = p.cochain.to_core(&s)?;
                Ok(match solve_coboundary_with(&s, &z, o.strategy)? {
                    CoboundarySolution::Solved(a) => {
                        (ExitStatus::Pass, body(json!({"status": "Solved", "solution": cochain_value(&a)})))
                    }
                    CoboundarySolution::NoSolution(cls) => {
                        (ExitStatus::Negative, body(json!({"status": "NoSolution", "class": vec_value(&cls)})))
                    }
                })
            }
            _ => Err(wrong()),
        },
        Command::Defect => defect(&payload, o).ok_or_else(wrong)?,
        Command::Ladder => match &payload {
            Payload::Ladder(l) => ladder(l),
            _ => Err(wrong()),
        },
        Command::Example => unreachable!("handled above"),
    }
}

fn cocycle_value(c: &Cocycle1) -> Value {
    Value::Array(c.values().iter().map(|v| vec_value(v)).collect())
}

fn fibration_of(p: &Payload) -> Result<Option<FibrationData>, CliError> {
    match p {
        Payload::Fibration(f) => Ok(Some(f.to_core()?)),
        _ => Ok(None),
    }
}

/// Linear holonomy of a representation, or the fiber module of a fibration.
fn module_of(p: &Payload) -> Result<Option<CoefficientModule>, CliError> {
    Ok(match p {
        Payload::Representation(r) => Some(CoefficientModule::linear_holonomy(&r.to_core()?)?),
        Payload::Fibration(f) => Some(f.to_core()?.fiber_module()?),
        _ => None,
    })
}

/// An explicit system; the constant rank-one system on a nerve; or the first
/// level's declared system of a ladder.
fn system_of(p: &Payload) -> Result<Option<LocalSystem>, CliError> {
    Ok(match p {
        Payload::System(s) => Some(s.to_core()?),
        Payload::Nerve(n) => Some(LocalSystem::constant(n.to_core()?, 1)),
        Payload::CoboundaryProblem(c) => Some(c.system.to_core()?),
        Payload::Ladder(l) => Some(l.to_core()?.levels[0].system.clone()),
        _ => None,
    })
}

type Run = Result<(ExitStatus, Body), CliError>;

fn verify_rep(p: &Payload) -> Option<Run> {
    let rep = match p {
        Payload::Representation(r) => r.to_core(),
        Payload::Fibration(f) => f.representation.to_core(),
        Payload::Gauge(g) => g.representation.to_core(),
        _ => return None,
    };
    Some((|| {
        let rep = rep?;
        let report = rep.verify();
        let failures: Vec<Value> = report
            .failures
            .iter()
            .map(|f| json!({"relator": f.relator, "word": format_word(&f.word), "value": affine_value(&f.value)}))
            .collect();
        Ok((
            ExitStatus::check(report.passed()),
            body(json!({
                "status": pass_fail(report.passed()),
                "relators": rep.presentation().relators().len(),
                "failures": failures,
            })),
        ))
    })())
}

fn radiance(p: &Payload) -> Option<Run> {
    match p {
        Payload::Representation(r) => Some((|| {
            let c = radiance_class(&r.to_core()?)?;
            Ok((
                ExitStatus::Pass,
                body(json!({
                    "status": "OK",
                    "h1_dim": c.spaces().h1_dim(),
                    "coordinates": vec_value(c.coordinates()),
                    "zero": c.is_zero(),
                })),
            ))
        })()),
        Payload::Fibration(f) => Some((|| {
            let r = radiance_map(&f.to_core()?)?;
            Ok((
                ExitStatus::Pass,
                body(json!({
                    "status": "OK",
                    "h1_dim": r.spaces.h1_dim(),
                    "constant_part": vec_value(&r.constant_part),
                    "linear_part": mat_value(&r.linear_part),
                    "constant": r.is_constant(),
                })),
            ))
        })()),
        _ => None,
    }
}

fn gauge_check(g: &crate::codec::GaugeJson) -> Run {
    let rep = g.representation.to_core()?;
    let module = CoefficientModule::linear_holonomy(&rep)?;
    let spaces = Arc::new(h1(&module));
    let class = |coords: &Option<Vec<crate::codec::Q>>, cocycle: &Option<Vec<Vec<crate::codec::Q>>>, name: &str| {
        match (coords, cocycle) {
            (Some(c), None) => Ok(RadianceClass::new(spaces.clone(), vec_from_json(c))?),
            (None, Some(values)) => {
                let c = Cocycle1::new(&module, values.iter().map(|v| vec_from_json(v)).collect())?;
                Ok(RadianceClass::of_cocycle(spaces.clone(), &c)?)
            }
            _ => Err(CliError::Schema(format!("give exactly one of class_{name} and cocycle_{name}"))),
        }
    };
    let a = class(&g.class_a, &g.cocycle_a, "a")?;
    let b = class(&g.class_b, &g.cocycle_b, "b")?;
    let p = rep.presentation();
    let candidates = g
        .candidates
        .iter()
        .map(|c| {
            let words = |ws: &[String]| ws.iter().map(|w| parse_word(w)).collect::<Result<Vec<_>, _>>();
            let hom = GroupHom::new(p.clone(), p.clone(), words(&c.automorphism)?)?;
            let bg = mat_from_json(&c.bg, rep.dim(), rep.dim())?;
            let e = GaugeElement::new(hom, words(&c.inverse)?, bg)?;
            e.check(&module)?;
            Ok(e)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let common = json!({
        "h1_dim": spaces.h1_dim(),
        "class_a": vec_value(a.coordinates()),
        "class_b": vec_value(b.coordinates()),
    });
    Ok(match gauge_equivalent(&a, &b, &candidates)? {
        GaugeVerdict::Equivalent(i) => {
            let mut m = body(json!({"status": "Equivalent", "candidate": i}));
            m.extend(body(common));
            (ExitStatus::Pass, m)
        }
        GaugeVerdict::NotFoundAmongCandidates => {
            let mut m = body(json!({"status": "NotFoundAmongCandidates", "candidate": null}));
            m.extend(body(common));
            (ExitStatus::Negative, m)
        }
    })
}

fn generators(d: &FibrationData, only: Option<usize>) -> Result<Vec<usize>, CliError> {
    let k = d.ambient().presentation().generators();
    match only {
        Some(g) if g >= k => Err(Error::GeneratorOutOfRange { index: g, count: k }.into()),
        Some(g) => Ok(vec![g]),
        None => Ok((0..k).collect()),
    }
}

/// Points `(t, t+1, …, t+m−1)` for a few rationals `t`.
pub fn default_samples(base_dim: usize) -> Vec<VectorQ> {
    [(0, 1), (1, 1), (-1, 2), (2, 3), (-7, 3)]
        .iter()
        .map(|&(n, d)| (0..base_dim).map(|i| rational::frac(n, d) + rational::int(i as i64)).collect())
        .collect()
}

fn equivariance(p: &Payload, o: &Options) -> Option<Run> {
    let Payload::Fibration(f) = p else { return None };
    Some((|| {
        let d = f.to_core()?;
        let samples = f.samples().unwrap_or_else(|| default_samples(d.split().base()));
        let mut all = true;
        let mut per = Vec::new();
        for g in generators(&d, o.generator)? {
            let r = equivariance_check_with(&d, g, &samples, o.strategy)?;
            all &= r.passed();
            let failures: Vec<Value> = r
                .failures
                .iter()
                .map(|x| json!({"point": vec_value(&x.point), "moved": vec_value(&x.moved), "acted": vec_value(&x.acted)}))
                .collect();
            per.push(json!({"generator": g, "status": pass_fail(r.passed()), "points": r.points, "failures": failures}));
        }
        Ok((ExitStatus::check(all), body(json!({"status": pass_fail(all), "points": samples.len(), "generators": per}))))
    })())
}

fn keys(ss: &[Vec<usize>]) -> Vec<String> {
    ss.iter().map(|s| simplex_key(s)).collect()
}

fn cech_validate(p: &Payload) -> Option<Run> {
    let single = |s: &LocalSystem| {
        let r = validate_system(s);
        json!({"passed": r.passed(), "missing_faces": keys(&r.missing_faces), "non_flat": keys(&r.non_flat)})
    };
    Some((|| match p {
        Payload::Nerve(n) => {
            let n = n.to_core()?;
            let missing = n.missing_faces();
            let ok = missing.is_empty();
            Ok((ExitStatus::check(ok), body(json!({"status": pass_fail(ok), "missing_faces": keys(&missing)}))))
        }
        Payload::System(s) => {
            let r = validate_system(&s.to_core()?);
            Ok((
                ExitStatus::check(r.passed()),
                body(json!({
                    "status": pass_fail(r.passed()),
                    "missing_faces": keys(&r.missing_faces),
                    "non_flat": keys(&r.non_flat),
                })),
            ))
        }
        Payload::Ladder(l) => {
            // Parse without validating so that a bad level is reported rather than rejected.
            let spec = l.to_core();
            let (ok, levels) = match spec {
                Ok(spec) => {
                    let levels: Vec<Value> = spec.levels.iter().map(|lv| single(&lv.system)).collect();
                    (levels.iter().all(|v| v["passed"] == true), levels)
                }
                Err(CliError::Core(e)) => return Ok((ExitStatus::Negative, body(json!({"status": "FAIL", "error": e.to_string()})))),
                Err(e) => return Err(e),
            };
            Ok((ExitStatus::check(ok), body(json!({"status": pass_fail(ok), "levels": levels}))))
        }
        _ => Err(CliError::WrongKind { command: "cech-validate".into(), kind: p.kind().into() }),
    })())
}

fn cech_cohomology(s: &LocalSystem, k: Option<usize>) -> Run {
    let top = s.nerve().max_degree().unwrap_or(0);
    match k {
        Some(k) => {
            let h = cohomology(s, k)?;
            let basis: Vec<Value> = h.class_basis().iter().map(cochain_value).collect();
            Ok((ExitStatus::Pass, body(json!({"status": "OK", "degree": k, "dim": h.dim(), "class_basis": basis}))))
        }
        None => {
            let dims = (0..=top).map(|k| cohomology(s, k).map(|h| h.dim())).collect::<Result<Vec<_>, _>>()?;
            Ok((ExitStatus::Pass, body(json!({"status": "OK", "dims": dims}))))
        }
    }
}

fn defect(p: &Payload, o: &Options) -> Option<Run> {
    let gluing = match p {
        Payload::Gluing(g) => g.to_core(),
        Payload::Ladder(l) => (|| {
            let spec = l.to_core()?;
            let level = o.level.unwrap_or(1);
            spec.levels
                .get(level.wrapping_sub(1))
                .map(|lv| lv.gluing.clone())
                .ok_or_else(|| CliError::Schema(format!("no level {level}")))
        })(),
        _ => return None,
    };
    Some((|| {
        let g = gluing?;
        match nonabelian_defect(&g) {
            Ok(d) => {
                let h: Vec<Value> =
                    d.h.iter().map(|(s, f)| json!({"simplex": simplex_key(s), "map": affine_value(f)})).collect();
                Ok((
                    ExitStatus::Pass,
                    body(json!({
                        "status": "OK",
                        "translational": true,
                        "zero": d.cochain.is_zero(),
                        "cochain": cochain_value(&d.cochain),
                        "h": h,
                    })),
                ))
            }
            Err(Error::NotTranslational(ss)) => Ok((
                ExitStatus::Negative,
                body(json!({"status": "FAIL", "translational": false, "simplices": keys(&ss)})),
            )),
            Err(e) => Err(e.into()),
        }
    })())
}

fn ladder(l: &crate::codec::LadderJson) -> Run {
    let spec = l.to_core()?;
    let verdict = match run_ladder(&spec) {
        Ok(v) => v,
        Err(Error::AtRung { rung, source }) if matches!(*source, Error::InvalidLadder(_)) => {
            return Ok((
                ExitStatus::Negative,
                body(json!({"status": "ReplayFailed", "rung": rung, "error": source.to_string()})),
            ));
        }
        Err(e) => return Err(e.into()),
    };
    let rungs: Vec<Value> = verdict
        .rungs
        .iter()
        .map(|r| {
            json!({
                "rung": r.rung,
                "cocycle": cochain_value(&r.cocycle),
                "correction": r.correction.as_ref().map(cochain_value),
                "certificate": r.certificate.as_ref().map(|c| vec_value(c)),
            })
        })
        .collect();
    Ok(match verdict.status {
        LadderStatus::Solvable => {
            let correction = verdict.correction().map(CochainJson::from_core);
            (
                ExitStatus::Pass,
                body(json!({"status": "Solvable", "rung": null, "correction": correction, "rungs": rungs})),
            )
        }
        LadderStatus::ObstructedAtRung(r) => (
            ExitStatus::Negative,
            body(json!({"status": "ObstructedAtRung", "rung": r, "correction": null, "rungs": rungs})),
        ),
    })
}

fn example(req: &CommandRequest) -> Run {
    let name = match &req.source {
        Some(Source::Example(n)) => n,
        _ => return Err(CliError::Schema("example needs a dataset name".into())),
    };
    let d = datasets::builtin_example(name)?;
    let mut m = body(json!({"status": "PASS"}));
    m.extend(body(d.to_value()));
    Ok((ExitStatus::Pass, m))
}
