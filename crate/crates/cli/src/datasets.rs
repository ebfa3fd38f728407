//! Built-in example datasets. Each carries assertions on the reports of one or more
//! subcommands, re-run whenever the dataset is loaded.

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::codec::Payload;
use crate::error::CliError;
use crate::exec::{exec, Command, CommandRequest, ExitStatus, Options, Source};

const SOURCES: [(&str, &str); 8] = [
    ("gamma3", include_str!("../data/gamma3.json")),
    ("gamma3-p2", include_str!("../data/gamma3-p2.json")),
    ("gamma3-p3", include_str!("../data/gamma3-p3.json")),
    ("gamma3-p2p1", include_str!("../data/gamma3-p2p1.json")),
    ("torus2", include_str!("../data/torus2.json")),
    ("torus2-collinear", include_str!("../data/torus2-collinear.json")),
    ("circle3", include_str!("../data/circle3.json")),
    ("tetra4", include_str!("../data/tetra4.json")),
];

pub fn available() -> Vec<&'static str> {
    SOURCES.iter().map(|(n, _)| *n).collect()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpectationJson {
    command: String,
    #[serde(default)]
    k: Option<usize>,
    #[serde(default)]
    generator: Option<usize>,
    #[serde(default)]
    level: Option<usize>,
    exit: i64,
    /// JSON pointer into the report ↦ expected value.
    expect: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetJson {
    name: String,
    description: String,
    payload: Value,
    expected_results: Vec<ExpectationJson>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expectation {
    pub command: Command,
    pub options: Options,
    pub exit: ExitStatus,
    pub expect: Vec<(String, Value)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub command: Command,
    pub passed: bool,
    /// Mismatches, empty when passed.
    pub detail: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleDataset {
    pub name: String,
    pub description: String,
    pub payload: Payload,
    pub expected_results: Vec<Expectation>,
    /// Outcome of the expectations at load time.
    pub self_test: Vec<CheckResult>,
}

impl ExampleDataset {
    pub fn verify(&self) -> Vec<CheckResult> {
        let inline = self.payload.to_value().to_string();
        self.expected_results
            .iter()
            .map(|e| {
                let req =
                    CommandRequest { command: e.command, source: Some(Source::Inline(inline.clone())), options: e.options };
                let out = exec(&req);
                let mut detail = Vec::new();
                if out.status != e.exit {
                    detail.push(format!("exit {} (expected {})", out.status.code(), e.exit.code()));
                }
                for (ptr, want) in &e.expect {
                    match out.report.pointer(ptr) {
                        Some(got) if got == want => {}
                        got => detail.push(format!("{ptr}: {} (expected {want})", got.unwrap_or(&Value::Null))),
                    }
                }
                CheckResult { command: e.command, passed: detail.is_empty(), detail }
            })
            .collect()
    }

    pub fn to_value(&self) -> Value {
        let expected: Vec<Value> = self
            .expected_results
            .iter()
            .map(|e| {
                let mut m = Map::new();
                m.insert("command".into(), json!(e.command.name()));
                for (key, v) in [("k", e.options.k), ("generator", e.options.generator), ("level", e.options.level)] {
                    if let Some(v) = v {
                        m.insert(key.into(), json!(v));
                    }
                }
                m.insert("exit".into(), json!(e.exit.code()));
                m.insert("expect".into(), Value::Object(e.expect.iter().cloned().collect()));
                Value::Object(m)
            })
            .collect();
        let checks: Vec<Value> = self
            .self_test
            .iter()
            .map(|c| json!({"command": c.command.name(), "passed": c.passed, "detail": c.detail}))
            .collect();
        json!({
            "name": self.name,
            "description": self.description,
            "payload": self.payload.to_value(),
            "expected_results": expected,
            "self_test": checks,
        })
    }
}

fn parse(text: &str) -> Result<ExampleDataset, CliError> {
    let d: DatasetJson = serde_json::from_str(text)?;
    let expected_results = d
        .expected_results
        .into_iter()
        .map(|e| {
            let command = Command::from_name(&e.command)
                .filter(|c| *c != Command::Example)
                .ok_or_else(|| CliError::Schema(format!("unknown command {:?} in expectations", e.command)))?;
            let exit = ExitStatus::from_code(e.exit).ok_or_else(|| CliError::Schema(format!("bad exit {}", e.exit)))?;
            let options = Options { k: e.k, generator: e.generator, level: e.level, ..Options::default() };
            Ok(Expectation { command, options, exit, expect: e.expect.into_iter().collect() })
        })
        .collect::<Result<_, CliError>>()?;
    Ok(ExampleDataset {
        name: d.name,
        description: d.description,
        payload: Payload::from_value(&d.payload)?,
        expected_results,
        self_test: Vec::new(),
    })
}

/// Loads a built-in dataset and re-verifies its expected results.
pub fn builtin_example(name: &str) -> Result<ExampleDataset, CliError> {
    let (_, text) = SOURCES.iter().find(|(n, _)| *n == name).ok_or_else(|| CliError::UnknownExample {
        name: name.into(),
        available: available().into_iter().map(String::from).collect(),
    })?;
    let mut d = parse(text)?;
    d.self_test = d.verify();
    if let Some(bad) = d.self_test.iter().find(|c| !c.passed) {
        return Err(CliError::SelfTest {
            name: name.into(),
            detail: format!("{}: {}", bad.command.name(), bad.detail.join("; ")),
        });
    }
    Ok(d)
}
