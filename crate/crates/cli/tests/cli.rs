use std::process::Command as Process;

use flataff::Strategy;
use flataff_cli::codec::{FibrationJson, LadderJson, RepresentationJson};
use flataff_cli::{available, builtin_example, exec, Command, CommandRequest, ExitStatus, Options, Payload, Source};
use serde_json::{json, Value};

fn inline(command: Command, payload: Value) -> CommandRequest {
    CommandRequest::new(command, Source::Inline(payload.to_string()))
}

fn torus_rep() -> Value {
    builtin_example("torus2").unwrap().payload.to_value()
}

fn circle_system() -> Value {
    json!({
        "nerve": {"vertices": 3, "simplices": [[0, 1], [1, 2], [0, 2]], "closure": true},
        "dim": 1,
        "transitions": {"0-1": [["1"]], "0-2": [["1"]], "1-2": [["1"]]}
    })
}

fn tetra_gluing(maps: &[(&str, &str, &str)]) -> Value {
    let mut m = serde_json::Map::new();
    for e in ["0-1", "0-2", "0-3", "1-2", "1-3", "2-3"] {
        m.insert(e.into(), json!({"linear": [["1"]], "translation": ["0"]}));
    }
    for (e, l, t) in maps {
        m.insert((*e).into(), json!({"linear": [[l]], "translation": [t]}));
    }
    json!({
        "kind": "gluing",
        "nerve": {"vertices": 4, "simplices": [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]], "closure": true},
        "dim": 1,
        "maps": m
    })
}

fn swap_candidates(with_swap: bool) -> Value {
    let identity = json!({"automorphism": ["g0", "g1"], "inverse": ["g0", "g1"], "bg": [["1", "0"], ["0", "1"]]});
    let swap = json!({"automorphism": ["g1", "g0"], "inverse": ["g1", "g0"], "bg": [["1", "0"], ["0", "1"]]});
    if with_swap {
        json!([identity, swap])
    } else {
        json!([identity])
    }
}

fn gauge(with_swap: bool) -> Value {
    let mut rep = torus_rep();
    rep.as_object_mut().unwrap().remove("kind");
    json!({
        "kind": "gauge",
        "representation": rep,
        "cocycle_a": [["1", "0"], ["0", "0"]],
        "cocycle_b": [["0", "0"], ["1", "0"]],
        "candidates": swap_candidates(with_swap)
    })
}

/// One request per subcommand (several for some), with the expected exit status.
fn corpus() -> Vec<(CommandRequest, ExitStatus)> {
    let ex = CommandRequest::example;
    let mut k1 = ex(Command::CechCohomology, "circle3");
    k1.options.k = Some(1);
    let mut gen2 = ex(Command::InducedAction, "gamma3-p3");
    gen2.options.generator = Some(2);
    vec![
        (ex(Command::VerifyRep, "gamma3"), ExitStatus::Pass),
        (ex(Command::H0, "gamma3"), ExitStatus::Pass),
        (ex(Command::H1, "gamma3-p2"), ExitStatus::Pass),
        (ex(Command::Radiance, "gamma3"), ExitStatus::Pass),
        (ex(Command::Radiance, "gamma3-p2"), ExitStatus::Pass),
        (inline(Command::GaugeCheck, gauge(true)), ExitStatus::Pass),
        (inline(Command::GaugeCheck, gauge(false)), ExitStatus::Negative),
        (ex(Command::CompleteDet, "torus2"), ExitStatus::Pass),
        (ex(Command::FibrationCheck, "gamma3-p3"), ExitStatus::Pass),
        (ex(Command::AltCheck, "gamma3-p2"), ExitStatus::Negative),
        (ex(Command::InducedAction, "gamma3-p2"), ExitStatus::Pass),
        (gen2, ExitStatus::Pass),
        (ex(Command::Equivariance, "gamma3-p3"), ExitStatus::Pass),
        (ex(Command::CechValidate, "tetra4"), ExitStatus::Pass),
        (k1, ExitStatus::Pass),
        (ex(Command::CechCohomology, "tetra4"), ExitStatus::Pass),
        (
            inline(
                Command::SolveCoboundary,
                json!({"system": circle_system(), "cochain": {"degree": 1, "values": {"0-1": ["0"], "0-2": ["0"], "1-2": ["1"]}}}),
            ),
            ExitStatus::Negative,
        ),
        (
            inline(
                Command::SolveCoboundary,
                json!({"system": circle_system(), "cochain": {"degree": 1, "values": {"0-1": ["1"], "0-2": ["2"], "1-2": ["1"]}}}),
            ),
            ExitStatus::Pass,
        ),
        (inline(Command::Defect, tetra_gluing(&[("0-2", "1", "5")])), ExitStatus::Pass),
        (inline(Command::Defect, tetra_gluing(&[("0-1", "2", "0")])), ExitStatus::Negative),
        (ex(Command::Defect, "tetra4"), ExitStatus::Pass),
        (ex(Command::Ladder, "tetra4"), ExitStatus::Negative),
        (ex(Command::Example, "circle3"), ExitStatus::Pass),
    ]
}

#[test]
fn every_subcommand_report_round_trips() {
    let covered: std::collections::BTreeSet<&str> = corpus().iter().map(|(r, _)| r.command.name()).collect();
    assert_eq!(covered.len(), Command::ALL.len());
    for (req, want) in corpus() {
        let out = exec(&req);
        assert_eq!(out.status, want, "{}", out.render());
        let parsed: Value = serde_json::from_str(&out.render()).unwrap();
        assert_eq!(parsed, out.report);
        assert_eq!(parsed["command"], req.command.name());
    }
}

#[test]
fn exec_is_deterministic_across_runs_and_strategies() {
    for (req, _) in corpus() {
        let first = exec(&req).render();
        assert_eq!(first, exec(&req).render());
        for strategy in [Strategy::Sequential, Strategy::Parallel] {
            let other = CommandRequest { options: Options { strategy, ..req.options }, ..req.clone() };
            assert_eq!(first, exec(&other).render(), "{} under {strategy:?}", req.command.name());
        }
    }
}

#[test]
fn specific_reports() {
    let out = exec(&inline(Command::GaugeCheck, gauge(true)));
    assert_eq!(out.report["candidate"], 1);
    let out = exec(&inline(
        Command::SolveCoboundary,
        json!({"system": circle_system(), "cochain": {"degree": 1, "values": {"0-1": ["1"], "0-2": ["2"], "1-2": ["1"]}}}),
    ));
    // δa(i,j) = a_j − a_i; the free coordinate (the last vertex) is set to zero.
    assert_eq!(out.report["solution"]["values"], json!({"0": ["-2"], "1": ["-1"], "2": ["0"]}));
    let out = exec(&inline(Command::Defect, tetra_gluing(&[("0-2", "1", "5")])));
    assert_eq!(out.report["cochain"]["values"], json!({"0-1-2": ["-5"], "0-1-3": ["0"], "0-2-3": ["5"], "1-2-3": ["0"]}));
    let out = exec(&CommandRequest::example(Command::CechCohomology, "tetra4"));
    assert_eq!(out.report["dims"], json!([1, 0, 1]));
}

#[test]
fn payloads_round_trip_through_the_core_types() {
    for name in available() {
        let d = builtin_example(name).unwrap();
        let v = d.payload.to_value();
        assert_eq!(Payload::from_value(&v).unwrap(), d.payload, "{name}");
        match &d.payload {
            Payload::Representation(r) => {
                assert_eq!(&RepresentationJson::from_core(&r.to_core().unwrap()), r);
            }
            Payload::Fibration(f) => {
                let back = FibrationJson::from_core(&f.to_core().unwrap()).unwrap();
                assert_eq!(back, FibrationJson { samples: None, ..f.clone() });
            }
            Payload::Ladder(l) => {
                let core = l.to_core().unwrap();
                assert_eq!(LadderJson::from_core(&core).to_core().unwrap(), core);
            }
            Payload::Nerve(n) => {
                let core = n.to_core().unwrap();
                assert_eq!(flataff_cli::codec::NerveJson::from_core(&core).to_core().unwrap(), core);
            }
            other => panic!("unexpected built-in kind {}", other.kind()),
        }
    }
}

#[test]
fn dataset_files_are_accepted_as_inputs() {
    let d = builtin_example("gamma3-p3").unwrap();
    let wrapped = json!({"name": "copy", "payload": d.payload.to_value()});
    let out = exec(&inline(Command::AltCheck, wrapped));
    assert_eq!(out.report["alt"], true);
    let out = exec(&CommandRequest::example(Command::Example, "tetra4"));
    assert!(out.report["self_test"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn malformed_inputs_exit_2_with_json() {
    let bad = [
        inline(Command::VerifyRep, json!({"kind": "representation", "generators": 1, "dim": 1, "images": [{"linear": [["x"]], "translation": ["0"]}]})),
        inline(Command::VerifyRep, json!({"vertices": 2, "simplices": [[0, 1]]})),
        inline(Command::H1, json!([1, 2])),
        inline(Command::CechCohomology, json!({"kind": "mystery"})),
        CommandRequest::new(Command::CechCohomology, Source::Inline("{not json".into())),
        CommandRequest::new(Command::CechCohomology, Source::Path("/nonexistent/input.json".into())),
        CommandRequest { command: Command::Ladder, source: None, options: Options::default() },
        CommandRequest::example(Command::VerifyRep, "unknown"),
    ];
    for req in bad {
        let out = exec(&req);
        assert_eq!(out.status, ExitStatus::Malformed, "{}", out.render());
        assert_eq!(out.report["status"], "ERROR");
        assert!(out.report["error"].as_str().is_some_and(|e| !e.is_empty()));
    }
    let out = exec(&CommandRequest::example(Command::VerifyRep, "unknown"));
    assert!(out.report["error"].as_str().unwrap().contains("gamma3-p2p1"));
}

fn binary(args: &[&str]) -> (i32, Value, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_flataff")).args(args).output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let report = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), report, String::from_utf8(out.stderr).unwrap())
}

#[test]
fn binary_exit_codes() {
    let (code, r, _) = binary(&["verify-rep", "--example", "gamma3"]);
    assert_eq!((code, r["status"].as_str()), (0, Some("PASS")));

    let (code, r, _) = binary(&["alt-check", "--example", "gamma3-p2"]);
    assert_eq!((code, &r["alt"]), (1, &json!(false)));

    let dir = std::env::temp_dir().join(format!("flataff-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let nerve = dir.join("circle3.json");
    std::fs::write(&nerve, builtin_example("circle3").unwrap().payload.to_value().to_string()).unwrap();
    let (code, r, _) = binary(&["cech-cohomology", "--nerve", nerve.to_str().unwrap(), "--k", "1"]);
    assert_eq!((code, &r["dim"]), (0, &json!(1)));

    let report = dir.join("out.json");
    let (code, _, _) = binary(&["ladder", "--example", "tetra4", "--output", report.to_str().unwrap()]);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!((code, &written["status"]), (1, &json!("ObstructedAtRung")));

    let (code, r, err) = binary(&["example", "unknown"]);
    assert_eq!((code, &r["status"]), (2, &json!("ERROR")));
    assert!(err.contains("unknown example"));

    let (code, _, _) = binary(&["h1", "--json", "{\"generators\": "]);
    assert_eq!(code, 2);
    let (code, _, _) = binary(&["no-such-command"]);
    assert_eq!(code, 2);
    std::fs::remove_dir_all(&dir).ok();
}
