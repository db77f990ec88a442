//! The `fsm-rv` command line, driven through `cli::run`.

use std::fs;
use std::path::{Path, PathBuf};

use fsm_rv::cli::{run, EXIT_FALSE, EXIT_INCOMPATIBLE, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE};
use fsm_rv::export::from_json;
use fsm_rv::generators::Scenario;
use tempfile::TempDir;

fn fsm(args: &[&str]) -> i32 {
    run(std::iter::once("fsm-rv").chain(args.iter().copied()))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Generate a pack into `dir/name` and return its directory.
fn pack(dir: &TempDir, name: &str, extra: &[&str]) -> PathBuf {
    let out = dir.path().join(name);
    let mut args = vec!["gen", "--out", s(&out)];
    args.extend_from_slice(extra);
    assert_eq!(fsm(&args), EXIT_OK, "gen {extra:?}");
    out
}

fn check(p: &Path, extra: &[&str]) -> i32 {
    let spec = p.join("scenario.spec");
    let trace = p.join("trace.jsonl");
    let mut args = vec!["check", "--spec", s(&spec), "--trace", s(&trace)];
    args.extend_from_slice(extra);
    fsm(&args)
}

#[test]
fn generated_packs_pass_and_bugs_fail() {
    let dir = TempDir::new().unwrap();
    let ok = pack(&dir, "ok", &["--scenario", "dining", "--seed", "3"]);
    let bad = pack(&dir, "bad", &["--scenario", "dining", "--seed", "3", "--bug", "adjacent_eating"]);
    for model in ["lsm", "dsm", "asm"] {
        assert_eq!(check(&ok, &["--model", model]), EXIT_OK, "{model}");
        assert_eq!(check(&bad, &["--model", model]), EXIT_FALSE, "{model}");
    }
}

#[test]
fn asm_agrees_with_lsm_unless_incompatible() {
    let dir = TempDir::new().unwrap();
    for scenario in Scenario::ALL {
        let mut bugs: Vec<Option<&str>> = vec![None];
        bugs.extend(scenario.bugs().iter().map(|b| Some(*b)));
        for bug in bugs {
            let name = format!("{scenario}-{}", bug.unwrap_or("none"));
            let mut args = vec!["--scenario", scenario.as_str(), "--seed", "5", "--events", "800", "--priority"];
            if let Some(b) = bug {
                args.extend(["--bug", b]);
            }
            let p = pack(&dir, &name, &args);
            let lsm = check(&p, &[]);
            let asm = check(&p, &["--model", "asm"]);
            // Properties over primed attributes are refused on abstract models.
            if asm == EXIT_OK || asm == EXIT_FALSE {
                assert_eq!(asm, lsm, "{name}");
            }
        }
    }
}

const COUNTER: &str = "key k = demo.C:1.k : int\nabs k = range[0:5]\nprop low = G[k < 5]\n";

fn counter(dir: &TempDir, values: &[i64]) -> (PathBuf, PathBuf) {
    let spec = dir.path().join("c.spec");
    let trace = dir.path().join("c.jsonl");
    fs::write(&spec, COUNTER).unwrap();
    let lines: Vec<String> = values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            format!(
                r#"{{"seq":{},"kind":"fieldWrite","thread":"t","class":"demo.C","instance":1,"field":"k","value":{{"t":"int","v":{v}}}}}"#,
                i + 1
            )
        })
        .collect();
    fs::write(&trace, lines.join("\n") + "\n").unwrap();
    (spec, trace)
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let (spec, trace) = counter(&dir, &[0, 1, 2, 3]);
    let base = ["check", "--spec", s(&spec), "--trace", s(&trace)];
    let with = |extra: &[&str]| {
        let mut a = base.to_vec();
        a.extend_from_slice(extra);
        fsm(&a)
    };
    assert_eq!(with(&[]), EXIT_OK);
    assert_eq!(with(&["--model", "asm"]), EXIT_OK);
    assert_eq!(with(&["--prop", "G[k < 3]"]), EXIT_FALSE);
    assert_eq!(with(&["--model", "asm", "--only", "arg1", "--prop", "G[k == 1 || k != 1]"]), EXIT_OK);
    // `k != 1` cuts through the [0, 5) bucket.
    assert_eq!(with(&["--model", "asm", "--prop", "G[k != 1]"]), EXIT_INCOMPATIBLE);
    assert_eq!(with(&["--only", "arg1", "--prop", "F[k == 3]"]), EXIT_OK);

    assert_eq!(with(&["--prop", "G[k <"]), EXIT_USAGE);
    assert_eq!(with(&["--prop", "G[z == 1]"]), EXIT_USAGE);
    assert_eq!(with(&["--only", "nope"]), EXIT_USAGE);
    assert_eq!(with(&["--model", "path"]), EXIT_USAGE);
    assert_eq!(fsm(&["frobnicate"]), EXIT_USAGE);
    assert_eq!(fsm(&["check", "--spec", s(&spec)]), EXIT_USAGE);
    assert_eq!(fsm(&["check", "--spec", "/nonexistent.spec", "--trace", s(&trace)]), EXIT_USAGE);
    assert_eq!(fsm(&["check", "--spec", s(&spec), "--trace", "/nonexistent.jsonl"]), EXIT_USAGE);
    assert_eq!(fsm(&["gen", "--scenario", "tomcat", "--out", s(dir.path())]), EXIT_USAGE);
    assert_eq!(fsm(&["--help"]), EXIT_OK);

    let broken = dir.path().join("broken.jsonl");
    fs::write(&broken, "{\"seq\":1,\"kind\":\"fieldWrite\"\n").unwrap();
    assert_eq!(fsm(&["check", "--spec", s(&spec), "--trace", s(&broken)]), EXIT_RUNTIME);
    // A runtime failure outranks a false verdict and a usage error.
    assert_eq!(fsm(&["check", "--spec", s(&spec), "--trace", s(&broken), "--prop", "G[k < 0]"]), EXIT_RUNTIME);
}

#[test]
fn build_and_export() {
    let dir = TempDir::new().unwrap();
    let (spec, trace) = counter(&dir, &[0, 1, 7, 1, 7]);
    let dsm = dir.path().join("dsm.json");
    let asm = dir.path().join("asm.json");
    for (kind, out) in [("dsm", &dsm), ("asm", &asm)] {
        let code = fsm(&["build", "--spec", s(&spec), "--trace", s(&trace), "--model", kind, "--out", s(out)]);
        assert_eq!(code, EXIT_OK, "{kind}");
    }
    assert_eq!(from_json(&fs::read_to_string(&dsm).unwrap()).unwrap().state_count(), 4);
    assert_eq!(from_json(&fs::read_to_string(&asm).unwrap()).unwrap().state_count(), 3);

    let dot = dir.path().join("dsm.dot");
    let code = fsm(&["export", "--model", s(&dsm), "--highlight", "k=7=red", "--out", s(&dot)]);
    assert_eq!(code, EXIT_OK);
    let text = fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph"), "{text}");
    assert!(text.contains("red"), "{text}");

    let plain = dir.path().join("plain.dot");
    assert_eq!(fsm(&["export", "--model", s(&dsm), "--no-counts", "--compact", "--out", s(&plain)]), EXIT_OK);
    assert!(!fs::read_to_string(&plain).unwrap().contains("red"));

    let again = dir.path().join("again.json");
    assert_eq!(fsm(&["export", "--model", s(&dsm), "--format", "json", "--out", s(&again)]), EXIT_OK);
    assert_eq!(fs::read_to_string(&again).unwrap(), fs::read_to_string(&dsm).unwrap());

    assert_eq!(fsm(&["export", "--model", s(&dsm), "--highlight", "k=7=purple"]), EXIT_USAGE);
    assert_eq!(fsm(&["export", "--model", s(&trace)]), EXIT_USAGE);
    let none = ["build", "--spec", s(&spec), "--trace", s(&trace), "--model", "path"];
    assert_eq!(fsm(&none), EXIT_USAGE);
}

#[test]
fn generation_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let args = ["--scenario", "readers_writers", "--seed", "9", "--priority", "--bug", "reader_barging"];
    let a = pack(&dir, "a", &args);
    let b = pack(&dir, "b", &args);
    for f in ["trace.jsonl", "scenario.spec"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}
