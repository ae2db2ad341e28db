mod common;

use std::process::Command;

use serde_json::Value;

use jesma::certificate::{builtin_certificates, Certificate, Node};
use jesma::cli::run;

fn jesma(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("jesma").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let (code, out, err) = jesma(&full);
    (
        code,
        serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} {err}")),
    )
}

fn without_timing(mut v: Value) -> Value {
    fn strip(v: &mut Value) {
        match v {
            Value::Object(m) => {
                m.remove("timing");
                m.remove("elapsed");
                m.remove("elapsed-us");
                m.values_mut().for_each(strip);
            }
            Value::Array(a) => a.iter_mut().for_each(strip),
            _ => {}
        }
    }
    strip(&mut v);
    v
}

#[test]
fn lu_search_finds_only_two_two_two() {
    let (code, v) = json(&[
        "search", "--form", "pythag", "--family", "lu", "--n", "5", "--k", "1", "--xmax", "20",
        "--ymax", "20",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "search");
    assert_eq!(
        v["results"][0]["solutions"],
        serde_json::json!([{"x": "2", "y": "2", "z": "2"}])
    );
    assert!(v["tool-version"].is_string());
    assert!(v["timing"]["elapsed-us"].is_string());
}

#[test]
fn eighty_nine_has_two_solutions() {
    let (code, out, _) = jesma(&[
        "search", "--form", "general", "--a", "89", "--b", "2", "--c", "91",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("2 solution(s)"), "{out}");
    assert!(out.contains("(1, 13, 2)"));
}

#[test]
fn base_one_is_degenerate() {
    let (code, _, err) = jesma(&[
        "search", "--form", "general", "--a", "1", "--b", "2", "--c", "3",
    ]);
    assert_eq!(code, 3);
    assert!(err.contains("Cao"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(jesma(&["search", "--form", "nonsense"]).0, 2);
    assert_eq!(jesma(&["search", "--form", "general", "--a", "3"]).0, 2);
    assert_eq!(jesma(&["search", "--form", "pythag"]).0, 2);
    assert_eq!(
        jesma(&["search", "--form", "pythag", "--family", "pq", "--p", "3", "--q", "1"]).0,
        2
    );
    assert_eq!(
        jesma(&["search", "--form", "general", "--a", "3", "--b", "2", "--c", "5", "--xmax", "0"])
            .0,
        2
    );
    assert_eq!(jesma(&["frobnicate"]).0, 2);
    assert_eq!(jesma(&["--help"]).0, 0);
}

#[test]
fn other_forms_run() {
    let (code, v) = json(&[
        "search", "--form", "terai", "--b", "3", "--c", "5", "--xmax", "10", "--ymax", "10",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        v["results"][0]["solutions"],
        serde_json::json!([{"x": "4", "y": "2", "z": "2"}])
    );
    let (code, v) = json(&[
        "search",
        "--form",
        "eisenstein",
        "--a",
        "3",
        "--b",
        "5",
        "--c",
        "7",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        v["results"][0]["solutions"],
        serde_json::json!([{"x": "1", "y": "1", "z": "2"}])
    );
    let (code, _, _) = jesma(&[
        "search", "--form", "pythag", "--u", "6", "--v", "8", "--w", "10", "--k", "3",
    ]);
    assert_eq!(code, 0);
    let (code, _, _) = jesma(&[
        "search", "--form", "pythag", "--family", "fermat", "--n", "2",
    ]);
    assert_eq!(code, 0);
}

#[test]
fn shipped_corpus_passes() {
    let (code, v) = json(&["corpus"]);
    assert_eq!(code, 0);
    let results = v["results"].as_array().unwrap();
    assert!(results.len() >= 40);
    assert!(results.iter().all(|r| r["status"] == "pass"));
    let indices: Vec<u64> = results
        .iter()
        .map(|r| r["index"].as_str().unwrap().parse().unwrap())
        .collect();
    assert!(indices.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn wrong_expectation_fails_and_malformed_entries_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let wrong = dir.path().join("wrong.json");
    std::fs::write(
        &wrong,
        r#"[{"name": "three-two-five", "source": "test", "form": "general-exp", "bases": ["3", "2", "5"],
             "x_max": "10", "y_max": "10", "expected": [{"x": "1", "y": "1", "z": "1"}]}]"#,
    )
    .unwrap();
    let (code, out, _) = jesma(&["corpus", "--file", wrong.to_str().unwrap()]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("FAIL three-two-five"));
    assert!(out.contains("(2, 4, 2)"));

    let mixed = dir.path().join("mixed.json");
    std::fs::write(
        &mixed,
        r#"[{"name": "broken", "form": "general-exp"},
            {"name": "bad-expectation", "source": "test", "form": "general-exp", "bases": ["3", "2", "5"],
             "x_max": "10", "y_max": "10", "expected": [{"x": "1", "y": "2", "z": "1"}]},
            {"name": "fine", "source": "test", "form": "general-exp", "bases": ["7", "2", "3"],
             "x_max": "10", "y_max": "10", "expected": [{"x": "1", "y": "1", "z": "2"}, {"x": "2", "y": "5", "z": "4"}]}]"#,
    )
    .unwrap();
    let (code, out, _) = jesma(&["corpus", "--file", mixed.to_str().unwrap()]);
    assert_ne!(code, 0);
    assert!(out.contains("MALFORMED #0 broken"), "{out}");
    assert!(out.contains("MALFORMED #1 bad-expectation"), "{out}");
    assert!(out.contains("PASS fine"), "{out}");
}

#[test]
fn empty_corpus_warns() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "[]").unwrap();
    let (code, _, err) = jesma(&["corpus", "--file", empty.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(err.contains("warning"));
    let (code, _, _) = jesma(&[
        "corpus",
        "--file",
        dir.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn prove_emits_a_verifiable_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    let p = path.to_str().unwrap();
    let terms = "101^z - 1 - 99^y*2^a*5^b";
    let (code, out, err) = jesma(&[
        "prove",
        "--terms",
        terms,
        "--constraint",
        "z even",
        "--mmax",
        "100",
        "--output",
        p,
    ]);
    assert_eq!(code, 0, "{out}{err}");
    let cert = Certificate::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    match &cert.tree {
        Node::Congruence { modulus, .. } => assert!(*modulus <= 17),
        other => panic!("unexpected root {other:?}"),
    }
    assert_eq!(jesma(&["verify", p]).0, 0);

    let (code, stdout, _) = jesma(&["prove", "--terms", terms, "--constraint", "z even"]);
    assert_eq!(code, 0);
    assert_eq!(Certificate::from_json(&stdout).unwrap(), cert);

    assert_eq!(
        jesma(&[
            "prove",
            "--terms",
            terms,
            "--constraint",
            "z even",
            "--mmax",
            "2"
        ])
        .0,
        1
    );
    assert_eq!(
        jesma(&["prove", "--terms", "3^x + 4^y - 5^z", "--mmax", "50"]).0,
        1
    );
    assert_eq!(jesma(&["prove", "--terms", "3^^x", "--mmax", "50"]).0, 2);
    assert_eq!(
        jesma(&["prove", "--terms", terms, "--constraint", "z sideways"]).0,
        2
    );
}

#[test]
fn verify_reports_paths_and_rejects_garbage() {
    let dir = tempfile::tempdir().unwrap();
    let shipped = common::crate_dir()
        .join("certificates")
        .join("theorem.json");
    let (code, out, _) = jesma(&["verify", shipped.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");

    let mut cert = builtin_certificates().remove(0);
    let (path, _) = cert
        .nodes()
        .into_iter()
        .find(|(_, n)| matches!(n, Node::Cited { .. }))
        .map(|(p, n)| (p, n.clone()))
        .unwrap();
    if let Some(Node::Cited { lemma }) = cert.node_mut(&path) {
        *lemma = "no-such-lemma".into();
    }
    let mutated = dir.path().join("mutated.json");
    std::fs::write(&mutated, cert.to_canonical_json()).unwrap();
    let (code, out, _) = jesma(&["verify", mutated.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("cited no-such-lemma"), "{out}");
    let (_, v) = json(&["verify", mutated.to_str().unwrap()]);
    assert_eq!(v["results"][0]["verdict"], "invalid");

    let text = std::fs::read_to_string(&shipped).unwrap();
    let truncated = dir.path().join("truncated.json");
    std::fs::write(&truncated, &text[..text.len() / 3]).unwrap();
    assert_eq!(jesma(&["verify", truncated.to_str().unwrap()]).0, 2);
    assert_eq!(
        jesma(&["verify", dir.path().join("absent.json").to_str().unwrap()]).0,
        2
    );
}

#[test]
fn export_writes_every_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(jesma(&["export", "--dir", d]).0, 0);
    for c in builtin_certificates() {
        let text = std::fs::read_to_string(dir.path().join(format!("{}.json", c.metadata["name"])))
            .unwrap();
        assert_eq!(Certificate::from_json(&text).unwrap(), c);
    }
    assert_eq!(jesma(&["export", "--name", "mod-17", "--dir", d]).0, 0);
    assert_eq!(jesma(&["export", "--name", "nope", "--dir", d]).0, 2);
}

#[test]
fn reports_are_identical_across_thread_counts() {
    let (_, one) = json(&["--threads", "1", "corpus"]);
    let (_, four) = json(&["--threads", "4", "corpus"]);
    assert_eq!(without_timing(one), without_timing(four));
    let args = [
        "search", "--form", "general", "--a", "3", "--b", "2", "--c", "5",
    ];
    let (_, a) = json(&[&["--threads", "1"][..], &args].concat());
    let (_, b) = json(&[&["--threads", "3"][..], &args].concat());
    assert_eq!(without_timing(a), without_timing(b));
}

#[test]
fn binary_honours_jesma_threads() {
    let bin = env!("CARGO_BIN_EXE_jesma");
    let out = Command::new(bin)
        .args([
            "search", "--form", "general", "--a", "7", "--b", "2", "--c", "3",
        ])
        .env("JESMA_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("(2, 5, 4)"));
    let bad = Command::new(bin)
        .args(["corpus"])
        .env("JESMA_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let degenerate = Command::new(bin)
        .args([
            "search", "--form", "general", "--a", "1", "--b", "2", "--c", "3",
        ])
        .output()
        .unwrap();
    assert_eq!(degenerate.status.code(), Some(3));
}
