use std::path::PathBuf;

use opwire_cli::run;
use opwire_core::dsl::parse_dsl;
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn opwire(args: &[&str]) -> Run {
    let argv: Vec<String> = std::iter::once("opwire").chain(args.iter().copied()).map(String::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

#[test]
fn eval_tensor_chain() {
    let r = opwire(&["eval", &fixture("chain.opw"), "--diagram", "d", "--algebra", "tensor", "--data", &fixture("td.json")]);
    assert_eq!((r.code, r.out.as_str()), (0, "[7,16]\n"), "{}", r.err);
}

#[test]
fn eval_json_is_full_element() {
    let chain = fixture("chain.opw");
    let data = fixture("td.json");
    let r = opwire(&["--json", "eval", &chain, "--diagram", "d", "--algebra", "tensor", "--data", &data]);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["kind"], "tensor");
    assert_eq!(v["shape"], serde_json::json!([2]));
    assert_eq!(v["data"], serde_json::json!([7.0, 16.0]));
}

#[test]
fn eval_matrix_chain_is_product() {
    let r = opwire(&[
        "eval",
        &fixture("chain_matrix.opw"),
        "--diagram",
        "two",
        "--algebra",
        "matrix",
        "--data",
        &fixture("md.json"),
    ]);
    // q . p with p = [[1,2],[3,4]] and q the swap
    assert_eq!(r.out, "[[3,4],[1,2]]\n");
}

#[test]
fn eval_rejects_wrong_shape() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let bad = dir.join("bad_shape.json");
    std::fs::write(&bad, r#"{"elements": {"t": {"kind": "tensor", "shape": [3, 2], "data": [1,2,3,4,5,6]},
                                         "s": {"kind": "tensor", "shape": [3], "data": [1,0,2]}}}"#)
        .unwrap();
    let r = opwire(&["--json", "eval", &fixture("chain.opw"), "--diagram", "d", "--algebra", "tensor", "--data", bad.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    let v: Value = serde_json::from_str(r.err.trim()).unwrap();
    assert_eq!(v["error"], "ShapeMismatch");
}

#[test]
fn validate_cycle_lists_it() {
    let r = opwire(&["validate", &fixture("bad.opw")]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("slot cycle s0 -> s1 -> s0"), "{}", r.err);
}

#[test]
fn validate_json() {
    let r = opwire(&["--json", "validate", &fixture("corpus.opw")]);
    assert_eq!(r.code, 0);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 5);
    let r = opwire(&["--json", "validate", &fixture("bad.opw")]);
    let v: Value = serde_json::from_str(r.err.trim()).unwrap();
    assert_eq!(v["error"], "VariantViolation");
    assert_eq!(v["detail"]["violations"][0]["rule"], "Cycle");
}

#[test]
fn syntax_error_position() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let p = dir.join("syntax.opw");
    std::fs::write(&p, "type A(2)\nbox f A -> A\n").unwrap();
    let r = opwire(&["--json", "validate", p.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    let v: Value = serde_json::from_str(r.err.trim()).unwrap();
    assert_eq!(v["error"], "SyntaxError");
    assert_eq!((v["detail"]["line"].as_u64(), v["detail"]["col"].as_u64()), (Some(2), Some(7)));
}

#[test]
fn missing_file_is_io() {
    let r = opwire(&["validate", "/nonexistent/x.opw"]);
    assert_eq!(r.code, 3);
    let r = opwire(&["--json", "export-dot", "/nonexistent/x.opw", "--diagram", "d"]);
    assert_eq!(r.code, 3);
    assert!(r.err.contains("\"IoError\""));
}

#[test]
fn unknown_diagram_and_usage() {
    assert_eq!(opwire(&["decompose", &fixture("corpus.opw"), "--diagram", "nope"]).code, 1);
    assert_eq!(opwire(&["frobnicate"]).code, 1);
    let help = opwire(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.out.contains("export-dot"));
}

#[test]
fn compose_appends_composite() {
    let r = opwire(&["compose", &fixture("chain_matrix.opw"), "--host", "two", "--slot", "p", "--guest", "two"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let ws = parse_dsl(&r.out).unwrap();
    let c = ws.diagram("two_p_two").unwrap();
    assert_eq!(c.diagram.slot_count(), 3);
    // By index too, and to a file.
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("composed.opw");
    let r = opwire(&["compose", &fixture("chain_matrix.opw"), "--host", "two", "--slot", "0", "--guest", "two", "-o", out.to_str().unwrap()]);
    assert_eq!((r.code, r.out.as_str()), (0, ""));
    let again = parse_dsl(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(again.canonical_summary(), ws.canonical_summary());
}

#[test]
fn compose_rejects_variant_mix() {
    let r = opwire(&["compose", &fixture("corpus.opw"), "--host", "chain", "--slot", "s0", "--guest", "spent"]);
    assert_eq!(r.code, 1);
}

#[test]
fn normalize_discards_everything() {
    let r = opwire(&["normalize", &fixture("causal.opw"), "--diagram", "d"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.starts_with("# discard s1, ground s0.out[0]\n# discard s0, ground outer.in[0]\n"));
    let ws = parse_dsl(&r.out).unwrap();
    let nf = &ws.diagram("d_nf").unwrap().diagram;
    assert_eq!(nf.discarded().len(), 2);
    assert!(nf.wires().is_empty());
    // Not a causal diagram.
    assert_eq!(opwire(&["normalize", &fixture("corpus.opw"), "--diagram", "feedback"]).code, 1);
}

#[test]
fn decompose_uses_slot_names() {
    let r = opwire(&["decompose", &fixture("chain_matrix.opw"), "--diagram", "two"]);
    assert_eq!(r.out, "(p ; q)\n");
    assert_eq!(opwire(&["decompose", &fixture("corpus.opw"), "--diagram", "feedback"]).code, 1);
}

#[test]
fn laws_small_run() {
    let r = opwire(&["laws", &fixture("corpus.opw"), "--suite", "causal", "--seed", "3", "--cases", "20"]);
    assert_eq!(r.code, 0, "{}{}", r.out, r.err);
    assert!(r.out.contains("file-diagrams"));
    assert!(r.out.ends_with("all 6 laws passed\n"));
    let j = opwire(&["--json", "laws", &fixture("corpus.opw"), "--suite", "polycat", "--seed", "3", "--cases", "5"]);
    let v: Value = serde_json::from_str(&j.out).unwrap();
    assert_eq!(v["seed"], 3);
    assert!(v["laws"].as_array().unwrap().iter().all(|l| l["passed"] == l["cases"]));
    assert_eq!(opwire(&["laws", &fixture("bad.opw"), "--suite", "core", "--cases", "1"]).code, 1);
    assert_eq!(opwire(&["laws", &fixture("corpus.opw"), "--suite", "nonsense"]).code, 1);
}

#[test]
fn laws_deterministic_under_seed() {
    let a = opwire(&["laws", &fixture("corpus.opw"), "--suite", "functor", "--seed", "11", "--cases", "30"]);
    let b = opwire(&["laws", &fixture("corpus.opw"), "--suite", "functor", "--seed", "11", "--cases", "30"]);
    assert_eq!(a.out, b.out);
}

#[test]
fn export_dot_names_slots() {
    let r = opwire(&["export-dot", &fixture("causal.opw"), "--diagram", "d"]);
    assert!(r.out.starts_with("digraph wiring {"));
    assert!(r.out.contains("\"s1\" -> \"ground\""));
    assert_eq!(r.out.matches("-> \"ground\"").count(), 1);
}
