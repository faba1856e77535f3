//! Acceptance criteria. Prints one line per criterion and exits non-zero
//! if any fails. Laws run at their default case counts with seed 7 (or
//! `OPWIRE_SEED`).

use std::path::PathBuf;
use std::time::{Duration, Instant};

use opwire_core::algebra::{Algebra, Element, TensorAlgebra};
use opwire_core::corpus::{Corpus, CorpusConfig};
use opwire_core::dsl::{export_dot, parse_dsl, print_dsl, Workspace};
use opwire_core::functor::{transport_algebra, Transport};
use opwire_core::laws::{run_suite, LawResult, Suite};
use opwire_core::tensor::Tensor;
use opwire_core::types::{PortRef, Signature, TypeLabel};
use opwire_core::variants::OperadVariant;
use opwire_core::WiringDiagram;

const BUDGET: Duration = Duration::from_secs(60);

type Check = Result<String, String>;
type Criterion = (&'static str, fn(&Results) -> Check, Duration);

struct Results {
    core: Vec<LawResult>,
    causal: Vec<LawResult>,
    functor: Vec<LawResult>,
    polycat: Vec<LawResult>,
}

/// The named law must have run at least `min` cases, with tolerance no
/// looser than `tol`, and passed all of them.
fn law(rs: &[LawResult], name: &str, min: usize, tol: f64) -> Check {
    let r = rs.iter().find(|r| r.name == name).ok_or(format!("law {name} missing"))?;
    if r.cases < min {
        return Err(format!("{name}: only {} cases, need {min}", r.cases));
    }
    if r.tolerance > tol {
        return Err(format!("{name}: tolerance {:e} looser than {tol:e}", r.tolerance));
    }
    if !r.ok() {
        return Err(format!("{name}: {r}"));
    }
    Ok(format!("{name} {}/{} r={:.1e}", r.passed, r.cases, r.max_residual))
}

fn all(checks: Vec<Check>) -> Check {
    let mut notes = Vec::new();
    for c in checks {
        notes.push(c?);
    }
    Ok(notes.join(", "))
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn opwire(args: &[&str]) -> (i32, String) {
    let argv: Vec<String> = std::iter::once("opwire").chain(args.iter().copied()).map(String::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = opwire_cli::run(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap() + &String::from_utf8(err).unwrap())
}

fn c1(r: &Results) -> Check {
    all(vec![
        law(&r.core, "operad-associativity", 1000, 0.0),
        law(&r.core, "operad-unit", 1000, 0.0),
    ])
}

fn c2(r: &Results) -> Check {
    all(vec![
        law(&r.core, "smc-unitality", 500, 1e-9),
        law(&r.core, "smc-seq-associativity", 500, 1e-9),
        law(&r.core, "smc-interchange", 500, 1e-9),
        law(&r.core, "smc-swap-naturality", 500, 1e-9),
        law(&r.core, "smc-unitality-free", 1, 0.0),
    ])
}

fn c3(r: &Results) -> Check {
    all(vec![
        law(&r.core, "foliation-independence", 300, 1e-9),
        law(&r.core, "decompose-roundtrip", 300, 0.0),
        law(&r.core, "foliation-syntactic", 300, 0.0),
    ])
}

fn c4(r: &Results) -> Check {
    all(vec![
        law(&r.core, "functoriality-tensor", 1000, 1e-9),
        law(&r.core, "functoriality-matrix", 1000, 1e-9),
        law(&r.core, "functoriality-stochastic", 1000, 1e-12),
        law(&r.core, "identity-law", 1, 0.0),
    ])
}

fn c5(r: &Results) -> Check {
    all(vec![
        law(&r.causal, "ground-after-kernel", 500, 1e-12),
        law(&r.causal, "causal-confluence", 1, 0.0),
        law(&r.causal, "causal-soundness", 500, 1e-12),
    ])
}

/// The snake host with cup and cap slots, read in the tensor algebra
/// carried over to boxes: both bendings give the identity matrix.
fn snake_numeric(d: usize) -> Result<(), String> {
    let t = TypeLabel::new("T", d);
    let alg = transport_algebra(Box::new(TensorAlgebra), Transport::AlongAlpha).map_err(|e| e.to_string())?;
    let mut delta = vec![0.0; d * d];
    for i in 0..d {
        delta[i * d + i] = 1.0;
    }
    let delta = Tensor::new(vec![d, d], delta).unwrap();
    for (through_cup, through_cap) in [(0, 1), (1, 0)] {
        let w = WiringDiagram::builder(Signature::boxed(vec![t.clone()], vec![t.clone()]))
            .slot(Signature::boxed(vec![], vec![t.clone(), t.clone()]))
            .slot(Signature::boxed(vec![t.clone(), t.clone()], vec![]))
            .wire(PortRef::outer_in(0), PortRef::slot_in(1, through_cap))
            .wire(PortRef::slot_out(0, through_cap), PortRef::slot_in(1, through_cup))
            .wire(PortRef::slot_out(0, through_cup), PortRef::outer_out(0))
            .build()
            .map_err(|e| e.to_string())?;
        let r = alg
            .apply(&w, &[Element::Tensor(delta.clone()), Element::Tensor(delta.clone())])
            .map_err(|e| e.to_string())?;
        if r != Element::Tensor(delta.clone()) {
            return Err(format!("dimension {d}: snake gave {:?}", r.values()));
        }
    }
    Ok(())
}

fn c6(r: &Results) -> Check {
    let structural = law(&r.functor, "snake-yanking", 1, 0.0)?;
    for d in 2..=4 {
        snake_numeric(d)?;
    }
    Ok(format!("{structural}, tensor snake dims 2..4"))
}

fn c7(r: &Results) -> Check {
    all(vec![
        law(&r.functor, "alpha-beta-identity", 1, 0.0),
        law(&r.functor, "eta-naturality", 1000, 0.0),
        law(&r.functor, "three-shape-collapse", 1, 0.0),
        law(&r.functor, "eta-invertible", 1, 0.0),
    ])
}

fn c8(r: &Results) -> Check {
    all(vec![
        law(&r.polycat, "forest-preservation", 1, 0.0),
        law(&r.polycat, "par-associativity", 500, 0.0),
        law(&r.polycat, "interchange-host-left", 500, 0.0),
        law(&r.polycat, "interchange-host-right", 500, 0.0),
        law(&r.polycat, "interchange-guest-left", 500, 0.0),
        law(&r.polycat, "interchange-guest-right", 500, 0.0),
        law(&r.polycat, "multiple-wires-rejected", 100, 0.0),
    ])
}

fn c9(r: &Results) -> Check {
    all(vec![
        law(&r.core, "convex-matrix", 500, 1e-12),
        law(&r.core, "convex-stochastic", 500, 1e-12),
    ])
}

fn round_trip_corpus() -> Check {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("roundtrip");
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut diagrams = 0;
    for k in 0..50u64 {
        let mut c = Corpus::new(k, CorpusConfig::structural());
        let mut ws = Workspace::default();
        for v in OperadVariant::ALL {
            ws.insert_diagram(&format!("d_{}", v.name().to_lowercase()), v, c.of_variant(v))
                .map_err(|e| e.to_string())?;
        }
        let path = dir.join(format!("corpus_{k:02}.opw"));
        std::fs::write(&path, print_dsl(&ws)).map_err(|e| e.to_string())?;
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let back = parse_dsl(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        if back.canonical_summary() != ws.canonical_summary() {
            return Err(format!("{}: canonical forms changed", path.display()));
        }
        if print_dsl(&back) != text {
            return Err(format!("{}: second print differs", path.display()));
        }
        for (n, d) in &ws.diagrams {
            if export_dot(&d.diagram) != export_dot(&back.diagrams[n].diagram) {
                return Err(format!("{}: DOT of `{n}` changed across the round trip", path.display()));
            }
        }
        diagrams += ws.diagrams.len();
    }
    for f in ["chain.opw", "chain_matrix.opw", "causal.opw", "corpus.opw"] {
        let ws = parse_dsl(&std::fs::read_to_string(fixture(f)).unwrap()).map_err(|e| e.to_string())?;
        if parse_dsl(&print_dsl(&ws)).map_err(|e| e.to_string())?.canonical_summary() != ws.canonical_summary() {
            return Err(format!("{f}: round trip changed it"));
        }
    }
    Ok(format!("50 files / {diagrams} diagrams round-trip"))
}

fn json_tensor(v: &serde_json::Value) -> (Vec<usize>, Vec<f64>) {
    let shape = v["shape"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as usize).collect();
    let data = v["data"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    (shape, data)
}

fn eval_oracles() -> Check {
    let data: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(fixture("td.json")).unwrap()).unwrap();
    let (ts, t) = json_tensor(&data["elements"]["t"]);
    let (_, s) = json_tensor(&data["elements"]["s"]);
    let mut want = vec![0.0; ts[0]];
    for (i, w) in want.iter_mut().enumerate() {
        for j in 0..ts[1] {
            *w += t[i * ts[1] + j] * s[j];
        }
    }
    let want = format!("[{}]\n", want.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(","));
    let (code, got) = opwire(&["eval", &fixture("chain.opw"), "--diagram", "d", "--algebra", "tensor", "--data", &fixture("td.json")]);
    if code != 0 || got != want || want != "[7,16]\n" {
        return Err(format!("eval printed {got:?}, oracle {want:?}"));
    }

    let data: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(fixture("trace.json")).unwrap()).unwrap();
    let (is, i) = json_tensor(&data["elements"]["i"]);
    let trace: f64 = (0..is[0]).map(|k| i[k * is[1] + k]).sum();
    let dim = parse_dsl(&std::fs::read_to_string(fixture("chain.opw")).unwrap()).unwrap().types["B"];
    let (code, got) = opwire(&["eval", &fixture("chain.opw"), "--diagram", "tr", "--algebra", "tensor", "--data", &fixture("trace.json")]);
    if code != 0 || got.trim() != format!("{trace}") || trace != dim as f64 {
        return Err(format!("trace printed {got:?}, oracle {trace}, dim {dim}"));
    }
    for d in 1..=4 {
        let t = TypeLabel::new("T", d);
        let w = WiringDiagram::builder(Signature::dot(vec![]))
            .slot(Signature::dot(vec![t.clone(), t]))
            .wire(PortRef::slot_port(0, 0), PortRef::slot_port(0, 1))
            .build()
            .map_err(|e| e.to_string())?;
        let mut id = vec![0.0; d * d];
        for k in 0..d {
            id[k * d + k] = 1.0;
        }
        let r = TensorAlgebra
            .apply(&w, &[Element::Tensor(Tensor::new(vec![d, d], id).unwrap())])
            .map_err(|e| e.to_string())?;
        if r.values() != Some(vec![d as f64]) {
            return Err(format!("trace of identity on dimension {d} gave {:?}", r.values()));
        }
    }
    Ok("eval [7,16], trace(id) = dim for dims 1..4".into())
}

fn dot_stable() -> Check {
    let runs: Vec<(i32, String)> = (0..3)
        .map(|_| opwire(&["export-dot", &fixture("causal.opw"), "--diagram", "d"]))
        .collect();
    if runs.iter().any(|r| r.0 != 0 || r.1 != runs[0].1) {
        return Err("export-dot output differs between runs".into());
    }
    if runs[0].1.matches("-> \"ground\"").count() != 1 {
        return Err("expected one edge into the ground node".into());
    }
    Ok("export-dot byte-stable".into())
}

fn c10(_: &Results) -> Check {
    all(vec![round_trip_corpus(), eval_oracles(), dot_stable()])
}

fn main() {
    let seed = std::env::var("OPWIRE_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(7);
    let timed = |s: Suite| {
        let t = Instant::now();
        let r = run_suite(s, seed, None);
        (r, t.elapsed())
    };
    let (core, tc) = timed(Suite::Core);
    let (causal, ta) = timed(Suite::Causal);
    let (functor, tf) = timed(Suite::Functor);
    let (polycat, tp) = timed(Suite::Polycat);
    let results = Results {
        core,
        causal,
        functor,
        polycat,
    };
    let criteria: [Criterion; 10] = [
        ("operad associativity and unit", c1, tc),
        ("SMC extraction through matrix_eval", c2, tc),
        ("foliation independence", c3, tc),
        ("functoriality of algebras", c4, tc),
        ("causality", c5, ta),
        ("snake / yanking", c6, tf),
        ("alpha/beta equivalence", c7, tf),
        ("polycategory laws", c8, tp),
        ("convex enrichment", c9, tc),
        ("tooling", c10, Duration::ZERO),
    ];
    println!("acceptance, seed {seed}");
    let mut failed = 0;
    for (i, (title, f, suite_time)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let mut r = f(&results);
        let elapsed = t.elapsed() + *suite_time;
        if r.is_ok() && elapsed > BUDGET {
            r = Err(format!("took {elapsed:?}, over the {BUDGET:?} budget"));
        }
        match r {
            Ok(note) => println!("criterion {:>2} PASS {title} ({:.2}s): {note}", i + 1, elapsed.as_secs_f64()),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL {title}: {e}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 10 criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
