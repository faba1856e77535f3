//! The `opwire` command-line driver.
//!
//! Exit codes: 0 success, 1 parse or validation failure, 2 a law failed,
//! 3 I/O error. With `--json`, errors go to stderr as one JSON object.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use opwire_core::algebra::{algebra_by_name, Element};
use opwire_core::causal::normalize_causal;
use opwire_core::dsl::{element_to_json, export_dot_named, load_data, parse_dsl, print_dsl, DiagramDef, Workspace};
use opwire_core::expression::{decompose_acyclic, Expression};
use opwire_core::laws::{run_suite, LawResult, Suite};
use opwire_core::variants::validate;
use serde_json::{json, Value};

const DEFAULT_SEED: u64 = 2024;

#[derive(Parser, Debug)]
#[command(name = "opwire", version, about = "Wiring diagrams, their composition and algebras")]
struct Cli {
    /// Machine-readable output; errors as JSON on stderr.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check that every diagram (or one) is legal under its variant.
    Validate {
        file: PathBuf,
        #[arg(long)]
        diagram: Option<String>,
    },
    /// Substitute diagram GUEST into slot SLOT of diagram HOST.
    Compose {
        file: PathBuf,
        #[arg(long)]
        host: String,
        /// Slot name or index.
        #[arg(long)]
        slot: String,
        #[arg(long)]
        guest: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Causal normal form of a WGround diagram.
    Normalize {
        file: PathBuf,
        #[arg(long)]
        diagram: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a diagram in an algebra.
    Eval {
        file: PathBuf,
        #[arg(long)]
        diagram: String,
        #[arg(long, value_parser = ["free", "tensor", "matrix", "stochastic"])]
        algebra: String,
        #[arg(long)]
        data: PathBuf,
    },
    /// Print the generator decomposition of an acyclic diagram.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        diagram: String,
    },
    /// Run a law suite on the random corpus and on the diagrams in FILE.
    Laws {
        file: PathBuf,
        #[arg(long)]
        suite: Suite,
        /// Defaults to $OPWIRE_SEED, then 2024.
        #[arg(long)]
        seed: Option<u64>,
        /// Cases per law; each law has its own default.
        #[arg(long)]
        cases: Option<usize>,
    },
    /// Graphviz rendering of one diagram.
    ExportDot {
        file: PathBuf,
        #[arg(long)]
        diagram: String,
    },
}

#[derive(Debug)]
enum Failure {
    Invalid { kind: String, message: String, detail: Value },
    Law(String),
    Io(String),
}

impl Failure {
    fn invalid(kind: &str, message: impl ToString) -> Self {
        Failure::Invalid {
            kind: kind.to_string(),
            message: message.to_string(),
            detail: Value::Null,
        }
    }

    fn code(&self) -> i32 {
        match self {
            Failure::Invalid { .. } => 1,
            Failure::Law(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Failure::Invalid { kind, message, detail } => {
                let mut v = json!({"error": kind, "message": message});
                if !detail.is_null() {
                    v["detail"] = detail.clone();
                }
                v
            }
            Failure::Law(m) => json!({"error": "LawFailure", "message": m}),
            Failure::Io(m) => json!({"error": "IoError", "message": m}),
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invalid { message, .. } | Failure::Law(message) | Failure::Io(message) => message,
        }
    }
}

type Out<'a> = &'a mut dyn Write;

/// Run with process stdout and stderr.
pub fn run_command(argv: &[String]) -> i32 {
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    run(argv, &mut out, &mut err)
}

/// Run with the given sinks. `argv[0]` is the program name.
pub fn run(argv: &[String], out: Out, err: Out) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let json = cli.json;
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = if json {
                writeln!(err, "{}", f.to_json())
            } else {
                writeln!(err, "error: {}", f.message())
            };
            f.code()
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Workspace, Failure> {
    let text = read(path)?;
    parse_dsl(&text).map_err(|e| {
        let detail = match &e {
            opwire_core::dsl::DslError::Syntax { line, col, expected, .. } => {
                json!({"line": line, "col": col, "expected": expected})
            }
            opwire_core::dsl::DslError::UnknownName { line, col, .. }
            | opwire_core::dsl::DslError::Duplicate { line, col, .. } => json!({"line": line, "col": col}),
            opwire_core::dsl::DslError::VariantViolation { report, .. } => json!(report),
            _ => Value::Null,
        };
        Failure::Invalid {
            kind: e.kind().to_string(),
            message: format!("{}: {e}", path.display()),
            detail,
        }
    })
}

fn find<'w>(ws: &'w Workspace, name: &str) -> Result<&'w DiagramDef, Failure> {
    ws.diagram(name)
        .ok_or_else(|| Failure::invalid("UnknownName", format!("no diagram named `{name}`")))
}

fn emit(text: &str, output: Option<&Path>, out: Out) -> Result<(), Failure> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string())),
    }
}

fn say(out: Out, line: impl std::fmt::Display) -> Result<(), Failure> {
    writeln!(out, "{line}").map_err(|e| Failure::Io(e.to_string()))
}

fn dispatch(cli: Cli, out: Out) -> Result<i32, Failure> {
    let json = cli.json;
    match cli.cmd {
        Cmd::Validate { file, diagram } => {
            let ws = load(&file)?;
            let defs: Vec<(&str, &DiagramDef)> = match &diagram {
                Some(n) => vec![(n.as_str(), find(&ws, n)?)],
                None => ws.diagrams.iter().map(|(n, d)| (n.as_str(), d)).collect(),
            };
            let mut rows = Vec::new();
            for (name, d) in defs {
                // Load already validated; re-checking keeps this honest if that changes.
                let report = validate(d.variant, &d.diagram);
                if !report.ok() {
                    return Err(Failure::Invalid {
                        kind: "VariantViolation".into(),
                        message: format!("diagram `{name}` is not a legal {} wiring: {report}", d.variant),
                        detail: json!(report),
                    });
                }
                let hash = d.diagram.canonical_form().hash().to_string();
                if json {
                    rows.push(json!({"diagram": name, "variant": d.variant.name(), "slots": d.diagram.slot_count(), "hash": hash}));
                } else {
                    say(out, format!("{name}: ok ({}, {} slots, {})", d.variant, d.diagram.slot_count(), &hash[..12]))?;
                }
            }
            if json {
                say(out, Value::Array(rows))?;
            }
            Ok(0)
        }
        Cmd::Compose {
            file,
            host,
            slot,
            guest,
            output,
        } => {
            let mut ws = load(&file)?;
            let h = find(&ws, &host)?;
            let g = find(&ws, &guest)?;
            let k = match h.slot_names.iter().position(|n| *n == slot) {
                Some(k) => k,
                None => slot
                    .parse::<usize>()
                    .ok()
                    .filter(|&k| k < h.slot_names.len())
                    .ok_or_else(|| Failure::invalid("UnknownName", format!("diagram `{host}` has no slot `{slot}`")))?,
            };
            if h.variant != g.variant {
                return Err(Failure::invalid(
                    "VariantMismatch",
                    format!("cannot substitute a {} diagram into a {} diagram", g.variant, h.variant),
                ));
            }
            let variant = h.variant;
            let w = h
                .diagram
                .substitute(k, &g.diagram)
                .map_err(|e| Failure::invalid("InvalidDiagram", e))?;
            let report = validate(variant, &w);
            if !report.ok() {
                return Err(Failure::Invalid {
                    kind: "VariantViolation".into(),
                    message: format!("composite is not a legal {variant} wiring: {report}"),
                    detail: json!(report),
                });
            }
            let name = ws.fresh_name(&format!("{host}_{}_{guest}", h.slot_names[k]));
            ws.insert_diagram(&name, variant, w)
                .map_err(|e| Failure::invalid(e.kind(), e))?;
            emit(&print_dsl(&ws), output.as_deref(), out)?;
            Ok(0)
        }
        Cmd::Normalize { file, diagram, output } => {
            let mut ws = load(&file)?;
            let d = find(&ws, &diagram)?.clone();
            let (nf, trace) = normalize_causal(&d.diagram).map_err(|e| Failure::invalid("NotCausal", e))?;
            let name = ws.fresh_name(&format!("{diagram}_nf"));
            let mut text = String::new();
            for s in &trace.steps {
                text.push_str(&format!("# discard {}", d.slot_names[s.slot]));
                if !s.regrounded.is_empty() {
                    text.push_str(&format!(", ground {}", s.regrounded.join(" ")));
                }
                text.push('\n');
            }
            ws.diagrams.insert(name, DiagramDef { diagram: nf, ..d });
            text.push_str(&print_dsl(&ws));
            emit(&text, output.as_deref(), out)?;
            Ok(0)
        }
        Cmd::Eval {
            file,
            diagram,
            algebra,
            data,
        } => {
            let ws = load(&file)?;
            let d = find(&ws, &diagram)?;
            let alg = algebra_by_name(&algebra, d.variant).expect("clap restricts the algebra names");
            let elements =
                load_data(&read(&data)?, d, alg.as_ref()).map_err(|e| Failure::invalid(e.kind(), e))?;
            let r = alg
                .apply(&d.diagram, &elements)
                .map_err(|e| Failure::invalid("EvalError", e))?;
            if json {
                say(out, element_to_json(&r))?;
            } else {
                say(out, compact(&r))?;
            }
            Ok(0)
        }
        Cmd::Decompose { file, diagram } => {
            let ws = load(&file)?;
            let d = find(&ws, &diagram)?;
            let e = decompose_acyclic(&d.diagram).map_err(|e| Failure::invalid("NotAcyclic", e))?;
            let text = render(&e, &d.slot_names);
            if json {
                say(out, json!({"diagram": diagram, "expression": text}))?;
            } else {
                say(out, text)?;
            }
            Ok(0)
        }
        Cmd::Laws {
            file,
            suite,
            seed,
            cases,
        } => {
            let ws = load(&file)?;
            let seed = match seed {
                Some(s) => s,
                None => match std::env::var("OPWIRE_SEED") {
                    Ok(v) => v
                        .parse()
                        .map_err(|_| Failure::invalid("BadSeed", format!("OPWIRE_SEED=`{v}` is not an integer")))?,
                    Err(_) => DEFAULT_SEED,
                },
            };
            let mut results = run_suite(suite, seed, cases);
            results.push(file_law(&ws));
            if json {
                say(out, json!({"suite": suite.name(), "seed": seed, "laws": results}))?;
            } else {
                say(out, format!("suite {} seed {seed}", suite.name()))?;
                for r in &results {
                    say(out, r)?;
                }
            }
            let failed: Vec<&str> = results.iter().filter(|r| !r.ok()).map(|r| r.name.as_str()).collect();
            if failed.is_empty() {
                if !json {
                    say(out, format!("all {} laws passed", results.len()))?;
                }
                Ok(0)
            } else {
                Err(Failure::Law(format!("failed: {}", failed.join(", "))))
            }
        }
        Cmd::ExportDot { file, diagram } => {
            let ws = load(&file)?;
            let d = find(&ws, &diagram)?;
            emit(&export_dot_named(&d.diagram, &d.slot_names), None, out)?;
            Ok(0)
        }
    }
}

/// Diagrams in the input file: each must print and reparse to the same
/// canonical form, and substituting identities into it must change nothing.
fn file_law(ws: &Workspace) -> LawResult {
    let mut res = LawResult {
        name: "file-diagrams".into(),
        cases: ws.diagrams.len(),
        passed: 0,
        max_residual: 0.0,
        tolerance: 0.0,
        first_failure: None,
    };
    let printed = parse_dsl(&print_dsl(ws));
    for (name, d) in &ws.diagrams {
        let reparsed = printed
            .as_ref()
            .ok()
            .and_then(|p| p.diagram(name))
            .is_some_and(|p| p.diagram.canonical_form() == d.diagram.canonical_form());
        let unit = (0..d.diagram.slot_count()).all(|k| {
            opwire_core::WiringDiagram::identity(&d.diagram.slots()[k])
                .and_then(|id| d.diagram.substitute(k, &id))
                .is_ok_and(|w| w.canonical_form() == d.diagram.canonical_form())
        });
        if reparsed && unit {
            res.passed += 1;
        } else {
            res.max_residual = f64::INFINITY;
            let what = if reparsed { "identity substitution" } else { "print/parse round trip" };
            res.first_failure.get_or_insert_with(|| format!("diagram `{name}`: {what} changed it"));
        }
    }
    res
}

fn render(e: &Expression, names: &[String]) -> String {
    match e {
        Expression::Slot(i) => names[*i].clone(),
        Expression::Seq(a, b) => format!("({} ; {})", render(a, names), render(b, names)),
        Expression::Par(a, b) => format!("({} * {})", render(a, names), render(b, names)),
        other => other.to_string(),
    }
}

fn num(v: f64) -> String {
    if v.is_finite() && v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

fn nested(data: &[f64], shape: &[usize]) -> String {
    match shape {
        [] => num(data[0]),
        [_] => format!("[{}]", data.iter().map(|&v| num(v)).collect::<Vec<_>>().join(",")),
        [n, rest @ ..] => {
            let stride = data.len() / n.max(&1);
            let parts: Vec<String> = (0..*n).map(|i| nested(&data[i * stride..(i + 1) * stride], rest)).collect();
            format!("[{}]", parts.join(","))
        }
    }
}

fn compact(e: &Element) -> String {
    match e {
        Element::Tensor(t) => nested(t.data(), t.shape()),
        Element::Matrix(m) | Element::Kernel(m) => nested(m.data(), &[m.rows(), m.cols()]),
        Element::Scalar(v) => num(*v),
        Element::Free(f) => format!(
            "{}\n{}",
            f.labels.join(" "),
            f.diagram.canonical_form().text().trim_end()
        ),
    }
}
