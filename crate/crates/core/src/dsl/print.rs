use std::fmt::Write;

use super::{DiagramDef, Workspace};
use crate::types::{Loc, PortRef, Signature, TypeLabel};

fn list(ls: &[TypeLabel]) -> String {
    if ls.is_empty() {
        "()".into()
    } else {
        ls.iter().map(|l| l.name().to_string()).collect::<Vec<_>>().join(", ")
    }
}

fn sig_text(s: &Signature) -> String {
    match s {
        Signature::Box { inputs, outputs } => format!("{} -> {}", list(inputs), list(outputs)),
        Signature::Dot { ports } => format!("dot {}", list(ports)),
        Signature::Empty => "empty".into(),
    }
}

fn port(p: PortRef, names: &[String]) -> String {
    let loc = match p.loc {
        Loc::Outer => "outer",
        Loc::Inner(s) => &names[s],
    };
    format!("{loc}.{}[{}]", p.face.keyword(), p.index)
}

fn diagram(out: &mut String, name: &str, d: &DiagramDef) {
    let w = &d.diagram;
    let names = &d.slot_names;
    writeln!(out, "diagram {name}({}) : {} {{", d.variant, sig_text(w.outer())).unwrap();
    let slots: Vec<String> = d
        .slot_decls
        .iter()
        .zip(names)
        .map(|(decl, n)| format!("{decl} as {n}"))
        .collect();
    if slots.is_empty() {
        out.push_str("  slots:\n");
    } else {
        writeln!(out, "  slots: {}", slots.join(", ")).unwrap();
    }
    for wire in w.wires() {
        let (a, b) = wire.ends();
        writeln!(out, "  wire {} -- {}", port(a, names), port(b, names)).unwrap();
    }
    for &g in w.grounds() {
        writeln!(out, "  ground {}", port(g, names)).unwrap();
    }
    for (l, n) in w.loops() {
        writeln!(out, "  loop {} {n}", l.name()).unwrap();
    }
    for &s in w.discarded() {
        writeln!(out, "  discard {}", names[s]).unwrap();
    }
    out.push_str("}\n");
}

/// Deterministic rendering: types, then declarations, then diagrams, each
/// group separated by a blank line. Outer signatures are always explicit.
pub fn print_dsl(ws: &Workspace) -> String {
    let mut groups = Vec::new();
    if !ws.types.is_empty() {
        groups.push(ws.types.iter().map(|(n, d)| format!("type {n}({d})\n")).collect::<String>());
    }
    if !ws.decls.is_empty() {
        let mut g = String::new();
        for (n, s) in &ws.decls {
            match s {
                Signature::Dot { ports } => writeln!(g, "dot {n}: {}", list(ports)).unwrap(),
                Signature::Box { inputs, outputs } => {
                    writeln!(g, "box {n}: {} -> {}", list(inputs), list(outputs)).unwrap()
                }
                Signature::Empty => unreachable!("declarations are boxes or dots"),
            }
        }
        groups.push(g);
    }
    for (n, d) in &ws.diagrams {
        let mut g = String::new();
        diagram(&mut g, n, d);
        groups.push(g);
    }
    groups.join("\n")
}

#[cfg(test)]
mod tests {
    use super::super::parse_dsl;
    use super::*;

    #[test]
    fn empty_and_single() {
        assert_eq!(print_dsl(&Workspace::default()), "");
        assert_eq!(print_dsl(&parse_dsl("type A(2)").unwrap()), "type A(2)\n");
    }

    #[test]
    fn round_trip() {
        let t = "type A(2)\ntype B(3)\nbox f: A -> B, A\nbox g: B -> ()\n\
                 diagram d(WGround) { slots: f as x, g as y\n wire outer.in[0] -- x.in[0]\n\
                 wire x.out[0] -- y.in[0]\n ground x.out[1]\n discard y }";
        // y is discarded yet wired: rejected.
        assert!(parse_dsl(t).is_err());
        let t = t.replace("wire x.out[0] -- y.in[0]\n", "ground x.out[0]\n");
        let ws = parse_dsl(&t).unwrap();
        let printed = print_dsl(&ws);
        let again = parse_dsl(&printed).unwrap();
        assert_eq!(ws.canonical_summary(), again.canonical_summary());
        assert_eq!(print_dsl(&again), printed);
        assert!(printed.contains("diagram d(WGround) : A -> () {"));
    }
}
