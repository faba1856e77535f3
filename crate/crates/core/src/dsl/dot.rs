use std::fmt::Write;

use crate::diagram::WiringDiagram;
use crate::types::{Loc, PortRef};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn quote(s: &str) -> String {
    format!("\"{}\"", escape(s))
}

/// Graphviz rendering with slots named `s0`, `s1`, ...
pub fn export_dot(w: &WiringDiagram) -> String {
    let names: Vec<String> = (0..w.slot_count()).map(|i| format!("s{i}")).collect();
    export_dot_named(w, &names)
}

/// Graphviz rendering. Slots are boxes (dashed when discarded), outer
/// ports are plain boundary nodes, every ground points at one shared
/// `ground` node, and floating loops are circles. Directed wires run from
/// source to sink; wires between two ports of the same polarity, and all
/// dot wires, are drawn without arrowheads.
pub fn export_dot_named(w: &WiringDiagram, names: &[String]) -> String {
    let mut out = String::from("digraph wiring {\n  rankdir=LR;\n");
    let node = |p: PortRef| match p.loc {
        Loc::Outer => quote(&format!("outer.{}[{}]", p.face.keyword(), p.index)),
        Loc::Inner(s) => quote(&names[s]),
    };
    for (f, i, l) in w.outer().ports() {
        writeln!(
            out,
            "  {} [shape=plaintext, label={}];",
            node(PortRef::new(Loc::Outer, f, i)),
            quote(&format!("{}[{i}]: {}", f.keyword(), l.name()))
        )
        .unwrap();
    }
    for (s, sig) in w.slots().iter().enumerate() {
        let style = if w.is_discarded(s) { ", style=dashed" } else { "" };
        writeln!(
            out,
            "  {} [shape=box{style}, label=\"{}\\n{}\"];",
            quote(&names[s]),
            escape(&names[s]),
            escape(&sig.to_string())
        )
        .unwrap();
    }
    if !w.grounds().is_empty() {
        out.push_str("  \"ground\" [shape=point];\n");
    }
    let mut k = 0;
    for (l, &n) in w.loops() {
        for _ in 0..n {
            writeln!(out, "  \"loop{k}\" [shape=circle, label={}];", quote(l.name())).unwrap();
            k += 1;
        }
    }
    let end = |p: PortRef| match p.loc {
        Loc::Outer => String::new(),
        Loc::Inner(_) => format!("{}[{}]", p.face.keyword(), p.index),
    };
    for wire in w.wires() {
        let (mut a, mut b) = wire.ends();
        let directed = a.is_source() != b.is_source() && (a.is_source() || a.is_sink()) && (b.is_source() || b.is_sink());
        if directed && b.is_source() {
            std::mem::swap(&mut a, &mut b);
        }
        let label = w.label(a).map(|l| l.name().to_string()).unwrap_or_default();
        writeln!(
            out,
            "  {} -> {} [label={}, taillabel={}, headlabel={}{}];",
            node(a),
            node(b),
            quote(&label),
            quote(&end(a)),
            quote(&end(b)),
            if directed { "" } else { ", dir=none" }
        )
        .unwrap();
    }
    for &g in w.grounds() {
        let label = w.label(g).map(|l| l.name().to_string()).unwrap_or_default();
        writeln!(out, "  {} -> \"ground\" [label={}, taillabel={}];", node(g), quote(&label), quote(&end(g))).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Signature, TypeLabel};

    #[test]
    fn identity_graph() {
        let a = TypeLabel::new("A", 2);
        let w = WiringDiagram::identity(&Signature::boxed(vec![a.clone()], vec![a])).unwrap();
        let d = export_dot(&w);
        assert_eq!(d.matches("shape=box").count(), 1);
        assert_eq!(d.matches("\" -> \"").count(), 2);
        assert!(d.contains("\"outer.in[0]\" -> \"s0\""));
        assert!(d.contains("\"s0\" -> \"outer.out[0]\""));
        assert_eq!(d, export_dot(&w));
    }

    #[test]
    fn ground_node_in_degree() {
        let a = TypeLabel::new("A", 2);
        let w = WiringDiagram::builder(Signature::boxed(vec![a.clone()], vec![]))
            .slot(Signature::boxed(vec![a.clone()], vec![a]))
            .wire(PortRef::outer_in(0), PortRef::slot_in(0, 0))
            .ground(PortRef::slot_out(0, 0))
            .build()
            .unwrap();
        let d = export_dot(&w);
        assert_eq!(d.matches("-> \"ground\"").count(), 1);
        assert!(d.contains("\"ground\" [shape=point]"));
    }
}
