//! Which wirings are legal operations in each wiring operad, and the named
//! generator wirings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagram::{DiagramError, WiringDiagram};
use crate::types::{Loc, PortRef, Signature, TypeLabel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OperadVariant {
    /// Acyclic wirings of boxes.
    WA,
    /// Arbitrary (cyclic) pairings of box ports.
    WC,
    /// Wirings of dots.
    WD,
    /// Acyclic wirings whose slot graph is a forest.
    WUA,
    /// Forest wirings whose slot graph is connected.
    WUAC,
    /// Acyclic wirings with grounds and discarded slots.
    WGround,
}

impl OperadVariant {
    pub const ALL: [OperadVariant; 6] = [
        OperadVariant::WA,
        OperadVariant::WC,
        OperadVariant::WD,
        OperadVariant::WUA,
        OperadVariant::WUAC,
        OperadVariant::WGround,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OperadVariant::WA => "WA",
            OperadVariant::WC => "WC",
            OperadVariant::WD => "WD",
            OperadVariant::WUA => "WUA",
            OperadVariant::WUAC => "WUAC",
            OperadVariant::WGround => "WGround",
        }
    }

    pub fn uses_dots(self) -> bool {
        self == OperadVariant::WD
    }
}

impl fmt::Display for OperadVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperadVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OperadVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown operad variant `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rule {
    BoxSignature,
    DotSignature,
    EmptyOuter,
    Polarity,
    GroundPresent,
    LoopPresent,
    DiscardPresent,
    Cycle,
    NotForest,
    Disconnected,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::BoxSignature => "box-signature",
            Rule::DotSignature => "dot-signature",
            Rule::EmptyOuter => "empty-outer",
            Rule::Polarity => "polarity",
            Rule::GroundPresent => "ground-present",
            Rule::LoopPresent => "loop-present",
            Rule::DiscardPresent => "discard-present",
            Rule::Cycle => "cycle",
            Rule::NotForest => "not-forest",
            Rule::Disconnected => "disconnected",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    fn push(&mut self, rule: Rule, detail: impl Into<String>) {
        self.violations.push(Violation {
            rule,
            detail: detail.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}: {}", v.rule.id(), v.detail)?;
        }
        Ok(())
    }
}

pub fn validate(variant: OperadVariant, w: &WiringDiagram) -> ValidationReport {
    let mut report = ValidationReport::default();
    use OperadVariant::*;

    let want_dots = variant.uses_dots();
    let outer_ok = match w.outer() {
        Signature::Box { .. } => !want_dots,
        Signature::Dot { .. } => want_dots,
        Signature::Empty => variant == WGround,
    };
    if !outer_ok {
        let rule = if w.outer().is_empty_object() {
            Rule::EmptyOuter
        } else if want_dots {
            Rule::DotSignature
        } else {
            Rule::BoxSignature
        };
        report.push(rule, format!("outer signature {}", w.outer()));
    }
    for (i, s) in w.slots().iter().enumerate() {
        let ok = if want_dots { s.is_dot() } else { s.is_box() };
        if !ok {
            let rule = if want_dots { Rule::DotSignature } else { Rule::BoxSignature };
            report.push(rule, format!("slot {i} has signature {s}"));
        }
    }

    if variant != WGround {
        for g in w.grounds() {
            report.push(Rule::GroundPresent, format!("ground on {g}"));
        }
        for &d in w.discarded() {
            report.push(Rule::DiscardPresent, format!("slot {d} is discarded"));
        }
    }
    if matches!(variant, WA | WUA | WUAC | WGround) {
        for (l, n) in w.loops() {
            report.push(Rule::LoopPresent, format!("{n} loop(s) of {l}"));
        }
        for wire in w.wires() {
            let (a, b) = wire.ends();
            if !((a.is_source() && b.is_sink()) || (a.is_sink() && b.is_source())) {
                report.push(Rule::Polarity, format!("wire {wire} does not join a source to a sink"));
            }
        }
        if let Some(cycle) = find_slot_cycle(w) {
            let path = cycle
                .iter()
                .map(|s| format!("s{s}"))
                .collect::<Vec<_>>()
                .join(" -> ");
            report.push(Rule::Cycle, format!("slot cycle {path}"));
        }
    }
    if matches!(variant, WUA | WUAC) {
        if let Some(wire) = first_non_forest_edge(w) {
            report.push(
                Rule::NotForest,
                format!("wire {wire} closes an undirected cycle between slots"),
            );
        }
    }
    if variant == WUAC {
        let comps = slot_components(w);
        if comps > 1 {
            report.push(Rule::Disconnected, format!("slot graph has {comps} components"));
        }
    }
    report
}

/// Directed producer -> consumer edges between slots, one per internal wire.
pub(crate) fn slot_edges(w: &WiringDiagram) -> Vec<(usize, usize)> {
    w.wires()
        .iter()
        .filter_map(|wire| {
            let (a, b) = wire.ends();
            let (src, dst) = if a.is_source() { (a, b) } else { (b, a) };
            match (src.loc, dst.loc) {
                (Loc::Inner(x), Loc::Inner(y)) if src.is_source() && dst.is_sink() => Some((x, y)),
                _ => None,
            }
        })
        .collect()
}

fn find_slot_cycle(w: &WiringDiagram) -> Option<Vec<usize>> {
    let n = w.slot_count();
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (x, y) in slot_edges(w) {
        succ[x].insert(y);
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    let mut stack: Vec<usize> = Vec::new();
    fn dfs(
        v: usize,
        succ: &[BTreeSet<usize>],
        state: &mut [u8],
        stack: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        state[v] = 1;
        stack.push(v);
        for &u in &succ[v] {
            if state[u] == 1 {
                let pos = stack.iter().position(|&x| x == u).unwrap();
                let mut cyc = stack[pos..].to_vec();
                cyc.push(u);
                return Some(cyc);
            }
            if state[u] == 0 {
                if let Some(c) = dfs(u, succ, state, stack) {
                    return Some(c);
                }
            }
        }
        stack.pop();
        state[v] = 2;
        None
    }
    (0..n).find_map(|v| {
        if state[v] == 0 {
            dfs(v, &succ, &mut state, &mut stack)
        } else {
            None
        }
    })
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

/// Undirected slot-to-slot wires, regardless of polarity.
fn undirected_slot_wires(w: &WiringDiagram) -> impl Iterator<Item = (usize, usize, &crate::diagram::Wire)> {
    w.wires().iter().filter_map(|wire| {
        let (a, b) = wire.ends();
        match (a.loc, b.loc) {
            (Loc::Inner(x), Loc::Inner(y)) => Some((x, y, wire)),
            _ => None,
        }
    })
}

fn first_non_forest_edge(w: &WiringDiagram) -> Option<crate::diagram::Wire> {
    let mut uf = UnionFind::new(w.slot_count());
    for (x, y, wire) in undirected_slot_wires(w) {
        if !uf.union(x, y) {
            return Some(*wire);
        }
    }
    None
}

/// Number of connected components of the slot multigraph; zero slots count
/// as one component.
pub fn slot_components(w: &WiringDiagram) -> usize {
    let n = w.slot_count();
    if n == 0 {
        return 1;
    }
    let mut uf = UnionFind::new(n);
    let mut comps = n;
    for (x, y, _) in undirected_slot_wires(w) {
        if uf.union(x, y) {
            comps -= 1;
        }
    }
    comps
}

/// The named generator wirings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    /// Two slots `a -> b` and `b -> c` chained.
    Seq {
        a: Vec<TypeLabel>,
        b: Vec<TypeLabel>,
        c: Vec<TypeLabel>,
    },
    /// Two boxes side by side.
    Par { first: Signature, second: Signature },
    /// No slots; every outer input wired to the matching output.
    Id(Vec<TypeLabel>),
    /// No slots; the `a` bundle crosses over the `b` bundle.
    Swap { a: Vec<TypeLabel>, b: Vec<TypeLabel> },
    /// No slots; outer outputs 0 and 1 paired.
    Cup(TypeLabel),
    /// No slots; outer inputs 0 and 1 paired.
    Cap(TypeLabel),
    /// No slots; the single outer input is grounded.
    GroundWire(TypeLabel),
    /// Empty outer boundary around a single discarded slot.
    OperadicDiscard(Signature),
}

pub fn generator(kind: &Generator) -> Result<WiringDiagram, DiagramError> {
    let bx = |i: &[TypeLabel], o: &[TypeLabel]| Signature::boxed(i.to_vec(), o.to_vec());
    match kind {
        Generator::Seq { a, b, c } => {
            let mut d = WiringDiagram::builder(bx(a, c)).slot(bx(a, b)).slot(bx(b, c));
            for i in 0..a.len() {
                d = d.wire(PortRef::outer_in(i), PortRef::slot_in(0, i));
            }
            for j in 0..b.len() {
                d = d.wire(PortRef::slot_out(0, j), PortRef::slot_in(1, j));
            }
            for k in 0..c.len() {
                d = d.wire(PortRef::slot_out(1, k), PortRef::outer_out(k));
            }
            d.build()
        }
        Generator::Par { first, second } => {
            let (i1, o1) = (first.inputs(), first.outputs());
            let (i2, o2) = (second.inputs(), second.outputs());
            let outer = bx(&[i1, i2].concat(), &[o1, o2].concat());
            let mut d = WiringDiagram::builder(outer).slot(first.clone()).slot(second.clone());
            for i in 0..i1.len() {
                d = d.wire(PortRef::outer_in(i), PortRef::slot_in(0, i));
            }
            for i in 0..i2.len() {
                d = d.wire(PortRef::outer_in(i1.len() + i), PortRef::slot_in(1, i));
            }
            for j in 0..o1.len() {
                d = d.wire(PortRef::slot_out(0, j), PortRef::outer_out(j));
            }
            for j in 0..o2.len() {
                d = d.wire(PortRef::slot_out(1, j), PortRef::outer_out(o1.len() + j));
            }
            d.build()
        }
        Generator::Id(ts) => {
            let mut d = WiringDiagram::builder(bx(ts, ts));
            for i in 0..ts.len() {
                d = d.wire(PortRef::outer_in(i), PortRef::outer_out(i));
            }
            d.build()
        }
        Generator::Swap { a, b } => {
            let outer = bx(&[a.as_slice(), b].concat(), &[b.as_slice(), a].concat());
            let mut d = WiringDiagram::builder(outer);
            for i in 0..a.len() {
                d = d.wire(PortRef::outer_in(i), PortRef::outer_out(b.len() + i));
            }
            for j in 0..b.len() {
                d = d.wire(PortRef::outer_in(a.len() + j), PortRef::outer_out(j));
            }
            d.build()
        }
        Generator::Cup(t) => WiringDiagram::builder(bx(&[], &[t.clone(), t.clone()]))
            .wire(PortRef::outer_out(0), PortRef::outer_out(1))
            .build(),
        Generator::Cap(t) => WiringDiagram::builder(bx(&[t.clone(), t.clone()], &[]))
            .wire(PortRef::outer_in(0), PortRef::outer_in(1))
            .build(),
        Generator::GroundWire(t) => WiringDiagram::builder(bx(std::slice::from_ref(t), &[]))
            .ground(PortRef::outer_in(0))
            .build(),
        Generator::OperadicDiscard(sig) => WiringDiagram::builder(Signature::Empty)
            .slot(sig.clone())
            .discard(0)
            .build(),
    }
}

/// Slot-level predecessor sets over internal wires, for acyclic diagrams.
pub(crate) fn predecessors(w: &WiringDiagram) -> BTreeMap<usize, BTreeSet<usize>> {
    let mut preds: BTreeMap<usize, BTreeSet<usize>> =
        (0..w.slot_count()).map(|i| (i, BTreeSet::new())).collect();
    for (x, y) in slot_edges(w) {
        preds.entry(y).or_default().insert(x);
    }
    preds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::diagrams_equal;

    fn a() -> TypeLabel {
        TypeLabel::new("A", 2)
    }
    fn b() -> TypeLabel {
        TypeLabel::new("B", 3)
    }

    #[test]
    fn id_validates_under_wa() {
        let id = generator(&Generator::Id(vec![a()])).unwrap();
        assert!(validate(OperadVariant::WA, &id).ok());
    }

    #[test]
    fn double_wire_is_not_a_forest() {
        let s1 = Signature::boxed(vec![], vec![a(), b()]);
        let s2 = Signature::boxed(vec![a(), b()], vec![]);
        let w = WiringDiagram::builder(Signature::boxed(vec![], vec![]))
            .slot(s1)
            .slot(s2)
            .wire(PortRef::slot_out(0, 0), PortRef::slot_in(1, 0))
            .wire(PortRef::slot_out(0, 1), PortRef::slot_in(1, 1))
            .build()
            .unwrap();
        assert!(validate(OperadVariant::WA, &w).ok());
        let r = validate(OperadVariant::WUA, &w);
        assert!(r.has(Rule::NotForest), "{r}");
    }

    #[test]
    fn cycle_reported() {
        let s = Signature::boxed(vec![a()], vec![a()]);
        let w = WiringDiagram::builder(Signature::boxed(vec![], vec![]))
            .slot(s.clone())
            .slot(s)
            .wire(PortRef::slot_out(0, 0), PortRef::slot_in(1, 0))
            .wire(PortRef::slot_out(1, 0), PortRef::slot_in(0, 0))
            .build()
            .unwrap();
        let r = validate(OperadVariant::WA, &w);
        assert!(r.has(Rule::Cycle));
        assert!(r.to_string().contains("s0 -> s1 -> s0"), "{r}");
        assert!(validate(OperadVariant::WC, &w).ok());
    }

    #[test]
    fn ground_legal_only_in_wground() {
        let g = generator(&Generator::GroundWire(a())).unwrap();
        assert!(validate(OperadVariant::WA, &g).has(Rule::GroundPresent));
        assert!(validate(OperadVariant::WGround, &g).ok());
    }

    #[test]
    fn cup_cap_legal_in_wc_only() {
        let cup = generator(&Generator::Cup(a())).unwrap();
        assert!(validate(OperadVariant::WC, &cup).ok());
        assert!(validate(OperadVariant::WA, &cup).has(Rule::Polarity));
    }

    #[test]
    fn operadic_discard_shape() {
        let sig = Signature::boxed(vec![a()], vec![b()]);
        let d = generator(&Generator::OperadicDiscard(sig.clone())).unwrap();
        assert_eq!(d.outer(), &Signature::Empty);
        assert_eq!(d.slots(), &[sig]);
        assert!(d.is_discarded(0));
        assert!(validate(OperadVariant::WGround, &d).ok());
        assert!(validate(OperadVariant::WA, &d).has(Rule::EmptyOuter));
    }

    #[test]
    fn snake_yanks_to_identity() {
        let t = a();
        let cup = generator(&Generator::Cup(t.clone())).unwrap();
        let cap = generator(&Generator::Cap(t.clone())).unwrap();
        let id = generator(&Generator::Id(vec![t.clone()])).unwrap();
        for bend in [false, true] {
            let (cup_out, cap_in) = if bend { (1, 0) } else { (0, 1) };
            let host = WiringDiagram::builder(Signature::boxed(vec![t.clone()], vec![t.clone()]))
                .slot(cup.outer().clone())
                .slot(cap.outer().clone())
                .wire(PortRef::outer_in(0), PortRef::slot_in(1, cap_in))
                .wire(PortRef::slot_out(0, 1 - cup_out), PortRef::slot_in(1, 1 - cap_in))
                .wire(PortRef::slot_out(0, cup_out), PortRef::outer_out(0))
                .build()
                .unwrap();
            let fused = host.substitute(1, &cap).unwrap().substitute(0, &cup).unwrap();
            assert!(diagrams_equal(&fused, &id), "bend {bend}: {}", fused.canonical_form());
        }
    }

    #[test]
    fn wuac_connectivity() {
        let s = Signature::boxed(vec![a()], vec![a()]);
        let par = generator(&Generator::Par { first: s.clone(), second: s.clone() }).unwrap();
        assert!(validate(OperadVariant::WUA, &par).ok());
        assert!(validate(OperadVariant::WUAC, &par).has(Rule::Disconnected));
        let seq = generator(&Generator::Seq { a: vec![a()], b: vec![a()], c: vec![a()] }).unwrap();
        assert!(validate(OperadVariant::WUAC, &seq).ok());
        let id = WiringDiagram::identity(&s).unwrap();
        assert!(validate(OperadVariant::WUAC, &id).ok());
    }

    #[test]
    fn variant_names_roundtrip() {
        for v in OperadVariant::ALL {
            assert_eq!(v.name().parse::<OperadVariant>().unwrap(), v);
        }
    }
}
