//! Wiring diagrams as operad operations.
//!
//! A [`WiringDiagram`] places an ordered list of inner slots inside an outer
//! boundary and pairs up their ports with polarity-free wires. Grounds
//! terminate a wire on nothing, `loops` holds port-free closed wires, and
//! `discarded` marks slots the diagram is not interested in.
//!
//! Composition is [`WiringDiagram::substitute`]: a guest diagram is plugged
//! into one slot of a host and the wires meeting at the former slot boundary
//! are fused by path contraction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::types::{Face, Loc, PortRef, Signature, TypeLabel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("port {0} is not covered by any wire or ground")]
    DanglingPort(PortRef),
    #[error("port {0} is used more than once")]
    DoublyUsedPort(PortRef),
    #[error("wire {a} -- {b} joins {la:?} to {lb:?}")]
    TypeMismatch {
        a: PortRef,
        b: PortRef,
        la: TypeLabel,
        lb: TypeLabel,
    },
    #[error("port reference {0} does not resolve")]
    BadPortRef(PortRef),
    #[error("wire joins {0} to itself")]
    DegenerateWire(PortRef),
    #[error("ground on {0} is not on a source port of a box")]
    IllegalGround(PortRef),
    #[error("discarded slot {0} has an incident wire or ground")]
    DiscardedSlotWired(usize),
    #[error("slot index {0} is out of range")]
    BadSlotIndex(usize),
    #[error("guest boundary {guest} does not match slot signature {slot}")]
    SignatureMismatch { slot: Signature, guest: Signature },
    #[error("the empty object has no identity wiring")]
    EmptyObject,
}

/// An unordered pair of distinct port references, stored with the smaller
/// end first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Wire {
    a: PortRef,
    b: PortRef,
}

impl Wire {
    pub fn new(x: PortRef, y: PortRef) -> Self {
        if x <= y {
            Wire { a: x, b: y }
        } else {
            Wire { a: y, b: x }
        }
    }

    pub fn ends(&self) -> (PortRef, PortRef) {
        (self.a, self.b)
    }

    pub fn other(&self, p: PortRef) -> Option<PortRef> {
        if self.a == p {
            Some(self.b)
        } else if self.b == p {
            Some(self.a)
        } else {
            None
        }
    }

    fn map(&self, f: impl Fn(PortRef) -> PortRef) -> Wire {
        Wire::new(f(self.a), f(self.b))
    }
}

impl fmt::Display for Wire {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -- {}", self.a, self.b)
    }
}

/// An operation of one of the wiring operads. Immutable once built; every
/// constructor validates port coverage.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WiringDiagram {
    outer: Signature,
    slots: Vec<Signature>,
    wires: BTreeSet<Wire>,
    grounds: BTreeSet<PortRef>,
    loops: BTreeMap<TypeLabel, usize>,
    discarded: BTreeSet<usize>,
}

impl WiringDiagram {
    pub fn new(
        outer: Signature,
        slots: Vec<Signature>,
        wires: impl IntoIterator<Item = Wire>,
        grounds: impl IntoIterator<Item = PortRef>,
        loops: impl IntoIterator<Item = TypeLabel>,
        discarded: impl IntoIterator<Item = usize>,
    ) -> Result<Self, DiagramError> {
        let mut seen = BTreeSet::new();
        let mut wire_set = BTreeSet::new();
        for w in wires {
            for p in [w.a, w.b] {
                if !seen.insert(p) {
                    return Err(DiagramError::DoublyUsedPort(p));
                }
            }
            wire_set.insert(w);
        }
        let mut ground_set = BTreeSet::new();
        for g in grounds {
            if !seen.insert(g) {
                return Err(DiagramError::DoublyUsedPort(g));
            }
            ground_set.insert(g);
        }
        let mut loop_map = BTreeMap::new();
        for l in loops {
            *loop_map.entry(l).or_insert(0) += 1;
        }
        let discarded: BTreeSet<usize> = discarded.into_iter().collect();
        let d = WiringDiagram {
            outer,
            slots,
            wires: wire_set,
            grounds: ground_set,
            loops: loop_map,
            discarded,
        };
        d.check()?;
        Ok(d)
    }

    pub fn builder(outer: Signature) -> DiagramBuilder {
        DiagramBuilder {
            outer,
            slots: Vec::new(),
            wires: Vec::new(),
            grounds: Vec::new(),
            loops: Vec::new(),
            discarded: Vec::new(),
        }
    }

    fn check(&self) -> Result<(), DiagramError> {
        if let Some(&bad) = self.discarded.iter().find(|&&i| i >= self.slots.len()) {
            return Err(DiagramError::BadSlotIndex(bad));
        }
        for w in &self.wires {
            if w.a == w.b {
                return Err(DiagramError::DegenerateWire(w.a));
            }
            let la = self.label(w.a)?;
            let lb = self.label(w.b)?;
            if la != lb {
                return Err(DiagramError::TypeMismatch {
                    a: w.a,
                    b: w.b,
                    la: la.clone(),
                    lb: lb.clone(),
                });
            }
        }
        for &g in &self.grounds {
            self.label(g)?;
            if !g.is_source() || !self.signature_at(g.loc).is_some_and(Signature::is_box) {
                return Err(DiagramError::IllegalGround(g));
            }
        }
        let used: BTreeSet<PortRef> = self
            .wires
            .iter()
            .flat_map(|w| [w.a, w.b])
            .chain(self.grounds.iter().copied())
            .collect();
        for p in &used {
            if let Loc::Inner(i) = p.loc {
                if self.discarded.contains(&i) {
                    return Err(DiagramError::DiscardedSlotWired(i));
                }
            }
        }
        for p in self.required_ports() {
            if !used.contains(&p) {
                return Err(DiagramError::DanglingPort(p));
            }
        }
        Ok(())
    }

    /// Every port that must be covered: the outer boundary and all
    /// non-discarded slots.
    fn required_ports(&self) -> impl Iterator<Item = PortRef> + '_ {
        let outer = self
            .outer
            .ports()
            .map(|(face, i, _)| PortRef::new(Loc::Outer, face, i));
        let inner = self
            .slots
            .iter()
            .enumerate()
            .filter(|(s, _)| !self.discarded.contains(s))
            .flat_map(|(s, sig)| {
                sig.ports()
                    .map(move |(face, i, _)| PortRef::new(Loc::Inner(s), face, i))
            });
        outer.chain(inner)
    }

    pub fn outer(&self) -> &Signature {
        &self.outer
    }

    pub fn slots(&self) -> &[Signature] {
        &self.slots
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn wires(&self) -> &BTreeSet<Wire> {
        &self.wires
    }

    pub fn grounds(&self) -> &BTreeSet<PortRef> {
        &self.grounds
    }

    /// Loop multiset as (label, multiplicity).
    pub fn loops(&self) -> &BTreeMap<TypeLabel, usize> {
        &self.loops
    }

    pub fn loop_count(&self) -> usize {
        self.loops.values().sum()
    }

    pub fn discarded(&self) -> &BTreeSet<usize> {
        &self.discarded
    }

    pub fn is_discarded(&self, slot: usize) -> bool {
        self.discarded.contains(&slot)
    }

    pub fn signature_at(&self, loc: Loc) -> Option<&Signature> {
        match loc {
            Loc::Outer => Some(&self.outer),
            Loc::Inner(i) => self.slots.get(i),
        }
    }

    /// The type label carried by a port.
    pub fn label(&self, p: PortRef) -> Result<&TypeLabel, DiagramError> {
        self.signature_at(p.loc)
            .and_then(|sig| sig.label_at(p.face, p.index))
            .ok_or(DiagramError::BadPortRef(p))
    }

    /// The wire attached to `p`, if any.
    pub fn wire_at(&self, p: PortRef) -> Option<&Wire> {
        self.wires.iter().find(|w| w.a == p || w.b == p)
    }

    /// The port at the far end of the wire attached to `p`.
    pub fn partner(&self, p: PortRef) -> Option<PortRef> {
        self.wire_at(p).and_then(|w| w.other(p))
    }

    /// Map from every wired port to its partner.
    pub fn partner_map(&self) -> BTreeMap<PortRef, PortRef> {
        let mut m = BTreeMap::new();
        for w in &self.wires {
            m.insert(w.a, w.b);
            m.insert(w.b, w.a);
        }
        m
    }

    /// The operad identity on `sig`: one slot, every outer port wired
    /// straight to the matching slot port.
    pub fn identity(sig: &Signature) -> Result<Self, DiagramError> {
        if sig.is_empty_object() {
            return Err(DiagramError::EmptyObject);
        }
        let wires = sig.ports().map(|(face, i, _)| {
            Wire::new(
                PortRef::new(Loc::Outer, face, i),
                PortRef::new(Loc::Inner(0), face, i),
            )
        });
        WiringDiagram::new(sig.clone(), vec![sig.clone()], wires, [], [], [])
    }

    /// Operad composition: plug `guest` into slot `slot` of `self`.
    ///
    /// Guest slots are spliced in place of the host slot. Each guest outer
    /// port becomes a junction identified with the host port that used to
    /// sit on the slot, and every maximal junction path is contracted to a
    /// single wire, a ground on its surviving end, or a floating loop if it
    /// closes up. Substituting into a discarded slot keeps the guest's slots
    /// but marks them all discarded and drops the guest's wiring.
    pub fn substitute(&self, slot: usize, guest: &WiringDiagram) -> Result<Self, DiagramError> {
        let slot_sig = self
            .slots
            .get(slot)
            .ok_or(DiagramError::BadSlotIndex(slot))?;
        if *slot_sig != guest.outer {
            return Err(DiagramError::SignatureMismatch {
                slot: slot_sig.clone(),
                guest: guest.outer.clone(),
            });
        }
        let n_guest = guest.slots.len();
        let host_slot = |i: usize| if i < slot { i } else { i + n_guest - 1 };
        let host_map = |p: PortRef| match p.loc {
            Loc::Inner(i) => PortRef::new(Loc::Inner(host_slot(i)), p.face, p.index),
            Loc::Outer => p,
        };
        let guest_map = |p: PortRef| match p.loc {
            Loc::Inner(i) => PortRef::new(Loc::Inner(slot + i), p.face, p.index),
            Loc::Outer => unreachable!("outer guest ports are junctions"),
        };

        let mut slots = Vec::with_capacity(self.slots.len() + n_guest - 1);
        slots.extend_from_slice(&self.slots[..slot]);
        slots.extend_from_slice(&guest.slots);
        slots.extend_from_slice(&self.slots[slot + 1..]);

        let mut discarded: BTreeSet<usize> = self
            .discarded
            .iter()
            .filter(|&&i| i != slot)
            .map(|&i| host_slot(i))
            .collect();

        if self.discarded.contains(&slot) {
            discarded.extend(slot..slot + n_guest);
            return Ok(WiringDiagram {
                outer: self.outer.clone(),
                slots,
                wires: self.wires.iter().map(|w| w.map(host_map)).collect(),
                grounds: self.grounds.iter().map(|&g| host_map(g)).collect(),
                loops: self.loops.clone(),
                discarded,
            });
        }
        discarded.extend(guest.discarded.iter().map(|&i| slot + i));

        let junctions: Vec<(Face, usize)> = guest.outer.ports().map(|(f, i, _)| (f, i)).collect();
        let junction_id: BTreeMap<(Face, usize), usize> = junctions
            .iter()
            .enumerate()
            .map(|(j, &key)| (key, j))
            .collect();
        let mut host_side = vec![None; junctions.len()];
        let mut guest_side = vec![None; junctions.len()];

        let mut wires = BTreeSet::new();
        let mut grounds = BTreeSet::new();

        let host_node = |p: PortRef| match p.loc {
            Loc::Inner(i) if i == slot => Node::Junction(junction_id[&(p.face, p.index)]),
            _ => Node::Port(host_map(p)),
        };
        for w in &self.wires {
            match (host_node(w.a), host_node(w.b)) {
                (Node::Port(a), Node::Port(b)) => {
                    wires.insert(Wire::new(a, b));
                }
                (Node::Junction(j), other) | (other, Node::Junction(j)) => {
                    host_side[j] = Some(other);
                    if let Node::Junction(k) = other {
                        host_side[k] = Some(Node::Junction(j));
                    }
                }
                _ => unreachable!(),
            }
        }
        for &g in &self.grounds {
            match host_node(g) {
                Node::Port(p) => {
                    grounds.insert(p);
                }
                Node::Junction(j) => host_side[j] = Some(Node::Ground),
                Node::Ground => unreachable!(),
            }
        }

        let guest_node = |p: PortRef| match p.loc {
            Loc::Outer => Node::Junction(junction_id[&(p.face, p.index)]),
            Loc::Inner(_) => Node::Port(guest_map(p)),
        };
        for w in &guest.wires {
            match (guest_node(w.a), guest_node(w.b)) {
                (Node::Port(a), Node::Port(b)) => {
                    wires.insert(Wire::new(a, b));
                }
                (Node::Junction(j), other) | (other, Node::Junction(j)) => {
                    guest_side[j] = Some(other);
                    if let Node::Junction(k) = other {
                        guest_side[k] = Some(Node::Junction(j));
                    }
                }
                _ => unreachable!(),
            }
        }
        for &g in &guest.grounds {
            match guest_node(g) {
                Node::Port(p) => {
                    grounds.insert(p);
                }
                Node::Junction(j) => guest_side[j] = Some(Node::Ground),
                Node::Ground => unreachable!(),
            }
        }

        let mut loops = self.loops.clone();
        for (l, n) in &guest.loops {
            *loops.entry(l.clone()).or_insert(0) += n;
        }

        // Both sides of every junction are attached: the host covered the
        // slot port and the guest covered its own outer port.
        let sides = [&host_side, &guest_side];
        let mut visited = vec![false; junctions.len()];
        for start in 0..junctions.len() {
            if visited[start] {
                continue;
            }
            let mut ends = [End::Cycle, End::Cycle];
            for (dir, end) in ends.iter_mut().enumerate() {
                let mut cur = start;
                let mut side = dir;
                visited[cur] = true;
                *end = loop {
                    match sides[side][cur].expect("junction side uncovered") {
                        Node::Port(p) => break End::Port(p),
                        Node::Ground => break End::Ground,
                        Node::Junction(next) => {
                            if next == start {
                                break End::Cycle;
                            }
                            visited[next] = true;
                            cur = next;
                            side = 1 - side;
                        }
                    }
                };
                if matches!(end, End::Cycle) {
                    break;
                }
            }
            match ends {
                [End::Cycle, _] => {
                    let (face, index) = junctions[start];
                    let label = guest.outer.label_at(face, index).unwrap().clone();
                    *loops.entry(label).or_insert(0) += 1;
                }
                [End::Port(a), End::Port(b)] => {
                    wires.insert(Wire::new(a, b));
                }
                [End::Port(p), End::Ground] | [End::Ground, End::Port(p)] => {
                    grounds.insert(p);
                }
                // A path grounded at both ends carries nothing; it cannot
                // arise from diagrams whose grounds sit on sources.
                [End::Ground, End::Ground] => {}
                [_, End::Cycle] => unreachable!(),
            }
        }

        let d = WiringDiagram {
            outer: self.outer.clone(),
            slots,
            wires,
            grounds,
            loops,
            discarded,
        };
        d.check()?;
        Ok(d)
    }

    /// Reorder slots: new slot `k` is old slot `order[k]`. `order` must be a
    /// permutation of `0..slot_count()`.
    pub fn permute_slots(&self, order: &[usize]) -> Result<Self, DiagramError> {
        let n = self.slots.len();
        let mut new_of_old = vec![usize::MAX; n];
        if order.len() != n {
            return Err(DiagramError::BadSlotIndex(order.len()));
        }
        for (new, &old) in order.iter().enumerate() {
            if old >= n || new_of_old[old] != usize::MAX {
                return Err(DiagramError::BadSlotIndex(old));
            }
            new_of_old[old] = new;
        }
        let map = |p: PortRef| match p.loc {
            Loc::Inner(i) => PortRef::new(Loc::Inner(new_of_old[i]), p.face, p.index),
            Loc::Outer => p,
        };
        Ok(WiringDiagram {
            outer: self.outer.clone(),
            slots: order.iter().map(|&o| self.slots[o].clone()).collect(),
            wires: self.wires.iter().map(|w| w.map(map)).collect(),
            grounds: self.grounds.iter().map(|&g| map(g)).collect(),
            loops: self.loops.clone(),
            discarded: self.discarded.iter().map(|&i| new_of_old[i]).collect(),
        })
    }

    pub fn canonical_form(&self) -> CanonicalWiring {
        CanonicalWiring::of(self)
    }
}

#[derive(Clone, Copy, Debug)]
enum Node {
    Port(PortRef),
    Junction(usize),
    Ground,
}

#[derive(Clone, Copy, Debug)]
enum End {
    Port(PortRef),
    Ground,
    Cycle,
}

/// Incremental construction of a [`WiringDiagram`]; `build` validates.
#[derive(Clone, Debug)]
pub struct DiagramBuilder {
    outer: Signature,
    slots: Vec<Signature>,
    wires: Vec<Wire>,
    grounds: Vec<PortRef>,
    loops: Vec<TypeLabel>,
    discarded: Vec<usize>,
}

impl DiagramBuilder {
    pub fn slot(mut self, sig: Signature) -> Self {
        self.slots.push(sig);
        self
    }

    pub fn slots(mut self, sigs: impl IntoIterator<Item = Signature>) -> Self {
        self.slots.extend(sigs);
        self
    }

    pub fn wire(mut self, a: PortRef, b: PortRef) -> Self {
        self.wires.push(Wire::new(a, b));
        self
    }

    pub fn ground(mut self, p: PortRef) -> Self {
        self.grounds.push(p);
        self
    }

    pub fn loop_of(mut self, l: TypeLabel) -> Self {
        self.loops.push(l);
        self
    }

    pub fn discard(mut self, slot: usize) -> Self {
        self.discarded.push(slot);
        self
    }

    pub fn build(self) -> Result<WiringDiagram, DiagramError> {
        WiringDiagram::new(
            self.outer,
            self.slots,
            self.wires,
            self.grounds,
            self.loops,
            self.discarded,
        )
    }
}

/// Sorted textual rendering of a diagram's connectivity plus a stable hash
/// of that rendering.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalWiring {
    text: String,
    hash: String,
}

impl CanonicalWiring {
    fn of(d: &WiringDiagram) -> Self {
        let mut text = String::new();
        let _ = writeln!(text, "outer {}", sig_key(&d.outer));
        for (i, s) in d.slots.iter().enumerate() {
            let _ = writeln!(text, "slot {i} {}", sig_key(s));
        }
        for w in &d.wires {
            let _ = writeln!(text, "wire {w}");
        }
        for g in &d.grounds {
            let _ = writeln!(text, "ground {g}");
        }
        for (l, n) in &d.loops {
            let _ = writeln!(text, "loop {l:?} {n}");
        }
        for i in &d.discarded {
            let _ = writeln!(text, "discard {i}");
        }
        let hash = hex::encode(Sha256::digest(text.as_bytes()));
        CanonicalWiring { text, hash }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }
}

impl fmt::Display for CanonicalWiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

fn sig_key(s: &Signature) -> String {
    let list = |ls: &[TypeLabel]| {
        ls.iter()
            .map(|l| format!("{l:?}"))
            .collect::<Vec<_>>()
            .join(",")
    };
    match s {
        Signature::Box { inputs, outputs } => format!("box[{}]->[{}]", list(inputs), list(outputs)),
        Signature::Dot { ports } => format!("dot[{}]", list(ports)),
        Signature::Empty => "empty".to_string(),
    }
}

pub fn diagrams_equal(a: &WiringDiagram, b: &WiringDiagram) -> bool {
    a.canonical_form() == b.canonical_form()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> TypeLabel {
        TypeLabel::new("A", 2)
    }
    fn b() -> TypeLabel {
        TypeLabel::new("B", 3)
    }
    fn boxed(i: &[TypeLabel], o: &[TypeLabel]) -> Signature {
        Signature::boxed(i.to_vec(), o.to_vec())
    }

    #[test]
    fn identity_shape() {
        let sig = boxed(&[a()], &[a()]);
        let w = WiringDiagram::builder(sig.clone())
            .slot(sig.clone())
            .wire(PortRef::outer_in(0), PortRef::slot_in(0, 0))
            .wire(PortRef::slot_out(0, 0), PortRef::outer_out(0))
            .build()
            .unwrap();
        assert_eq!(w, WiringDiagram::identity(&sig).unwrap());
    }

    #[test]
    fn dangling_port() {
        let sig = boxed(&[a()], &[a()]);
        let err = WiringDiagram::builder(sig.clone())
            .slot(sig)
            .wire(PortRef::outer_in(0), PortRef::slot_in(0, 0))
            .build()
            .unwrap_err();
        assert!(matches!(err, DiagramError::DanglingPort(_)));
    }

    #[test]
    fn construction_errors() {
        let sig = boxed(&[a()], &[b()]);
        let e = WiringDiagram::builder(sig.clone())
            .wire(PortRef::outer_in(0), PortRef::outer_out(0))
            .build()
            .unwrap_err();
        assert!(matches!(e, DiagramError::TypeMismatch { .. }));

        let e = WiringDiagram::builder(sig.clone())
            .wire(PortRef::outer_in(0), PortRef::outer_out(1))
            .build()
            .unwrap_err();
        assert_eq!(e, DiagramError::BadPortRef(PortRef::outer_out(1)));

        let e = WiringDiagram::builder(sig.clone())
            .wire(PortRef::outer_port(0), PortRef::outer_out(0))
            .build()
            .unwrap_err();
        assert!(matches!(e, DiagramError::BadPortRef(_)));

        let aa = boxed(&[a()], &[a()]);
        let e = WiringDiagram::builder(aa.clone())
            .wire(PortRef::outer_in(0), PortRef::outer_out(0))
            .ground(PortRef::outer_in(0))
            .build()
            .unwrap_err();
        assert_eq!(e, DiagramError::DoublyUsedPort(PortRef::outer_in(0)));

        let e = WiringDiagram::builder(boxed(&[], &[a()]))
            .ground(PortRef::outer_out(0))
            .build()
            .unwrap_err();
        assert_eq!(e, DiagramError::IllegalGround(PortRef::outer_out(0)));

        assert_eq!(
            WiringDiagram::identity(&Signature::Empty).unwrap_err(),
            DiagramError::EmptyObject
        );
    }

    #[test]
    fn identity_on_dot() {
        let d = Signature::dot(vec![a(), b(), a()]);
        let id = WiringDiagram::identity(&d).unwrap();
        assert_eq!(id.wires().len(), 3);
        assert_eq!(id.slot_count(), 1);
    }

    #[test]
    fn unit_laws_on_chain() {
        let sig_ab = boxed(&[a()], &[b()]);
        let sig_ba = boxed(&[b()], &[a()]);
        let w = WiringDiagram::builder(boxed(&[a()], &[a()]))
            .slot(sig_ab.clone())
            .slot(sig_ba.clone())
            .wire(PortRef::outer_in(0), PortRef::slot_in(0, 0))
            .wire(PortRef::slot_out(0, 0), PortRef::slot_in(1, 0))
            .wire(PortRef::slot_out(1, 0), PortRef::outer_out(0))
            .build()
            .unwrap();
        let left = WiringDiagram::identity(w.outer()).unwrap().substitute(0, &w).unwrap();
        assert!(diagrams_equal(&left, &w));
        for i in 0..2 {
            let id = WiringDiagram::identity(&w.slots()[i]).unwrap();
            assert!(diagrams_equal(&w.substitute(i, &id).unwrap(), &w));
        }
    }

    #[test]
    fn signature_mismatch_and_bad_slot() {
        let id = WiringDiagram::identity(&boxed(&[a()], &[a()])).unwrap();
        let other = WiringDiagram::identity(&boxed(&[b()], &[b()])).unwrap();
        assert!(matches!(
            id.substitute(0, &other),
            Err(DiagramError::SignatureMismatch { .. })
        ));
        assert_eq!(id.substitute(3, &id).unwrap_err(), DiagramError::BadSlotIndex(3));
    }

    #[test]
    fn self_paired_dot_closes_into_loop() {
        // Host pairs the two ports of its only slot; the guest pairs its
        // own outer ports. Fusing them leaves one floating loop of A.
        let d2 = Signature::dot(vec![a(), a()]);
        let host = WiringDiagram::builder(Signature::dot(vec![]))
            .slot(d2.clone())
            .wire(PortRef::slot_port(0, 0), PortRef::slot_port(0, 1))
            .build()
            .unwrap();
        let guest = WiringDiagram::builder(d2)
            .wire(PortRef::outer_port(0), PortRef::outer_port(1))
            .build()
            .unwrap();
        let fused = host.substitute(0, &guest).unwrap();
        assert_eq!(fused.slot_count(), 0);
        assert!(fused.wires().is_empty());
        assert_eq!(fused.loops().get(&a()), Some(&1));
    }

    #[test]
    fn host_ground_reaches_guest_source() {
        // Guest: state slot s0 feeding its outer output. Host grounds the
        // output of the slot the guest goes into.
        let state = boxed(&[], &[a()]);
        let guest = WiringDiagram::builder(state.clone())
            .slot(state.clone())
            .wire(PortRef::slot_out(0, 0), PortRef::outer_out(0))
            .build()
            .unwrap();
        let host = WiringDiagram::builder(boxed(&[], &[]))
            .slot(state)
            .ground(PortRef::slot_out(0, 0))
            .build()
            .unwrap();
        let fused = host.substitute(0, &guest).unwrap();
        assert!(fused.wires().is_empty());
        assert_eq!(
            fused.grounds().iter().copied().collect::<Vec<_>>(),
            vec![PortRef::slot_out(0, 0)]
        );
    }

    #[test]
    fn discarded_slot_swallows_guest() {
        let sig = boxed(&[a()], &[a()]);
        let host = WiringDiagram::builder(Signature::Empty)
            .slot(sig.clone())
            .discard(0)
            .build()
            .unwrap();
        let guest = WiringDiagram::builder(sig.clone())
            .slot(sig.clone())
            .slot(sig.clone())
            .wire(PortRef::outer_in(0), PortRef::slot_in(0, 0))
            .wire(PortRef::slot_out(0, 0), PortRef::slot_in(1, 0))
            .wire(PortRef::slot_out(1, 0), PortRef::outer_out(0))
            .build()
            .unwrap();
        let fused = host.substitute(0, &guest).unwrap();
        assert_eq!(fused.slot_count(), 2);
        assert!(fused.wires().is_empty());
        assert_eq!(fused.discarded().len(), 2);
    }

    #[test]
    fn wire_order_irrelevant_slot_order_relevant() {
        let s1 = boxed(&[a()], &[b()]);
        let s2 = boxed(&[b()], &[a()]);
        let outer = boxed(&[a(), b()], &[b(), a()]);
        let mk = |rev: bool| {
            let mut ws = vec![
                Wire::new(PortRef::outer_in(0), PortRef::slot_in(0, 0)),
                Wire::new(PortRef::outer_in(1), PortRef::slot_in(1, 0)),
                Wire::new(PortRef::slot_out(0, 0), PortRef::outer_out(0)),
                Wire::new(PortRef::slot_out(1, 0), PortRef::outer_out(1)),
            ];
            if rev {
                ws.reverse();
            }
            WiringDiagram::new(outer.clone(), vec![s1.clone(), s2.clone()], ws, [], [], []).unwrap()
        };
        assert!(diagrams_equal(&mk(false), &mk(true)));
        let swapped = mk(false).permute_slots(&[1, 0]).unwrap();
        assert!(!diagrams_equal(&mk(false), &swapped));
        assert!(diagrams_equal(&swapped.permute_slots(&[1, 0]).unwrap(), &mk(false)));
        assert_eq!(mk(false).canonical_form().hash().len(), 64);
    }
}
