//! Polycategory structure on undirected acyclic wirings: composition along
//! a single wire and spatial juxtaposition.
//!
//! Both operations fix the boundary order of their result. Laws that only
//! hold up to a reordering of boundary ports and slots (interchange,
//! associativity of single-wire composition) are checked through
//! [`Tracked`] diagrams, which remember where every boundary port and slot
//! came from so that both sides can be brought into the same order before
//! comparing canonical forms.

use thiserror::Error;

use crate::diagram::{DiagramError, WiringDiagram};
use crate::types::{PortRef, Signature, TypeLabel};
use crate::variants::{generator, validate, Generator, OperadVariant, ValidationReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("operand is not an undirected acyclic wiring: {0}")]
    NotWUA(ValidationReport),
    #[error("operands may be joined by at most one wire, {0} requested")]
    MultipleWires(usize),
    #[error("{side} has no outer {face} port {index}")]
    BadPort {
        side: &'static str,
        face: &'static str,
        index: usize,
    },
    #[error("cannot join {host} to {guest}")]
    TypeMismatch { host: TypeLabel, guest: TypeLabel },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// One wire from an outer output of the host to an outer input of the guest.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Connection {
    pub host_out: usize,
    pub guest_in: usize,
}

/// Connections between two operands. Zero connections is juxtaposition;
/// more than one is rejected.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PolyComposeSpec {
    pub connections: Vec<Connection>,
}

impl PolyComposeSpec {
    pub fn single(host_out: usize, guest_in: usize) -> Self {
        PolyComposeSpec {
            connections: vec![Connection { host_out, guest_in }],
        }
    }
}

fn check_wua(w: &WiringDiagram) -> Result<(), PolyError> {
    let report = validate(OperadVariant::WUA, w);
    if report.ok() {
        Ok(())
    } else {
        Err(PolyError::NotWUA(report))
    }
}

/// Boundary of `host ∘ guest` along `c`: guest inputs with the host's inputs
/// spliced in at the joined position, host outputs with the guest's
/// outputs spliced in likewise.
fn spliced<T: Clone>(outer: &[T], at: usize, inner: &[T]) -> Vec<T> {
    outer[..at]
        .iter()
        .chain(inner)
        .chain(&outer[at + 1..])
        .cloned()
        .collect()
}

/// The two-slot wiring joining slot 0 (`p`) to slot 1 (`q`) along `c`.
fn bridge(p: &Signature, q: &Signature, c: Connection) -> Result<WiringDiagram, DiagramError> {
    let (x, y) = (c.host_out, c.guest_in);
    let ins = spliced(q.inputs(), y, p.inputs());
    let outs = spliced(p.outputs(), x, q.outputs());
    let in_ports: Vec<PortRef> = spliced(
        &(0..q.inputs().len()).map(|i| PortRef::slot_in(1, i)).collect::<Vec<_>>(),
        y,
        &(0..p.inputs().len()).map(|i| PortRef::slot_in(0, i)).collect::<Vec<_>>(),
    );
    let out_ports: Vec<PortRef> = spliced(
        &(0..p.outputs().len()).map(|j| PortRef::slot_out(0, j)).collect::<Vec<_>>(),
        x,
        &(0..q.outputs().len()).map(|j| PortRef::slot_out(1, j)).collect::<Vec<_>>(),
    );
    let mut b = WiringDiagram::builder(Signature::boxed(ins, outs))
        .slot(p.clone())
        .slot(q.clone())
        .wire(PortRef::slot_out(0, x), PortRef::slot_in(1, y));
    for (k, port) in in_ports.into_iter().enumerate() {
        b = b.wire(PortRef::outer_in(k), port);
    }
    for (k, port) in out_ports.into_iter().enumerate() {
        b = b.wire(PortRef::outer_out(k), port);
    }
    b.build()
}

/// Compose `p` and `q` along the wires in `spec`: none gives [`par_poly`],
/// one gives single-wire composition, more is an error.
pub fn compose_single_wire(p: &WiringDiagram, q: &WiringDiagram, spec: &PolyComposeSpec) -> Result<WiringDiagram, PolyError> {
    check_wua(p)?;
    check_wua(q)?;
    let c = match spec.connections[..] {
        [] => return par_poly(p, q),
        [c] => c,
        _ => return Err(PolyError::MultipleWires(spec.connections.len())),
    };
    let host = p.outer().outputs().get(c.host_out).ok_or(PolyError::BadPort {
        side: "host",
        face: "output",
        index: c.host_out,
    })?;
    let guest = q.outer().inputs().get(c.guest_in).ok_or(PolyError::BadPort {
        side: "guest",
        face: "input",
        index: c.guest_in,
    })?;
    if host != guest {
        return Err(PolyError::TypeMismatch {
            host: host.clone(),
            guest: guest.clone(),
        });
    }
    let b = bridge(p.outer(), q.outer(), c)?;
    Ok(b.substitute(1, q)?.substitute(0, p)?)
}

/// Side-by-side placement: boundaries and slots concatenated.
pub fn par_poly(p: &WiringDiagram, q: &WiringDiagram) -> Result<WiringDiagram, PolyError> {
    check_wua(p)?;
    check_wua(q)?;
    let par = generator(&Generator::Par {
        first: p.outer().clone(),
        second: q.outer().clone(),
    })?;
    Ok(par.substitute(1, q)?.substitute(0, p)?)
}

/// Where a boundary port or slot came from: operand id and position within
/// that operand.
pub type Tag = (usize, usize);

/// A diagram together with the provenance of its outer inputs, outer
/// outputs and slots.
#[derive(Clone, Debug)]
pub struct Tracked {
    pub diagram: WiringDiagram,
    pub ins: Vec<Tag>,
    pub outs: Vec<Tag>,
    pub slots: Vec<Tag>,
}

impl Tracked {
    pub fn leaf(diagram: WiringDiagram, id: usize) -> Self {
        let tag = |n: usize| (0..n).map(|i| (id, i)).collect();
        Tracked {
            ins: tag(diagram.outer().inputs().len()),
            outs: tag(diagram.outer().outputs().len()),
            slots: tag(diagram.slot_count()),
            diagram,
        }
    }

    pub fn compose(&self, other: &Tracked, c: Connection) -> Result<Tracked, PolyError> {
        let d = compose_single_wire(&self.diagram, &other.diagram, &PolyComposeSpec { connections: vec![c] })?;
        Ok(Tracked {
            diagram: d,
            ins: spliced(&other.ins, c.guest_in, &self.ins),
            outs: spliced(&self.outs, c.host_out, &other.outs),
            slots: [&self.slots[..], &other.slots[..]].concat(),
        })
    }

    pub fn par(&self, other: &Tracked) -> Result<Tracked, PolyError> {
        Ok(Tracked {
            diagram: par_poly(&self.diagram, &other.diagram)?,
            ins: [&self.ins[..], &other.ins[..]].concat(),
            outs: [&self.outs[..], &other.outs[..]].concat(),
            slots: [&self.slots[..], &other.slots[..]].concat(),
        })
    }

    /// Reorder boundary and slots so that their tags appear in the given
    /// orders. Each order must be a permutation of the current tags.
    pub fn arrange(&self, ins: &[Tag], outs: &[Tag], slots: &[Tag]) -> Result<WiringDiagram, PolyError> {
        let pos = |have: &[Tag], want: &[Tag]| -> Vec<usize> {
            want.iter()
                .map(|t| have.iter().position(|h| h == t).expect("tag sets agree"))
                .collect()
        };
        let (pi, po, ps) = (pos(&self.ins, ins), pos(&self.outs, outs), pos(&self.slots, slots));
        let sig = self.diagram.outer();
        let new_outer = Signature::boxed(
            pi.iter().map(|&i| sig.inputs()[i].clone()).collect(),
            po.iter().map(|&j| sig.outputs()[j].clone()).collect(),
        );
        let mut b = WiringDiagram::builder(new_outer).slot(sig.clone());
        for (k, &i) in pi.iter().enumerate() {
            b = b.wire(PortRef::outer_in(k), PortRef::slot_in(0, i));
        }
        for (k, &j) in po.iter().enumerate() {
            b = b.wire(PortRef::outer_out(k), PortRef::slot_out(0, j));
        }
        Ok(b.build()?.substitute(0, &self.diagram)?.permute_slots(&ps)?)
    }

    /// Put everything in ascending tag order.
    pub fn sorted(&self) -> Result<WiringDiagram, PolyError> {
        let s = |v: &[Tag]| {
            let mut v = v.to_vec();
            v.sort();
            v
        };
        self.arrange(&s(&self.ins), &s(&self.outs), &s(&self.slots))
    }
}

/// Canonical equality after bringing both sides into tag order.
pub fn equal_up_to_provenance(a: &Tracked, b: &Tracked) -> Result<bool, PolyError> {
    Ok(a.sorted()?.canonical_form() == b.sorted()?.canonical_form())
}

/// The four ways a single-wire composite can meet a juxtaposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// `(p * q) ∘ r` along an output of `p`, versus `(p ∘ r) * q`.
    HostLeft,
    /// `(p * q) ∘ r` along an output of `q`, versus `p * (q ∘ r)`.
    HostRight,
    /// `p ∘ (q * r)` along an input of `q`, versus `(p ∘ q) * r`.
    GuestLeft,
    /// `p ∘ (q * r)` along an input of `r`, versus `q * (p ∘ r)`.
    GuestRight,
}

impl Orientation {
    pub const ALL: [Orientation; 4] = [
        Orientation::HostLeft,
        Orientation::HostRight,
        Orientation::GuestLeft,
        Orientation::GuestRight,
    ];
}

/// Both sides of one interchange square. The connection in `spec` indexes
/// the boundaries of the two operands it actually joins, for instance an
/// output of `q` and an input of `r` for [`Orientation::HostRight`].
pub fn interchange_sides(
    p: &WiringDiagram,
    q: &WiringDiagram,
    r: &WiringDiagram,
    spec: &PolyComposeSpec,
    orientation: Orientation,
) -> Result<(Tracked, Tracked), PolyError> {
    let c = match spec.connections[..] {
        [c] => c,
        _ => return Err(PolyError::MultipleWires(spec.connections.len())),
    };
    let (tp, tq, tr) = (Tracked::leaf(p.clone(), 0), Tracked::leaf(q.clone(), 1), Tracked::leaf(r.clone(), 2));
    let shift = |c: Connection, dx: usize, dy: usize| Connection {
        host_out: c.host_out + dx,
        guest_in: c.guest_in + dy,
    };
    Ok(match orientation {
        Orientation::HostLeft => (tp.par(&tq)?.compose(&tr, c)?, tp.compose(&tr, c)?.par(&tq)?),
        Orientation::HostRight => {
            let np = p.outer().outputs().len();
            (tp.par(&tq)?.compose(&tr, shift(c, np, 0))?, tp.par(&tq.compose(&tr, c)?)?)
        }
        Orientation::GuestLeft => (tp.compose(&tq.par(&tr)?, c)?, tp.compose(&tq, c)?.par(&tr)?),
        Orientation::GuestRight => {
            let nq = q.outer().inputs().len();
            (tp.compose(&tq.par(&tr)?, shift(c, 0, nq))?, tq.par(&tp.compose(&tr, c)?)?)
        }
    })
}

pub fn check_interchange(
    p: &WiringDiagram,
    q: &WiringDiagram,
    r: &WiringDiagram,
    spec: &PolyComposeSpec,
    orientation: Orientation,
) -> Result<bool, PolyError> {
    let (a, b) = interchange_sides(p, q, r, spec, orientation)?;
    equal_up_to_provenance(&a, &b)
}

/// `(p * q) * r` against `p * (q * r)`; these agree on the nose.
pub fn check_par_associativity(p: &WiringDiagram, q: &WiringDiagram, r: &WiringDiagram) -> Result<bool, PolyError> {
    let l = par_poly(&par_poly(p, q)?, r)?;
    let rt = par_poly(p, &par_poly(q, r)?)?;
    Ok(l.canonical_form() == rt.canonical_form())
}

/// `(p ∘ q) ∘ r` against `p ∘ (q ∘ r)` for a chain where `first` joins `p`
/// to `q` and `second` joins `q` to `r`.
pub fn check_compose_associativity(
    p: &WiringDiagram,
    q: &WiringDiagram,
    r: &WiringDiagram,
    first: Connection,
    second: Connection,
) -> Result<bool, PolyError> {
    let (tp, tq, tr) = (Tracked::leaf(p.clone(), 0), Tracked::leaf(q.clone(), 1), Tracked::leaf(r.clone(), 2));
    let left = tp.compose(&tq, first)?.compose(
        &tr,
        Connection {
            host_out: first.host_out + second.host_out,
            guest_in: second.guest_in,
        },
    )?;
    let right = tp.compose(
        &tq.compose(&tr, second)?,
        Connection {
            host_out: first.host_out,
            guest_in: second.guest_in + first.guest_in,
        },
    )?;
    equal_up_to_provenance(&left, &right)
}

/// Rebuild `w` from its single slots and bare wires using only single-wire
/// composition and juxtaposition, then compare with `w` after reordering.
/// Returns `Ok(true)` when the rebuild reproduces `w` exactly.
pub fn rebuild_from_atoms(w: &WiringDiagram) -> Result<bool, PolyError> {
    check_wua(w)?;
    let n = w.slot_count();
    // Tags: slot s has id s; the k-th outer-to-outer wire has id n + k.
    let mut passes = Vec::new();
    for wire in w.wires() {
        let (a, b) = wire.ends();
        if a.slot().is_none() && b.slot().is_none() {
            passes.push(if a.is_source() { (a, b) } else { (b, a) });
        }
    }
    let tag_of = |p: PortRef| -> Tag {
        match p.slot() {
            Some(s) => (s, p.index),
            None => {
                let k = passes
                    .iter()
                    .position(|&(i, o)| i == p || o == p)
                    .expect("outer port on a pass-through wire");
                (n + k, 0)
            }
        }
    };

    let mut placed = vec![false; n];
    let mut pieces: Vec<Tracked> = Vec::new();
    for root in 0..n {
        if placed[root] {
            continue;
        }
        placed[root] = true;
        let mut acc = Tracked::leaf(WiringDiagram::identity(&w.slots()[root])?, root);
        // Grow the tree one wire at a time.
        loop {
            let next = w.wires().iter().find_map(|wire| {
                let (a, b) = wire.ends();
                let (sa, sb) = (a.slot()?, b.slot()?);
                match (placed[sa], placed[sb]) {
                    (true, false) => Some((a, b)),
                    (false, true) => Some((b, a)),
                    _ => None,
                }
            });
            let Some((mine, theirs)) = next else { break };
            let s = theirs.slot().unwrap();
            placed[s] = true;
            let atom = Tracked::leaf(WiringDiagram::identity(&w.slots()[s])?, s);
            acc = if mine.is_source() {
                let x = acc.outs.iter().position(|&t| t == tag_of(mine)).unwrap();
                acc.compose(&atom, Connection { host_out: x, guest_in: theirs.index })?
            } else {
                let y = acc.ins.iter().position(|&t| t == tag_of(mine)).unwrap();
                atom.compose(&acc, Connection { host_out: theirs.index, guest_in: y })?
            };
        }
        pieces.push(acc);
    }
    for (k, (i, _)) in passes.iter().enumerate() {
        let label = w.label(*i)?.clone();
        pieces.push(Tracked::leaf(generator(&Generator::Id(vec![label]))?, n + k));
    }
    let mut it = pieces.into_iter();
    let mut built = match it.next() {
        Some(first) => first,
        None => Tracked::leaf(WiringDiagram::builder(Signature::boxed(vec![], vec![])).build()?, 0),
    };
    for piece in it {
        built = built.par(&piece)?;
    }

    let partner = w.partner_map();
    let ins: Vec<Tag> = (0..w.outer().inputs().len()).map(|i| tag_of(partner[&PortRef::outer_in(i)])).collect();
    let outs: Vec<Tag> = (0..w.outer().outputs().len()).map(|j| tag_of(partner[&PortRef::outer_out(j)])).collect();
    let slots: Vec<Tag> = (0..n).map(|s| (s, 0)).collect();
    let rebuilt = built.arrange(&ins, &outs, &slots)?;
    Ok(rebuilt.canonical_form() == w.canonical_form())
}
