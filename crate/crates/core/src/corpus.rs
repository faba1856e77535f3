//! Seeded random diagrams and algebra elements for property checks.
//!
//! Every generator produces a wiring that validates under its variant by
//! construction. Sizes are bounded by [`CorpusConfig`]; numeric checks use
//! a smaller configuration and [`numeric_cost`] so that dense evaluation
//! stays cheap.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Algebra, Element, ElementKind, FreeDiagram};
use crate::diagram::{Wire, WiringDiagram};
use crate::expression::{decompose_acyclic, Expression};
use crate::tensor::{Matrix, Tensor};
use crate::types::{Face, Loc, PortRef, Signature, TypeLabel};
use crate::variants::OperadVariant;

#[derive(Clone, Debug)]
pub struct CorpusConfig {
    pub max_slots: usize,
    pub max_ports: usize,
    pub palette: Vec<TypeLabel>,
}

impl CorpusConfig {
    /// Up to 8 slots, 3 ports per face, dimensions up to 4.
    pub fn structural() -> Self {
        CorpusConfig {
            max_slots: 8,
            max_ports: 3,
            palette: vec![TypeLabel::new("A", 2), TypeLabel::new("B", 3), TypeLabel::new("C", 4)],
        }
    }

    /// Small enough for dense evaluation.
    pub fn numeric() -> Self {
        CorpusConfig {
            max_slots: 4,
            max_ports: 2,
            palette: vec![TypeLabel::new("A", 2), TypeLabel::new("B", 3)],
        }
    }
}

pub struct Corpus {
    rng: ChaCha8Rng,
    cfg: CorpusConfig,
}

/// Product of the dimensions of every wire and ground: an upper bound on
/// the size of any intermediate tensor during contraction.
pub fn numeric_cost(w: &WiringDiagram) -> usize {
    let dim = |p: PortRef| w.label(p).map(|l| l.dim()).unwrap_or(1);
    w.wires()
        .iter()
        .map(|x| dim(x.ends().0))
        .chain(w.grounds().iter().map(|&g| dim(g)))
        .fold(1usize, |acc, d| acc.saturating_mul(d))
}

/// Largest matrix (rows times columns) met while folding an expression.
pub fn expression_cost(e: &Expression, slots: &[Signature]) -> usize {
    let own = e
        .boundary(slots)
        .map(|(i, o)| {
            let p = |v: &[TypeLabel]| v.iter().map(TypeLabel::dim).product::<usize>();
            p(&i).saturating_mul(p(&o))
        })
        .unwrap_or(usize::MAX);
    match e {
        Expression::Seq(a, b) | Expression::Par(a, b) => own.max(expression_cost(a, slots)).max(expression_cost(b, slots)),
        _ => own,
    }
}

/// Matrix-evaluation budget used by the numeric corpus.
pub const NUMERIC_BUDGET: usize = 1 << 12;

/// Where an outer input of a directed plan goes.
enum InEnd {
    Sink(PortRef),
    Ground,
    Pass(usize),
}

/// Where an outer output of a directed plan comes from.
enum OutEnd {
    Source(PortRef),
    Pass(usize),
}

struct Plan {
    outer_in: Vec<(TypeLabel, InEnd)>,
    outer_out: Vec<(TypeLabel, OutEnd)>,
    wires: Vec<(PortRef, PortRef)>,
    grounds: Vec<PortRef>,
}

impl Corpus {
    pub fn new(seed: u64, cfg: CorpusConfig) -> Self {
        Corpus {
            rng: ChaCha8Rng::seed_from_u64(seed),
            cfg,
        }
    }

    pub fn config(&self) -> &CorpusConfig {
        &self.cfg
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn label(&mut self) -> TypeLabel {
        self.cfg.palette.choose(&mut self.rng).expect("non-empty palette").clone()
    }

    pub fn labels(&mut self, min: usize) -> Vec<TypeLabel> {
        let n = self.rng.gen_range(min..=self.cfg.max_ports.max(min));
        (0..n).map(|_| self.label()).collect()
    }

    pub fn box_sig(&mut self) -> Signature {
        let ins = self.labels(0);
        let outs = self.labels(0);
        Signature::boxed(ins, outs)
    }

    pub fn dot_sig(&mut self) -> Signature {
        Signature::dot(self.labels(0))
    }

    fn slot_count(&mut self, min: usize) -> usize {
        self.rng.gen_range(min..=self.cfg.max_slots.max(min))
    }

    /// Finish a directed plan: shuffle the outer boundary and build.
    fn finish_directed(&mut self, slots: Vec<Signature>, mut plan: Plan, empty_ok: bool, discarded: Vec<usize>) -> WiringDiagram {
        plan.outer_in.shuffle(&mut self.rng);
        plan.outer_out.shuffle(&mut self.rng);
        let outer = if empty_ok && plan.outer_in.is_empty() && plan.outer_out.is_empty() && self.rng.gen_bool(0.5) {
            Signature::Empty
        } else {
            Signature::boxed(
                plan.outer_in.iter().map(|(l, _)| l.clone()).collect(),
                plan.outer_out.iter().map(|(l, _)| l.clone()).collect(),
            )
        };
        let mut wires: Vec<Wire> = plan.wires.iter().map(|&(a, b)| Wire::new(a, b)).collect();
        let mut grounds = plan.grounds.clone();
        let mut pass_in = std::collections::BTreeMap::new();
        for (k, (_, end)) in plan.outer_in.iter().enumerate() {
            let me = PortRef::outer_in(k);
            match *end {
                InEnd::Sink(p) => wires.push(Wire::new(me, p)),
                InEnd::Ground => grounds.push(me),
                InEnd::Pass(id) => {
                    pass_in.insert(id, me);
                }
            }
        }
        for (k, (_, end)) in plan.outer_out.iter().enumerate() {
            let me = PortRef::outer_out(k);
            let src = match *end {
                OutEnd::Source(p) => p,
                OutEnd::Pass(id) => pass_in[&id],
            };
            wires.push(Wire::new(src, me));
        }
        WiringDiagram::new(outer, slots, wires, grounds, Vec::<TypeLabel>::new(), discarded).expect("generated directed wiring is well formed")
    }

    /// Sequential build of an acyclic directed wiring. `discard` gives the
    /// probability that a slot is discarded and `ground` the probability
    /// that a dangling source is grounded instead of exported.
    fn directed(&mut self, forced: Option<&Signature>, discard: f64, ground: f64) -> (WiringDiagram, Option<usize>) {
        let n = self.slot_count(usize::from(forced.is_some()));
        let mut slots: Vec<Signature> = (0..n).map(|_| self.box_sig()).collect();
        let pos = forced.map(|f| {
            let p = self.rng.gen_range(0..n);
            slots[p] = f.clone();
            p
        });
        let discarded: Vec<usize> = (0..n).filter(|_| discard > 0.0 && self.rng.gen_bool(discard)).collect();
        let mut order: Vec<usize> = (0..n).filter(|s| !discarded.contains(s)).collect();
        order.shuffle(&mut self.rng);

        let mut plan = Plan {
            outer_in: vec![],
            outer_out: vec![],
            wires: vec![],
            grounds: vec![],
        };
        let mut available: Vec<PortRef> = Vec::new();
        // Occasionally a bare wire straight across.
        if self.rng.gen_bool(0.2) {
            let l = self.label();
            plan.outer_in.push((l.clone(), InEnd::Pass(0)));
            plan.outer_out.push((l, OutEnd::Pass(0)));
        }
        if ground > 0.0 && self.rng.gen_bool(0.2) {
            let l = self.label();
            plan.outer_in.push((l, InEnd::Ground));
        }
        for &s in &order {
            for (i, l) in slots[s].inputs().iter().enumerate() {
                let sink = PortRef::slot_in(s, i);
                let cands: Vec<usize> = (0..available.len()).filter(|&k| slots[available[k].slot().unwrap()].outputs()[available[k].index] == *l).collect();
                if !cands.is_empty() && self.rng.gen_bool(0.7) {
                    let k = *cands.choose(&mut self.rng).unwrap();
                    plan.wires.push((available.swap_remove(k), sink));
                } else {
                    plan.outer_in.push((l.clone(), InEnd::Sink(sink)));
                }
            }
            available.extend((0..slots[s].outputs().len()).map(|j| PortRef::slot_out(s, j)));
        }
        for src in available {
            let l = slots[src.slot().unwrap()].outputs()[src.index].clone();
            if ground > 0.0 && self.rng.gen_bool(ground) {
                plan.grounds.push(src);
            } else {
                plan.outer_out.push((l, OutEnd::Source(src)));
            }
        }
        let w = self.finish_directed(slots, plan, ground > 0.0, discarded);
        (w, pos)
    }

    /// Random end placement for the cyclic variants: every port of the
    /// same type is shuffled and paired off.
    fn undirected_ends(&mut self, dots: bool, forced: Option<&Signature>) -> (WiringDiagram, Option<usize>) {
        let n = self.slot_count(usize::from(forced.is_some()));
        let mut slots: Vec<Signature> = (0..n).map(|_| if dots { self.dot_sig() } else { self.box_sig() }).collect();
        let pos = forced.map(|f| {
            let p = self.rng.gen_range(0..n);
            slots[p] = f.clone();
            p
        });
        let (mut oin, mut oout, mut oport): (Vec<TypeLabel>, Vec<TypeLabel>, Vec<TypeLabel>) = (vec![], vec![], vec![]);
        if dots {
            oport = self.labels(0);
        } else {
            oin = self.labels(0);
            oout = self.labels(0);
        }
        // Fix parity per label by growing the outer boundary.
        let count = |l: &TypeLabel, slots: &[Signature], a: &[TypeLabel], b: &[TypeLabel], c: &[TypeLabel]| {
            slots.iter().flat_map(|s| s.ports().map(|(_, _, x)| x.clone())).chain(a.iter().cloned()).chain(b.iter().cloned()).chain(c.iter().cloned()).filter(|x| x == l).count()
        };
        for l in self.cfg.palette.clone() {
            if count(&l, &slots, &oin, &oout, &oport) % 2 == 1 {
                if dots {
                    let at = self.rng.gen_range(0..=oport.len());
                    oport.insert(at, l);
                } else if self.rng.gen_bool(0.5) {
                    let at = self.rng.gen_range(0..=oin.len());
                    oin.insert(at, l);
                } else {
                    let at = self.rng.gen_range(0..=oout.len());
                    oout.insert(at, l);
                }
            }
        }
        let outer = if dots { Signature::dot(oport) } else { Signature::boxed(oin, oout) };
        let mut ends: Vec<(TypeLabel, PortRef)> = outer.ports().map(|(f, i, l)| (l.clone(), PortRef::new(Loc::Outer, f, i))).collect();
        for (s, sig) in slots.iter().enumerate() {
            ends.extend(sig.ports().map(|(f, i, l)| (l.clone(), PortRef::new(Loc::Inner(s), f, i))));
        }
        let mut wires = Vec::new();
        for l in &self.cfg.palette {
            let mut group: Vec<PortRef> = ends.iter().filter(|(x, _)| x == l).map(|&(_, p)| p).collect();
            group.shuffle(&mut self.rng);
            for pair in group.chunks(2) {
                wires.push(Wire::new(pair[0], pair[1]));
            }
        }
        let loops: Vec<TypeLabel> = if self.rng.gen_bool(0.2) { vec![self.label()] } else { vec![] };
        let w = WiringDiagram::new(outer, slots, wires, Vec::<PortRef>::new(), loops, Vec::<usize>::new()).expect("generated wiring is well formed");
        (w, pos)
    }

    /// A slot-forest built one slot at a time; each new slot is joined to
    /// the forest by at most one wire (exactly one when `connected`).
    fn forest(&mut self, connected: bool) -> WiringDiagram {
        let n = self.slot_count(0);
        let mut slots: Vec<Signature> = Vec::new();
        let mut free: Vec<PortRef> = Vec::new();
        let mut wires: Vec<Wire> = Vec::new();
        for k in 0..n {
            let mut ins = self.labels(0);
            let mut outs = self.labels(0);
            // Connected forests need spare ports to keep growing.
            while connected && n > 1 && ins.len() + outs.len() < 2 {
                if self.rng.gen_bool(0.5) {
                    ins.push(self.label());
                } else {
                    outs.push(self.label());
                }
            }
            let join = k > 0 && !free.is_empty() && (connected || self.rng.gen_bool(0.6));
            let mut own: Option<PortRef> = None;
            let mut other: Option<PortRef> = None;
            if join {
                let idx = self.rng.gen_range(0..free.len());
                let p = free.swap_remove(idx);
                let l = slots[p.slot().unwrap()].label_at(p.face, p.index).unwrap().clone();
                if p.face == Face::Out {
                    let at = self.rng.gen_range(0..=ins.len());
                    ins.insert(at, l);
                    own = Some(PortRef::slot_in(k, at));
                } else {
                    let at = self.rng.gen_range(0..=outs.len());
                    outs.insert(at, l);
                    own = Some(PortRef::slot_out(k, at));
                }
                other = Some(p);
            }
            let sig = Signature::boxed(ins, outs);
            for (f, i, _) in sig.ports() {
                let p = PortRef::new(Loc::Inner(k), f, i);
                if Some(p) != own {
                    free.push(p);
                }
            }
            if let (Some(a), Some(b)) = (own, other) {
                wires.push(Wire::new(a, b));
            }
            slots.push(sig);
        }
        let mut srcs: Vec<PortRef> = free.iter().copied().filter(|p| p.face == Face::Out).collect();
        let mut sinks: Vec<PortRef> = free.iter().copied().filter(|p| p.face == Face::In).collect();
        srcs.shuffle(&mut self.rng);
        sinks.shuffle(&mut self.rng);
        let lab = |p: &PortRef| slots[p.slot().unwrap()].label_at(p.face, p.index).unwrap().clone();
        let mut ins: Vec<TypeLabel> = sinks.iter().map(lab).collect();
        let mut outs: Vec<TypeLabel> = srcs.iter().map(lab).collect();
        for (k, p) in sinks.iter().enumerate() {
            wires.push(Wire::new(PortRef::outer_in(k), *p));
        }
        for (k, p) in srcs.iter().enumerate() {
            wires.push(Wire::new(PortRef::outer_out(k), *p));
        }
        if self.rng.gen_bool(0.2) {
            let l = self.label();
            wires.push(Wire::new(PortRef::outer_in(ins.len()), PortRef::outer_out(outs.len())));
            ins.push(l.clone());
            outs.push(l);
        }
        let w = WiringDiagram::new(Signature::boxed(ins, outs), slots, wires, Vec::<PortRef>::new(), Vec::<TypeLabel>::new(), Vec::<usize>::new())
            .expect("generated forest is well formed");
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut self.rng);
        w.permute_slots(&order).expect("permutation")
    }

    pub fn of_variant(&mut self, v: OperadVariant) -> WiringDiagram {
        match v {
            OperadVariant::WA => self.directed(None, 0.0, 0.0).0,
            OperadVariant::WGround => self.directed(None, 0.15, 0.35).0,
            OperadVariant::WC => self.undirected_ends(false, None).0,
            OperadVariant::WD => self.undirected_ends(true, None).0,
            OperadVariant::WUA => self.forest(false),
            OperadVariant::WUAC => self.forest(true),
        }
    }

    /// A wiring with `forced` placed in one of its slots; returns that slot.
    /// The forest variants are not supported and return `None`.
    pub fn with_slot(&mut self, v: OperadVariant, forced: &Signature) -> Option<(WiringDiagram, usize)> {
        let (w, p) = match v {
            OperadVariant::WA => self.directed(Some(forced), 0.0, 0.0),
            OperadVariant::WGround => self.directed(Some(forced), 0.15, 0.35),
            OperadVariant::WC => self.undirected_ends(false, Some(forced)),
            OperadVariant::WD => self.undirected_ends(true, Some(forced)),
            OperadVariant::WUA | OperadVariant::WUAC => return None,
        };
        Some((w, p.expect("forced slot placed")))
    }

    /// A wiring of `v` whose dense evaluation stays within budget.
    pub fn numeric(&mut self, v: OperadVariant) -> WiringDiagram {
        loop {
            let w = self.of_variant(v);
            if self.affordable(&w) {
                return w;
            }
        }
    }

    pub fn affordable(&self, w: &WiringDiagram) -> bool {
        if numeric_cost(w) > NUMERIC_BUDGET {
            return false;
        }
        match decompose_acyclic(w) {
            Ok(e) => expression_cost(&e, w.slots()) <= NUMERIC_BUDGET,
            Err(_) => true,
        }
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        let data = (0..rows * cols).map(|_| self.rng.gen_range(-1.0..1.0)).collect();
        Matrix::new(rows, cols, data).expect("shape")
    }

    /// Column-stochastic, with the odd exact zero.
    pub fn kernel(&mut self, rows: usize, cols: usize) -> Matrix {
        let mut data = vec![0.0; rows * cols];
        for c in 0..cols {
            let mut col: Vec<f64> = (0..rows)
                .map(|_| if self.rng.gen_bool(0.1) { 0.0 } else { self.rng.gen_range(0.01..1.0) })
                .collect();
            if col.iter().all(|&x| x == 0.0) {
                col[self.rng.gen_range(0..rows)] = 1.0;
            }
            let s: f64 = col.iter().sum();
            for (r, x) in col.into_iter().enumerate() {
                data[r * cols + c] = x / s;
            }
        }
        Matrix::new(rows, cols, data).expect("shape")
    }

    pub fn tensor(&mut self, shape: &[usize]) -> Tensor {
        let n = shape.iter().product();
        Tensor::new(shape.to_vec(), (0..n).map(|_| self.rng.gen_range(-1.0..1.0)).collect()).expect("shape")
    }

    pub fn weight(&mut self) -> f64 {
        self.rng.gen_range(0.0..=1.0)
    }

    /// A random inhabitant of `alg`'s carrier on `sig`. Closed boxes in a
    /// stochastic algebra only admit the scalar 1.
    pub fn element(&mut self, alg: &dyn Algebra, sig: &Signature, name: &str) -> Element {
        let spec = alg.carrier(sig);
        match spec.kind {
            ElementKind::Free => Element::Free(FreeDiagram::atom(&spec.signature, name).expect("atom")),
            ElementKind::Tensor => Element::Tensor(self.tensor(&spec.shape)),
            ElementKind::Matrix => Element::Matrix(self.matrix(spec.shape[0], spec.shape[1])),
            ElementKind::Kernel => Element::Kernel(self.kernel(spec.shape[0], spec.shape[1])),
            ElementKind::Scalar if alg.variant() == OperadVariant::WGround => Element::Scalar(1.0),
            ElementKind::Scalar => Element::Scalar(self.rng.gen_range(-1.0..1.0)),
        }
    }

    pub fn elements(&mut self, alg: &dyn Algebra, w: &WiringDiagram) -> Vec<Element> {
        w.slots()
            .iter()
            .enumerate()
            .map(|(i, s)| self.element(alg, s, &format!("f{i}")))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variants::validate;

    #[test]
    fn generators_validate() {
        let mut c = Corpus::new(7, CorpusConfig::structural());
        for v in OperadVariant::ALL {
            for _ in 0..200 {
                let w = c.of_variant(v);
                let r = validate(v, &w);
                assert!(r.ok(), "{v}: {r}\n{}", w.canonical_form().text());
            }
        }
    }

    #[test]
    fn forced_slot_present() {
        let mut c = Corpus::new(3, CorpusConfig::structural());
        for v in [OperadVariant::WA, OperadVariant::WC, OperadVariant::WD, OperadVariant::WGround] {
            for _ in 0..50 {
                let sig = if v.uses_dots() { c.dot_sig() } else { c.box_sig() };
                let (w, p) = c.with_slot(v, &sig).unwrap();
                assert_eq!(w.slots()[p], sig);
                assert!(validate(v, &w).ok());
            }
        }
    }

    #[test]
    fn deterministic() {
        let mut a = Corpus::new(11, CorpusConfig::structural());
        let mut b = Corpus::new(11, CorpusConfig::structural());
        for _ in 0..20 {
            assert_eq!(a.of_variant(OperadVariant::WC), b.of_variant(OperadVariant::WC));
        }
    }

    #[test]
    fn kernels_are_stochastic() {
        let mut c = Corpus::new(1, CorpusConfig::numeric());
        for _ in 0..50 {
            let k = c.kernel(3, 4);
            assert!(crate::algebra::check_kernel(&k).is_ok());
        }
    }
}
