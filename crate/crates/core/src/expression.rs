//! Decomposition of acyclic wirings into sequential, parallel, identity and
//! swap generators, and the inverse fold back into a wiring.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::diagram::{DiagramError, WiringDiagram};
use crate::types::{PortRef, Signature, TypeLabel};
use crate::variants::{generator, predecessors, validate, Generator, OperadVariant, ValidationReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("wiring is not a valid acyclic wiring: {0}")]
    NotAcyclic(ValidationReport),
    #[error("sequential composite joins {left:?} to {right:?}")]
    TypeMismatch {
        left: Vec<TypeLabel>,
        right: Vec<TypeLabel>,
    },
    #[error("slot {0} is missing, repeated, or not a box")]
    BadSlot(usize),
    #[error("level assignment is not a foliation: {0}")]
    BadLevels(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// A term over slots and the four generator wirings. `Unit` is the empty
/// wiring on no wires.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expression {
    Slot(usize),
    Id(TypeLabel),
    Swap(TypeLabel, TypeLabel),
    Seq(Box<Expression>, Box<Expression>),
    Par(Box<Expression>, Box<Expression>),
    Unit,
}

impl Expression {
    pub fn seq(a: Expression, b: Expression) -> Self {
        Expression::Seq(Box::new(a), Box::new(b))
    }

    pub fn par(a: Expression, b: Expression) -> Self {
        Expression::Par(Box::new(a), Box::new(b))
    }

    /// Left-nested parallel product; `Unit` for an empty list.
    pub fn par_all(items: impl IntoIterator<Item = Expression>) -> Self {
        items
            .into_iter()
            .reduce(Expression::par)
            .unwrap_or(Expression::Unit)
    }

    pub fn seq_all(items: impl IntoIterator<Item = Expression>) -> Option<Self> {
        items.into_iter().reduce(Expression::seq)
    }

    /// Input and output type lists, checking every `Seq` node.
    pub fn boundary(&self, slots: &[Signature]) -> Result<(Vec<TypeLabel>, Vec<TypeLabel>), ExprError> {
        match self {
            Expression::Slot(i) => match slots.get(*i) {
                Some(sig @ Signature::Box { .. }) => Ok((sig.inputs().to_vec(), sig.outputs().to_vec())),
                _ => Err(ExprError::BadSlot(*i)),
            },
            Expression::Id(t) => Ok((vec![t.clone()], vec![t.clone()])),
            Expression::Swap(a, b) => Ok((vec![a.clone(), b.clone()], vec![b.clone(), a.clone()])),
            Expression::Unit => Ok((vec![], vec![])),
            Expression::Seq(f, g) => {
                let (fi, fo) = f.boundary(slots)?;
                let (gi, go) = g.boundary(slots)?;
                if fo != gi {
                    return Err(ExprError::TypeMismatch { left: fo, right: gi });
                }
                Ok((fi, go))
            }
            Expression::Par(f, g) => {
                let (mut fi, mut fo) = f.boundary(slots)?;
                let (gi, go) = g.boundary(slots)?;
                fi.extend(gi);
                fo.extend(go);
                Ok((fi, fo))
            }
        }
    }

    pub fn slot_occurrences(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_slots(&mut out);
        out
    }

    fn collect_slots(&self, out: &mut Vec<usize>) {
        match self {
            Expression::Slot(i) => out.push(*i),
            Expression::Seq(a, b) | Expression::Par(a, b) => {
                a.collect_slots(out);
                b.collect_slots(out);
            }
            _ => {}
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Slot(i) => write!(f, "s{i}"),
            Expression::Id(t) => write!(f, "id[{t}]"),
            Expression::Swap(a, b) => write!(f, "swap[{a},{b}]"),
            Expression::Unit => f.write_str("unit"),
            Expression::Seq(a, b) => write!(f, "({a} ; {b})"),
            Expression::Par(a, b) => write!(f, "({a} * {b})"),
        }
    }
}

/// Strategy for assigning slots to foliation levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Foliation {
    /// Each slot one level after its latest predecessor.
    Asap,
    /// Each slot as late as its successors allow.
    Alap,
    /// One slot per level, in a topological order preferring higher slot
    /// indices first.
    Sequential,
}

/// Levels (starting at 1) for every slot under the given strategy.
pub fn foliation_levels(w: &WiringDiagram, strategy: Foliation) -> Result<Vec<usize>, ExprError> {
    let report = validate(OperadVariant::WA, w);
    if !report.ok() {
        return Err(ExprError::NotAcyclic(report));
    }
    let n = w.slot_count();
    let preds = predecessors(w);
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (&y, xs) in &preds {
        for &x in xs {
            succs[x].push(y);
        }
    }
    let order = topo_order(n, &preds, true);
    match strategy {
        Foliation::Asap => Ok(asap(&order, &preds, n)),
        Foliation::Alap => {
            let asap = asap(&order, &preds, n);
            let depth = asap.iter().copied().max().unwrap_or(0);
            let mut height = vec![0usize; n];
            for &v in order.iter().rev() {
                height[v] = succs[v].iter().map(|&s| height[s] + 1).max().unwrap_or(0);
            }
            Ok((0..n).map(|v| depth - height[v]).collect())
        }
        Foliation::Sequential => {
            let mut levels = vec![0; n];
            for (pos, &v) in order.iter().enumerate() {
                levels[v] = pos + 1;
            }
            Ok(levels)
        }
    }
}

fn asap(order: &[usize], preds: &BTreeMap<usize, std::collections::BTreeSet<usize>>, n: usize) -> Vec<usize> {
    let mut level = vec![0usize; n];
    for &v in order {
        level[v] = 1 + preds[&v].iter().map(|&p| level[p]).max().unwrap_or(0);
    }
    level
}

/// Kahn's algorithm; ties broken by highest index when `prefer_high`.
fn topo_order(
    n: usize,
    preds: &BTreeMap<usize, std::collections::BTreeSet<usize>>,
    prefer_high: bool,
) -> Vec<usize> {
    let mut remaining: Vec<usize> = (0..n).map(|v| preds[&v].len()).collect();
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let ready = (0..n).filter(|&v| !done[v] && remaining[v] == 0);
        let v = if prefer_high { ready.max() } else { ready.min() }.expect("acyclic");
        done[v] = true;
        order.push(v);
        for (&y, xs) in preds {
            if xs.contains(&v) {
                remaining[y] -= 1;
            }
        }
    }
    order
}

/// Decompose with the default as-soon-as-possible foliation.
pub fn decompose_acyclic(w: &WiringDiagram) -> Result<Expression, ExprError> {
    let levels = foliation_levels(w, Foliation::Asap)?;
    decompose_with_levels(w, &levels)
}

/// Decompose along an explicit level assignment. Levels must be positive
/// and strictly increase along every slot-to-slot wire.
pub fn decompose_with_levels(w: &WiringDiagram, levels: &[usize]) -> Result<Expression, ExprError> {
    let report = validate(OperadVariant::WA, w);
    if !report.ok() {
        return Err(ExprError::NotAcyclic(report));
    }
    if levels.len() != w.slot_count() {
        return Err(ExprError::BadLevels(format!(
            "{} levels for {} slots",
            levels.len(),
            w.slot_count()
        )));
    }
    for (&y, xs) in &predecessors(w) {
        for &x in xs {
            if levels[x] >= levels[y] || levels[x] == 0 {
                return Err(ExprError::BadLevels(format!(
                    "s{x} (level {}) feeds s{y} (level {})",
                    levels[x], levels[y]
                )));
            }
        }
    }
    let partners = w.partner_map();
    let label = |p: PortRef| w.label(p).expect("validated").clone();

    let mut strands: Vec<PortRef> = (0..w.outer().inputs().len()).map(PortRef::outer_in).collect();
    let mut layers: Vec<Expression> = Vec::new();

    let mut by_level: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (s, &l) in levels.iter().enumerate() {
        by_level.entry(l).or_default().push(s);
    }
    for slots in by_level.values() {
        let mut wanted: Vec<PortRef> = Vec::new();
        for &s in slots {
            let n_in = w.slots()[s].inputs().len();
            wanted.extend((0..n_in).map(|j| partners[&PortRef::slot_in(s, j)]));
        }
        let passing: Vec<PortRef> = strands.iter().copied().filter(|p| !wanted.contains(p)).collect();
        let target: Vec<PortRef> = wanted.iter().chain(passing.iter()).copied().collect();
        route(&mut strands, &target, &label, &mut layers);

        let atoms = slots
            .iter()
            .map(|&s| Expression::Slot(s))
            .chain(passing.iter().map(|&p| Expression::Id(label(p))));
        layers.push(Expression::par_all(atoms));

        strands = slots
            .iter()
            .flat_map(|&s| (0..w.slots()[s].outputs().len()).map(move |k| PortRef::slot_out(s, k)))
            .chain(passing)
            .collect();
    }
    let target: Vec<PortRef> = (0..w.outer().outputs().len())
        .map(|k| partners[&PortRef::outer_out(k)])
        .collect();
    route(&mut strands, &target, &label, &mut layers);

    Ok(Expression::seq_all(layers)
        .unwrap_or_else(|| Expression::par_all(strands.iter().map(|&p| Expression::Id(label(p))))))
}

/// Permute `strands` into `target` order by odd-even transposition sort,
/// emitting one layer of adjacent swaps per pass.
fn route(
    strands: &mut [PortRef],
    target: &[PortRef],
    label: &impl Fn(PortRef) -> TypeLabel,
    layers: &mut Vec<Expression>,
) {
    debug_assert_eq!(strands.len(), target.len());
    let rank: BTreeMap<PortRef, usize> = target.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut keys: Vec<usize> = strands.iter().map(|p| rank[p]).collect();
    let n = keys.len();
    let mut parity = 0;
    let mut idle_passes = 0;
    while idle_passes < 2 {
        let mut swapped = vec![false; n];
        let mut i = parity;
        while i + 1 < n {
            if keys[i] > keys[i + 1] {
                keys.swap(i, i + 1);
                strands.swap(i, i + 1);
                swapped[i] = true;
            }
            i += 2;
        }
        if swapped.iter().any(|&s| s) {
            idle_passes = 0;
            // Strands were already exchanged, so the swap at i takes the
            // pre-swap order (i+1, i).
            let mut atoms = Vec::new();
            let mut i = 0;
            while i < n {
                if swapped[i] {
                    atoms.push(Expression::Swap(label(strands[i + 1]), label(strands[i])));
                    i += 2;
                } else {
                    atoms.push(Expression::Id(label(strands[i])));
                    i += 1;
                }
            }
            layers.push(Expression::par_all(atoms));
        } else {
            idle_passes += 1;
        }
        parity = 1 - parity;
    }
}

/// Fold an expression back into a wiring by substituting generator wirings.
/// Slots of the result are ordered by slot index; every index in
/// `0..slot_signatures.len()` must occur exactly once.
pub fn recompose(expr: &Expression, slot_signatures: &[Signature]) -> Result<WiringDiagram, ExprError> {
    expr.boundary(slot_signatures)?;
    let (d, ids) = fold(expr, slot_signatures)?;
    let n = slot_signatures.len();
    let mut order = vec![usize::MAX; n];
    for (pos, &id) in ids.iter().enumerate() {
        if id >= n || order[id] != usize::MAX {
            return Err(ExprError::BadSlot(id));
        }
        order[id] = pos;
    }
    if let Some(missing) = order.iter().position(|&o| o == usize::MAX) {
        return Err(ExprError::BadSlot(missing));
    }
    Ok(d.permute_slots(&order)?)
}

fn fold(expr: &Expression, sigs: &[Signature]) -> Result<(WiringDiagram, Vec<usize>), ExprError> {
    Ok(match expr {
        Expression::Slot(i) => {
            let sig = sigs.get(*i).ok_or(ExprError::BadSlot(*i))?;
            (WiringDiagram::identity(sig)?, vec![*i])
        }
        Expression::Id(t) => (generator(&Generator::Id(vec![t.clone()]))?, vec![]),
        Expression::Swap(a, b) => (
            generator(&Generator::Swap {
                a: vec![a.clone()],
                b: vec![b.clone()],
            })?,
            vec![],
        ),
        Expression::Unit => (generator(&Generator::Id(vec![]))?, vec![]),
        Expression::Seq(f, g) => {
            let (df, mut ids) = fold(f, sigs)?;
            let (dg, idg) = fold(g, sigs)?;
            if df.outer().outputs() != dg.outer().inputs() {
                return Err(ExprError::TypeMismatch {
                    left: df.outer().outputs().to_vec(),
                    right: dg.outer().inputs().to_vec(),
                });
            }
            let host = generator(&Generator::Seq {
                a: df.outer().inputs().to_vec(),
                b: df.outer().outputs().to_vec(),
                c: dg.outer().outputs().to_vec(),
            })?;
            let d = host.substitute(1, &dg)?.substitute(0, &df)?;
            ids.extend(idg);
            (d, ids)
        }
        Expression::Par(f, g) => {
            let (df, mut ids) = fold(f, sigs)?;
            let (dg, idg) = fold(g, sigs)?;
            let host = generator(&Generator::Par {
                first: df.outer().clone(),
                second: dg.outer().clone(),
            })?;
            let d = host.substitute(1, &dg)?.substitute(0, &df)?;
            ids.extend(idg);
            (d, ids)
        }
    })
}
