//! Causal normalization: a process whose outputs are all discarded may
//! itself be discarded, discarding its inputs in turn.
//!
//! One rewrite step picks a live slot whose outputs are all grounded (a slot
//! with no outputs qualifies vacuously), marks it discarded, drops those
//! grounds, and grounds whatever fed the slot's inputs instead. Every step
//! discards one slot, so rewriting terminates.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::diagram::{CanonicalWiring, DiagramError, Wire, WiringDiagram};
use crate::types::PortRef;
use crate::variants::{validate, OperadVariant, ValidationReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CausalError {
    #[error("not a causal wiring: {0}")]
    NotCausal(ValidationReport),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizationStep {
    pub slot: usize,
    /// Ports grounded by this step, in input order of the slot.
    pub regrounded: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct NormalizationTrace {
    pub steps: Vec<NormalizationStep>,
}

/// Slots that the rewrite may fire on, in index order.
pub fn redexes(w: &WiringDiagram) -> Vec<usize> {
    (0..w.slot_count())
        .filter(|&s| !w.is_discarded(s))
        .filter(|&s| (0..w.slots()[s].outputs().len()).all(|j| w.grounds().contains(&PortRef::slot_out(s, j))))
        .collect()
}

/// Fire the rewrite on `slot`, which must be a redex.
pub fn discard_step(w: &WiringDiagram, slot: usize) -> Result<(WiringDiagram, NormalizationStep), DiagramError> {
    let sig = &w.slots()[slot];
    let mut grounds: BTreeSet<PortRef> = w.grounds().clone();
    for j in 0..sig.outputs().len() {
        grounds.remove(&PortRef::slot_out(slot, j));
    }
    let mut wires: BTreeSet<Wire> = w.wires().clone();
    let mut regrounded = Vec::new();
    for i in 0..sig.inputs().len() {
        let sink = PortRef::slot_in(slot, i);
        let wire = *w.wire_at(sink).ok_or(DiagramError::DanglingPort(sink))?;
        let source = wire.other(sink).expect("wire contains its end");
        wires.remove(&wire);
        grounds.insert(source);
        regrounded.push(source.to_string());
    }
    let mut discarded = w.discarded().clone();
    discarded.insert(slot);
    let next = WiringDiagram::new(
        w.outer().clone(),
        w.slots().to_vec(),
        wires,
        grounds,
        loop_labels(w),
        discarded,
    )?;
    Ok((next, NormalizationStep { slot, regrounded }))
}

fn loop_labels(w: &WiringDiagram) -> Vec<crate::types::TypeLabel> {
    w.loops()
        .iter()
        .flat_map(|(l, &n)| std::iter::repeat_n(l.clone(), n))
        .collect()
}

fn check(w: &WiringDiagram) -> Result<(), CausalError> {
    let report = validate(OperadVariant::WGround, w);
    if report.ok() {
        Ok(())
    } else {
        Err(CausalError::NotCausal(report))
    }
}

/// Rewrite to normal form, always firing the lowest-indexed redex.
pub fn normalize_causal(w: &WiringDiagram) -> Result<(WiringDiagram, NormalizationTrace), CausalError> {
    check(w)?;
    let mut cur = w.clone();
    let mut trace = NormalizationTrace::default();
    while let Some(&s) = redexes(&cur).first() {
        let (next, step) = discard_step(&cur, s)?;
        trace.steps.push(step);
        cur = next;
    }
    Ok((cur, trace))
}

/// Canonical forms of every normal form reachable by some rewrite order.
/// A single entry means the rewriting is confluent from `w`.
pub fn exhaustive_normal_forms(w: &WiringDiagram) -> Result<BTreeSet<CanonicalWiring>, CausalError> {
    check(w)?;
    let mut seen = BTreeSet::new();
    let mut normal = BTreeSet::new();
    let mut stack = vec![w.clone()];
    while let Some(cur) = stack.pop() {
        let key = cur.canonical_form();
        if !seen.insert(key.clone()) {
            continue;
        }
        let r = redexes(&cur);
        if r.is_empty() {
            normal.insert(key);
        }
        for s in r {
            stack.push(discard_step(&cur, s)?.0);
        }
    }
    Ok(normal)
}

/// Equality after normalization.
pub fn causal_equal(a: &WiringDiagram, b: &WiringDiagram) -> Result<bool, CausalError> {
    Ok(normalize_causal(a)?.0.canonical_form() == normalize_causal(b)?.0.canonical_form())
}

/// True when no live slot has all of its outputs grounded.
pub fn is_normal(w: &WiringDiagram) -> bool {
    redexes(w).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::stochastic_eval;
    use crate::tensor::Matrix;
    use crate::types::{Signature, TypeLabel};

    fn a() -> TypeLabel {
        TypeLabel::new("A", 2)
    }

    /// outer A -> () ; s0: A -> A ; s1: A -> A ; s1 output grounded.
    fn chain() -> WiringDiagram {
        let f = Signature::boxed(vec![a()], vec![a()]);
        WiringDiagram::builder(Signature::boxed(vec![a()], vec![]))
            .slots([f.clone(), f])
            .wire(PortRef::outer_in(0), PortRef::slot_in(0, 0))
            .wire(PortRef::slot_out(0, 0), PortRef::slot_in(1, 0))
            .ground(PortRef::slot_out(1, 0))
            .build()
            .unwrap()
    }

    #[test]
    fn chain_collapses() {
        let (n, trace) = normalize_causal(&chain()).unwrap();
        assert_eq!(trace.steps.iter().map(|s| s.slot).collect::<Vec<_>>(), vec![1, 0]);
        assert_eq!(n.discarded().len(), 2);
        assert!(n.wires().is_empty());
        assert_eq!(n.grounds().iter().copied().collect::<Vec<_>>(), vec![PortRef::outer_in(0)]);
        assert!(is_normal(&n));
    }

    #[test]
    fn semantics_preserved() {
        let k0 = Matrix::from_rows(&[&[0.3, 0.6], &[0.7, 0.4]]);
        let k1 = Matrix::from_rows(&[&[0.9, 0.5], &[0.1, 0.5]]);
        let w = chain();
        let before = stochastic_eval(&w, &[k0.clone(), k1.clone()]).unwrap();
        let after = stochastic_eval(&normalize_causal(&w).unwrap().0, &[k0, k1]).unwrap();
        assert!(before.max_abs_diff(&after) <= 1e-12);
    }

    #[test]
    fn zero_output_slot_fires() {
        let w = WiringDiagram::builder(Signature::boxed(vec![a()], vec![]))
            .slot(Signature::boxed(vec![a()], vec![]))
            .wire(PortRef::outer_in(0), PortRef::slot_in(0, 0))
            .build()
            .unwrap();
        assert_eq!(redexes(&w), vec![0]);
        let (n, _) = normalize_causal(&w).unwrap();
        assert!(n.is_discarded(0));
    }

    #[test]
    fn branching_is_confluent() {
        // Two independent grounded slots fed from outer inputs.
        let f = Signature::boxed(vec![a()], vec![a()]);
        let w = WiringDiagram::builder(Signature::boxed(vec![a(), a()], vec![]))
            .slots([f.clone(), f])
            .wire(PortRef::outer_in(0), PortRef::slot_in(0, 0))
            .wire(PortRef::outer_in(1), PortRef::slot_in(1, 0))
            .ground(PortRef::slot_out(0, 0))
            .ground(PortRef::slot_out(1, 0))
            .build()
            .unwrap();
        assert_eq!(exhaustive_normal_forms(&w).unwrap().len(), 1);
    }

    #[test]
    fn rejects_non_causal() {
        let cup = crate::variants::generator(&crate::variants::Generator::Cup(a())).unwrap();
        assert!(matches!(normalize_causal(&cup), Err(CausalError::NotCausal(_))));
    }
}
