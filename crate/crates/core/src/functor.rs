//! Functors between the circuit and undirected operads.
//!
//! `alpha` forgets direction: a box `ins -> outs` becomes the dot with ports
//! `outs ++ reverse(ins)`, so output `j` lands on port `j` and input `i` on
//! port `m + (n - 1 - i)` for `n` inputs and `m` outputs. `beta` reads every
//! dot port as an output of an input-free box. `alpha . beta` is the
//! identity; `eta` relates a box to its image under `beta . alpha`.

use thiserror::Error;

use crate::algebra::{check_inputs, Algebra, AlgebraError, CarrierSpec, Element};
use crate::diagram::{DiagramError, Wire, WiringDiagram};
use crate::types::{Face, Loc, PortRef, Signature};
use crate::variants::{validate, OperadVariant, ValidationReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FunctorError {
    #[error("expected a box signature, got {0}")]
    NotABox(Signature),
    #[error("expected a dot signature, got {0}")]
    NotADot(Signature),
    #[error("not a circuit wiring: {0}")]
    NotValidWC(ValidationReport),
    #[error("not an undirected wiring: {0}")]
    NotValidWD(ValidationReport),
    #[error("algebra is over {got}, expected {expected}")]
    VariantMismatch { expected: OperadVariant, got: OperadVariant },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

pub fn alpha_object(sig: &Signature) -> Result<Signature, FunctorError> {
    match sig {
        Signature::Box { inputs, outputs } => {
            let ports = outputs.iter().chain(inputs.iter().rev()).cloned().collect();
            Ok(Signature::dot(ports))
        }
        other => Err(FunctorError::NotABox(other.clone())),
    }
}

pub fn beta_object(sig: &Signature) -> Result<Signature, FunctorError> {
    match sig {
        Signature::Dot { ports } => Ok(Signature::boxed(vec![], ports.clone())),
        other => Err(FunctorError::NotADot(other.clone())),
    }
}

/// Port index of a box port after `alpha`.
fn alpha_port(sig: &Signature, face: Face, index: usize) -> usize {
    let (n, m) = (sig.inputs().len(), sig.outputs().len());
    match face {
        Face::Out => index,
        Face::In => m + (n - 1 - index),
        Face::Port => unreachable!("box signatures have no dot ports"),
    }
}

fn remap(w: &WiringDiagram, outer: Signature, slots: Vec<Signature>, f: impl Fn(PortRef) -> PortRef) -> Result<WiringDiagram, DiagramError> {
    WiringDiagram::new(
        outer,
        slots,
        w.wires().iter().map(|x| {
            let (a, b) = x.ends();
            Wire::new(f(a), f(b))
        }),
        w.grounds().iter().map(|&g| f(g)),
        w.loops().iter().flat_map(|(l, &n)| std::iter::repeat_n(l.clone(), n)),
        w.discarded().iter().copied(),
    )
}

pub fn alpha_wiring(w: &WiringDiagram) -> Result<WiringDiagram, FunctorError> {
    let report = validate(OperadVariant::WC, w);
    if !report.ok() {
        return Err(FunctorError::NotValidWC(report));
    }
    let outer = alpha_object(w.outer())?;
    let slots = w.slots().iter().map(alpha_object).collect::<Result<Vec<_>, _>>()?;
    Ok(remap(w, outer, slots, |p| {
        let sig = w.signature_at(p.loc).expect("validated");
        PortRef::new(p.loc, Face::Port, alpha_port(sig, p.face, p.index))
    })?)
}

pub fn beta_wiring(w: &WiringDiagram) -> Result<WiringDiagram, FunctorError> {
    let report = validate(OperadVariant::WD, w);
    if !report.ok() {
        return Err(FunctorError::NotValidWD(report));
    }
    let outer = beta_object(w.outer())?;
    let slots = w.slots().iter().map(beta_object).collect::<Result<Vec<_>, _>>()?;
    Ok(remap(w, outer, slots, |p| PortRef::new(p.loc, Face::Out, p.index))?)
}

/// The one-slot circuit wiring with slot `sig` and outer `beta(alpha(sig))`,
/// bending every input of the slot round into an outer output.
pub fn eta_component(sig: &Signature) -> Result<WiringDiagram, FunctorError> {
    let target = beta_object(&alpha_object(sig)?)?;
    let mut b = WiringDiagram::builder(target).slot(sig.clone());
    for (face, i, _) in sig.ports() {
        b = b.wire(PortRef::outer_out(alpha_port(sig, face, i)), PortRef::new(Loc::Inner(0), face, i));
    }
    Ok(b.build()?)
}

/// Inverse of [`eta_component`]: slot `beta(alpha(sig))`, outer `sig`.
pub fn eta_inverse(sig: &Signature) -> Result<WiringDiagram, FunctorError> {
    let source = beta_object(&alpha_object(sig)?)?;
    let mut b = WiringDiagram::builder(sig.clone()).slot(source);
    for (face, i, _) in sig.ports() {
        b = b.wire(PortRef::new(Loc::Outer, face, i), PortRef::slot_out(0, alpha_port(sig, face, i)));
    }
    Ok(b.build()?)
}

/// Both sides of the naturality square for `w`: `eta(outer)` after `w`,
/// and `beta(alpha(w))` after the `eta` of each slot.
pub fn naturality_sides(w: &WiringDiagram) -> Result<(WiringDiagram, WiringDiagram), FunctorError> {
    let lhs = eta_component(w.outer())?.substitute(0, w)?;
    let mut rhs = beta_wiring(&alpha_wiring(w)?)?;
    for (i, sig) in w.slots().iter().enumerate().rev() {
        rhs = rhs.substitute(i, &eta_component(sig)?)?;
    }
    Ok((lhs, rhs))
}

pub fn check_naturality(w: &WiringDiagram) -> Result<bool, FunctorError> {
    let (l, r) = naturality_sides(w)?;
    Ok(l.canonical_form() == r.canonical_form())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transport {
    /// Pull an undirected algebra back to circuit wirings.
    AlongAlpha,
    /// Pull a circuit algebra back to undirected wirings.
    AlongBeta,
}

/// An algebra precomposed with `alpha` or `beta`. Elements are passed
/// through unchanged.
pub struct TransportedAlgebra {
    inner: Box<dyn Algebra>,
    along: Transport,
}

pub fn transport_algebra(inner: Box<dyn Algebra>, along: Transport) -> Result<TransportedAlgebra, FunctorError> {
    let expected = match along {
        Transport::AlongAlpha => OperadVariant::WD,
        Transport::AlongBeta => OperadVariant::WC,
    };
    if inner.variant() != expected {
        return Err(FunctorError::VariantMismatch {
            expected,
            got: inner.variant(),
        });
    }
    Ok(TransportedAlgebra { inner, along })
}

impl TransportedAlgebra {
    fn image_object(&self, sig: &Signature) -> Result<Signature, FunctorError> {
        match self.along {
            Transport::AlongAlpha => alpha_object(sig),
            Transport::AlongBeta => beta_object(sig),
        }
    }

    fn image_wiring(&self, w: &WiringDiagram) -> Result<WiringDiagram, FunctorError> {
        match self.along {
            Transport::AlongAlpha => alpha_wiring(w),
            Transport::AlongBeta => beta_wiring(w),
        }
    }
}

impl Algebra for TransportedAlgebra {
    fn variant(&self) -> OperadVariant {
        match self.along {
            Transport::AlongAlpha => OperadVariant::WC,
            Transport::AlongBeta => OperadVariant::WD,
        }
    }

    fn carrier(&self, sig: &Signature) -> CarrierSpec {
        let image = self.image_object(sig).unwrap_or_else(|_| sig.clone());
        let mut spec = self.inner.carrier(&image);
        // Free elements live over the image object; keep it so that
        // inhabitants are recognised.
        if spec.kind != crate::algebra::ElementKind::Free {
            spec.signature = sig.clone();
        }
        spec
    }

    fn apply(&self, w: &WiringDiagram, elements: &[Element]) -> Result<Element, AlgebraError> {
        check_inputs(self, w, elements)?;
        let image = self.image_wiring(w).map_err(|e| match e {
            FunctorError::Diagram(d) => AlgebraError::Diagram(d),
            other => unreachable!("validated wiring failed to transport: {other}"),
        })?;
        self.inner.apply(&image, elements)
    }

    fn name(&self) -> String {
        let dir = match self.along {
            Transport::AlongAlpha => "alpha",
            Transport::AlongBeta => "beta",
        };
        format!("{dir}*({})", self.inner.name())
    }
}
