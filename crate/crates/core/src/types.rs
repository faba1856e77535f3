//! System labels, boundary signatures and port addresses.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// A system type. Two labels are the same type only if both name and
/// dimension agree.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TypeLabel {
    name: Arc<str>,
    dim: usize,
}

impl TypeLabel {
    /// Panics if `dim` is zero.
    pub fn new(name: impl AsRef<str>, dim: usize) -> Self {
        assert!(dim >= 1, "type dimension must be at least 1");
        TypeLabel {
            name: Arc::from(name.as_ref()),
            dim,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl fmt::Debug for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name, self.dim)
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// The boundary shape of a box, a dot, or the empty output.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Signature {
    Box {
        inputs: Vec<TypeLabel>,
        outputs: Vec<TypeLabel>,
    },
    /// Ports in cyclic order starting from the basepoint.
    Dot { ports: Vec<TypeLabel> },
    Empty,
}

impl Signature {
    pub fn boxed(inputs: Vec<TypeLabel>, outputs: Vec<TypeLabel>) -> Self {
        Signature::Box { inputs, outputs }
    }

    pub fn dot(ports: Vec<TypeLabel>) -> Self {
        Signature::Dot { ports }
    }

    pub fn is_box(&self) -> bool {
        matches!(self, Signature::Box { .. })
    }

    pub fn is_dot(&self) -> bool {
        matches!(self, Signature::Dot { .. })
    }

    pub fn is_empty_object(&self) -> bool {
        matches!(self, Signature::Empty)
    }

    /// Labels on one face, or `None` if the face does not exist for this kind
    /// of signature.
    pub fn face(&self, face: Face) -> Option<&[TypeLabel]> {
        match (self, face) {
            (Signature::Box { inputs, .. }, Face::In) => Some(inputs),
            (Signature::Box { outputs, .. }, Face::Out) => Some(outputs),
            (Signature::Dot { ports }, Face::Port) => Some(ports),
            _ => None,
        }
    }

    pub fn label_at(&self, face: Face, index: usize) -> Option<&TypeLabel> {
        self.face(face).and_then(|labels| labels.get(index))
    }

    /// Faces that carry ports for this kind of signature.
    pub fn faces(&self) -> &'static [Face] {
        match self {
            Signature::Box { .. } => &[Face::In, Face::Out],
            Signature::Dot { .. } => &[Face::Port],
            Signature::Empty => &[],
        }
    }

    /// Every (face, index, label) triple in face order.
    pub fn ports(&self) -> impl Iterator<Item = (Face, usize, &TypeLabel)> {
        self.faces().iter().flat_map(move |&face| {
            self.face(face)
                .unwrap_or(&[])
                .iter()
                .enumerate()
                .map(move |(i, l)| (face, i, l))
        })
    }

    pub fn port_count(&self) -> usize {
        match self {
            Signature::Box { inputs, outputs } => inputs.len() + outputs.len(),
            Signature::Dot { ports } => ports.len(),
            Signature::Empty => 0,
        }
    }

    pub fn inputs(&self) -> &[TypeLabel] {
        self.face(Face::In).unwrap_or(&[])
    }

    pub fn outputs(&self) -> &[TypeLabel] {
        self.face(Face::Out).unwrap_or(&[])
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, labels: &[TypeLabel]) -> fmt::Result {
            if labels.is_empty() {
                return f.write_str("()");
            }
            for (i, l) in labels.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{l}")?;
            }
            Ok(())
        }
        match self {
            Signature::Box { inputs, outputs } => {
                list(f, inputs)?;
                f.write_str(" -> ")?;
                list(f, outputs)
            }
            Signature::Dot { ports } => {
                f.write_str("dot ")?;
                list(f, ports)
            }
            Signature::Empty => f.write_str("empty"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Loc {
    Outer,
    Inner(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Face {
    In,
    Out,
    Port,
}

impl Face {
    pub fn keyword(self) -> &'static str {
        match self {
            Face::In => "in",
            Face::Out => "out",
            Face::Port => "port",
        }
    }
}

/// Address of a single wire endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PortRef {
    pub loc: Loc,
    pub face: Face,
    pub index: usize,
}

impl PortRef {
    pub const fn new(loc: Loc, face: Face, index: usize) -> Self {
        PortRef { loc, face, index }
    }

    pub const fn outer_in(index: usize) -> Self {
        PortRef::new(Loc::Outer, Face::In, index)
    }

    pub const fn outer_out(index: usize) -> Self {
        PortRef::new(Loc::Outer, Face::Out, index)
    }

    pub const fn outer_port(index: usize) -> Self {
        PortRef::new(Loc::Outer, Face::Port, index)
    }

    pub const fn slot_in(slot: usize, index: usize) -> Self {
        PortRef::new(Loc::Inner(slot), Face::In, index)
    }

    pub const fn slot_out(slot: usize, index: usize) -> Self {
        PortRef::new(Loc::Inner(slot), Face::Out, index)
    }

    pub const fn slot_port(slot: usize, index: usize) -> Self {
        PortRef::new(Loc::Inner(slot), Face::Port, index)
    }

    /// Sources are the ports a wire flows out of: outer inputs and inner
    /// outputs. Dot ports have no polarity.
    pub fn is_source(&self) -> bool {
        matches!(
            (self.loc, self.face),
            (Loc::Outer, Face::In) | (Loc::Inner(_), Face::Out)
        )
    }

    pub fn is_sink(&self) -> bool {
        matches!(
            (self.loc, self.face),
            (Loc::Outer, Face::Out) | (Loc::Inner(_), Face::In)
        )
    }

    pub fn slot(&self) -> Option<usize> {
        match self.loc {
            Loc::Outer => None,
            Loc::Inner(i) => Some(i),
        }
    }
}

impl fmt::Display for PortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.loc {
            Loc::Outer => write!(f, "outer.{}[{}]", self.face.keyword(), self.index),
            Loc::Inner(s) => write!(f, "s{}.{}[{}]", s, self.face.keyword(), self.index),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polarity() {
        assert!(PortRef::outer_in(0).is_source());
        assert!(PortRef::slot_out(2, 1).is_source());
        assert!(PortRef::outer_out(0).is_sink());
        assert!(PortRef::slot_in(0, 0).is_sink());
        assert!(!PortRef::slot_port(0, 0).is_source());
        assert!(!PortRef::slot_port(0, 0).is_sink());
    }

    #[test]
    fn faces_by_kind() {
        let a = TypeLabel::new("A", 2);
        let b = Signature::boxed(vec![a.clone()], vec![a.clone(), a.clone()]);
        assert_eq!(b.port_count(), 3);
        assert!(b.face(Face::Port).is_none());
        let d = Signature::dot(vec![a.clone()]);
        assert_eq!(d.ports().count(), 1);
        assert_eq!(Signature::Empty.ports().count(), 0);
    }

    #[test]
    #[should_panic]
    fn zero_dimension_rejected() {
        TypeLabel::new("Z", 0);
    }
}
