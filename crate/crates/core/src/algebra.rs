//! Operad algebras: interpretations assigning a carrier to every signature
//! and a function to every wiring.
//!
//! Four concrete algebras are provided:
//!
//! * [`FreeAlgebra`] acts on label-decorated diagrams by substitution and is
//!   the structural oracle for every law;
//! * [`TensorAlgebra`] interprets dot wirings as tensor-network contraction;
//! * [`MatrixAlgebra`] interprets acyclic box wirings as real matrices;
//! * [`StochasticAlgebra`] interprets causal wirings as column-stochastic
//!   kernels, with grounds acting as the all-ones covector.
//!
//! Index convention: composite systems are indexed in declared port order
//! with the leftmost port varying slowest. A box `ins -> outs` is a matrix
//! with rows indexed by `outs` and columns by `ins`; as a tensor its axes are
//! `outs ++ ins`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::diagram::{CanonicalWiring, DiagramError, WiringDiagram};
use crate::expression::{decompose_acyclic, ExprError, Expression};
use crate::tensor::{max_abs_diff, Matrix, Network, ShapeError, Tensor};
use crate::types::{Face, Loc, PortRef, Signature, TypeLabel};
use crate::variants::{validate, OperadVariant, ValidationReport};

/// Column-sum tolerance for stochastic kernels.
pub const KERNEL_SUM_TOL: f64 = 1e-12;
/// Lowest entry still accepted as non-negative in a kernel.
pub const KERNEL_NEG_TOL: f64 = -1e-15;
/// Agreement required between the two matrix evaluation paths.
pub const PATH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("wiring is not a legal {variant} operation: {report}")]
    VariantMismatch {
        variant: OperadVariant,
        report: ValidationReport,
    },
    #[error("slot {slot} expects {expected}, got {got}")]
    CarrierMismatch {
        slot: usize,
        expected: CarrierSpec,
        got: String,
    },
    #[error("wiring has {expected} slots but {got} elements were given")]
    ArityMismatch { expected: usize, got: usize },
    #[error("element for slot {slot} is not a stochastic kernel: {detail}")]
    NotCausal { slot: usize, detail: String },
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("wiring is not acyclic: {0}")]
    NotAcyclic(ExprError),
    #[error("matrix evaluation paths disagree by {0:e}")]
    PathDisagreement(f64),
    #[error("mixture weight {0} is outside [0, 1]")]
    BadWeight(f64),
    #[error("{0} cannot be mixed")]
    NotConvex(&'static str),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// A label-decorated diagram: an element of the free algebra. `labels[i]`
/// names the atomic process sitting in slot `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeDiagram {
    pub diagram: WiringDiagram,
    pub labels: Vec<String>,
}

impl FreeDiagram {
    /// A single named process of the given shape.
    pub fn atom(sig: &Signature, label: impl Into<String>) -> Result<Self, DiagramError> {
        Ok(FreeDiagram {
            diagram: WiringDiagram::identity(sig)?,
            labels: vec![label.into()],
        })
    }

    pub fn canonical(&self) -> (CanonicalWiring, &[String]) {
        (self.diagram.canonical_form(), &self.labels)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    Free(FreeDiagram),
    Tensor(Tensor),
    Matrix(Matrix),
    /// Column-stochastic matrix.
    Kernel(Matrix),
    Scalar(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ElementKind {
    Free,
    Tensor,
    Matrix,
    Kernel,
    Scalar,
}

impl Element {
    pub fn kind(&self) -> ElementKind {
        match self {
            Element::Free(_) => ElementKind::Free,
            Element::Tensor(_) => ElementKind::Tensor,
            Element::Matrix(_) => ElementKind::Matrix,
            Element::Kernel(_) => ElementKind::Kernel,
            Element::Scalar(_) => ElementKind::Scalar,
        }
    }

    fn describe(&self) -> String {
        match self {
            Element::Free(f) => format!("free diagram on {}", f.diagram.outer()),
            Element::Tensor(t) => format!("tensor of shape {:?}", t.shape()),
            Element::Matrix(m) => format!("{}x{} matrix", m.rows(), m.cols()),
            Element::Kernel(m) => format!("{}x{} kernel", m.rows(), m.cols()),
            Element::Scalar(v) => format!("scalar {v}"),
        }
    }

    /// Numeric payload in row-major order, if any.
    pub fn values(&self) -> Option<Vec<f64>> {
        match self {
            Element::Free(_) => None,
            Element::Tensor(t) => Some(t.data().to_vec()),
            Element::Matrix(m) | Element::Kernel(m) => Some(m.data().to_vec()),
            Element::Scalar(v) => Some(vec![*v]),
        }
    }

    /// Max-norm distance. Free elements are at distance zero when their
    /// canonical forms agree and infinitely far apart otherwise.
    pub fn distance(&self, other: &Element) -> f64 {
        match (self, other) {
            (Element::Free(a), Element::Free(b)) => {
                if a.canonical() == b.canonical() {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            (Element::Tensor(a), Element::Tensor(b)) if a.shape() != b.shape() => f64::INFINITY,
            (Element::Matrix(a) | Element::Kernel(a), Element::Matrix(b) | Element::Kernel(b)) => {
                a.max_abs_diff(b)
            }
            _ => match (self.values(), other.values()) {
                (Some(a), Some(b)) if self.kind() == other.kind() => max_abs_diff(&a, &b),
                _ => f64::INFINITY,
            },
        }
    }

    /// `p * self + (1 - p) * other`.
    pub fn mix(&self, p: f64, other: &Element) -> Result<Element, AlgebraError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(AlgebraError::BadWeight(p));
        }
        let q = 1.0 - p;
        let comb = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| p * x + q * y).collect() };
        let shape_err = || {
            AlgebraError::Shape(ShapeError::Mismatch {
                expected: vec![],
                got: vec![],
            })
        };
        Ok(match (self, other) {
            (Element::Tensor(a), Element::Tensor(b)) if a.shape() == b.shape() => {
                Element::Tensor(Tensor::new(a.shape().to_vec(), comb(a.data(), b.data()))?)
            }
            (Element::Matrix(a), Element::Matrix(b)) if a.rows() == b.rows() && a.cols() == b.cols() => {
                Element::Matrix(Matrix::new(a.rows(), a.cols(), comb(a.data(), b.data()))?)
            }
            (Element::Kernel(a), Element::Kernel(b)) if a.rows() == b.rows() && a.cols() == b.cols() => {
                Element::Kernel(Matrix::new(a.rows(), a.cols(), comb(a.data(), b.data()))?)
            }
            (Element::Scalar(a), Element::Scalar(b)) => Element::Scalar(p * a + q * b),
            (Element::Free(_), _) | (_, Element::Free(_)) => return Err(AlgebraError::NotConvex("free diagrams")),
            _ => return Err(shape_err()),
        })
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// What an algebra expects to find in a slot of a given signature.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CarrierSpec {
    pub signature: Signature,
    pub kind: ElementKind,
    /// Tensor shape, or `[rows, cols]` for matrices and kernels.
    pub shape: Vec<usize>,
}

impl fmt::Display for CarrierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} of shape {:?} for {}", self.kind, self.shape, self.signature)
    }
}

impl CarrierSpec {
    pub fn admits(&self, e: &Element) -> bool {
        match (self.kind, e) {
            (ElementKind::Scalar, Element::Scalar(_)) => true,
            (ElementKind::Scalar, Element::Tensor(t)) => t.shape().is_empty(),
            (ElementKind::Scalar, Element::Matrix(m) | Element::Kernel(m)) => m.rows() == 1 && m.cols() == 1,
            (ElementKind::Tensor, Element::Tensor(t)) => t.shape() == self.shape,
            (ElementKind::Matrix, Element::Matrix(m)) | (ElementKind::Kernel, Element::Kernel(m)) => {
                [m.rows(), m.cols()] == self.shape[..]
            }
            (ElementKind::Free, Element::Free(f)) => *f.diagram.outer() == self.signature,
            _ => false,
        }
    }
}

pub trait Algebra {
    fn variant(&self) -> OperadVariant;
    fn carrier(&self, sig: &Signature) -> CarrierSpec;
    fn apply(&self, w: &WiringDiagram, elements: &[Element]) -> Result<Element, AlgebraError>;

    fn name(&self) -> String {
        format!("{:?}-algebra", self.variant())
    }
}

/// Shared precondition check: variant legality, arity, carriers.
pub fn check_inputs<A: Algebra + ?Sized>(alg: &A, w: &WiringDiagram, elements: &[Element]) -> Result<(), AlgebraError> {
    let report = validate(alg.variant(), w);
    if !report.ok() {
        return Err(AlgebraError::VariantMismatch {
            variant: alg.variant(),
            report,
        });
    }
    if elements.len() != w.slot_count() {
        return Err(AlgebraError::ArityMismatch {
            expected: w.slot_count(),
            got: elements.len(),
        });
    }
    for (slot, (sig, e)) in w.slots().iter().zip(elements).enumerate() {
        let spec = alg.carrier(sig);
        if !spec.admits(e) {
            return Err(AlgebraError::CarrierMismatch {
                slot,
                expected: spec,
                got: e.describe(),
            });
        }
    }
    Ok(())
}

fn product(labels: &[TypeLabel]) -> usize {
    labels.iter().map(TypeLabel::dim).product()
}

fn scalar_value(e: &Element) -> Option<f64> {
    match e {
        Element::Scalar(v) => Some(*v),
        Element::Tensor(t) if t.shape().is_empty() => Some(t.data()[0]),
        Element::Matrix(m) | Element::Kernel(m) if m.rows() == 1 && m.cols() == 1 => Some(m.get(0, 0)),
        _ => None,
    }
}

/// Ports of a signature in tensor-axis order: dot ports in order, box
/// outputs then inputs.
fn axis_order(sig: &Signature) -> Vec<(Face, usize)> {
    match sig {
        Signature::Dot { ports } => (0..ports.len()).map(|i| (Face::Port, i)).collect(),
        Signature::Box { inputs, outputs } => (0..outputs.len())
            .map(|i| (Face::Out, i))
            .chain((0..inputs.len()).map(|i| (Face::In, i)))
            .collect(),
        Signature::Empty => vec![],
    }
}

fn axis_shape(sig: &Signature) -> Vec<usize> {
    axis_order(sig)
        .into_iter()
        .map(|(f, i)| sig.label_at(f, i).unwrap().dim())
        .collect()
}

/// Contract a wiring as a tensor network. `tensors[i]` is the tensor for
/// slot `i` in axis order and is ignored for discarded slots. Grounds sum
/// their port against the all-ones covector and each floating loop
/// multiplies by its dimension. The result is indexed by the outer
/// boundary in axis order.
pub fn contract_wiring(w: &WiringDiagram, tensors: &[Tensor]) -> Result<Tensor, AlgebraError> {
    let mut net = Network::new();
    let mut var_of = std::collections::BTreeMap::new();
    for wire in w.wires() {
        let (a, b) = wire.ends();
        let v = net.var(w.label(a)?.dim());
        var_of.insert(a, v);
        var_of.insert(b, v);
    }
    for &g in w.grounds() {
        let v = net.var(w.label(g)?.dim());
        var_of.insert(g, v);
    }
    for (s, sig) in w.slots().iter().enumerate() {
        if w.is_discarded(s) {
            continue;
        }
        let vars = axis_order(sig)
            .into_iter()
            .map(|(f, i)| var_of[&PortRef::new(Loc::Inner(s), f, i)])
            .collect();
        net.factor(vars, &tensors[s])?;
    }
    net.output(
        axis_order(w.outer())
            .into_iter()
            .map(|(f, i)| var_of[&PortRef::new(Loc::Outer, f, i)])
            .collect(),
    );
    let mut t = net.contract();
    let factor: f64 = w
        .loops()
        .iter()
        .map(|(l, &n)| (l.dim() as f64).powi(n as i32))
        .product();
    if factor != 1.0 {
        t = Tensor::new(t.shape().to_vec(), t.data().iter().map(|x| x * factor).collect())?;
    }
    Ok(t)
}

/// The syntactic algebra over one variant.
#[derive(Clone, Copy, Debug)]
pub struct FreeAlgebra {
    pub variant: OperadVariant,
}

impl Algebra for FreeAlgebra {
    fn variant(&self) -> OperadVariant {
        self.variant
    }

    fn carrier(&self, sig: &Signature) -> CarrierSpec {
        CarrierSpec {
            signature: sig.clone(),
            kind: ElementKind::Free,
            shape: vec![],
        }
    }

    fn apply(&self, w: &WiringDiagram, elements: &[Element]) -> Result<Element, AlgebraError> {
        check_inputs(self, w, elements)?;
        let mut d = w.clone();
        let mut labels = Vec::new();
        for (i, e) in elements.iter().enumerate().rev() {
            let Element::Free(f) = e else { unreachable!("carrier checked") };
            d = d.substitute(i, &f.diagram)?;
            let mut l = f.labels.clone();
            l.extend(labels);
            labels = l;
        }
        Ok(Element::Free(FreeDiagram { diagram: d, labels }))
    }
}

/// Decorate the slots of `w` with names.
pub fn free_eval(w: &WiringDiagram, labels: &[impl AsRef<str>]) -> Result<FreeDiagram, AlgebraError> {
    if labels.len() != w.slot_count() {
        return Err(AlgebraError::ArityMismatch {
            expected: w.slot_count(),
            got: labels.len(),
        });
    }
    Ok(FreeDiagram {
        diagram: w.clone(),
        labels: labels.iter().map(|l| l.as_ref().to_string()).collect(),
    })
}

/// Dense real tensors on dot wirings.
#[derive(Clone, Copy, Debug, Default)]
pub struct TensorAlgebra;

impl Algebra for TensorAlgebra {
    fn variant(&self) -> OperadVariant {
        OperadVariant::WD
    }

    fn carrier(&self, sig: &Signature) -> CarrierSpec {
        let shape = axis_shape(sig);
        CarrierSpec {
            signature: sig.clone(),
            kind: if shape.is_empty() { ElementKind::Scalar } else { ElementKind::Tensor },
            shape,
        }
    }

    fn apply(&self, w: &WiringDiagram, elements: &[Element]) -> Result<Element, AlgebraError> {
        check_inputs(self, w, elements)?;
        let tensors: Vec<Tensor> = elements
            .iter()
            .map(|e| match e {
                Element::Tensor(t) => t.clone(),
                other => Tensor::scalar(scalar_value(other).expect("carrier checked")),
            })
            .collect();
        let t = contract_wiring(w, &tensors)?;
        Ok(tensor_element(t))
    }
}

fn tensor_element(t: Tensor) -> Element {
    if t.shape().is_empty() {
        Element::Scalar(t.data()[0])
    } else {
        Element::Tensor(t)
    }
}

/// Contract a dot wiring. Outer ports index the result in port order.
pub fn tensor_eval(w: &WiringDiagram, tensors: &[Tensor]) -> Result<Tensor, AlgebraError> {
    let elements: Vec<Element> = tensors.iter().cloned().map(tensor_element).collect();
    check_inputs(&TensorAlgebra, w, &elements)?;
    contract_wiring(w, tensors)
}

/// Real matrices on acyclic box wirings.
#[derive(Clone, Copy, Debug, Default)]
pub struct MatrixAlgebra;

fn matrix_carrier(sig: &Signature, kind: ElementKind) -> CarrierSpec {
    let (rows, cols) = (product(sig.outputs()), product(sig.inputs()));
    let zero_ports = sig.port_count() == 0;
    CarrierSpec {
        signature: sig.clone(),
        kind: if zero_ports { ElementKind::Scalar } else { kind },
        shape: if zero_ports { vec![] } else { vec![rows, cols] },
    }
}

fn as_matrix(e: &Element) -> Matrix {
    match e {
        Element::Matrix(m) | Element::Kernel(m) => m.clone(),
        other => Matrix::new(1, 1, vec![scalar_value(other).expect("carrier checked")]).unwrap(),
    }
}

fn matrix_as_tensor(m: &Matrix, sig: &Signature) -> Result<Tensor, ShapeError> {
    m.clone().into_tensor(axis_shape(sig))
}

fn matrix_element(m: Matrix, sig: &Signature, kernel: bool) -> Element {
    if sig.port_count() == 0 {
        Element::Scalar(m.get(0, 0))
    } else if kernel {
        Element::Kernel(m)
    } else {
        Element::Matrix(m)
    }
}

impl Algebra for MatrixAlgebra {
    fn variant(&self) -> OperadVariant {
        OperadVariant::WA
    }

    fn carrier(&self, sig: &Signature) -> CarrierSpec {
        matrix_carrier(sig, ElementKind::Matrix)
    }

    fn apply(&self, w: &WiringDiagram, elements: &[Element]) -> Result<Element, AlgebraError> {
        check_inputs(self, w, elements)?;
        let mats: Vec<Matrix> = elements.iter().map(as_matrix).collect();
        Ok(matrix_element(matrix_eval(w, &mats)?, w.outer(), false))
    }
}

/// Fold an expression: `Seq` is matrix product, `Par` Kronecker product,
/// `Id` the identity and `Swap` the factor-exchanging permutation.
pub fn eval_expression(expr: &Expression, mats: &[Matrix]) -> Result<Matrix, AlgebraError> {
    Ok(match expr {
        Expression::Slot(i) => mats[*i].clone(),
        Expression::Id(t) => Matrix::identity(t.dim()),
        Expression::Swap(a, b) => Matrix::swap(a.dim(), b.dim()),
        Expression::Unit => Matrix::identity(1),
        Expression::Seq(f, g) => eval_expression(g, mats)?.matmul(&eval_expression(f, mats)?)?,
        Expression::Par(f, g) => eval_expression(f, mats)?.kron(&eval_expression(g, mats)?),
    })
}

/// Evaluate by generator decomposition.
pub fn matrix_eval_by_expression(w: &WiringDiagram, mats: &[Matrix]) -> Result<Matrix, AlgebraError> {
    let expr = decompose_acyclic(w).map_err(AlgebraError::NotAcyclic)?;
    check_matrix_shapes(w, mats)?;
    eval_expression(&expr, mats)
}

/// Evaluate by direct contraction of the directed tensor network.
pub fn matrix_eval_by_network(w: &WiringDiagram, mats: &[Matrix]) -> Result<Matrix, AlgebraError> {
    check_matrix_shapes(w, mats)?;
    let tensors = w
        .slots()
        .iter()
        .zip(mats)
        .map(|(sig, m)| matrix_as_tensor(m, sig))
        .collect::<Result<Vec<_>, _>>()?;
    let t = contract_wiring(w, &tensors)?;
    Ok(Matrix::new(
        product(w.outer().outputs()),
        product(w.outer().inputs()),
        t.into_data(),
    )?)
}

fn check_matrix_shapes(w: &WiringDiagram, mats: &[Matrix]) -> Result<(), AlgebraError> {
    if mats.len() != w.slot_count() {
        return Err(AlgebraError::ArityMismatch {
            expected: w.slot_count(),
            got: mats.len(),
        });
    }
    for (sig, m) in w.slots().iter().zip(mats) {
        let want = vec![product(sig.outputs()), product(sig.inputs())];
        if [m.rows(), m.cols()] != want[..] {
            return Err(ShapeError::Mismatch {
                expected: want,
                got: vec![m.rows(), m.cols()],
            }
            .into());
        }
    }
    Ok(())
}

/// Evaluate an acyclic wiring on matrices along both routes and require
/// them to agree within [`PATH_TOL`].
pub fn matrix_eval(w: &WiringDiagram, mats: &[Matrix]) -> Result<Matrix, AlgebraError> {
    let report = validate(OperadVariant::WA, w);
    if !report.ok() {
        return Err(AlgebraError::VariantMismatch {
            variant: OperadVariant::WA,
            report,
        });
    }
    let by_expr = matrix_eval_by_expression(w, mats)?;
    let by_net = matrix_eval_by_network(w, mats)?;
    let r = by_expr.max_abs_diff(&by_net);
    if r > PATH_TOL {
        return Err(AlgebraError::PathDisagreement(r));
    }
    Ok(by_net)
}

/// Column-stochastic kernels on causal wirings.
#[derive(Clone, Copy, Debug, Default)]
pub struct StochasticAlgebra;

/// Check that `m` is column-stochastic within tolerance.
pub fn check_kernel(m: &Matrix) -> Result<(), String> {
    if let Some(x) = m.data().iter().find(|&&x| x < KERNEL_NEG_TOL || !x.is_finite()) {
        return Err(format!("entry {x} is negative"));
    }
    for (c, s) in m.column_sums().into_iter().enumerate() {
        if (s - 1.0).abs() > KERNEL_SUM_TOL {
            return Err(format!("column {c} sums to {s}"));
        }
    }
    Ok(())
}

impl Algebra for StochasticAlgebra {
    fn variant(&self) -> OperadVariant {
        OperadVariant::WGround
    }

    fn carrier(&self, sig: &Signature) -> CarrierSpec {
        matrix_carrier(sig, ElementKind::Kernel)
    }

    fn apply(&self, w: &WiringDiagram, elements: &[Element]) -> Result<Element, AlgebraError> {
        check_inputs(self, w, elements)?;
        let kernels: Vec<Matrix> = elements.iter().map(as_matrix).collect();
        Ok(matrix_element(stochastic_eval(w, &kernels)?, w.outer(), true))
    }
}

/// Evaluate a causal wiring on kernels. Grounds marginalize, discarded
/// slots contribute nothing, and a closed wiring yields a 1x1 kernel.
pub fn stochastic_eval(w: &WiringDiagram, kernels: &[Matrix]) -> Result<Matrix, AlgebraError> {
    let report = validate(OperadVariant::WGround, w);
    if !report.ok() {
        return Err(AlgebraError::VariantMismatch {
            variant: OperadVariant::WGround,
            report,
        });
    }
    for (slot, k) in kernels.iter().enumerate() {
        check_kernel(k).map_err(|detail| AlgebraError::NotCausal { slot, detail })?;
    }
    matrix_eval_by_network(w, kernels)
}

/// Max-norm residual of the composition law: evaluating the substituted
/// wiring directly versus evaluating the guest first and feeding its result
/// to the host. `elements` are indexed by the slots of the substituted
/// wiring.
pub fn check_functoriality<A: Algebra + ?Sized>(
    alg: &A,
    host: &WiringDiagram,
    slot: usize,
    guest: &WiringDiagram,
    elements: &[Element],
) -> Result<f64, AlgebraError> {
    let composite = host.substitute(slot, guest)?;
    let direct = alg.apply(&composite, elements)?;
    let n = guest.slot_count();
    let inner = alg.apply(guest, &elements[slot..slot + n])?;
    let mut host_elements = elements[..slot].to_vec();
    host_elements.push(inner);
    host_elements.extend_from_slice(&elements[slot + n..]);
    let nested = alg.apply(host, &host_elements)?;
    Ok(direct.distance(&nested))
}

/// Max-norm residual of convex bilinearity in one slot: applying to a
/// `p`-mixture versus mixing the two applications.
pub fn check_convex_enrichment<A: Algebra + ?Sized>(
    alg: &A,
    w: &WiringDiagram,
    elements: &[Element],
    slot: usize,
    alt: &Element,
    p: f64,
) -> Result<f64, AlgebraError> {
    let mut mixed = elements.to_vec();
    mixed[slot] = elements[slot].mix(p, alt)?;
    let mut other = elements.to_vec();
    other[slot] = alt.clone();
    let lhs = alg.apply(w, &mixed)?;
    let rhs = alg.apply(w, elements)?.mix(p, &alg.apply(w, &other)?)?;
    Ok(lhs.distance(&rhs))
}

/// Look up one of the built-in algebras by name.
pub fn algebra_by_name(name: &str, free_variant: OperadVariant) -> Option<Box<dyn Algebra>> {
    Some(match name {
        "free" => Box::new(FreeAlgebra { variant: free_variant }),
        "tensor" => Box::new(TensorAlgebra),
        "matrix" => Box::new(MatrixAlgebra),
        "stochastic" => Box::new(StochasticAlgebra),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variants::{generator, Generator};

    fn a() -> TypeLabel {
        TypeLabel::new("A", 2)
    }
    fn b() -> TypeLabel {
        TypeLabel::new("B", 3)
    }

    #[test]
    fn two_dot_contraction() {
        // T on (A, B), S on (B); outer keeps T's A port.
        let w = WiringDiagram::builder(Signature::dot(vec![a()]))
            .slot(Signature::dot(vec![a(), b()]))
            .slot(Signature::dot(vec![b()]))
            .wire(PortRef::outer_port(0), PortRef::slot_port(0, 0))
            .wire(PortRef::slot_port(0, 1), PortRef::slot_port(1, 0))
            .build()
            .unwrap();
        let t = Tensor::new(vec![2, 3], vec![1., 2., 3., 4., 5., 6.]).unwrap();
        let s = Tensor::new(vec![3], vec![1., 0., 2.]).unwrap();
        // Oracle: sum_j T[i][j] S[j].
        let mut oracle = [0.0; 2];
        for (i, o) in oracle.iter_mut().enumerate() {
            for j in 0..3 {
                *o += t.get(&[i, j]) * s.get(&[j]);
            }
        }
        assert_eq!(oracle, [7.0, 16.0]);
        let r = tensor_eval(&w, &[t, s]).unwrap();
        assert_eq!(r.shape(), &[2]);
        assert_eq!(r.data(), &oracle);
    }

    #[test]
    fn seq_generator_is_matrix_product() {
        let w = generator(&Generator::Seq { a: vec![a()], b: vec![a()], c: vec![a()] }).unwrap();
        let m = Matrix::from_rows(&[&[1., 2.], &[3., 4.]]);
        let n = Matrix::from_rows(&[&[0., 1.], &[5., -1.]]);
        let r = matrix_eval(&w, &[m.clone(), n.clone()]).unwrap();
        assert_eq!(r, n.matmul(&m).unwrap());
    }

    #[test]
    fn swap_generator_is_permutation() {
        let w = generator(&Generator::Swap { a: vec![a()], b: vec![b()] }).unwrap();
        let r = matrix_eval(&w, &[]).unwrap();
        assert_eq!(r, Matrix::swap(2, 3));
        assert_eq!(r.rows(), 6);
    }

    #[test]
    fn ground_after_kernel_is_all_ones() {
        let m = Matrix::from_rows(&[&[0.5, 0.2], &[0.5, 0.8]]);
        let w = WiringDiagram::builder(Signature::boxed(vec![a()], vec![]))
            .slot(Signature::boxed(vec![a()], vec![a()]))
            .wire(PortRef::outer_in(0), PortRef::slot_in(0, 0))
            .ground(PortRef::slot_out(0, 0))
            .build()
            .unwrap();
        let r = stochastic_eval(&w, &[m]).unwrap();
        assert_eq!((r.rows(), r.cols()), (1, 2));
        assert!(max_abs_diff(r.data(), &[1.0, 1.0]) <= 1e-12);
    }

    #[test]
    fn operadic_discard_is_scalar_one() {
        let sig = Signature::boxed(vec![a()], vec![b()]);
        let w = generator(&Generator::OperadicDiscard(sig)).unwrap();
        let k = Matrix::new(3, 2, vec![0.2, 0.1, 0.3, 0.1, 0.5, 0.8]).unwrap();
        let e = StochasticAlgebra.apply(&w, &[Element::Kernel(k)]).unwrap();
        assert_eq!(e, Element::Scalar(1.0));
    }

    #[test]
    fn not_causal_rejected() {
        let sig = Signature::boxed(vec![a()], vec![a()]);
        let w = WiringDiagram::identity(&sig).unwrap();
        let bad = Matrix::from_rows(&[&[0.5, 0.2], &[0.6, 0.8]]);
        assert!(matches!(stochastic_eval(&w, &[bad]), Err(AlgebraError::NotCausal { slot: 0, .. })));
        let neg = Matrix::from_rows(&[&[1.5, 0.2], &[-0.5, 0.8]]);
        assert!(matches!(stochastic_eval(&w, &[neg]), Err(AlgebraError::NotCausal { .. })));
    }

    #[test]
    fn identity_law_exact() {
        let sig = Signature::boxed(vec![a()], vec![b()]);
        let id = WiringDiagram::identity(&sig).unwrap();
        let m = Matrix::new(3, 2, vec![1., 2., 3., 4., 5., 6.]).unwrap();
        let e = Element::Matrix(m);
        assert_eq!(MatrixAlgebra.apply(&id, std::slice::from_ref(&e)).unwrap(), e);
        let f = Element::Free(FreeDiagram::atom(&sig, "f").unwrap());
        let free = FreeAlgebra { variant: OperadVariant::WA };
        assert_eq!(free.apply(&id, std::slice::from_ref(&f)).unwrap().distance(&f), 0.0);
    }

    #[test]
    fn errors_reported() {
        let sig = Signature::boxed(vec![a()], vec![a()]);
        let id = WiringDiagram::identity(&sig).unwrap();
        assert!(matches!(MatrixAlgebra.apply(&id, &[]), Err(AlgebraError::ArityMismatch { .. })));
        let wrong = Element::Matrix(Matrix::identity(3));
        assert!(matches!(MatrixAlgebra.apply(&id, &[wrong]), Err(AlgebraError::CarrierMismatch { .. })));
        let cup = generator(&Generator::Cup(a())).unwrap();
        assert!(matches!(MatrixAlgebra.apply(&cup, &[]), Err(AlgebraError::VariantMismatch { .. })));
    }

    #[test]
    fn convex_degenerate_weights() {
        let w = generator(&Generator::Seq { a: vec![a()], b: vec![a()], c: vec![a()] }).unwrap();
        let k1 = Element::Kernel(Matrix::from_rows(&[&[0.5, 0.2], &[0.5, 0.8]]));
        let k2 = Element::Kernel(Matrix::from_rows(&[&[0.1, 1.0], &[0.9, 0.0]]));
        let alt = Element::Kernel(Matrix::identity(2));
        let mut wg = w.clone();
        // Seq generator is also a causal wiring.
        wg = wg.permute_slots(&[0, 1]).unwrap();
        for p in [0.0, 1.0] {
            let r = check_convex_enrichment(&StochasticAlgebra, &wg, &[k1.clone(), k2.clone()], 1, &alt, p).unwrap();
            assert_eq!(r, 0.0);
        }
        let r = check_convex_enrichment(&StochasticAlgebra, &wg, &[k1, k2], 0, &alt, 0.3).unwrap();
        assert!(r <= 1e-12);
    }
}
