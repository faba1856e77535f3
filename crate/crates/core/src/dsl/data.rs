use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::DiagramDef;
use crate::algebra::{check_kernel, Algebra, Element, FreeDiagram};
use crate::tensor::{Matrix, Tensor};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DataError {
    #[error("schema: {0}")]
    Schema(String),
    #[error("element `{name}`: expected {expected}, got {got}")]
    ShapeMismatch { name: String, expected: String, got: String },
    #[error("element `{name}` is not a kernel: {detail}")]
    NotCausal { name: String, detail: String },
}

impl DataError {
    pub fn kind(&self) -> &'static str {
        match self {
            DataError::Schema(_) => "SchemaError",
            DataError::ShapeMismatch { .. } => "ShapeMismatch",
            DataError::NotCausal { .. } => "NotCausal",
        }
    }
}

#[derive(Deserialize)]
struct Bundle {
    elements: BTreeMap<String, Payload>,
}

#[derive(Deserialize, Serialize)]
struct Payload {
    kind: String,
    #[serde(default)]
    shape: Vec<usize>,
    #[serde(default)]
    data: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

fn convert(name: &str, p: Payload, def: &DiagramDef, slot: usize) -> Result<Element, DataError> {
    let bad = |detail: String| DataError::ShapeMismatch {
        name: name.to_string(),
        expected: format!("a well-formed {}", p.kind),
        got: detail,
    };
    let matrix = |p: &Payload| -> Result<Matrix, DataError> {
        match p.shape[..] {
            [r, c] => Matrix::new(r, c, p.data.clone()).map_err(|e| bad(e.to_string())),
            _ => Err(bad(format!("a {} needs shape [rows, cols], got {:?}", p.kind, p.shape))),
        }
    };
    Ok(match p.kind.as_str() {
        "tensor" => Element::Tensor(Tensor::new(p.shape.clone(), p.data.clone()).map_err(|e| bad(e.to_string()))?),
        "matrix" => Element::Matrix(matrix(&p)?),
        "kernel" => {
            let m = matrix(&p)?;
            check_kernel(&m).map_err(|detail| DataError::NotCausal {
                name: name.to_string(),
                detail,
            })?;
            Element::Kernel(m)
        }
        "scalar" => match p.data[..] {
            [v] => Element::Scalar(v),
            _ => return Err(bad("a scalar needs exactly one value".into())),
        },
        "label" => {
            let label = p
                .label
                .clone()
                .ok_or_else(|| DataError::Schema(format!("label element `{name}` needs a `label` field")))?;
            Element::Free(FreeDiagram::atom(&def.diagram.slots()[slot], label).map_err(|e| bad(e.to_string()))?)
        }
        other => return Err(DataError::Schema(format!("element `{name}` has unknown kind `{other}`"))),
    })
}

/// Read `{"elements": {slot: {kind, shape, data}}}`, order the elements
/// by the slots of `def` and check each against the carrier `alg` expects.
pub fn load_data(json: &str, def: &DiagramDef, alg: &dyn Algebra) -> Result<Vec<Element>, DataError> {
    let mut b: Bundle = serde_json::from_str(json).map_err(|e| DataError::Schema(e.to_string()))?;
    let out = def
        .slot_names
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let p = b
                .elements
                .remove(n)
                .ok_or_else(|| DataError::Schema(format!("no element given for slot `{n}`")))?;
            let e = convert(n, p, def, i)?;
            let spec = alg.carrier(&def.diagram.slots()[i]);
            if !spec.admits(&e) {
                return Err(DataError::ShapeMismatch {
                    name: n.clone(),
                    expected: spec.to_string(),
                    got: e.to_string(),
                });
            }
            Ok(e)
        })
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(extra) = b.elements.keys().next() {
        return Err(DataError::Schema(format!("`{extra}` is not a slot of this diagram")));
    }
    Ok(out)
}

/// JSON rendering of a result element, in the same schema as the input.
pub fn element_to_json(e: &Element) -> serde_json::Value {
    let p = match e {
        Element::Tensor(t) => Payload {
            kind: "tensor".into(),
            shape: t.shape().to_vec(),
            data: t.data().to_vec(),
            label: None,
        },
        Element::Matrix(m) | Element::Kernel(m) => Payload {
            kind: if matches!(e, Element::Kernel(_)) { "kernel" } else { "matrix" }.into(),
            shape: vec![m.rows(), m.cols()],
            data: m.data().to_vec(),
            label: None,
        },
        Element::Scalar(v) => Payload {
            kind: "scalar".into(),
            shape: vec![],
            data: vec![*v],
            label: None,
        },
        Element::Free(f) => {
            return serde_json::json!({
                "kind": "free",
                "labels": f.labels,
                "canonical": f.diagram.canonical_form().text(),
                "hash": f.diagram.canonical_form().hash(),
            })
        }
    };
    serde_json::to_value(p).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::super::parse_dsl;
    use super::*;
    use crate::algebra::{MatrixAlgebra, StochasticAlgebra};

    const CHAIN: &str = "type A(2)\nbox f: A -> A\ndiagram d(WA) : A -> A { slots: f as s0, f as s1\n \
        wire outer.in[0] -- s0.in[0]\n wire s0.out[0] -- s1.in[0]\n wire s1.out[0] -- outer.out[0] }";

    fn two(kind: &str, a: &str, b: &str) -> String {
        format!(
            r#"{{"elements": {{"s1": {{"kind": "{kind}", "shape": [2, 2], "data": {b}}},
                              "s0": {{"kind": "{kind}", "shape": [2, 2], "data": {a}}}}}}}"#
        )
    }

    #[test]
    fn ordered_by_slot() {
        let ws = parse_dsl(CHAIN).unwrap();
        let def = &ws.diagrams["d"];
        let es = load_data(&two("matrix", "[1, 2, 3, 4]", "[0, 1, 1, 0]"), def, &MatrixAlgebra).unwrap();
        assert_eq!(es[0], Element::Matrix(Matrix::from_rows(&[&[1., 2.], &[3., 4.]])));
    }

    #[test]
    fn error_classes() {
        let ws = parse_dsl(CHAIN).unwrap();
        let def = &ws.diagrams["d"];
        let kind = |j: &str, a: &dyn Algebra| load_data(j, def, a).unwrap_err().kind();
        assert_eq!(kind(r#"{"elements": {}}"#, &MatrixAlgebra), "SchemaError");
        assert_eq!(kind("{", &MatrixAlgebra), "SchemaError");
        let off = r#"{"elements": {"s0": {"kind": "matrix", "shape": [2, 3], "data": [1, 2, 3, 4, 5, 6]},
                                   "s1": {"kind": "matrix", "shape": [2, 2], "data": [0, 1, 1, 0]}}}"#;
        assert_eq!(kind(off, &MatrixAlgebra), "ShapeMismatch");
        let neg = two("kernel", "[1.5, 0, -0.5, 1]", "[1, 0, 0, 1]");
        assert_eq!(kind(&neg, &StochasticAlgebra), "NotCausal");
        let ok = two("kernel", "[0.5, 0, 0.5, 1]", "[1, 0, 0, 1]");
        assert!(load_data(&ok, def, &StochasticAlgebra).is_ok());
        // a matrix where a kernel is expected
        assert_eq!(kind(&two("matrix", "[1, 0, 0, 1]", "[1, 0, 0, 1]"), &StochasticAlgebra), "ShapeMismatch");
    }
}
