//! The `.opw` diagram language.
//!
//! ```text
//! type A(2)
//! box f: A -> A
//! diagram d(WA) : A -> A {
//!   slots: f as s0
//!   wire outer.in[0] -- s0.in[0]
//!   wire s0.out[0] -- outer.out[0]
//! }
//! ```
//!
//! The outer signature after the variant is optional. When omitted it is
//! read off the wires attached to outer ports, which fails if some outer
//! port is only grounded or wired straight to another outer port.

mod data;
mod dot;
mod parse;
mod print;

use indexmap::IndexMap;
use thiserror::Error;

use crate::diagram::{DiagramError, WiringDiagram};
use crate::types::Signature;
use crate::variants::{OperadVariant, ValidationReport};

pub use data::{element_to_json, load_data, DataError};
pub use dot::{export_dot, export_dot_named};
pub use parse::parse_dsl;
pub use print::print_dsl;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DslError {
    #[error("{line}:{col}: found {found}, expected {}", expected.join(" or "))]
    Syntax {
        line: usize,
        col: usize,
        found: String,
        expected: Vec<String>,
    },
    #[error("{line}:{col}: unknown {kind} `{name}`")]
    UnknownName {
        line: usize,
        col: usize,
        kind: &'static str,
        name: String,
    },
    #[error("{line}:{col}: {kind} `{name}` is already defined")]
    Duplicate {
        line: usize,
        col: usize,
        kind: &'static str,
        name: String,
    },
    #[error("diagram `{diagram}` is not a legal {variant} wiring: {report}")]
    VariantViolation {
        diagram: String,
        variant: OperadVariant,
        report: ValidationReport,
    },
    #[error("diagram `{diagram}`: {error}")]
    Invalid { diagram: String, error: Box<DiagramError> },
    #[error("diagram `{diagram}`: cannot infer outer signature ({detail}); give it explicitly")]
    OuterInference { diagram: String, detail: String },
}

impl DslError {
    /// Stable identifier for machine-readable output.
    pub fn kind(&self) -> &'static str {
        match self {
            DslError::Syntax { .. } => "SyntaxError",
            DslError::UnknownName { .. } => "UnknownName",
            DslError::Duplicate { .. } => "DuplicateName",
            DslError::VariantViolation { .. } => "VariantViolation",
            DslError::Invalid { .. } => "InvalidDiagram",
            DslError::OuterInference { .. } => "OuterInference",
        }
    }
}

/// A named diagram with the declaration and local name of every slot.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagramDef {
    pub variant: OperadVariant,
    pub diagram: WiringDiagram,
    pub slot_names: Vec<String>,
    pub slot_decls: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Workspace {
    pub types: IndexMap<String, usize>,
    pub decls: IndexMap<String, Signature>,
    pub diagrams: IndexMap<String, DiagramDef>,
}

impl Workspace {
    pub fn diagram(&self, name: &str) -> Option<&DiagramDef> {
        self.diagrams.get(name)
    }

    /// Canonical forms of every diagram, for round-trip comparison.
    pub fn canonical_summary(&self) -> Vec<(String, OperadVariant, String)> {
        self.diagrams
            .iter()
            .map(|(n, d)| (n.clone(), d.variant, d.diagram.canonical_form().hash().to_string()))
            .collect()
    }

    /// Add `w` under `name`, declaring any missing types and slot
    /// declarations. Slots are named `s0`, `s1`, ...
    pub fn insert_diagram(&mut self, name: &str, variant: OperadVariant, w: WiringDiagram) -> Result<(), DslError> {
        let clash = |kind, name: &str| DslError::Duplicate {
            line: 0,
            col: 0,
            kind,
            name: name.to_string(),
        };
        if self.diagrams.contains_key(name) {
            return Err(clash("diagram", name));
        }
        let sigs = std::iter::once(w.outer()).chain(w.slots());
        let ports = sigs.flat_map(|s| s.ports().map(|(_, _, l)| l));
        for l in ports.chain(w.loops().keys()) {
            match self.types.get(l.name()) {
                Some(&d) if d != l.dim() => return Err(clash("type", l.name())),
                Some(_) => {}
                None => {
                    self.types.insert(l.name().to_string(), l.dim());
                }
            }
        }
        let mut slot_decls = Vec::new();
        for s in w.slots() {
            let found = self.decls.iter().find(|(_, d)| *d == s).map(|(n, _)| n.clone());
            let decl = found.unwrap_or_else(|| {
                let base = if s.is_dot() { "t" } else { "f" };
                let n = (self.decls.len()..)
                    .map(|k| format!("{base}{k}"))
                    .find(|n| !self.decls.contains_key(n))
                    .unwrap();
                self.decls.insert(n.clone(), s.clone());
                n
            });
            slot_decls.push(decl);
        }
        let slot_names = (0..w.slot_count()).map(|i| format!("s{i}")).collect();
        self.diagrams.insert(
            name.to_string(),
            DiagramDef {
                variant,
                diagram: w,
                slot_names,
                slot_decls,
            },
        );
        Ok(())
    }

    /// A diagram name not yet in use, derived from `base`.
    pub fn fresh_name(&self, base: &str) -> String {
        if !self.diagrams.contains_key(base) {
            return base.to_string();
        }
        (2..).map(|k| format!("{base}_{k}")).find(|n| !self.diagrams.contains_key(n)).unwrap()
    }
}
