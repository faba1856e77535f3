//! Wiring operads over typed boxes and dots, substitution, canonical
//! equality, generator decomposition, causal normalization, the α/β
//! functors, and numerical algebras that evaluate diagrams.

pub mod algebra;
pub mod causal;
pub mod corpus;
pub mod diagram;
pub mod dsl;
pub mod expression;
pub mod functor;
pub mod laws;
pub mod polycat;
pub mod tensor;
pub mod types;
pub mod variants;

pub use algebra::{algebra_by_name, Algebra, AlgebraError, Element};
pub use causal::{normalize_causal, CausalError};
pub use diagram::{diagrams_equal, CanonicalWiring, DiagramError, Wire, WiringDiagram};
pub use dsl::{parse_dsl, print_dsl, DslError, Workspace};
pub use expression::{decompose_acyclic, recompose, Expression};
pub use types::{Face, Loc, PortRef, Signature, TypeLabel};
pub use variants::{validate, OperadVariant, ValidationReport};
