//! Cayley-graph atoms, their type graph, and the contracting self-similar
//! action they induce on the boundary.

pub mod atoms;
pub mod contract;
pub mod ball;
pub mod error;
pub mod oracle;
pub mod types;

pub use atoms::{Atom, AtomTree, Infinite};
pub use ball::Ball;
pub use error::{AtomsError, Result};
pub use oracle::{ConeType, Elem, GroupOracle, OracleSpec};
pub use types::{address_system, morphism_check, type_graph, AddressSystem, Check, MorphismReport, TypeGraph, Verdict};
pub use contract::{
    boundary_local_action, certify_full_contracting_rsg, mapping_triple, norm_s, nucleus_extract, signature_equivalent, Certificate, ConeModel,
    MappingTriple,
};
