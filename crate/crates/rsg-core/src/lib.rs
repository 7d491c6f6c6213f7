//! Edge shifts of finite directed graphs, rational transducers acting on them,
//! the Thompson groups V_{Γ,E}, and rational similarity groups built from a
//! finite nucleus.

pub mod catalog;
pub mod classes;
pub mod clopen;
pub mod error;
pub mod graph;
pub mod path;
pub mod rsg;
pub mod snf;
pub mod thompson;
pub mod transducer;

pub use classes::{ClassElement, ClassesGroup};
pub use clopen::{common_refinement, ClopenSet, Code, Coverage};
pub use error::{Error, Result};
pub use graph::{check_subshift, irreducible, irreducible_core, Core, DirectedGraph, EdgeId, NodeId};
pub use thompson::{map_clopen_v, map_cones_v, push_into_core, witness_tuple_map, RationalPoint, VElement};
pub use transducer::{compose, image, invert, maps_equal, nucleus_of, reduce, verify_nucleus_of_injections, NucleusSet, RationalMap};
pub use path::Path;
