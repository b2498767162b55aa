//! Exact-arithmetic toolkit for Diophantine parallelepipeds.
//!
//! A piped is given by six integer tetrahedron edges. Everything else, from
//! face diagonals to the volume, is decided on squared quantities read off
//! the exact Gram matrix of the three basis vectors.

pub mod classify;
pub mod corpus;
pub mod exactnum;
pub mod family;
pub mod geometry;
pub mod param;
pub mod polygon;
pub mod search;
pub mod signature;

pub use classify::{classify, sign_vector, PipedClass, SignVector};
pub use exactnum::Rational;
pub use family::{canonical_form, tetra_family, TetraFamily};
pub use geometry::{gram_from_edges, EdgeSextuple, GeometryError, GramMatrix};
pub use signature::{category_of, compute_signature, is_perfect, CategoryKey, ComponentSignature, VolumeFlag};
