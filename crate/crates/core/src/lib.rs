//! Focusing cubic NLS on a three-edge star graph.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coupling;
pub mod error;
pub mod evolve;
pub mod field;
pub mod fit;
pub mod harness;
pub mod linear;
pub mod quadrature;
pub mod reference;

pub use coupling::{CouplingKind, EdgePair, Hamiltonian, VertexCoupling};
pub use error::{Error, Result};
pub use field::{boundary_residual, energy, l2_distance, lp_norm, mass, BoundaryResidual, GraphField, GridSpec};
pub use num_complex::Complex64;
