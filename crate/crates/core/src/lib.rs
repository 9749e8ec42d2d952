//! Numeric and symbolic verification of curvature identities on
//! generalized Sasakian-space-forms under the Levi-Civita connection and
//! four modified connections, and of the resulting statements about
//! invariant and anti-invariant submanifolds.

pub mod errata;
pub mod error;
pub mod harness;
pub mod model;
pub mod submanifold;
pub mod symbolic;

pub use error::{Error, Result};
pub use model::{
    curvature, frame_structure, sasakian_coeffs, standard_structure, validate_structure,
    AmbientSpace, ConnectionKind, FormCoefficients, Tolerance, Vector,
};
pub use submanifold::{classify_subspace, Subspace, SubspaceClass};
