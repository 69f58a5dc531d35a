//! Verification laboratory and sampler for Glauber dynamics on proper
//! list-colorings of line graphs.
//!
//! The crate builds line-graph coloring instances, counts proper extensions of
//! pinnings exactly, materializes the weighted simplicial complex view (face
//! distributions, local walks), constructs the matrix trickle-down certificate
//! `{M_tau}` with its coefficient schedule, and checks every Loewner-order
//! condition numerically. A color-symmetry backend handles uniform-list
//! instances at threshold-scale color counts where direct enumeration is
//! impossible.
//!
//! Numeric layers are generic over the scalar type: exact `BigRational` for
//! oracle-grade identity checks, `f64`/`f32` wherever an eigensolve is
//! involved. Concrete aliases below fix the defaults used by the CLI.

pub mod certificate;
pub mod complex;
pub mod constraints;
pub mod counting;
pub mod dynamics;
pub mod instances;
pub mod scalar;
pub mod specmat;
pub mod symmetry;

/// Default floating-point scalar.
pub type Real = f64;
/// Exact rational scalar used by the oracle tests.
pub type Exact = num_rational::BigRational;
/// Arbitrary-precision extension count.
pub type Count = num_bigint::BigInt;

pub use instances::{BaseGraph, ColoringInstance, Graph, PartialColoring, PinnedInstance, Site};
pub use scalar::{CountScalar, EigScalar};
pub use specmat::{LabeledMatrix, LoewnerReport};
