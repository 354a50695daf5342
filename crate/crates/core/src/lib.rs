//! Exact combinatorial detection of non-displaceable Lagrangian toric fibers.
//!
//! Everything here runs over arbitrary-precision rationals: the moment
//! polytope is an H-polytope with primitive integer facet normals, each
//! tropicalization is a piecewise-linear complex of rational cells, and the
//! detection pipeline intersects tropicalizations relative to the primary
//! normal directions of the polytope. Independent cross-checks come from the
//! leading-term-equation solvability criterion and from proper-intersection
//! tests on logarithmic-derivative tropicalizations.

pub mod balancing;
pub mod lp;
pub mod metrics;
pub mod polytope;
pub mod rat;
pub mod tropical;

mod error;

pub use error::Error;
pub use rat::{IntVec, Rat};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
