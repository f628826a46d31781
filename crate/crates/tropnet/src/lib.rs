//! Exact tropical-geometry analysis of ReLU feedforward networks.
//!
//! The crate converts networks with rational weights into tropical Puiseux
//! rational maps, enumerates their linear regions exactly with polyhedral
//! geometry over arbitrary-precision rationals, prunes redundant monomials,
//! computes Hoffman constants with the sampling-radius bounds they imply,
//! and cross-checks everything against numerical Jacobian-sampling
//! estimators (including a symmetry-reduced estimator for permutation
//! invariant networks).
//!
//! Module map:
//! - [`exact`]: rationals and dense exact linear algebra.
//! - [`lp`]: exact two-phase simplex with Farkas certificates.
//! - [`polyhedra`]: `Ax <= b` sets and their geometric predicates.
//! - [`tropical`]: max-plus polynomials and rational maps.
//! - [`network`]: ReLU networks, model files, Jacobian signatures.
//! - [`tropicalize`]: network -> tropical rational map conversion.
//! - [`regions`]: exact linear-region enumeration.
//! - [`hoffman`]: Hoffman constants, bounds, radius bounds.
//! - [`sampling`]: numerical estimators and fundamental-domain counting.

pub mod error;
pub mod exact;
pub mod hoffman;
pub mod lp;
pub mod network;
pub mod polyhedra;
pub mod regions;
pub mod sampling;
pub mod tropical;
pub mod tropicalize;

pub use error::{Error, Result};
