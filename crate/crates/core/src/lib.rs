//! Exact F₂ computations with the cacti model of the little 2-discs operad.
//!
//! The crate is organised bottom-up:
//!
//! * [`gf2`] dense linear algebra over F₂,
//! * [`surjection`] the chain operad `S` of spineless cacti cells,
//! * [`homology`] homology of the complexes `(S(k), δ)`,
//! * [`gerstenhaber`] homology classes named by Gerstenhaber monomials,
//! * [`model`] the free planar operad on the bigraded generators up to arity 4,
//! * [`obstruction`] the first planar formality obstruction and its verdict,
//! * [`suite`] the check suites driven by the `verify` binary.

pub mod error;
pub mod gerstenhaber;
pub mod gf2;
pub mod homology;
pub mod model;
pub mod obstruction;
pub mod report;
pub mod suite;
pub mod surjection;

pub use error::{Error, Result};
pub use gerstenhaber::{GerstMonomial, HClass};
pub use gf2::{BitMatrix, BitVector};
pub use report::{CheckReport, FailureKind, Status};
pub use surjection::{Chain, Permutation, SurjSeq};
