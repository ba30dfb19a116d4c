//! A numerical laboratory for solving recursive distributional equations by
//! iterated measure push-forwards, building cut-off blocks and schedules, and
//! verifying endogeny of the associated recursive tree processes.
//!
//! Two model families are built in:
//!
//! * random metrics on non-pivotal hierarchical graphs ([`hiergraph`]), driven
//!   by Monte Carlo push-forwards of log-scale edge measures;
//! * mean-field k-factor / matching cavity equations in pseudo-dimension q
//!   ([`cavity`]), driven by deterministic tail-function quadrature.
//!
//! The model-agnostic machinery (cut-off operators, center and displacement
//! dynamics, block construction, schedules, assumption checks) lives in
//! [`rde`]; the tree-process harness (noise trees, monotone evaluations, the
//! sandwich and bivariate endogeny checks) lives in [`endogeny`]; gridded
//! measures and their metrics live in [`measure`].

pub mod cavity;
pub mod emit;
pub mod endogeny;
pub mod error;
pub mod hiergraph;
pub mod measure;
pub mod rde;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
