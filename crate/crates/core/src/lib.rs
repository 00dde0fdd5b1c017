//! Biased subgradient methods on a catalog of nonsmooth semialgebraic test
//! functions.
//!
//! The crate provides:
//! - exact convex-polytope arithmetic for subdifferentials ([`polytope`]),
//! - a fixed catalog of test objectives with analytic critical-set data and
//!   certified growth exponents ([`catalog`]),
//! - the discrete biased subgradient recursion with pluggable bias models
//!   and step schedules ([`solver`]),
//! - its continuous-time counterpart with descent-inequality checks
//!   ([`flow`]),
//! - experiment-level verification of the fluctuation, complexity, and
//!   repulsion laws ([`analysis`]).

pub mod analysis;
pub mod catalog;
pub mod flow;
pub mod polytope;
pub mod solver;

mod vecmath;

pub use analysis::{rho_exponent, AnalysisError};
pub use catalog::{by_name, catalog, CatalogError, CatalogFunction, GridSpec};
pub use polytope::{Polytope, PolytopeError};
pub use solver::{run, BiasKind, BiasModel, SolverError, StepSchedule, Trajectory};
