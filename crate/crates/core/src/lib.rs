//! Delay differential equations `x'(t) = f(x(t - r))` posed on the
//! `L^p`-type history space with seminorm
//! `(int_{-R}^0 |phi|^p + |phi(0)|^p)^(1/p)`.
//!
//! The crate provides
//!
//! * [`funcrep`]: exact piecewise-polynomial representatives with a
//!   distinguished endpoint value, lazy compositions, and `L^p`/sup norms;
//! * [`histspace`]: the history seminorm, quotient pairs, static prolongation
//!   and history segments;
//! * [`nonlinear`]: a registry of right-hand sides with Jacobians and explicit
//!   growth certificates;
//! * [`solver`]: the method-of-steps integrator;
//! * [`derivops`]: the derivative operators of the solution map and their
//!   remainder probes;
//! * [`composition`]: composition (Nemytskij) operators between `L^p` spaces;
//! * [`semiflow`]: the solution semiflow, its axioms, and its time-t derivative;
//! * [`certify`] and [`probe`]: the shared certificate and operator-probing
//!   machinery.
//!
//! Batch work (probe sets, schedules, corpora) runs through [`Execution`],
//! which uses rayon when the default `parallel` feature is enabled.

// `!(x >= y)` rejects NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod composition;
pub mod corpus;
pub mod derivops;
mod error;
pub mod exec;
pub mod funcrep;
pub mod histspace;
pub mod nonlinear;
pub mod probe;
pub mod semiflow;
pub mod solver;

pub use error::{Error, Result};
pub use exec::Execution;
pub use funcrep::{LazyComposition, PiecewiseFunction, QuadratureConfig};
pub use histspace::{HistoryConfig, HistoryElement, QuotientPair};
pub use nonlinear::{Growth, Nonlinearity};
pub use solver::{Problem, Trajectory};
