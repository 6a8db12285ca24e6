//! Piecewise-polynomial functions on a closed interval with a distinguished
//! right-endpoint value, lazy pointwise compositions, and their norms.

pub mod cheb;
mod lazy;
mod piecewise;
mod quadrature;

pub use cheb::Cheb;
pub use lazy::{Integrated, LazyComposition, Materialized, PointMap, MAX_NODES};
pub use piecewise::PiecewiseFunction;
pub use quadrature::{lp_integral, lp_norm, sup_norm, PiecewiseEval, QuadratureConfig};

pub(crate) use quadrature::euclid;
