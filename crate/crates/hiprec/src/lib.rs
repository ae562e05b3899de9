//! High-precision reference evaluators used as independent test oracles.
//!
//! Nothing here is fast, and nothing here is used by the library under test:
//! the point is to produce reference values by *different* algorithms
//! (big-float power series, adaptive quadrature, adaptive Runge-Kutta)
//! against which the production code can be checked.

pub mod bessel;
pub mod bigfloat;
pub mod ode;
pub mod quad;

pub use bigfloat::BigFloat;
