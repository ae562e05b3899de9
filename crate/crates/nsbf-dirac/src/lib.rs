//! Regular solutions of the one-dimensional radial Dirac system
//!
//! ```text
//! f'(r) - (kappa / r) f(r) + p(r) f(r) = omega1 g(r),
//! g'(r) + (kappa / r) g(r) - p(r) g(r) = -omega2 f(r),      0 < r <= b,
//! ```
//!
//! with `kappa >= 1/2`, a real absolutely continuous potential `p`, and
//! spectral parameters entering only through `omega^2 = omega1 * omega2`.
//! The solution pair regular at the origin (`f ~ r^kappa`, `g ~ r^(kappa+1)`)
//! is represented as a Neumann series of spherical Bessel functions whose
//! coefficients depend on the potential but *not* on the spectral parameter.
//! One coefficient computation therefore serves every `omega`, and the
//! truncation error is uniform in `omega` on compact subsets — which is what
//! makes shooting for large eigenvalues practical.
//!
//! Crate layout:
//!
//! * [`grid`] — uniform radial grid, cumulative quadrature, finite differences;
//! * [`special`] — spherical Bessel batches, gamma, Laguerre polynomials;
//! * [`potential`] — potential model: auxiliary solutions, derived
//!   Schrödinger-type potentials and their antiderivatives;
//! * [`nsbf`] — the coefficient recursion and the truncation-radius /
//!   truncation-order diagnostics;
//! * [`evaluate`] — assembling `f`, `g`, `f'`, `g'` from coefficients at a
//!   given spectral point, plus residual checks;
//! * [`solver`] — eigenvalue search by shooting with a Dirichlet condition
//!   on `f` at `r = b`;
//! * [`oscillator`] — the exactly solvable test problem used end-to-end in
//!   tests and in the demo subcommand;
//! * [`cli`] — configuration types and subcommand drivers for the binary.

pub mod error;
pub mod evaluate;
pub mod grid;
pub mod nsbf;
pub mod oscillator;
pub mod potential;
pub mod solver;
pub mod special;

#[cfg(test)]
pub(crate) mod test_support;

pub use error::{Error, Result};
