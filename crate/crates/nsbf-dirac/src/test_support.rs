//! Shared fixtures for the unit tests: full pipeline runs (problem,
//! auxiliary solutions, derived potentials, coefficients, truncation
//! diagnostics) built once per test binary.  The two oscillator workloads
//! are behind `Lazy` statics because several modules read them and the
//! coefficient recursion on a 12001-point grid is the dominant test cost.

use crate::grid::{Grid, GridFunction};
use crate::nsbf::{select_truncation, NsbfCoefficients, TruncationDiagnostics};
use crate::potential::{
    derive_potentials, particular_solutions, DerivedPotentials, DiracProblem, ParticularSolutions,
};
use once_cell::sync::Lazy;
use std::sync::Arc;

pub(crate) struct Pipeline {
    pub problem: DiracProblem,
    pub ps: ParticularSolutions,
    pub dp: DerivedPotentials,
    pub coeffs: NsbfCoefficients,
    pub diag: TruncationDiagnostics,
}

/// Run the full construction for a potential given as closures.
pub(crate) fn build(
    kappa: f64,
    b: f64,
    n_pts: usize,
    budget: usize,
    p: impl Fn(f64) -> f64,
    p_prime: Option<fn(f64) -> f64>,
) -> Pipeline {
    let grid = Grid::new(b, n_pts).unwrap();
    let pf = GridFunction::from_fn(Arc::clone(&grid), p);
    let dpf = p_prime.map(|f| GridFunction::from_fn(Arc::clone(&grid), f));
    let problem = DiracProblem::new(kappa, pf, dpf, 1.0, 1.0).unwrap();
    let ps = particular_solutions(&problem);
    let dp = derive_potentials(&problem);
    let (coeffs, diag) = select_truncation(&problem, &ps, &dp, budget).unwrap();
    Pipeline { problem, ps, dp, coeffs, diag }
}

/// Oscillator with `p = r`, `kappa = 3` on `[0, 12]`.
pub(crate) static OSC_POS: Lazy<Pipeline> =
    Lazy::new(|| build(3.0, 12.0, 12_001, 60, |r| r, Some(|_| 1.0)));

/// Sign-flipped oscillator, `p = -r`.
pub(crate) static OSC_NEG: Lazy<Pipeline> =
    Lazy::new(|| build(3.0, 12.0, 12_001, 60, |r| -r, Some(|_| -1.0)));
