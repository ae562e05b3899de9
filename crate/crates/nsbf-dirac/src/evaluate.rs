//! Assembling the truncated solution pair and its derivatives at a spectral
//! point from precomputed coefficients.
//!
//! With `x = omega r` and the coefficient families `beta_{j,n}`,
//! `gamma_{j,n}` of [`crate::nsbf`], the truncated regular solution is
//!
//! ```text
//! f(r) = -(omega^2/omega2) r j_(kappa-1)(x) - (omega/omega2) sum_n beta_{2,n}(r) j_(kappa+2n)(x),
//! g(r) =  omega r j_kappa(x)               +                sum_n beta_{1,n}(r) j_(kappa+2n+1)(x),
//! ```
//!
//! and the derivative series are
//!
//! ```text
//! f'(r) = -(omega^3/omega2) r j_(kappa-2)(x)
//!         - (r Q_2(r)/2 - kappa + 1) (omega^2/omega2) j_(kappa-1)(x)
//!         - (omega/omega2) sum_n gamma_{2,n}(r) j_(kappa+2n)(x),
//! g'(r) =  omega^2 r j_(kappa-1)(x) + (r Q_1(r)/2 - kappa) omega j_kappa(x)
//!         + sum_n gamma_{1,n}(r) j_(kappa+2n+1)(x).
//! ```
//!
//! The coefficients do not depend on `omega`, so sweeping the spectral
//! parameter reuses one coefficient set; per radius a single Bessel batch
//! over the orders `kappa-2 ... kappa+2N+1` feeds all four series.  Because
//! `f'` needs `j_(kappa-2)` and batches only serve orders `>= -1`, the full
//! sample is available for `kappa >= 1`; the half-open block
//! `kappa in [1/2, 1)` would need a separately-seeded recurrence and is not
//! supported here.
//!
//! Everything in this module takes shared references and mutates nothing,
//! so concurrent evaluations at distinct spectral points need no
//! synchronization; the per-radius assembly itself is parallelized.

use crate::error::{Error, Result};
use crate::grid::{fmt_f64, GridFunction};
use crate::nsbf::NsbfCoefficients;
use crate::potential::{DerivedPotentials, DiracProblem};
use crate::special::{spherical_bessel_batch, BesselOrderSet};
use rayon::prelude::*;
use std::io::Write;
use std::sync::Arc;

/// One admissible spectral point: `omega^2 = omega1 * omega2 >= 0` with
/// `omega` the principal square root.  `omega2 = 0` is rejected because the
/// `f` series divides by it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    omega1: f64,
    omega2: f64,
    omega: f64,
}

impl SpectralPoint {
    pub fn new(omega1: f64, omega2: f64) -> Result<Self> {
        if !omega1.is_finite() || !omega2.is_finite() || omega2 == 0.0 {
            return Err(Error::Domain(format!(
                "spectral pair ({omega1}, {omega2}) must be finite with omega2 != 0"
            )));
        }
        let omega_squared = omega1 * omega2;
        if omega_squared < 0.0 {
            return Err(Error::NegativeOmegaSquared(omega_squared));
        }
        Ok(Self { omega1, omega2, omega: omega_squared.sqrt() })
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn omega2(&self) -> f64 {
        self.omega2
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega_squared(&self) -> f64 {
        self.omega1 * self.omega2
    }
}

/// The solution pair, its derivatives, and the equation residuals on the
/// coefficients' grid.  [`evaluate`] fills the first four components and
/// leaves the residuals zero; [`SolutionSample::attach_residuals`] (or the
/// free function [`residuals`]) computes them, since they need the
/// potential itself, which the coefficient data does not retain.
///
/// Values are meaningful on the trust region `[0, B]` reported by the
/// truncation diagnostics; beyond it the coefficient tails are unreliable
/// and may be non-finite.
#[derive(Debug, Clone)]
pub struct SolutionSample {
    pub f: GridFunction,
    pub g: GridFunction,
    pub f_prime: GridFunction,
    pub g_prime: GridFunction,
    pub residual1: GridFunction,
    pub residual2: GridFunction,
}

impl SolutionSample {
    /// Compute both equation residuals for this sample and store them.
    pub fn attach_residuals(&mut self, sp: &SpectralPoint, problem: &DiracProblem) -> Result<()> {
        let (r1, r2) = residuals(self, sp, problem)?;
        self.residual1 = r1;
        self.residual2 = r2;
        Ok(())
    }

    /// Emit `r,f,g,residual1,residual2` rows.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "r,f,g,residual1,residual2")?;
        let grid = self.f.grid();
        for (i, r) in grid.points().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{}",
                fmt_f64(r),
                fmt_f64(self.f.value(i)),
                fmt_f64(self.g.value(i)),
                fmt_f64(self.residual1.value(i)),
                fmt_f64(self.residual2.value(i))
            )?;
        }
        Ok(())
    }
}

/// Evaluate the truncated solution pair and its derivatives at `sp`, using
/// every coefficient order stored in `coeffs`.
///
/// At `omega = 0` (which forces `omega1 = 0`) the entire sample is the
/// analytic limit zero: every series term carries a positive power of
/// `omega` once `omega2` is held fixed, consistent with the asymptotic
/// scaling `f ~ -(omega^(kappa+1)/omega2) d(kappa-1) r^kappa`.
pub fn evaluate(
    coeffs: &NsbfCoefficients,
    sp: &SpectralPoint,
    dp: &DerivedPotentials,
) -> Result<SolutionSample> {
    let grid = Arc::clone(coeffs.grid());
    let kappa = coeffs.kappa();
    if kappa < 1.0 {
        return Err(Error::Domain(format!(
            "the derivative series needs Bessel order kappa - 2 = {} < -1; \
             evaluation supports kappa >= 1",
            kappa - 2.0
        )));
    }
    if *dp.q_cum(1).grid() != grid {
        return Err(Error::GridMismatch(
            "coefficients and derived potentials use different grids".into(),
        ));
    }
    let zero = || GridFunction::zeros(Arc::clone(&grid));
    if sp.omega == 0.0 {
        return Ok(SolutionSample {
            f: zero(),
            g: zero(),
            f_prime: zero(),
            g_prime: zero(),
            residual1: zero(),
            residual2: zero(),
        });
    }

    let n_max = coeffs.n_max();
    let orders = BesselOrderSet::new(kappa - 2.0, kappa + (2 * n_max + 1) as f64)?;
    let beta1: Vec<&[f64]> = (0..=n_max).map(|n| coeffs.beta(1, n).values()).collect();
    let beta2: Vec<&[f64]> = (0..=n_max).map(|n| coeffs.beta(2, n).values()).collect();
    let gamma1: Vec<&[f64]> = (0..=n_max).map(|n| coeffs.gamma(1, n).values()).collect();
    let gamma2: Vec<&[f64]> = (0..=n_max).map(|n| coeffs.gamma(2, n).values()).collect();
    let q1_cum = dp.q_cum(1).values();
    let q2_cum = dp.q_cum(2).values();

    let w = sp.omega;
    // omega^2/omega2 = omega1 exactly; keep the ratios in that form.
    let w2_over_o2 = sp.omega1;
    let w3_over_o2 = sp.omega * sp.omega1;
    let w_over_o2 = sp.omega / sp.omega2;

    let rows: Vec<[f64; 4]> = (1..grid.len())
        .into_par_iter()
        .map(|i| -> Result<[f64; 4]> {
            let r = grid.r(i);
            let j = spherical_bessel_batch(&orders, w * r)?;
            let mut sum_f = 0.0;
            let mut sum_g = 0.0;
            let mut sum_fp = 0.0;
            let mut sum_gp = 0.0;
            for n in 0..=n_max {
                let even = j[2 * n + 2];
                let odd = j[2 * n + 3];
                sum_f += beta2[n][i] * even;
                sum_g += beta1[n][i] * odd;
                sum_fp += gamma2[n][i] * even;
                sum_gp += gamma1[n][i] * odd;
            }
            let f = -w2_over_o2 * r * j[1] - w_over_o2 * sum_f;
            let g = w * r * j[2] + sum_g;
            let fp = -w3_over_o2 * r * j[0] - (r * q2_cum[i] / 2.0 - kappa + 1.0) * w2_over_o2 * j[1]
                - w_over_o2 * sum_fp;
            let gp =
                w * w * r * j[1] + (r * q1_cum[i] / 2.0 - kappa) * w * j[2] + sum_gp;
            Ok([f, g, fp, gp])
        })
        .collect::<Result<_>>()?;

    let n = grid.len();
    let mut f = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut fp = vec![0.0; n];
    let mut gp = vec![0.0; n];
    // Origin limits: f, g, g' vanish (powers kappa, kappa+1, kappa of r);
    // f' ~ kappa c_f r^(kappa-1) survives only for kappa = 1, where the
    // leading term -(omega^3/omega2) r j_(-1)(omega r) tends to
    // -omega^2/omega2 = -omega1.
    if kappa == 1.0 {
        fp[0] = -sp.omega1;
    }
    for (i, row) in rows.into_iter().enumerate() {
        f[i + 1] = row[0];
        g[i + 1] = row[1];
        fp[i + 1] = row[2];
        gp[i + 1] = row[3];
    }
    let from = |v: Vec<f64>| {
        GridFunction::from_values(Arc::clone(&grid), v).expect("length matches grid")
    };
    Ok(SolutionSample {
        f: from(f),
        g: from(g),
        f_prime: from(fp),
        g_prime: from(gp),
        residual1: zero(),
        residual2: zero(),
    })
}

/// Residuals of the two first-order equations,
///
/// ```text
/// residual1 = f' - (kappa/r) f + p f - omega1 g,
/// residual2 = g' + (kappa/r) g - p g + omega2 f,
/// ```
///
/// with the analytic limit `0` at `r = 0`.  The spectral point is passed
/// explicitly so one problem description serves every `omega` of a sweep.
pub fn residuals(
    sample: &SolutionSample,
    sp: &SpectralPoint,
    problem: &DiracProblem,
) -> Result<(GridFunction, GridFunction)> {
    let grid = sample.f.grid();
    if *problem.grid() != *grid {
        return Err(Error::GridMismatch(
            "sample and problem use different grids".into(),
        ));
    }
    let kappa = problem.kappa();
    let p = problem.p();
    let n = grid.len();
    let mut r1 = vec![0.0; n];
    let mut r2 = vec![0.0; n];
    for i in 1..n {
        let r = grid.r(i);
        let (fv, gv) = (sample.f.value(i), sample.g.value(i));
        let pv = p.value(i);
        r1[i] = sample.f_prime.value(i) - (kappa / r) * fv + pv * fv - sp.omega1 * gv;
        r2[i] = sample.g_prime.value(i) + (kappa / r) * gv - pv * gv + sp.omega2 * fv;
    }
    let from = |v: Vec<f64>| {
        GridFunction::from_values(Arc::clone(grid), v).expect("length matches grid")
    };
    Ok((from(r1), from(r2)))
}

/// Reconstruct `g` and `g'` from the `f` component alone through the first
/// equation:
///
/// ```text
/// g  = (f' - (kappa/r) f + p f) / omega1,
/// g' = -omega2 f - (kappa/r) g + p g,
/// ```
///
/// with analytic limit `0` at the origin.  This path uses only the
/// `beta_{2,n}`/`gamma_{2,n}` data behind `sample` and serves as an internal
/// cross-check of the two coefficient families.
pub fn g_via_f(
    sample: &SolutionSample,
    sp: &SpectralPoint,
    problem: &DiracProblem,
) -> Result<(GridFunction, GridFunction)> {
    if sp.omega1 == 0.0 {
        return Err(Error::Domain(
            "g_via_f divides by omega1; use the direct series at omega1 = 0".into(),
        ));
    }
    let grid = sample.f.grid();
    if *problem.grid() != *grid {
        return Err(Error::GridMismatch(
            "sample and problem use different grids".into(),
        ));
    }
    let kappa = problem.kappa();
    let p = problem.p();
    let n = grid.len();
    let mut g = vec![0.0; n];
    let mut gp = vec![0.0; n];
    for i in 1..n {
        let r = grid.r(i);
        let fv = sample.f.value(i);
        let pv = p.value(i);
        g[i] = (sample.f_prime.value(i) - (kappa / r) * fv + pv * fv) / sp.omega1;
        gp[i] = -sp.omega2 * fv - (kappa / r) * g[i] + pv * g[i];
    }
    let from = |v: Vec<f64>| {
        GridFunction::from_values(Arc::clone(grid), v).expect("length matches grid")
    };
    Ok((from(g), from(gp)))
}
