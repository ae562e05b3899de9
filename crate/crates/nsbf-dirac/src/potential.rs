//! Problem data for the radial Dirac system and the objects derived from the
//! potential alone: the Schrödinger-type potentials `q_1`, `q_2` with their
//! antiderivatives, and the particular solutions `f_0`, `g_0` that seed the
//! coefficient recursion.
//!
//! Eliminating one component from the first-order system turns the other
//! into a perturbed Bessel equation; the two companion potentials are
//!
//! ```text
//! q_1 =  p' - (2 kappa / r) p + p^2     (equation solved by g),
//! q_2 = -p' - (2 kappa / r) p + p^2     (equation solved by f),
//! ```
//!
//! and for `omega = 0` the regular solutions are available in closed form:
//!
//! ```text
//! f_0 = r^kappa e^{-P},   P(r) = int_0^r p,
//! g_0 = (2 kappa + 1) r^{-kappa} e^{P} int_0^r t^{2 kappa} e^{-2 P(t)} dt.
//! ```
//!
//! The recursion divides by powers of `r` against these, so everything is
//! kept in the scaled forms `u2_hat = f_0 / r^kappa` and `u1_hat =
//! g_0 / r^(kappa+1)`, which are smooth and nonzero through the origin.

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use num_complex::Complex64;
use std::sync::Arc;

/// The radial Dirac problem
///
/// ```text
/// f' - (kappa / r) f + p f = omega1 g,
/// g' + (kappa / r) g - p g = -omega2 f,
/// ```
///
/// with a real potential sampled on a uniform grid.  The spectral pair
/// `(omega1, omega2)` stored here is the problem's reference point; solution
/// evaluation may override it freely because the series coefficients do not
/// depend on it.
#[derive(Debug, Clone)]
pub struct DiracProblem {
    kappa: f64,
    p: GridFunction,
    p_prime: GridFunction,
    omega1: f64,
    omega2: f64,
}

impl DiracProblem {
    /// `p_prime` may be omitted, in which case it is reconstructed by
    /// fourth-order finite differences.
    pub fn new(
        kappa: f64,
        p: GridFunction,
        p_prime: Option<GridFunction>,
        omega1: f64,
        omega2: f64,
    ) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.5) {
            return Err(Error::Domain(format!("kappa = {kappa} must be >= 1/2")));
        }
        if !(omega1.is_finite() && omega2.is_finite()) || omega2 == 0.0 {
            return Err(Error::Domain(format!(
                "spectral pair ({omega1}, {omega2}) must be finite with omega2 != 0"
            )));
        }
        let p_prime = match p_prime {
            Some(dp) => {
                if *dp.grid() != *p.grid() {
                    return Err(Error::GridMismatch(
                        "p and p_prime sampled on different grids".into(),
                    ));
                }
                dp
            }
            None => p.fd_derivative()?,
        };
        Ok(DiracProblem { kappa, p, p_prime, omega1, omega2 })
    }

    /// Same potential, different spectral point.
    pub fn with_spectral(&self, omega1: f64, omega2: f64) -> Result<Self> {
        DiracProblem::new(self.kappa, self.p.clone(), Some(self.p_prime.clone()), omega1, omega2)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn p(&self) -> &GridFunction {
        &self.p
    }

    pub fn p_prime(&self) -> &GridFunction {
        &self.p_prime
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn omega2(&self) -> f64 {
        self.omega2
    }

    /// `omega^2 = omega1 * omega2`.
    pub fn omega_squared(&self) -> f64 {
        self.omega1 * self.omega2
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.p.grid()
    }

    /// The derived potentials are singular at the origin unless `p(0) = 0`;
    /// rate estimates also assume it.  Callers may want to warn.
    pub fn p_vanishes_at_origin(&self) -> bool {
        self.p.value(0) == 0.0
    }
}

/// `q_1`, `q_2` and their antiderivatives `Q_j(r) = int_0^r q_j`.
#[derive(Debug, Clone)]
pub struct DerivedPotentials {
    pub q1: GridFunction,
    pub q2: GridFunction,
    pub q1_cum: GridFunction,
    pub q2_cum: GridFunction,
    /// `p(0) != 0` makes `q_j ~ -2 kappa p(0)/r` near 0: the `q_j(0)` slot is
    /// then a placeholder and the antiderivatives are not trustworthy near
    /// the origin.  The coefficient recursion itself never consumes them;
    /// only the derivative series and diagnostics do.
    pub singular_at_origin: bool,
}

impl DerivedPotentials {
    /// `q_j` for `j` in {1, 2}.
    pub fn q(&self, j: usize) -> &GridFunction {
        match j {
            1 => &self.q1,
            2 => &self.q2,
            _ => panic!("family index {j} out of range"),
        }
    }

    /// `Q_j` for `j` in {1, 2}.
    pub fn q_cum(&self, j: usize) -> &GridFunction {
        match j {
            1 => &self.q1_cum,
            2 => &self.q2_cum,
            _ => panic!("family index {j} out of range"),
        }
    }
}

/// Builds `q_1 = p' - (2 kappa/r) p + p^2`, `q_2 = -p' - (2 kappa/r) p + p^2`
/// and their cumulative integrals.  When `p(0) = 0` the origin value uses
/// `p(r)/r -> p'(0)`; otherwise the origin slot is zeroed and the
/// singularity flag set.
pub fn derive_potentials(problem: &DiracProblem) -> DerivedPotentials {
    let grid = problem.grid();
    let two_k = 2.0 * problem.kappa();
    let p = problem.p().values();
    let pp = problem.p_prime().values();
    let singular = !problem.p_vanishes_at_origin();
    let n = grid.len();
    let mut q1 = vec![0.0; n];
    let mut q2 = vec![0.0; n];
    if singular {
        // Placeholder; the true q_j diverge like -2 kappa p(0)/r.
        q1[0] = 0.0;
        q2[0] = 0.0;
    } else {
        q1[0] = (1.0 - two_k) * pp[0];
        q2[0] = -(1.0 + two_k) * pp[0];
    }
    for i in 1..n {
        let r = grid.r(i);
        let common = -two_k * p[i] / r + p[i] * p[i];
        q1[i] = pp[i] + common;
        q2[i] = -pp[i] + common;
    }
    let q1 = GridFunction::from_values(Arc::clone(grid), q1).expect("length matches grid");
    let q2 = GridFunction::from_values(Arc::clone(grid), q2).expect("length matches grid");
    let q1_cum = q1.cumulative_integral();
    let q2_cum = q2.cumulative_integral();
    DerivedPotentials { q1, q2, q1_cum, q2_cum, singular_at_origin: singular }
}

/// The `omega = 0` regular solutions and their derivatives, plus the scaled
/// forms the recursion divides by.
#[derive(Debug, Clone)]
pub struct ParticularSolutions {
    pub f0: GridFunction,
    pub g0: GridFunction,
    pub f0_prime: GridFunction,
    pub g0_prime: GridFunction,
    /// `f_0 / r^kappa = e^{-P}`; smooth, equals 1 at the origin.
    pub u2_hat: GridFunction,
    /// `g_0 / r^(kappa+1)`; smooth, equals 1 at the origin.
    pub u1_hat: GridFunction,
    /// `P(r) = int_0^r p`.
    pub p_cum: GridFunction,
    /// Assumption (A): `g_0` has no zero on `(0, b]`.  Always true for real
    /// potentials unless the exponential factors left the f64 range.
    pub g0_nonvanishing: bool,
    /// Spectral shift `c` applied to restore Assumption (A); 0 on this
    /// real-potential path.
    pub shift_applied: f64,
}

/// Constructs `f_0`, `g_0` and derivatives.
///
/// The moment integral `M(r) = int_0^r t^(2 kappa) e^(-2P) dt` behind `g_0`
/// is delicate near the origin: the quadrature rule is only cubically exact
/// while the integrand is a high power of `t`.  It is therefore split as a
/// cubic-in-`t` Taylor part integrated in closed form plus a remainder
/// `t^(2 kappa) (e^(-2P) - cubic)` handled by quadrature — an identity for
/// any cubic, with the Taylor choice making the remainder
/// O(t^(2 kappa + 4)) so its quadrature error is negligible against `M`
/// itself.  The remainder's own opening intervals still matter relative to
/// the tiny `M` there, so its cumulative uses the product rule for the
/// `t^(2 kappa)` weight.
pub fn particular_solutions(problem: &DiracProblem) -> ParticularSolutions {
    let grid = problem.grid();
    let kappa = problem.kappa();
    let two_k1 = 2.0 * kappa + 1.0;
    let n = grid.len();
    let p_cum = problem.p().cumulative_integral();
    let u2_hat = p_cum.map(|v| (-v).exp());
    let f0 = u2_hat.map_with_r(|r, v| r.powf(kappa) * v);

    // Taylor coefficients of w = e^{-2P}: 1 + w1 t + w2 t^2 + w3 t^3 + ...
    let p0 = problem.p().value(0);
    let dp0 = problem.p_prime().value(0);
    let ppv = problem.p_prime().values();
    let ddp0 = if n >= 5 {
        // p''(0) by the forward five-point stencil on p'.
        (-25.0 * ppv[0] + 48.0 * ppv[1] - 36.0 * ppv[2] + 16.0 * ppv[3] - 3.0 * ppv[4])
            / (12.0 * grid.step())
    } else {
        0.0
    };
    let w1 = -2.0 * p0;
    let w2 = 2.0 * p0 * p0 - dp0;
    let w3 = 2.0 * p0 * dp0 - 4.0 / 3.0 * p0.powi(3) - ddp0 / 3.0;

    let remainder = GridFunction::from_values(
        Arc::clone(grid),
        p_cum
            .values()
            .iter()
            .enumerate()
            .map(|(i, &pv)| {
                let t = grid.r(i);
                let cubic = 1.0 + t * (w1 + t * (w2 + t * w3));
                t.powf(2.0 * kappa) * ((-2.0 * pv).exp() - cubic)
            })
            .collect(),
    )
    .expect("length matches grid");
    let remainder_cum = remainder.cumulative_integral_power_weighted(2.0 * kappa);

    // m_hat = M / r^(2 kappa + 1); u1_hat = (2 kappa + 1) e^P m_hat.
    let mut u1_hat = vec![0.0; n];
    u1_hat[0] = 1.0;
    for i in 1..n {
        let r = grid.r(i);
        let m_hat = 1.0 / two_k1
            + r * (w1 / (two_k1 + 1.0)
                + r * (w2 / (two_k1 + 2.0) + r * (w3 / (two_k1 + 3.0))))
            + remainder_cum.value(i) / r.powf(2.0 * kappa + 1.0);
        u1_hat[i] = two_k1 * p_cum.value(i).exp() * m_hat;
    }
    let u1_hat = GridFunction::from_values(Arc::clone(grid), u1_hat).expect("length matches grid");
    let g0 = u1_hat.map_with_r(|r, v| r.powf(kappa + 1.0) * v);

    // f_0' = (kappa/r - p) f_0;  g_0' = (p - kappa/r) g_0 + (2 kappa + 1) f_0.
    let mut f0p = vec![0.0; n];
    let mut g0p = vec![0.0; n];
    f0p[0] = if kappa > 1.0 {
        0.0
    } else if kappa == 1.0 {
        1.0
    } else {
        // kappa in [1/2, 1): f_0' ~ kappa r^(kappa-1) diverges.
        f64::INFINITY
    };
    for i in 1..n {
        let r = grid.r(i);
        let pv = problem.p().value(i);
        f0p[i] = (kappa / r - pv) * f0.value(i);
        g0p[i] = (pv - kappa / r) * g0.value(i) + two_k1 * f0.value(i);
    }
    let f0_prime = GridFunction::from_values(Arc::clone(grid), f0p).expect("length matches grid");
    let g0_prime = GridFunction::from_values(Arc::clone(grid), g0p).expect("length matches grid");

    let g0_nonvanishing = u1_hat.values().iter().all(|&v| v.is_finite() && v > 0.0);

    ParticularSolutions {
        f0,
        g0,
        f0_prime,
        g0_prime,
        u2_hat,
        u1_hat,
        p_cum,
        g0_nonvanishing,
        shift_applied: 0.0,
    }
}

/// Restores Assumption (A) by shifting `q_1` by a constant `c` (equivalent
/// to replacing `omega^2` with `omega^2 + c` downstream).
///
/// For the real potentials this type carries, `g_0 > 0` on `(0, b]` always,
/// so the shift is the identity; a failed non-vanishing check here means the
/// exponential factors overflowed, which no constant shift repairs.  The
/// genuinely complex case lives in [`complex_spectral_shift`].
pub fn spectral_shift(
    _problem: &DiracProblem,
    ps: &ParticularSolutions,
    dp: &DerivedPotentials,
) -> Result<(GridFunction, f64, GridFunction)> {
    if ps.g0_nonvanishing {
        return Ok((dp.q1.clone(), 0.0, ps.g0.clone()));
    }
    Err(Error::UnsupportedPotential(
        "g0 could not be verified non-vanishing for a real potential; \
         its exponential factors likely overflowed — reduce b"
            .into(),
    ))
}

/// `q_1 = p' - (2 kappa/r) p + p^2` for complex-valued potential samples;
/// origin handled as in [`derive_potentials`].
pub fn complex_q1(
    kappa: f64,
    grid: &Arc<Grid>,
    p: &[Complex64],
    p_prime: &[Complex64],
) -> Vec<Complex64> {
    let n = grid.len();
    assert_eq!(p.len(), n);
    assert_eq!(p_prime.len(), n);
    let two_k = 2.0 * kappa;
    let mut q = vec![Complex64::new(0.0, 0.0); n];
    q[0] = if p[0].norm() == 0.0 {
        (1.0 - two_k) * p_prime[0]
    } else {
        Complex64::new(0.0, 0.0)
    };
    for i in 1..n {
        let r = grid.r(i);
        q[i] = p_prime[i] - two_k * p[i] / r + p[i] * p[i];
    }
    q
}

/// Searches `c` in the ladder {0, ±1, ±2, ±4, …} (doubling, up to
/// `2^ladder_cap`) for a shift such that the regular solution of
///
/// ```text
/// u'' = (kappa (kappa + 1) / r^2 + q_1 + c) u
/// ```
///
/// has no zeros on `(0, b]`, verifying each candidate by direct integration
/// and a minimum-modulus scan.  Returns the first working `(c, u-samples)`.
///
/// Complex potentials can push zeros into `g_0`; a constant shift always
/// removes them for some `c`, but the existence argument is non-constructive
/// — hence search plus verification.
pub fn complex_spectral_shift(
    kappa: f64,
    grid: &Arc<Grid>,
    q1: &[Complex64],
    ladder_cap: u32,
) -> Result<(f64, Vec<Complex64>)> {
    let mut ladder = vec![0.0f64];
    let mut step = 1.0;
    for _ in 0..ladder_cap {
        ladder.push(step);
        ladder.push(-step);
        step *= 2.0;
    }
    for &c in &ladder {
        let u = integrate_shifted(kappa, grid, q1, c);
        if non_vanishing(&u) {
            return Ok((c, u));
        }
    }
    Err(Error::UnsupportedPotential(format!(
        "no spectral shift in the ladder up to 2^{ladder_cap} removed the zeros of g0"
    )))
}

/// Classical fixed-step RK4 on `u'' = (kappa(kappa+1)/r^2 + q_1 + c) u`
/// started from `u ~ r^(kappa+1)`, with `q_1` linearly interpolated between
/// grid samples.  Accuracy here only needs to support a zero-crossing scan.
fn integrate_shifted(kappa: f64, grid: &Arc<Grid>, q1: &[Complex64], c: f64) -> Vec<Complex64> {
    let n = grid.len();
    let h = grid.step();
    let substeps = 8;
    let hs = h / substeps as f64;
    let q_at = |r: f64| -> Complex64 {
        let x = (r / h).min((n - 1) as f64).max(0.0);
        let i = (x.floor() as usize).min(n - 2);
        let w = x - i as f64;
        q1[i] * (1.0 - w) + q1[i + 1] * w
    };
    let rhs = |r: f64, u: Complex64, v: Complex64| -> (Complex64, Complex64) {
        (v, (kappa * (kappa + 1.0) / (r * r) + c + q_at(r)) * u)
    };
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let r1 = grid.r(1);
    let mut u = Complex64::new(r1.powf(kappa + 1.0), 0.0);
    let mut v = Complex64::new((kappa + 1.0) * r1.powf(kappa), 0.0);
    out[1] = u;
    for i in 1..n - 1 {
        let mut r = grid.r(i);
        for _ in 0..substeps {
            let (k1u, k1v) = rhs(r, u, v);
            let (k2u, k2v) = rhs(r + 0.5 * hs, u + 0.5 * hs * k1u, v + 0.5 * hs * k1v);
            let (k3u, k3v) = rhs(r + 0.5 * hs, u + 0.5 * hs * k2u, v + 0.5 * hs * k2v);
            let (k4u, k4v) = rhs(r + hs, u + hs * k3u, v + hs * k3v);
            u += hs / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            v += hs / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            r += hs;
        }
        out[i + 1] = u;
    }
    out
}

/// Zero scan on `(0, b]`.  A sample dipping below `1e-8` of the running
/// maximum counts as a zero, and so does the phase of `u` rotating by more
/// than a quarter turn between neighbours (`Re(u_{i+1} conj(u_i)) < 0`):
/// near a simple zero consecutive samples sit on opposite sides, which for
/// real solutions is the usual sign change.  Either signal means
/// non-vanishing cannot be certified.
fn non_vanishing(u: &[Complex64]) -> bool {
    let mut running_max = 0.0f64;
    for pair in u[1..].windows(2) {
        let m = pair[0].norm();
        if !m.is_finite() {
            return false;
        }
        running_max = running_max.max(m);
        if m < 1e-8 * running_max {
            return false;
        }
        if (pair[1] * pair[0].conj()).re < 0.0 {
            return false;
        }
    }
    match u.last() {
        Some(last) => last.norm().is_finite() && last.norm() >= 1e-8 * running_max,
        None => false,
    }
}
