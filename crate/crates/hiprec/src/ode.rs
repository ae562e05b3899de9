//! Direct numerical integration of the radial Dirac system, used as an
//! independent oracle for solution values away from the origin.
//!
//! The system
//!
//! ```text
//! f' = (kappa/r) f - p f + omega1 g,
//! g' = -(kappa/r) g + p g - omega2 f,
//! ```
//!
//! is integrated with an adaptive Dormand-Prince 5(4) pair, started at a
//! small radius `r_a` from the regular-solution expansion
//!
//! ```text
//! f = C_f r^kappa    (1 - p(0) r + O(r^2)),
//! g = C_g r^(kappa+1)(1 - kappa p(0) r / (kappa+1) + O(r^2)),
//! C_g = -omega2 C_f / (2 kappa + 1),
//! ```
//!
//! so the starting error is O(r_a^2) relative.

/// Dormand-Prince coefficients (5th-order solution row and embedded
/// 4th-order error row).
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = rhs(r, y)` from `r0`, reporting the state at each radius
/// in `r_out` (strictly increasing, all >= r0).
pub fn rk45_path<F: Fn(f64, [f64; 2]) -> [f64; 2]>(
    rhs: &F,
    r0: f64,
    y0: [f64; 2],
    r_out: &[f64],
    rtol: f64,
) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(r_out.len());
    let mut r = r0;
    let mut y = y0;
    let mut k1 = rhs(r, y);
    let mut h: f64 = (r_out.last().copied().unwrap_or(r0) - r0).max(1e-12) * 1e-4;
    let mut steps: u64 = 0;
    for &rt in r_out {
        assert!(rt >= r0, "output radius {rt} precedes start {r0}");
        while r < rt {
            steps += 1;
            assert!(steps < 50_000_000, "reference integrator exceeded its step budget");
            let hs = h.min(rt - r);
            let mut k = [[0.0f64; 2]; 7];
            k[0] = k1;
            for s in 0..6 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s + 1) {
                    ys[0] += hs * A[s][j] * kj[0];
                    ys[1] += hs * A[s][j] * kj[1];
                }
                k[s + 1] = rhs(r + C[s] * hs, ys);
            }
            // 5th-order solution is the stage-6 state (FSAL pair).
            let mut ynew = y;
            for (j, kj) in k.iter().enumerate().take(6) {
                ynew[0] += hs * A[5][j] * kj[0];
                ynew[1] += hs * A[5][j] * kj[1];
            }
            let mut err = [0.0f64; 2];
            for (j, kj) in k.iter().enumerate() {
                err[0] += hs * E[j] * kj[0];
                err[1] += hs * E[j] * kj[1];
            }
            // Error scaled against the larger component so zero crossings of
            // one component do not stall the step size.
            let ynorm = y[0].abs().max(y[1].abs()).max(ynew[0].abs()).max(ynew[1].abs());
            let scale = 1e-300 + rtol * ynorm;
            let en = ((err[0] / scale).powi(2) + (err[1] / scale).powi(2)).sqrt()
                / std::f64::consts::SQRT_2;
            if en <= 1.0 {
                r += hs;
                y = ynew;
                k1 = k[6];
            } else {
                k1 = k[0];
            }
            let fac = (0.9 * en.powf(-0.2)).clamp(0.2, 5.0);
            h = (hs * fac).max(1e-14 * (1.0 + r.abs()));
        }
        out.push(y);
    }
    out
}

/// Regular solution of the radial Dirac system at the radii `r_out`
/// (strictly increasing, first entry > 0), normalized by `f ~ c_f r^kappa`.
pub fn radial_dirac_regular<P: Fn(f64) -> f64>(
    kappa: f64,
    omega1: f64,
    omega2: f64,
    p: &P,
    c_f: f64,
    r_out: &[f64],
    rtol: f64,
) -> Vec<[f64; 2]> {
    assert!(!r_out.is_empty() && r_out[0] > 0.0);
    let r_a = (1e-6f64).min(r_out[0] * 0.5);
    let p0 = p(0.0);
    let c_g = -omega2 * c_f / (2.0 * kappa + 1.0);
    let y0 = [
        c_f * r_a.powf(kappa) * (1.0 - p0 * r_a),
        c_g * r_a.powf(kappa + 1.0) * (1.0 - kappa * p0 * r_a / (kappa + 1.0)),
    ];
    let rhs = |r: f64, y: [f64; 2]| {
        let pr = p(r);
        [
            (kappa / r - pr) * y[0] + omega1 * y[1],
            -(kappa / r - pr) * y[1] - omega2 * y[0],
        ]
    };
    rk45_path(&rhs, r_a, y0, r_out, rtol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_potential_matches_trigonometric_solution() {
        // p = 0, kappa = 1, omega1 = omega2 = omega: the regular pair is
        // f = -sin(omega r), g = sin(omega r)/(omega r) - cos(omega r)
        // for the normalization c_f = -omega.
        let omega = 2.0;
        let r_out: Vec<f64> = (1..=40).map(|i| i as f64 * 0.05).collect();
        let path = radial_dirac_regular(1.0, omega, omega, &|_| 0.0, -omega, &r_out, 1e-12);
        for (i, y) in path.iter().enumerate() {
            let r = r_out[i];
            let f = -(omega * r).sin();
            let g = (omega * r).sin() / (omega * r) - (omega * r).cos();
            assert!((y[0] - f).abs() < 1e-9, "f at r={r}: {} vs {f}", y[0]);
            assert!((y[1] - g).abs() < 1e-9, "g at r={r}: {} vs {g}", y[1]);
        }
    }

    #[test]
    fn tolerance_refinement_converges() {
        // Coarse and tight tolerances must agree to roughly the coarse one.
        let p = |r: f64| r * (1.0 + r).ln();
        let r_out = [0.5, 1.0, 2.0];
        let lo = radial_dirac_regular(2.0, 3.0, 1.5, &p, 1.0, &r_out, 1e-6);
        let hi = radial_dirac_regular(2.0, 3.0, 1.5, &p, 1.0, &r_out, 1e-12);
        for (a, b) in lo.iter().zip(hi.iter()) {
            let scale = b[0].abs().max(b[1].abs());
            assert!((a[0] - b[0]).abs() < 1e-5 * scale);
            assert!((a[1] - b[1]).abs() < 1e-5 * scale);
        }
    }

    #[test]
    fn oscillator_shape_matches_closed_form() {
        // Dirac oscillator with p = r, kappa = 3 at the spectral point
        // E^2 - 1 = 4: f is proportional to r^3 e^{-r^2/2} L_1^{5/2}(r^2)
        // with L_1^{5/2}(z) = 7/2 - z.  Shape comparison only.
        let e = 5.0f64.sqrt();
        let r_out: Vec<f64> = (1..=30).map(|i| i as f64 * 0.1).collect();
        let path = radial_dirac_regular(3.0, e + 1.0, e - 1.0, &|r| r, 1.0, &r_out, 1e-12);
        let shape = |r: f64| r.powi(3) * (-r * r / 2.0).exp() * (3.5 - r * r);
        let scale = path[14][0] / shape(r_out[14]);
        for (i, y) in path.iter().enumerate() {
            let expect = scale * shape(r_out[i]);
            assert!(
                (y[0] - expect).abs() < 1e-8 * scale.abs(),
                "r={}: f={} vs {expect}",
                r_out[i],
                y[0]
            );
        }
    }
}
