//! Adaptive Simpson quadrature with Richardson correction.
//!
//! Used as an independent integral oracle; f64 arithmetic is enough because
//! the checks it backs ask for ~1e-10, far above roundoff.

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        left + right + diff / 15.0
    } else {
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_integral() {
        let v = integrate(&|t: f64| t.exp(), 0.0, 1.0, 1e-13);
        assert!((v - (1.0f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn sine_over_half_period() {
        let v = integrate(&|t: f64| t.sin(), 0.0, std::f64::consts::PI, 1e-13);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sharply_peaked_integrand() {
        // int_{-1}^{1} dt / (1e-4 + t^2) = 2 atan(100) / 1e-2
        let v = integrate(&|t: f64| 1.0 / (1e-4 + t * t), -1.0, 1.0, 1e-10);
        let exact = 200.0 * 100.0f64.atan();
        assert!((v - exact).abs() < 1e-7 * exact);
    }
}
