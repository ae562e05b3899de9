//! Uniform radial grid on `[0, b]` and sampled functions on it, with
//! fourth-order cumulative integration.
//!
//! Everything downstream works on one shared uniform grid `r_i = i * b /
//! (n_points - 1)`; there is deliberately no support for nonuniform or
//! adaptive grids.  Cumulative antiderivatives `F(r) = ∫_0^r f(t) dt` are
//! needed at *every* grid point (they feed integrand recursions), so the
//! quadrature below is a cumulative composite Newton–Cotes rule: each
//! interval is integrated from the cubic through a four-point stencil,
//! which is exact for polynomials of degree <= 3 and has O(h^4) global
//! error.  The running sum is compensated (Kahan) so that roundoff stays
//! at the level of one ulp of the result instead of growing with the
//! number of points.

use crate::error::{Error, Result};
use std::io::{BufRead, Write};
use std::sync::Arc;

/// Uniform grid `r_i = i * b / (n - 1)` on `[0, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    b: f64,
    n: usize,
    step: f64,
}

impl Grid {
    /// Builds a uniform grid with `n_points` points on `[0, b]`.
    pub fn new(b: f64, n_points: usize) -> Result<Arc<Grid>> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidGrid(format!("endpoint b = {b} must be finite and > 0")));
        }
        if n_points < 2 {
            return Err(Error::InvalidGrid(format!("n_points = {n_points} must be >= 2")));
        }
        Ok(Arc::new(Grid { b, n: n_points, step: b / (n_points - 1) as f64 }))
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing `h = b / (n_points - 1)`.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// The radius of the `i`-th point.
    pub fn r(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        // Computed multiplicatively so r(n-1) == b exactly up to one rounding.
        i as f64 * self.step
    }

    /// All radii in order.
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.r(i))
    }

    /// Index of the grid point nearest to `r` (clamped to the grid).
    pub fn nearest_index(&self, r: f64) -> usize {
        let i = (r / self.step).round();
        (i.max(0.0) as usize).min(self.n - 1)
    }
}

/// A real-valued function sampled on a shared [`Grid`].
///
/// Values are finite except possibly at `r = 0`, where constructions with a
/// removable singularity may store a flagged non-finite placeholder; all
/// quadrature entry points replace the origin value by its analytic limit
/// before integrating.
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn from_values(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.points().map(f).collect();
        GridFunction { grid, values }
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        GridFunction { grid, values: vec![0.0; n] }
    }

    pub fn constant(grid: Arc<Grid>, c: f64) -> Self {
        let n = grid.len();
        GridFunction { grid, values: vec![c; n] }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Largest absolute value over the whole grid (NaN entries ignored).
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().copied().filter(|v| v.is_finite()).fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute value over indices `lo..=hi` (NaN entries ignored).
    pub fn sup_norm_range(&self, lo: usize, hi: usize) -> f64 {
        self.values[lo..=hi].iter().copied().filter(|v| v.is_finite()).fold(0.0, |m, v| m.max(v.abs()))
    }

    fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if *self.grid != *other.grid {
            return Err(Error::GridMismatch(format!(
                "grids differ: [0,{}] with {} points vs [0,{}] with {} points",
                self.grid.b(),
                self.grid.len(),
                other.grid.b(),
                other.grid.len()
            )));
        }
        Ok(())
    }

    /// Pointwise map `x -> f(x)`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise map with access to the radius, `(r, x) -> f(r, x)`.
    pub fn map_with_r(&self, f: impl Fn(f64, f64) -> f64) -> GridFunction {
        let grid = Arc::clone(&self.grid);
        let values =
            self.values.iter().enumerate().map(|(i, &v)| f(grid.r(i), v)).collect();
        GridFunction { grid, values }
    }

    /// Pointwise combination of two functions on the same grid.
    pub fn zip_map(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(GridFunction { grid: Arc::clone(&self.grid), values })
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        self.map(|v| c * v)
    }

    /// Pointwise quotient with an explicit value at `r = 0`.
    ///
    /// Quotients of functions vanishing at the origin are the common case
    /// (removable singularity); the caller supplies the analytic limit
    /// instead of getting a silent NaN from `0/0`.
    pub fn div_at_origin(&self, other: &GridFunction, origin: f64) -> Result<GridFunction> {
        let mut out = self.zip_map(other, |a, b| a / b)?;
        out.values[0] = origin;
        Ok(out)
    }

    /// Cumulative antiderivative `F(r_i) = ∫_0^{r_i} f(t) dt`.
    ///
    /// Each interval's increment is the integral of the cubic through a
    /// four-point stencil containing the interval: exact for cubics,
    /// O(h^4) globally.  Non-finite integrand values poison the running sum
    /// from roughly two points before the first bad sample onward; callers
    /// that tolerate a contaminated tail (the coefficient recursion does)
    /// must trim it themselves.
    pub fn cumulative_integral(&self) -> GridFunction {
        let n = self.values.len();
        let h = self.grid.step();
        let y = &self.values;
        let mut out = vec![0.0; n];
        if n == 2 {
            out[1] = 0.5 * h * (y[0] + y[1]);
            return GridFunction { grid: Arc::clone(&self.grid), values: out };
        }
        if n == 3 {
            out[1] = h * (5.0 * y[0] + 8.0 * y[1] - y[2]) / 12.0;
            out[2] = out[1] + h * (-y[0] + 8.0 * y[1] + 5.0 * y[2]) / 12.0;
            return GridFunction { grid: Arc::clone(&self.grid), values: out };
        }
        let c = h / 24.0;
        let mut sum = 0.0;
        let mut comp = 0.0; // Kahan compensation
        let mut push = |slot: &mut f64, inc: f64| {
            let t = inc - comp;
            let s = sum + t;
            comp = (s - sum) - t;
            sum = s;
            *slot = sum;
        };
        // First interval: cubic through points 0..4.
        push(&mut out[1], c * (9.0 * y[0] + 19.0 * y[1] - 5.0 * y[2] + y[3]));
        // Interior intervals [i, i+1]: cubic through points (i-1 .. i+2).
        for i in 1..n - 2 {
            push(&mut out[i + 1], c * (-y[i - 1] + 13.0 * y[i] + 13.0 * y[i + 1] - y[i + 2]));
        }
        // Last interval: cubic through the final four points.
        push(&mut out[n - 1], c * (y[n - 4] - 5.0 * y[n - 3] + 19.0 * y[n - 2] + 9.0 * y[n - 1]));
        GridFunction { grid: Arc::clone(&self.grid), values: out }
    }

    /// Cumulative antiderivative of samples of `t^a * phi(t)` with `phi`
    /// smooth and `a >= 0` possibly large.
    ///
    /// The opening stencils of [`cumulative_integral`](Self::cumulative_integral)
    /// fit cubics through the first grid points, which cannot resolve a
    /// steep `t^a` shape: for large `a` the first couple of cumulative
    /// values carry O(1) relative error.  Here the first three entries are
    /// recomputed with a product rule — `phi` is interpolated by the cubic
    /// through `r_1..r_4` and integrated against the weight `t^a` exactly —
    /// and the composite tail is shifted to continue from the corrected
    /// `r_3` value.  Falls back to the plain rule on grids shorter than six
    /// points.
    pub fn cumulative_integral_power_weighted(&self, a: f64) -> GridFunction {
        // Monomial coefficients (constant first) of the cubic Lagrange
        // basis on the scaled nodes tau = 1, 2, 3, 4.
        const BASIS: [[f64; 4]; 4] = [
            [4.0, -13.0 / 3.0, 1.5, -1.0 / 6.0],
            [-6.0, 9.5, -4.0, 0.5],
            [4.0, -7.0, 3.5, -0.5],
            [-1.0, 11.0 / 6.0, -1.0, 1.0 / 6.0],
        ];
        let mut out = self.cumulative_integral();
        if out.values.len() < 6 {
            return out;
        }
        let h = self.grid.step();
        let mut corrected = [0.0f64; 4];
        for (k, slot) in corrected.iter_mut().enumerate().skip(1) {
            let kf = k as f64;
            let mut acc = 0.0;
            for j in 1..=4usize {
                let yj = self.values[j];
                if yj == 0.0 {
                    continue;
                }
                // y_j (k/j)^a sum_p c_jp k^(p+1) / (a + p + 1) accumulates
                // y_j times the integral of t^a L_j(t) without ever forming
                // y_j / t_j^a, so underflowed samples contribute an honest
                // zero instead of 0/0.
                let ratio_a = (kf / j as f64).powf(a);
                let mut s = 0.0;
                let mut kp = kf;
                for (p, c) in BASIS[j - 1].iter().enumerate() {
                    s += c * kp / (a + p as f64 + 1.0);
                    kp *= kf;
                }
                acc += yj * ratio_a * s;
            }
            *slot = h * acc;
        }
        let shift = corrected[3] - out.values[3];
        out.values[1..4].copy_from_slice(&corrected[1..4]);
        for v in out.values.iter_mut().skip(4) {
            *v += shift;
        }
        out
    }

    /// First derivative by five-point finite differences (O(h^4), exact for
    /// polynomials of degree <= 4).  Used for potentials supplied without an
    /// analytic derivative and in derivative cross-checks.
    pub fn fd_derivative(&self) -> Result<GridFunction> {
        let n = self.values.len();
        if n < 5 {
            return Err(Error::InvalidGrid(format!(
                "five-point derivative needs at least 5 points, grid has {n}"
            )));
        }
        let y = &self.values;
        let d = 1.0 / (12.0 * self.grid.step());
        let mut out = vec![0.0; n];
        out[0] = d * (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]);
        out[1] = d * (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]);
        for i in 2..n - 2 {
            out[i] = d * (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]);
        }
        out[n - 2] =
            d * (3.0 * y[n - 1] + 10.0 * y[n - 2] - 18.0 * y[n - 3] + 6.0 * y[n - 4] - y[n - 5]);
        out[n - 1] = d
            * (25.0 * y[n - 1] - 48.0 * y[n - 2] + 36.0 * y[n - 3] - 16.0 * y[n - 4]
                + 3.0 * y[n - 5]);
        Ok(GridFunction { grid: Arc::clone(&self.grid), values: out })
    }

    /// Writes `r,value` rows with 17 significant digits (exact f64 round-trip).
    pub fn write_csv<W: Write>(&self, w: &mut W, value_header: &str) -> Result<()> {
        writeln!(w, "r,{value_header}")?;
        for (i, &v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", fmt_f64(self.grid.r(i)), fmt_f64(v))?;
        }
        Ok(())
    }
}

/// Formats with 17 significant digits so that reading the text back yields
/// the identical f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Reads a headered CSV of numeric columns; returns (headers, columns).
pub fn read_csv<R: BufRead>(r: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("empty CSV".into()))??;
    let headers: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let ncols = headers.len();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); ncols];
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != ncols {
            return Err(Error::Config(format!(
                "CSV row {} has {} fields, expected {}",
                lineno + 2,
                fields.len(),
                ncols
            )));
        }
        for (c, field) in fields.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|e| {
                Error::Config(format!("CSV row {} field {}: {e}", lineno + 2, c + 1))
            })?;
            cols[c].push(v);
        }
    }
    Ok((headers, cols))
}
