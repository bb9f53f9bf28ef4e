use serde::{Deserialize, Serialize};

use crate::error::{Result, SusyError};

/// Smallest admissible grid: the 5-point stencils need two neighbours on
/// each side of at least a few interior points.
pub const MIN_POINTS: usize = 9;

/// Uniform grid `x_i = x_min + i h`, `h = (x_max - x_min) / (n_points - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(SusyError::InvalidGrid("bounds must be finite".into()));
        }
        if x_min >= x_max {
            return Err(SusyError::InvalidGrid(format!(
                "x_min ({x_min}) must be < x_max ({x_max})"
            )));
        }
        if n_points < MIN_POINTS {
            return Err(SusyError::InvalidGrid(format!(
                "n_points = {n_points}, need at least {MIN_POINTS}"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
        })
    }

    /// `[-15, 15]` with 6001 points (h = 0.005).
    pub fn default_domain() -> Self {
        Self {
            x_min: -15.0,
            x_max: 15.0,
            n_points: 6001,
        }
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing()
    }

    pub fn abscissae(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    /// Grid with every other point removed (spacing doubled). Requires an odd
    /// point count so the end points are kept.
    pub fn coarsened(&self) -> Result<Self> {
        if self.n_points.is_multiple_of(2) {
            return Err(SusyError::InvalidGrid(
                "coarsening needs an odd number of points".into(),
            ));
        }
        Self::new(self.x_min, self.x_max, (self.n_points - 1) / 2 + 1)
    }

    /// Grid with the spacing halved.
    pub fn refined(&self) -> Self {
        Self {
            n_points: 2 * (self.n_points - 1) + 1,
            ..*self
        }
    }
}

impl Default for Grid {
    fn default() -> Self {
        Self::default_domain()
    }
}

/// Values of a function (and optionally its first derivative) on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<f64>,
    derivatives: Option<Vec<f64>>,
}

fn check_samples(grid: &Grid, data: &[f64], what: &str) -> Result<()> {
    if data.len() != grid.len() {
        return Err(SusyError::InvalidInput(format!(
            "{what}: {} samples for a grid of {} points",
            data.len(),
            grid.len()
        )));
    }
    if let Some(i) = data.iter().position(|v| !v.is_finite()) {
        return Err(SusyError::InvalidInput(format!(
            "{what}: non-finite sample at x = {}",
            grid.x(i)
        )));
    }
    Ok(())
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        check_samples(&grid, &values, "values")?;
        Ok(Self {
            grid,
            values,
            derivatives: None,
        })
    }

    pub fn with_derivatives(grid: Grid, values: Vec<f64>, derivatives: Vec<f64>) -> Result<Self> {
        check_samples(&grid, &values, "values")?;
        check_samples(&grid, &derivatives, "derivatives")?;
        Ok(Self {
            grid,
            values,
            derivatives: Some(derivatives),
        })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.x(i))).collect();
        Self::new(grid, values)
    }

    /// Samples `f(x) = (value, derivative)`.
    pub fn from_fn_with_derivative(grid: Grid, f: impl Fn(f64) -> (f64, f64)) -> Result<Self> {
        let (values, derivatives) = (0..grid.len()).map(|i| f(grid.x(i))).unzip();
        Self::with_derivatives(grid, values, derivatives)
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
            derivatives: Some(vec![0.0; grid.len()]),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivatives(&self) -> Option<&[f64]> {
        self.derivatives.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value_at_anchor(&self) -> f64 {
        self.values[0]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Stored derivative, or a 5-point finite difference when absent.
    pub fn derivative_or_fd(&self) -> Vec<f64> {
        match &self.derivatives {
            Some(d) => d.clone(),
            None => super::stencil::first_difference(&self.values, self.grid.spacing()),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
            derivatives: self
                .derivatives
                .as_ref()
                .map(|d| d.iter().map(|v| v * factor).collect()),
        }
    }

    pub fn without_derivatives(&self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.clone(),
            derivatives: None,
        }
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Writes `x,value` rows (shortest round-trip formatting).
    pub fn write_csv(&self, writer: impl std::io::Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "value"])?;
        for (i, v) in self.values.iter().enumerate() {
            w.write_record([self.grid.x(i).to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_path(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    /// Cubic interpolation: Hermite when derivatives are stored, otherwise
    /// 4-point Lagrange. `None` outside the grid.
    pub fn interpolate(&self, x: f64) -> Option<f64> {
        let n = self.grid.len();
        let h = self.grid.spacing();
        let s = (x - self.grid.x_min()) / h;
        let tol = 1e-9;
        if !(s >= -tol && s <= (n - 1) as f64 + tol) {
            return None;
        }
        let i = (s.floor().max(0.0) as usize).min(n - 2);
        let t = s - i as f64;
        if let Some(d) = &self.derivatives {
            return Some(hermite(
                self.values[i],
                self.values[i + 1],
                d[i] * h,
                d[i + 1] * h,
                t,
            ));
        }
        // Window of four nodes containing [i, i+1].
        let start = i.saturating_sub(1).min(n - 4);
        let u = s - start as f64;
        let f = &self.values[start..start + 4];
        Some(lagrange4(f, u))
    }
}

pub(crate) fn hermite(f0: f64, f1: f64, d0: f64, d1: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * f0
        + (t3 - 2.0 * t2 + t) * d0
        + (-2.0 * t3 + 3.0 * t2) * f1
        + (t3 - t2) * d1
}

/// Lagrange interpolant through nodes 0, 1, 2, 3 evaluated at `u`.
pub(crate) fn lagrange4(f: &[f64], u: f64) -> f64 {
    let l0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    let l1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    let l2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
    let l3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    l0 * f[0] + l1 * f[1] + l2 * f[2] + l3 * f[3]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(1.0, 0.0, 100).is_err());
        assert!(Grid::new(0.0, 1.0, 8).is_err());
        assert!(Grid::new(0.0, f64::INFINITY, 100).is_err());
        assert!(Grid::new(0.0, 1.0, 9).is_ok());
    }

    #[test]
    fn abscissae_are_exact_multiples() {
        let g = Grid::default_domain();
        assert_eq!(g.spacing(), 0.005);
        assert_eq!(g.x(0), -15.0);
        assert_eq!(g.x(3000), -15.0 + 3000.0 * 0.005);
        assert_eq!(g.abscissae().len(), 6001);
    }

    #[test]
    fn coarsen_and_refine() {
        let g = Grid::default_domain();
        assert_eq!(g.coarsened().unwrap().len(), 3001);
        assert_eq!(g.refined().len(), 12001);
        assert!(Grid::new(0.0, 1.0, 10).unwrap().coarsened().is_err());
    }

    #[test]
    fn sampled_function_rejects_non_finite() {
        let g = Grid::new(0.0, 1.0, 11).unwrap();
        let mut v = vec![0.0; 11];
        v[3] = f64::NAN;
        assert!(SampledFunction::new(g, v).is_err());
        assert!(SampledFunction::new(g, vec![0.0; 10]).is_err());
    }

    #[test]
    fn interpolation_is_cubic_exact() {
        let g = Grid::new(0.0, 2.0, 21).unwrap();
        let cubic = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x;
        let f = SampledFunction::from_fn(g, cubic).unwrap();
        for &x in &[0.0, 0.033, 0.71, 1.999, 2.0] {
            assert!((f.interpolate(x).unwrap() - cubic(x)).abs() < 1e-12);
        }
        let fh = SampledFunction::from_fn_with_derivative(g, |x| (cubic(x), -2.0 + 1.5 * x * x))
            .unwrap();
        assert!((fh.interpolate(1.234).unwrap() - cubic(1.234)).abs() < 1e-12);
        assert!(f.interpolate(2.1).is_none());
    }
}
