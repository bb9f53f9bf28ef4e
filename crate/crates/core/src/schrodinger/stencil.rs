//! Finite-difference stencils and Schrödinger residuals.

use super::grid::SampledFunction;
use crate::error::{Result, SusyError};

/// First derivative: 5-point central formula in the interior, 5-point
/// one-sided formulas at the two outermost points on each side.
pub fn first_difference(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5, "first_difference needs at least 5 samples");
    let mut d = vec![0.0; n];
    for i in 2..n - 2 {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    }
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
    d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4]
        + 3.0 * f[n - 5])
        / (12.0 * h);
    d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5])
        / (12.0 * h);
    d
}

/// Second derivative by the 5-point central stencil. The two outermost points
/// on each side copy the nearest interior value.
pub fn second_difference(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5, "second_difference needs at least 5 samples");
    let mut d = vec![0.0; n];
    let h2 = 12.0 * h * h;
    for i in 2..n - 2 {
        d[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / h2;
    }
    d[0] = d[2];
    d[1] = d[2];
    d[n - 1] = d[n - 3];
    d[n - 2] = d[n - 3];
    d
}

/// Adjacent-sample intervals on which `values` vanishes or changes sign.
fn sign_change_brackets(values: &[f64], x: impl Fn(usize) -> f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 0..values.len() {
        if values[i] == 0.0 {
            out.push((x(i), x(i)));
        } else if i + 1 < values.len() && values[i] * values[i + 1] < 0.0 {
            out.push((x(i), x(i + 1)));
        }
    }
    out
}

/// Fails with a singularity error naming the brackets if `f` has a zero or
/// sign change on its grid.
pub(crate) fn ensure_zero_free(f: &SampledFunction, what: &str) -> Result<()> {
    let g = *f.grid();
    let brackets = sign_change_brackets(f.values(), |i| g.x(i));
    if brackets.is_empty() {
        Ok(())
    } else {
        Err(SusyError::Singularity {
            what: what.to_string(),
            brackets,
        })
    }
}

/// `d²/dx² log|W|` with the 5-point stencil; edge points copied inward.
pub fn second_log_derivative(w: &SampledFunction) -> Result<SampledFunction> {
    ensure_zero_free(w, "Wronskian")?;
    let logs: Vec<f64> = w.values().iter().map(|v| v.abs().ln()).collect();
    SampledFunction::new(*w.grid(), second_difference(&logs, w.grid().spacing()))
}

/// Maximum interior residual of `y'' + (E - V) y + source = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    /// max over interior points of the absolute residual
    pub absolute: f64,
    /// `absolute / (1 + max|y|)`
    pub relative: f64,
}

impl Residual {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.relative < tolerance
    }
}

/// Residual of `y'' + (energy - V) y + source` with `y''` from the 5-point
/// stencil, over indices `2..n-2`.
pub fn schrodinger_residual(
    y: &SampledFunction,
    potential: &[f64],
    energy: f64,
    source: Option<&[f64]>,
) -> Residual {
    let v = y.values();
    let n = v.len();
    let d2 = second_difference(v, y.grid().spacing());
    let mut worst = 0.0_f64;
    for i in 2..n - 2 {
        let s = source.map_or(0.0, |s| s[i]);
        let r = d2[i] + (energy - potential[i]) * v[i] + s;
        worst = worst.max(r.abs());
    }
    Residual {
        absolute: worst,
        relative: worst / (1.0 + y.max_abs()),
    }
}
