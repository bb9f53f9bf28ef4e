//! Bound states of `-y'' + V y = E y` on a truncated interval with Dirichlet
//! ends, from the 3-point discretization. Eigenvalues by Sturm-count
//! bisection, eigenvectors by inverse iteration.

use crate::error::{Result, SusyError};
use crate::schrodinger::{Grid, SampledFunction};

/// Bisection stops once the bracket is narrower than this.
pub const EIGENVALUE_TOL: f64 = 1e-8;

/// Symmetric tridiagonal matrix on the interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteHamiltonian {
    grid: Grid,
    diagonal: Vec<f64>,
    off_diagonal: f64,
}

impl DiscreteHamiltonian {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> f64 {
        self.off_diagonal
    }

    pub fn dimension(&self) -> usize {
        self.diagonal.len()
    }

    /// Number of eigenvalues strictly below `t`.
    pub fn count_below(&self, t: f64) -> usize {
        let e2 = self.off_diagonal * self.off_diagonal;
        let mut count = 0;
        let mut q = self.diagonal[0] - t;
        if q < 0.0 {
            count += 1;
        }
        for &d in &self.diagonal[1..] {
            let prev = if q == 0.0 {
                f64::EPSILON * e2.sqrt()
            } else {
                q
            };
            q = d - t - e2 / prev;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let r = 2.0 * self.off_diagonal.abs();
        let lo = self.diagonal.iter().fold(f64::INFINITY, |m, d| m.min(*d));
        let hi = self
            .diagonal
            .iter()
            .fold(f64::NEG_INFINITY, |m, d| m.max(*d));
        (lo - r, hi + r)
    }

    /// `k`-th smallest eigenvalue (0-based).
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        while hi - lo > EIGENVALUE_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenvector for an eigenvalue estimate by inverse iteration, padded
    /// with the Dirichlet zeros and normalized to unit `L²` norm with a
    /// positive largest lobe.
    pub fn eigenvector(&self, eigenvalue: f64) -> Result<SampledFunction> {
        let n = self.dimension();
        let shift = eigenvalue + 1e-10 * eigenvalue.abs().max(1.0);
        let mut v = vec![1.0; n];
        for _ in 0..4 {
            v = self.solve_shifted(shift, &v)?;
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        let h = self.grid.spacing();
        let mut values = Vec::with_capacity(n + 2);
        values.push(0.0);
        values.extend(v.iter().map(|x| x / h.sqrt()));
        values.push(0.0);
        let peak = values
            .iter()
            .copied()
            .fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if peak < 0.0 {
            values.iter_mut().for_each(|x| *x = -*x);
        }
        SampledFunction::new(self.grid, values)
    }

    /// Thomas solve of `(H - shift) x = b`.
    fn solve_shifted(&self, shift: f64, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.dimension();
        let e = self.off_diagonal;
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diagonal[0] - shift;
        for i in 0..n {
            if i > 0 {
                denom = self.diagonal[i] - shift - e * c[i - 1];
            }
            if denom == 0.0 {
                denom = f64::EPSILON;
            }
            c[i] = e / denom;
            d[i] = (b[i] - if i > 0 { e * d[i - 1] } else { 0.0 }) / denom;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SusyError::Accuracy {
                what: "inverse iteration".into(),
                residual: f64::INFINITY,
                tolerance: 0.0,
            });
        }
        Ok(x)
    }
}

/// `-d²/dx² + V` with the 3-point stencil and Dirichlet ends.
pub fn build_hamiltonian(v: &SampledFunction) -> Result<DiscreteHamiltonian> {
    let g = *v.grid();
    if g.len() < 5 {
        return Err(SusyError::InvalidGrid(
            "eigensolver needs at least 5 points".into(),
        ));
    }
    if v.values().iter().any(|x| !x.is_finite()) {
        return Err(SusyError::InvalidInput("potential is not finite".into()));
    }
    let h2 = g.spacing() * g.spacing();
    let n = g.len();
    Ok(DiscreteHamiltonian {
        grid: g,
        diagonal: v.values()[1..n - 1].iter().map(|x| 2.0 / h2 + x).collect(),
        off_diagonal: -1.0 / h2,
    })
}

/// The `count` smallest eigenvalues, ascending.
pub fn lowest_eigenvalues(h: &DiscreteHamiltonian, count: usize) -> Vec<f64> {
    (0..count.min(h.dimension()))
        .map(|k| h.eigenvalue(k))
        .collect()
}

/// Larger of the two endpoint values of `V`, taken as the continuum edge.
pub fn continuum_threshold(v: &SampledFunction) -> f64 {
    let vals = v.values();
    vals[0].max(vals[vals.len() - 1])
}

/// Eigenvalues below `threshold`.
pub fn eigenvalues_below(h: &DiscreteHamiltonian, threshold: f64) -> Vec<f64> {
    lowest_eigenvalues(h, h.count_below(threshold))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenEstimate {
    pub value: f64,
    /// Richardson estimate `(E_h - E_{2h}) / 3` of the discretization error.
    pub error: f64,
}

/// Bound states of `v` below its continuum edge, each with an error estimate
/// from a second solve on the grid with every other node.
pub fn bound_states(v: &SampledFunction) -> Result<Vec<EigenEstimate>> {
    let h = build_hamiltonian(v)?;
    let values = eigenvalues_below(&h, continuum_threshold(v));
    estimates(v, values)
}

/// The `count` lowest eigenvalues with Richardson error estimates.
pub fn spectrum(v: &SampledFunction, count: usize) -> Result<Vec<EigenEstimate>> {
    let h = build_hamiltonian(v)?;
    estimates(v, lowest_eigenvalues(&h, count))
}

fn estimates(v: &SampledFunction, values: Vec<f64>) -> Result<Vec<EigenEstimate>> {
    let coarse = coarsen(v)?;
    let hc = build_hamiltonian(&coarse)?;
    Ok(values
        .into_iter()
        .enumerate()
        .map(|(k, value)| {
            let error = if k < hc.dimension() {
                (value - hc.eigenvalue(k)) / 3.0
            } else {
                f64::NAN
            };
            EigenEstimate { value, error }
        })
        .collect())
}

fn coarsen(v: &SampledFunction) -> Result<SampledFunction> {
    let g = v.grid().coarsened()?;
    let values = v.values().iter().step_by(2).copied().collect();
    SampledFunction::new(g, values)
}
