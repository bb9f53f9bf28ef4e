use std::io::Read;
use std::path::Path;

use super::grid::{Grid, SampledFunction};
use super::stencil::first_difference;
use crate::error::{Result, SusyError};
use crate::poschl_teller;

/// Potential entering `ψ'' + (E - V) ψ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    /// `V(x) = -2 / cosh²(x)`; the well depth is fixed.
    PoschlTeller,
    /// Linear interpolation of tabulated samples, no extrapolation.
    Tabulated(TabulatedPotential),
    /// Samples of a transformed potential on its grid (cubic interpolation
    /// between nodes).
    Transformed(SampledFunction),
}

pub fn eval_potential(spec: &PotentialSpec, x: f64) -> Result<f64> {
    spec.eval(x)
}

impl PotentialSpec {
    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            Self::PoschlTeller => Ok(poschl_teller::pt_v0(x)),
            Self::Tabulated(t) => t.eval(x),
            Self::Transformed(f) => f.interpolate(x).ok_or(SusyError::Domain {
                x,
                min: f.grid().x_min(),
                max: f.grid().x_max(),
            }),
        }
    }

    pub fn sample(&self, grid: &Grid) -> Result<SampledFunction> {
        if let Self::Transformed(f) = self {
            if f.grid() == grid {
                return Ok(f.clone());
            }
        }
        let values = (0..grid.len())
            .map(|i| self.eval(grid.x(i)))
            .collect::<Result<Vec<_>>>()?;
        SampledFunction::new(*grid, values)
    }

    /// `out[k][i] = V^{(k)}(x_i)` for `k = 0..=max_order`. Analytic for
    /// Pöschl-Teller, repeated 5-point differences otherwise.
    pub fn derivative_samples(&self, grid: &Grid, max_order: usize) -> Result<Vec<Vec<f64>>> {
        match self {
            Self::PoschlTeller => {
                let polys = poschl_teller_derivative_polys(max_order);
                Ok(polys
                    .iter()
                    .map(|p| {
                        (0..grid.len())
                            .map(|i| eval_poly(p, grid.x(i).tanh()))
                            .collect()
                    })
                    .collect())
            }
            _ => {
                let mut out = vec![self.sample(grid)?.into_values()];
                for k in 1..=max_order {
                    let next = first_difference(&out[k - 1], grid.spacing());
                    out.push(next);
                }
                Ok(out)
            }
        }
    }

    pub fn is_poschl_teller(&self) -> bool {
        matches!(self, Self::PoschlTeller)
    }
}

/// `V0 = -2 (1 - t²)` with `t = tanh x`; `d/dx P(t) = P'(t) (1 - t²)`.
fn poschl_teller_derivative_polys(max_order: usize) -> Vec<Vec<f64>> {
    let mut polys = vec![vec![-2.0, 0.0, 2.0]];
    for k in 1..=max_order {
        let p = &polys[k - 1];
        let dp: Vec<f64> = (1..p.len()).map(|j| j as f64 * p[j]).collect();
        // dp * (1 - t²)
        let mut q = vec![0.0; dp.len() + 2];
        for (j, c) in dp.iter().enumerate() {
            q[j] += c;
            q[j + 2] -= c;
        }
        polys.push(q);
    }
    polys
}

fn eval_poly(p: &[f64], t: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

/// Tabulated potential: strictly increasing abscissae with values.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPotential {
    xs: Vec<f64>,
    vs: Vec<f64>,
}

impl TabulatedPotential {
    pub fn new(xs: Vec<f64>, vs: Vec<f64>) -> Result<Self> {
        if xs.len() != vs.len() {
            return Err(SusyError::Table("x and v columns differ in length".into()));
        }
        if xs.len() < 2 {
            return Err(SusyError::Table("need at least two samples".into()));
        }
        if xs.iter().chain(&vs).any(|v| !v.is_finite()) {
            return Err(SusyError::Table("non-finite sample".into()));
        }
        if let Some(w) = xs.windows(2).find(|w| w[1] <= w[0]) {
            return Err(SusyError::Table(format!(
                "x must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self { xs, vs })
    }

    /// Reads CSV with header `x,v`.
    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "v" {
            return Err(SusyError::Table(format!(
                "expected header `x,v`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            let parse = |k: usize| -> Result<f64> {
                record[k].parse::<f64>().map_err(|e| {
                    SusyError::Table(format!("row {}: `{}`: {e}", line + 2, &record[k]))
                })
            };
            xs.push(parse(0)?);
            vs.push(parse(1)?);
        }
        Self::new(xs, vs)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_reader(std::fs::File::open(path)?)
    }

    /// Tabulates `f` at `n` evenly spaced points of `[a, b]`.
    pub fn from_fn(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let xs: Vec<f64> = (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect();
        let vs = xs.iter().map(|&x| f(x)).collect();
        Self::new(xs, vs)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn covers(&self, grid: &Grid) -> bool {
        let (a, b) = self.domain();
        let slack = 1e-12 * (b - a).abs().max(1.0);
        grid.x_min() >= a - slack && grid.x(grid.len() - 1) <= b + slack
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (a, b) = self.domain();
        let slack = 1e-12 * (b - a).abs().max(1.0);
        if !(x >= a - slack && x <= b + slack) {
            return Err(SusyError::Domain { x, min: a, max: b });
        }
        let x = x.clamp(a, b);
        let k = self
            .xs
            .partition_point(|&xi| xi <= x)
            .clamp(1, self.xs.len() - 1);
        let (x0, x1) = (self.xs[k - 1], self.xs[k]);
        let t = (x - x0) / (x1 - x0);
        Ok(self.vs[k - 1] + t * (self.vs[k] - self.vs[k - 1]))
    }
}
