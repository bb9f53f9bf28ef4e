//! Products `D(x) · [c + ∫_{x_min}^x q/D² dt]` that stay smooth where `D`
//! has simple zeros.
//!
//! Each zero `x_k` of `D` gives the integrand a double pole `A_k/(x - x_k)²`
//! with `A_k = q(x_k)/D'(x_k)²`. The pole is subtracted under a Gaussian
//! window `exp(-t²/w²)`, integrated analytically (an `erf` term), and only
//! the smooth remainder goes through the cumulative quadrature. Far from the
//! pole the window vanishes, so tiny brackets there are not swamped by the
//! tail of `A_k/t`. Samples
//! of the remainder at the few nodes closest to a pole are rebuilt by
//! polynomial interpolation from the neighbours, since the subtraction
//! cancels catastrophically there. The construction assumes the `1/(x - x_k)`
//! coefficient vanishes, which holds whenever the product is smooth.

use super::grid::{hermite, Grid, SampledFunction};
use super::quadrature::cumulative_integral;
use crate::error::{Result, SusyError};

/// Nodes `i0 - 1 ..= i0 + 2` around a pole in `(x_{i0}, x_{i0+1}]` are
/// rebuilt from `i0 - 4 ..= i0 - 2` and `i0 + 3 ..= i0 + 5`.
const BAD: [isize; 4] = [-1, 0, 1, 2];
const GOOD: [isize; 6] = [-4, -3, -2, 3, 4, 5];

#[derive(Debug, Clone)]
pub struct RegularizedProduct {
    /// `D · B` with its derivative.
    pub product: SampledFunction,
    /// `B = c + ∫ q/D²` at the nodes (unbounded next to a pole).
    pub bracket: Vec<f64>,
    /// Located zeros of `D`.
    pub poles: Vec<f64>,
}

/// Window width in grid units is at least this; in `x` at least `1`.
const WINDOW_STEPS: f64 = 20.0;

fn window(h: f64) -> f64 {
    (WINDOW_STEPS * h).max(1.0)
}

/// Windowed pole `exp(-t²/w²)/t²` and the two parts of its antiderivative:
/// the singular `-exp(-t²/w²)/t` and the smooth `-(√π/w) erf(t/w)`.
fn windowed(t: f64, w: f64) -> (f64, f64, f64) {
    let e = (-(t / w) * (t / w)).exp();
    let smooth = -std::f64::consts::PI.sqrt() / w * libm::erf(t / w);
    (e, -e / t, smooth)
}

struct Pole {
    x0: f64,
    /// Node at or just left of `x0`.
    i0: usize,
    strength: f64,
    slope: f64,
}

/// Lagrange interpolation through `(xs[k], ys[k])`.
fn lagrange(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut sum = 0.0;
    for (k, (&xk, &yk)) in xs.iter().zip(ys).enumerate() {
        let mut w = 1.0;
        for (m, &xm) in xs.iter().enumerate() {
            if m != k {
                w *= (x - xm) / (xk - xm);
            }
        }
        sum += w * yk;
    }
    sum
}

/// Six-point interpolant of `f` at fractional node position `s`.
fn local6(f: &[f64], s: f64) -> f64 {
    let n = f.len();
    let start = ((s.floor() as isize) - 2).clamp(0, n as isize - 6) as usize;
    let xs: Vec<f64> = (start..start + 6).map(|i| i as f64).collect();
    lagrange(&xs, &f[start..start + 6], s)
}

fn locate_poles(grid: &Grid, d: &[f64], dd: &[f64], q: &[f64]) -> Result<Vec<Pole>> {
    let n = d.len();
    let h = grid.spacing();
    let mut roots = Vec::new();
    let mut i = 0;
    while i + 1 < n {
        if d[i] == 0.0 {
            roots.push(i as f64);
        } else if d[i] * d[i + 1] < 0.0 {
            // bisection on the Hermite cubic, then Newton on 6-point fits
            let f = |t: f64| hermite(d[i], d[i + 1], dd[i] * h, dd[i + 1] * h, t);
            let (mut lo, mut hi) = (0.0, 1.0);
            let flo = f(lo);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if f(mid) * flo > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let mut s = i as f64 + 0.5 * (lo + hi);
            for _ in 0..3 {
                let slope = local6(dd, s) * h;
                if slope != 0.0 {
                    let next = s - local6(d, s) / slope;
                    if (next - i as f64) >= -0.5 && (next - i as f64) <= 1.5 {
                        s = next;
                    }
                }
            }
            roots.push(s);
        }
        i += 1;
    }
    if d[n - 1] == 0.0 {
        roots.push((n - 1) as f64);
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);

    let mut poles: Vec<Pole> = Vec::with_capacity(roots.len());
    for s in roots {
        let i0 = s.floor() as usize;
        let i0 = if i0 as f64 == s && i0 > 0 { i0 - 1 } else { i0 };
        let x0 = grid.x_min() + s * h;
        if i0 < 4 || i0 + 5 >= n {
            return Err(SusyError::Singularity {
                what: "divisor (zero too close to the grid edge)".into(),
                brackets: vec![(x0, x0)],
            });
        }
        if let Some(prev) = poles.last() {
            if i0 < prev.i0 + 10 {
                return Err(SusyError::Singularity {
                    what: "divisor (zeros closer than 10 grid steps)".into(),
                    brackets: vec![(prev.x0, x0)],
                });
            }
        }
        let slope = local6(dd, s);
        if slope == 0.0 {
            return Err(SusyError::Singularity {
                what: "divisor (double zero)".into(),
                brackets: vec![(x0, x0)],
            });
        }
        let strength = local6(q, s) / (slope * slope);
        poles.push(Pole {
            x0,
            i0,
            strength,
            slope,
        });
    }
    Ok(poles)
}

fn fill_gaps(values: &mut [f64], poles: &[Pole]) {
    for p in poles {
        let xs: Vec<f64> = GOOD.iter().map(|&o| o as f64).collect();
        let ys: Vec<f64> = GOOD
            .iter()
            .map(|&o| values[(p.i0 as isize + o) as usize])
            .collect();
        for &o in &BAD {
            values[(p.i0 as isize + o) as usize] = lagrange(&xs, &ys, o as f64);
        }
    }
}

/// `D · (constant + ∫_{x_min}^x q/D² dt)` where `D` carries derivatives.
/// `D(x_min)` must be nonzero.
pub fn regularized_product(
    d: &SampledFunction,
    q: &[f64],
    constant: f64,
) -> Result<RegularizedProduct> {
    let grid = *d.grid();
    let n = grid.len();
    if q.len() != n {
        return Err(SusyError::InvalidInput(
            "numerator and divisor lengths differ".into(),
        ));
    }
    let dv = d.values();
    let dd = d.derivative_or_fd();
    if dv[0] == 0.0 {
        return Err(SusyError::Singularity {
            what: "divisor at the anchor".into(),
            brackets: vec![(grid.x_min(), grid.x_min())],
        });
    }
    let poles = locate_poles(&grid, dv, &dd, q)?;

    let h = grid.spacing();
    let w = window(h);
    let mut rem: Vec<f64> = (0..n)
        .map(|i| {
            let x = grid.x(i);
            let mut r = if dv[i] == 0.0 {
                0.0
            } else {
                q[i] / (dv[i] * dv[i])
            };
            for p in &poles {
                let t = x - p.x0;
                if t != 0.0 {
                    r -= p.strength * windowed(t, w).0 / (t * t);
                }
            }
            r
        })
        .collect();
    fill_gaps(&mut rem, &poles);
    let rem_fn = SampledFunction::new(grid, rem.clone())?;
    let smooth = cumulative_integral(&rem_fn, constant);
    let at_min: Vec<(f64, f64)> = poles
        .iter()
        .map(|p| {
            let (_, g1, g2) = windowed(grid.x_min() - p.x0, w);
            (g1, g2)
        })
        .collect();

    let mut product = Vec::with_capacity(n);
    let mut deriv = Vec::with_capacity(n);
    let mut bracket = Vec::with_capacity(n);
    for i in 0..n {
        let x = grid.x(i);
        // analytic part first: far from every pole it cancels exactly
        let analytic: f64 = poles
            .iter()
            .zip(&at_min)
            .map(|(p, (g1, g2))| p.strength * ((windowed(x - p.x0, w).2 - g2) - g1))
            .sum();
        let bs = smooth.values()[i] + analytic;
        let mut p_val = dv[i] * bs;
        let mut p_der = dd[i] * bs + dv[i] * rem[i];
        let mut b = bs;
        for p in &poles {
            let t = x - p.x0;
            if t.abs() < 1e-12 * h {
                p_val -= p.strength * p.slope;
                b = f64::INFINITY;
            } else {
                let (e, g1, _) = windowed(t, w);
                p_val += p.strength * dv[i] * g1;
                p_der += p.strength * e * (dv[i] - dd[i] * t) / (t * t);
                b += p.strength * g1;
            }
        }
        product.push(p_val);
        deriv.push(p_der);
        bracket.push(b);
    }
    fill_gaps(&mut deriv, &poles);
    Ok(RegularizedProduct {
        product: SampledFunction::with_derivatives(grid, product, deriv)?,
        bracket,
        poles: poles.iter().map(|p| p.x0).collect(),
    })
}

/// As [`regularized_product`], with the bracket taking the value `constant`
/// at node `anchor` instead of at `x_min`. Each side is integrated outward
/// from the anchor, so neither inherits the roundoff of the other.
pub fn regularized_product_at(
    d: &SampledFunction,
    q: &[f64],
    constant: f64,
    anchor: usize,
) -> Result<RegularizedProduct> {
    let grid = *d.grid();
    let n = grid.len();
    if anchor >= n {
        return Err(SusyError::InvalidInput(format!(
            "anchor node {anchor} outside a grid of {n} points"
        )));
    }
    if anchor == 0 {
        return regularized_product(d, q, constant);
    }
    if q.len() != n {
        return Err(SusyError::InvalidInput(
            "numerator and divisor lengths differ".into(),
        ));
    }
    let dv = d.values();
    let dd = d.derivative_or_fd();
    // left part: reflect x -> -x so that the anchor becomes the left end
    let left = if anchor + 1 >= super::grid::MIN_POINTS {
        let g = Grid::new(-grid.x(anchor), -grid.x_min(), anchor + 1)?;
        let rv: Vec<f64> = dv[..=anchor].iter().rev().copied().collect();
        let rd: Vec<f64> = dd[..=anchor].iter().rev().map(|x| -x).collect();
        let rq: Vec<f64> = q[..=anchor].iter().rev().copied().collect();
        Some(regularized_product(
            &SampledFunction::with_derivatives(g, rv, rd)?,
            &rq,
            -constant,
        )?)
    } else {
        None
    };
    let right = if n - anchor >= super::grid::MIN_POINTS {
        let g = Grid::new(grid.x(anchor), grid.x_max(), n - anchor)?;
        Some(regularized_product(
            &SampledFunction::with_derivatives(g, dv[anchor..].to_vec(), dd[anchor..].to_vec())?,
            &q[anchor..],
            constant,
        )?)
    } else {
        None
    };
    let (Some(left), Some(right)) = (left, right) else {
        return Err(SusyError::InvalidInput(format!(
            "anchor node {anchor} leaves fewer than {} points on one side",
            super::grid::MIN_POINTS
        )));
    };
    let lv = left.product.values();
    let ld = left
        .product
        .derivatives()
        .expect("product carries derivatives");
    let mut product: Vec<f64> = lv.iter().rev().map(|x| -x).collect();
    let mut deriv: Vec<f64> = ld.iter().rev().copied().collect();
    let mut bracket: Vec<f64> = left.bracket.iter().rev().map(|x| -x).collect();
    let mut poles: Vec<f64> = left.poles.iter().rev().map(|x| -x).collect();
    product.pop();
    deriv.pop();
    bracket.pop();
    product.extend_from_slice(right.product.values());
    deriv.extend_from_slice(
        right
            .product
            .derivatives()
            .expect("product carries derivatives"),
    );
    bracket.extend_from_slice(&right.bracket);
    poles.extend_from_slice(&right.poles);
    Ok(RegularizedProduct {
        product: SampledFunction::with_derivatives(grid, product, deriv)?,
        bracket,
        poles,
    })
}
