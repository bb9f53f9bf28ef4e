//! Cumulative and definite quadrature on uniform grids.

use super::grid::SampledFunction;

/// Indefinite integral anchored at the left end: `F(x_min) = constant`,
/// `F(x_i) = constant + ∫_{x_min}^{x_i} f`.
///
/// Each panel `[x_i, x_{i+1}]` is integrated exactly for the cubic through
/// the four surrounding samples (one-sided windows on the end panels), so the
/// accumulated error is a smooth O(h⁴) function of `x` with no odd/even
/// alternation. The returned function carries `f` as its derivative.
pub fn cumulative_integral(f: &SampledFunction, constant: f64) -> SampledFunction {
    let grid = *f.grid();
    let v = f.values();
    let n = v.len();
    let h = grid.spacing();
    let mut out = Vec::with_capacity(n);
    let mut acc = constant;
    out.push(acc);
    for i in 0..n - 1 {
        let panel = if i == 0 {
            9.0 * v[0] + 19.0 * v[1] - 5.0 * v[2] + v[3]
        } else if i == n - 2 {
            v[n - 4] - 5.0 * v[n - 3] + 19.0 * v[n - 2] + 9.0 * v[n - 1]
        } else {
            -v[i - 1] + 13.0 * v[i] + 13.0 * v[i + 1] - v[i + 2]
        };
        acc += panel * h / 24.0;
        out.push(acc);
    }
    SampledFunction::with_derivatives(grid, out, v.to_vec())
        .expect("cumulative integral of finite data is finite")
}

/// Composite Simpson rule over the whole grid. With an odd panel count the
/// last three panels use Simpson's 3/8 rule.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    assert!(n >= 4, "simpson needs at least 4 samples");
    let panels = n - 1;
    let simpson_end = if panels.is_multiple_of(2) {
        n - 1
    } else {
        n - 4
    };
    let mut sum = 0.0;
    let mut i = 0;
    while i + 2 <= simpson_end {
        sum += values[i] + 4.0 * values[i + 1] + values[i + 2];
        i += 2;
    }
    let mut total = sum * h / 3.0;
    if panels % 2 == 1 {
        let k = n - 4;
        total +=
            3.0 * h / 8.0 * (values[k] + 3.0 * values[k + 1] + 3.0 * values[k + 2] + values[k + 3]);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schrodinger::grid::Grid;
    use crate::schrodinger::stencil::first_difference;
    use std::f64::consts::PI;

    #[test]
    fn zero_integrand_gives_constant() {
        let g = Grid::new(0.0, 1.0, 11).unwrap();
        let f = SampledFunction::new(g, vec![0.0; 11]).unwrap();
        let big_f = cumulative_integral(&f, 2.5);
        assert!(big_f.values().iter().all(|&v| v == 2.5));
    }

    #[test]
    fn cosine_antiderivative() {
        let g = Grid::new(0.0, PI, 1001).unwrap();
        let f = SampledFunction::from_fn(g, f64::cos).unwrap();
        let big_f = cumulative_integral(&f, 0.0);
        assert!(big_f.values().last().unwrap().abs() < 1e-8);
        for i in 0..g.len() {
            assert!((big_f.values()[i] - g.x(i).sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn cubic_is_exact() {
        let g = Grid::new(-1.0, 1.5, 12).unwrap();
        let f = SampledFunction::from_fn(g, |x| 3.0 * x * x - 2.0 * x + 1.0).unwrap();
        let big_f = cumulative_integral(&f, 0.0);
        for i in 0..g.len() {
            let x = g.x(i);
            let exact = (x.powi(3) - x * x + x) - (-1.0 - 1.0 - 1.0);
            assert!((big_f.values()[i] - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn differentiating_recovers_integrand() {
        let g = Grid::new(-2.0, 2.0, 401).unwrap();
        let f = SampledFunction::from_fn(g, |x| (-x * x).exp() * (3.0 * x).cos()).unwrap();
        let big_f = cumulative_integral(&f, 0.3);
        let back = first_difference(big_f.values(), g.spacing());
        let h2 = g.spacing().powi(2);
        for i in 2..g.len() - 2 {
            assert!((back[i] - f.values()[i]).abs() < 10.0 * h2);
        }
    }

    #[test]
    fn simpson_even_and_odd_panels() {
        for n in [101, 100] {
            let g = Grid::new(0.0, PI, n).unwrap();
            let v: Vec<f64> = g.abscissae().iter().map(|x| x.sin()).collect();
            assert!((simpson(&v, g.spacing()) - 2.0).abs() < 1e-7, "n = {n}");
        }
    }
}
