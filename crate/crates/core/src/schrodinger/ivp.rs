//! Fixed-step RK4 for `y'' + (E - V) y = -source`.

use super::grid::{hermite, lagrange4, Grid, SampledFunction};
use super::potential::PotentialSpec;
use crate::error::{Result, SusyError};

const BLOW_UP: f64 = 1e300;

/// Integrates `y'' = (V - E) y - source` left to right from `(y0, dy0)` at
/// `x_min`. The returned function carries `y'` as its derivative.
pub fn integrate_ivp(
    spec: &PotentialSpec,
    energy: f64,
    grid: &Grid,
    y0: f64,
    dy0: f64,
    source: Option<&SampledFunction>,
) -> Result<SampledFunction> {
    if let Some(s) = source {
        if s.grid() != grid {
            return Err(SusyError::InvalidInput(
                "source must be sampled on the integration grid".into(),
            ));
        }
    }
    let n = grid.len();
    let h = grid.spacing();
    let v_nodes = (0..n)
        .map(|i| spec.eval(grid.x(i)))
        .collect::<Result<Vec<_>>>()?;
    let v_mid = (0..n - 1)
        .map(|i| spec.eval(grid.x(i) + 0.5 * h))
        .collect::<Result<Vec<_>>>()?;
    let (s_nodes, s_mid) = match source {
        Some(s) => (s.values().to_vec(), midpoints(s)),
        None => (vec![0.0; n], vec![0.0; n - 1]),
    };

    let rhs = |v: f64, s: f64, y: f64| (v - energy) * y - s;
    let mut ys = Vec::with_capacity(n);
    let mut dys = Vec::with_capacity(n);
    let (mut y, mut dy) = (y0, dy0);
    ys.push(y);
    dys.push(dy);
    for i in 0..n - 1 {
        let k1y = dy;
        let k1d = rhs(v_nodes[i], s_nodes[i], y);
        let k2y = dy + 0.5 * h * k1d;
        let k2d = rhs(v_mid[i], s_mid[i], y + 0.5 * h * k1y);
        let k3y = dy + 0.5 * h * k2d;
        let k3d = rhs(v_mid[i], s_mid[i], y + 0.5 * h * k2y);
        let k4y = dy + h * k3d;
        let k4d = rhs(v_nodes[i + 1], s_nodes[i + 1], y + h * k3y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        dy += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        if !(y.abs() <= BLOW_UP && dy.abs() <= BLOW_UP) {
            return Err(SusyError::BlowUp { x: grid.x(i + 1) });
        }
        ys.push(y);
        dys.push(dy);
    }
    SampledFunction::with_derivatives(*grid, ys, dys)
}

/// Source values at panel midpoints: cubic Hermite when derivatives are
/// stored, otherwise 4-point Lagrange.
fn midpoints(s: &SampledFunction) -> Vec<f64> {
    let n = s.len();
    let h = s.grid().spacing();
    let v = s.values();
    match s.derivatives() {
        Some(d) => (0..n - 1)
            .map(|i| hermite(v[i], v[i + 1], d[i] * h, d[i + 1] * h, 0.5))
            .collect(),
        None => (0..n - 1)
            .map(|i| {
                let start = i.saturating_sub(1).min(n - 4);
                lagrange4(&v[start..start + 4], (i - start) as f64 + 0.5)
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poschl_teller::{pt_psi, pt_psi_derivative, pt_u_with_derivative, PtParams};
    use crate::schrodinger::stencil::schrodinger_residual;

    fn free() -> PotentialSpec {
        PotentialSpec::Transformed(SampledFunction::constant(
            Grid::new(-1.0, 21.0, 101).unwrap(),
            0.0,
        ))
    }

    #[test]
    fn free_particle_is_sine() {
        let g = Grid::new(0.0, 10.0, 10001).unwrap();
        let y = integrate_ivp(&free(), 1.0, &g, 0.0, 1.0, None).unwrap();
        let err = (0..g.len())
            .map(|i| (y.values()[i] - g.x(i).sin()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "max error {err}");
    }

    #[test]
    fn refinement_order_is_at_least_three() {
        let err = |n: usize| {
            let g = Grid::new(0.0, 10.0, n).unwrap();
            let y = integrate_ivp(&free(), 1.0, &g, 0.0, 1.0, None).unwrap();
            (y.values()[n - 1] - 10.0_f64.sin()).abs()
        };
        let coarse = err(201);
        let fine = err(401);
        assert!(coarse / fine >= 8.0, "ratio {}", coarse / fine);
    }

    #[test]
    fn poschl_teller_bound_state() {
        let g = Grid::default_domain();
        let y = integrate_ivp(
            &PotentialSpec::PoschlTeller,
            -1.0,
            &g,
            pt_psi(g.x_min()),
            pt_psi_derivative(g.x_min()),
            None,
        )
        .unwrap();
        // Forward integration of the decaying solution is only stable while
        // it dominates; compare on the left half and around the peak.
        for i in (0..g.len() / 2 + 400).step_by(50) {
            assert!((y.values()[i] - pt_psi(g.x(i))).abs() < 1e-6);
        }
    }

    #[test]
    fn poschl_teller_seed_and_residual() {
        let g = Grid::default_domain();
        let p = PtParams::new(1.0).unwrap();
        let (u, du) = pt_u_with_derivative(0, &p, g.x_min()).unwrap();
        let y = integrate_ivp(&PotentialSpec::PoschlTeller, -1.0, &g, u, du, None).unwrap();
        for i in (0..g.len() / 2 + 400).step_by(50) {
            let exact = pt_u_with_derivative(0, &p, g.x(i)).unwrap().0;
            assert!((y.values()[i] - exact).abs() < 1e-6);
        }
        let v = PotentialSpec::PoschlTeller.sample(&g).unwrap();
        let r = schrodinger_residual(&y, v.values(), -1.0, None);
        assert!(r.passes(1e-6), "{r:?}");
    }

    #[test]
    fn inhomogeneous_source_with_and_without_derivatives() {
        // y'' + y = -1, y(0)=0, y'(0)=0  =>  y = cos x - 1
        let g = Grid::new(0.0, 5.0, 2001).unwrap();
        let s = SampledFunction::constant(g, 1.0);
        for src in [s.clone(), s.without_derivatives()] {
            let y = integrate_ivp(&free(), 1.0, &g, 0.0, 0.0, Some(&src)).unwrap();
            for i in 0..g.len() {
                assert!((y.values()[i] - (g.x(i).cos() - 1.0)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn blow_up_is_reported() {
        let g = Grid::new(0.0, 1000.0, 20001).unwrap();
        let spec = PotentialSpec::Transformed(SampledFunction::constant(g, 0.0));
        match integrate_ivp(&spec, -4.0, &g, 1.0, 2.0, None) {
            Err(SusyError::BlowUp { x }) => assert!(x > 300.0 && x < 400.0),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }
}
