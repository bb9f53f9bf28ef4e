//! Closed forms for confluent transformations of the Pöschl-Teller well
//! `V0 = -2 sech²x`, used as ground truth for the numerical paths.
//!
//! Transformation functions follow the Jordan-chain convention
//! `u_j'' + (λ - V0) u_j = -u_{j-1}` with `λ = -κ²`. Wronskians and
//! eigenfunctions are evaluated as `sign · exp(ln|·|)` so that the
//! `exp(mκx)` factors never overflow on their own.

use crate::error::{Result, SusyError};
use crate::jordan_chain::{ChainSeed, ChainSpec, InnerConstants, JordanChain};
use crate::schrodinger::{Grid, PotentialSpec, SampledFunction};

const LN_2: f64 = std::f64::consts::LN_2;

/// κ plus the integration constants of the fourth- and fifth-order
/// Wronskians (`C_a`, `C_b`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtParams {
    pub kappa: f64,
    pub c_a: f64,
    pub c_b: f64,
}

impl PtParams {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(SusyError::InvalidInput(format!(
                "kappa must be positive, got {kappa}"
            )));
        }
        Ok(Self {
            kappa,
            c_a: 0.0,
            c_b: 0.0,
        })
    }

    pub fn from_lambda(lambda: f64) -> Result<Self> {
        if !(lambda < 0.0) {
            return Err(SusyError::InvalidInput(format!(
                "Pöschl-Teller seed needs lambda < 0, got {lambda}"
            )));
        }
        Self::new((-lambda).sqrt())
    }

    pub fn with_c_a(mut self, c_a: f64) -> Self {
        self.c_a = c_a;
        self
    }

    pub fn with_c_b(mut self, c_b: f64) -> Self {
        self.c_b = c_b;
        self
    }

    pub fn lambda(&self) -> f64 {
        -self.kappa * self.kappa
    }
}

/// A real number stored as `sign · exp(ln_abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub sign: f64,
    pub ln_abs: f64,
}

impl LogValue {
    pub fn from_f64(v: f64) -> Self {
        Self {
            sign: if v > 0.0 {
                1.0
            } else if v < 0.0 {
                -1.0
            } else {
                0.0
            },
            ln_abs: v.abs().ln(),
        }
    }

    pub fn exp_of(ln: f64) -> Self {
        Self {
            sign: 1.0,
            ln_abs: ln,
        }
    }

    /// `a + b·exp(s)` without forming `exp(s)` on its own.
    pub fn affine_exp(a: f64, b: f64, s: f64) -> Self {
        Self::from_f64(a) + Self::from_f64(b) * Self::exp_of(s)
    }

    pub fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }
}

impl std::ops::Add for LogValue {
    type Output = Self;
    /// Sum of two values in log space.
    fn add(self, other: Self) -> Self {
        if self.sign == 0.0 {
            return other;
        }
        if other.sign == 0.0 {
            return self;
        }
        let m = self.ln_abs.max(other.ln_abs);
        let s = self.sign * (self.ln_abs - m).exp() + other.sign * (other.ln_abs - m).exp();
        let mut v = Self::from_f64(s);
        v.ln_abs += m;
        v
    }
}

impl std::ops::Mul for LogValue {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self {
            sign: self.sign * rhs.sign,
            ln_abs: self.ln_abs + rhs.ln_abs,
        }
    }
}

impl std::ops::Div for LogValue {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self {
            sign: self.sign * rhs.sign,
            ln_abs: self.ln_abs - rhs.ln_abs,
        }
    }
}

/// `a + b·tanh(x)` in log space, exact when `a = ±b` and `|x|` is large.
fn lin_tanh(a: f64, b: f64, x: f64) -> LogValue {
    // 1 ∓ tanh|x| = 2 e^{-2|x|} / (1 + e^{-2|x|})
    let ax = x.abs();
    let tail = LogValue::exp_of(LN_2 - 2.0 * ax - (-2.0 * ax).exp().ln_1p());
    if x >= 0.0 {
        LogValue::from_f64(a + b) + LogValue::from_f64(-b) * tail
    } else {
        LogValue::from_f64(a - b) + LogValue::from_f64(b) * tail
    }
}

fn konst(v: f64) -> LogValue {
    LogValue::from_f64(v)
}

fn ln_sech(x: f64) -> f64 {
    let ax = x.abs();
    LN_2 - ax - (-2.0 * ax).exp().ln_1p()
}

pub fn pt_v0(x: f64) -> f64 {
    let s = 1.0 / x.cosh();
    -2.0 * s * s
}

/// Normalized bound state at `E = -1`.
pub fn pt_psi(x: f64) -> f64 {
    (ln_sech(x) - 0.5 * LN_2).exp()
}

pub fn pt_psi_derivative(x: f64) -> f64 {
    -pt_psi(x) * x.tanh()
}

/// `scale · exp(κx) · (P(x) + Q(x) tanh x)` with polynomial `P`, `Q`.
#[derive(Debug, Clone)]
struct ExpTanhPoly {
    kappa: f64,
    scale: f64,
    p: Vec<f64>,
    q: Vec<f64>,
}

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * x + v)
}

/// `p + q·tanh x` written as `(p ± q) ∓ q (1 ∓ tanh|x|)` so that exact
/// cancellation between `p` and `∓q` leaves the small tail intact.
fn poly_tanh(p: &[f64], q: &[f64], x: f64) -> f64 {
    let ax = x.abs();
    let e = (-2.0 * ax).exp();
    let tail = 2.0 * e / (1.0 + e);
    let sign = if x >= 0.0 { 1.0 } else { -1.0 };
    let len = p.len().max(q.len());
    let merged: Vec<f64> = (0..len)
        .map(|k| p.get(k).copied().unwrap_or(0.0) + sign * q.get(k).copied().unwrap_or(0.0))
        .collect();
    poly(&merged, x) - sign * poly(q, x) * tail
}

fn derivative_coefficients(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, v)| k as f64 * v)
        .collect()
}

impl ExpTanhPoly {
    fn eval(&self, x: f64) -> (f64, f64) {
        let ax = x.abs();
        let e2 = (-2.0 * ax).exp();
        let sech2 = 4.0 * e2 / ((1.0 + e2) * (1.0 + e2));
        let value_poly = poly_tanh(&self.p, &self.q, x);
        // κ(p + q t) + p' + q' t + q sech² with the first three terms merged
        let kp: Vec<f64> = self.p.iter().map(|c| self.kappa * c).collect();
        let kq: Vec<f64> = self.q.iter().map(|c| self.kappa * c).collect();
        let dp = derivative_coefficients(&self.p);
        let dq = derivative_coefficients(&self.q);
        let add = |a: &[f64], b: &[f64]| -> Vec<f64> {
            (0..a.len().max(b.len()))
                .map(|k| a.get(k).copied().unwrap_or(0.0) + b.get(k).copied().unwrap_or(0.0))
                .collect()
        };
        let deriv_poly = poly_tanh(&add(&kp, &dp), &add(&kq, &dq), x) + poly(&self.q, x) * sech2;
        let e = self.scale * (self.kappa * x).exp();
        (e * value_poly, e * deriv_poly)
    }
}

/// Transformation function `u_j`, `j ≤ 3`, in Jordan-chain sign convention.
fn chain_function(j: usize, kappa: f64) -> Result<ExpTanhPoly> {
    let k = kappa;
    let (scale, p, q) = match j {
        0 => ((2.0 * k).sqrt(), vec![-k], vec![1.0]),
        1 => (
            1.0 / (2.0 * k.powi(3)).sqrt(),
            vec![0.0, k * k],
            vec![1.0, -k],
        ),
        2 => (
            1.0 / (4.0 * (2.0 * k.powi(7)).sqrt()),
            vec![0.0, k * k, -k.powi(3)],
            vec![3.0, -3.0 * k, k * k],
        ),
        3 => (
            -1.0 / (24.0 * (2.0 * k.powi(11)).sqrt()),
            vec![0.0, -3.0 * k * k, 3.0 * k.powi(3), -k.powi(4)],
            vec![-15.0, 15.0 * k, -6.0 * k * k, k.powi(3)],
        ),
        _ => {
            return Err(SusyError::Unsupported(format!(
                "closed-form transformation function u_{j} (only j ≤ 3)"
            )))
        }
    };
    Ok(ExpTanhPoly {
        kappa: k,
        scale,
        p,
        q,
    })
}

pub fn pt_u(j: usize, params: &PtParams, x: f64) -> Result<f64> {
    Ok(chain_function(j, params.kappa)?.eval(x).0)
}

/// `(u_j(x), u_j'(x))`.
pub fn pt_u_with_derivative(j: usize, params: &PtParams, x: f64) -> Result<(f64, f64)> {
    Ok(chain_function(j, params.kappa)?.eval(x))
}

/// `u_0` as a function of both `x` and `λ < 0`.
pub fn pt_u0_of_lambda(lambda: f64, x: f64) -> Result<f64> {
    pt_u(0, &PtParams::from_lambda(lambda)?, x)
}

/// `W_{u0,u1} = -exp(2κx) (1 + κ² - 2κ tanh x)`.
pub fn ln_pt_w2(params: &PtParams, x: f64) -> LogValue {
    let k = params.kappa;
    konst(-1.0) * LogValue::exp_of(2.0 * k * x) * lin_tanh(1.0 + k * k, -2.0 * k, x)
}

pub fn pt_w2(params: &PtParams, x: f64) -> f64 {
    ln_pt_w2(params, x).value()
}

/// `W_{u0,u1,u2} = exp(3κx) [κ(κ²+3) - (3κ²+1) tanh x] / (2 sqrt(2κ³))`.
pub fn ln_pt_w3(params: &PtParams, x: f64) -> LogValue {
    let k = params.kappa;
    LogValue::exp_of(3.0 * k * x - (2.0 * (2.0 * k.powi(3)).sqrt()).ln())
        * lin_tanh(k * (k * k + 3.0), -(3.0 * k * k + 1.0), x)
}

pub fn pt_w3(params: &PtParams, x: f64) -> f64 {
    ln_pt_w3(params, x).value()
}

/// `exp(-2κx) ∫_{-∞}^x (W_{u0,u1,u2}/W_{u0,u1})² dt`
/// `= [(κ⁴+6κ²+1) - 4(κ³+κ) tanh] / (16κ⁴ [(κ²+1) - 2κ tanh])`.
fn bracket4_ratio(k: f64, x: f64) -> LogValue {
    lin_tanh(k.powi(4) + 6.0 * k * k + 1.0, -4.0 * (k.powi(3) + k), x)
        / (konst(16.0 * k.powi(4)) * lin_tanh(k * k + 1.0, -2.0 * k, x))
}

/// `exp(-2κx) ∫_{-∞}^x (W_{u0..u3}/W_{u0,u1,u2})² dt`.
fn bracket5_ratio(k: f64, x: f64) -> LogValue {
    lin_tanh(
        k * (k.powi(4) + 10.0 * k * k + 5.0),
        -(5.0 * k.powi(4) + 10.0 * k * k + 1.0),
        x,
    ) / (konst(64.0 * k.powi(6)) * lin_tanh(k * (k * k + 3.0), -(3.0 * k * k + 1.0), x))
}

/// `C_a + ∫_{-∞}^x (W_{u0,u1,u2}/W_{u0,u1})² dt`.
pub fn ln_pt_bracket4(params: &PtParams, x: f64) -> LogValue {
    let k = params.kappa;
    konst(params.c_a) + bracket4_ratio(k, x) * LogValue::exp_of(2.0 * k * x)
}

pub fn pt_bracket4(params: &PtParams, x: f64) -> f64 {
    ln_pt_bracket4(params, x).value()
}

/// `C_b + ∫_{-∞}^x (W_{u0..u3}/W_{u0,u1,u2})² dt`.
pub fn ln_pt_bracket5(params: &PtParams, x: f64) -> LogValue {
    let k = params.kappa;
    konst(params.c_b) + bracket5_ratio(k, x) * LogValue::exp_of(2.0 * k * x)
}

pub fn pt_bracket5(params: &PtParams, x: f64) -> f64 {
    ln_pt_bracket5(params, x).value()
}

/// Fourth-order Wronskian `W_{u0..u3}` with integration constant `C_a`.
pub fn ln_pt_w4(params: &PtParams, x: f64) -> LogValue {
    let k = params.kappa;
    LogValue::exp_of(2.0 * k * x) * lin_tanh(1.0 + k * k, -2.0 * k, x) * ln_pt_bracket4(params, x)
}

pub fn pt_w4(params: &PtParams, x: f64) -> f64 {
    ln_pt_w4(params, x).value()
}

/// Direct Wronskian of the closed-form `u0..u3` (the `C_a = 0` member).
pub fn ln_pt_w4_ca0(params: &PtParams, x: f64) -> LogValue {
    let k = params.kappa;
    LogValue::exp_of(4.0 * k * x - (16.0 * k.powi(4)).ln())
        * lin_tanh(1.0 + 6.0 * k * k + k.powi(4), -4.0 * (k + k.powi(3)), x)
}

pub fn pt_w4_ca0(params: &PtParams, x: f64) -> f64 {
    ln_pt_w4_ca0(params, x).value()
}

/// Fifth-order Wronskian `W_{u0..u4}` with integration constant `C_b`
/// (built on the `C_a = 0` fourth-order Wronskian).
pub fn ln_pt_w5(params: &PtParams, x: f64) -> LogValue {
    let k = params.kappa;
    LogValue::exp_of(3.0 * k * x - (2.0 * (2.0 * k.powi(3)).sqrt()).ln())
        * lin_tanh(-k * (k * k + 3.0), 3.0 * k * k + 1.0, x)
        * ln_pt_bracket5(params, x)
}

pub fn pt_w5(params: &PtParams, x: f64) -> f64 {
    ln_pt_w5(params, x).value()
}

/// Bound state of `V4` at `E = -1` (vanishes identically for κ = 1).
pub fn ln_pt_phi4(params: &PtParams, x: f64) -> LogValue {
    let k = params.kappa;
    let k2m1 = k * k - 1.0;
    let a = 16.0 * params.c_a * k.powi(4);
    let e2 = LogValue::exp_of(2.0 * k * x);
    let num = konst(k2m1 * k2m1) * LogValue::exp_of(ln_sech(x)) * (konst(a) + konst(-k2m1) * e2);
    let den_a = konst(a) * lin_tanh(k * k + 1.0, -2.0 * k, x);
    let den_b = lin_tanh(k.powi(4) + 6.0 * k * k + 1.0, -4.0 * (k.powi(3) + k), x);
    let den = LogValue::exp_of(0.5 * LN_2) * (den_a + den_b * e2);
    num / den
}

pub fn pt_phi4(params: &PtParams, x: f64) -> f64 {
    ln_pt_phi4(params, x).value()
}

/// Bound state of `V4` at `λ = -κ²`: `W_{u0,u1,u2} / W_{u0..u3}`.
pub fn ln_pt_chi4perp(params: &PtParams, x: f64) -> LogValue {
    let k = params.kappa;
    let num = LogValue::exp_of(k * x) * lin_tanh(k * (k * k + 3.0), -(3.0 * k * k + 1.0), x);
    let den = konst(2.0 * (2.0 * k.powi(3)).sqrt())
        * lin_tanh(k * k + 1.0, -2.0 * k, x)
        * ln_pt_bracket4(params, x);
    num / den
}

pub fn pt_chi4perp(params: &PtParams, x: f64) -> f64 {
    ln_pt_chi4perp(params, x).value()
}

/// Bound state of `V5` at `λ = -κ²`: `W_{u0..u3} / W_{u0..u4}`.
pub fn ln_pt_chi5perp(params: &PtParams, x: f64) -> LogValue {
    let k = params.kappa;
    let num = konst(-8.0 * (2.0 * k.powi(7)).sqrt())
        * LogValue::exp_of(k * x)
        * lin_tanh(k.powi(4) + 6.0 * k * k + 1.0, -4.0 * k * (k * k + 1.0), x);
    let den_a =
        konst(64.0 * params.c_b * k.powi(6)) * lin_tanh(k * (k * k + 3.0), -(3.0 * k * k + 1.0), x);
    let den_b = lin_tanh(
        k.powi(5) + 10.0 * k.powi(3) + 5.0 * k,
        -(5.0 * k.powi(4) + 10.0 * k * k + 1.0),
        x,
    );
    num / (den_a + den_b * LogValue::exp_of(2.0 * k * x))
}

pub fn pt_chi5perp(params: &PtParams, x: f64) -> f64 {
    ln_pt_chi5perp(params, x).value()
}

/// Bound state of `V5` at `E = -1`.
pub fn ln_pt_phi5(params: &PtParams, x: f64) -> LogValue {
    let k = params.kappa;
    let k2m1 = k * k - 1.0;
    let b = 64.0 * params.c_b * k.powi(6);
    let e2 = LogValue::exp_of(2.0 * k * x);
    let num = konst(k2m1.powi(3)) * LogValue::exp_of(ln_sech(x)) * (konst(-b) + konst(k2m1) * e2);
    let den_a = konst(b) * lin_tanh(k.powi(3) + 3.0 * k, -(3.0 * k * k + 1.0), x);
    let den_b = lin_tanh(
        k.powi(5) + 10.0 * k.powi(3) + 5.0 * k,
        -(5.0 * k.powi(4) + 10.0 * k * k + 1.0),
        x,
    );
    let den = LogValue::exp_of(0.5 * LN_2) * (den_a + den_b * e2);
    num / den
}

pub fn pt_phi5(params: &PtParams, x: f64) -> f64 {
    ln_pt_phi5(params, x).value()
}

/// Bracket values at the anchor `x0` that make a recursive tower seeded by
/// the closed-form `u0` reproduce the closed-form Wronskians: levels 1 and 2
/// match `u1`, `u2`; level 3 carries `C_a`, level 4 carries `C_b`.
pub fn pt_anchor_constants(params: &PtParams, x0: f64, depth: usize) -> Result<Vec<f64>> {
    if depth > 4 {
        return Err(SusyError::Unsupported(format!(
            "closed-form tower depth {depth} (only ≤ 4)"
        )));
    }
    let u0 = pt_u(0, params, x0)?;
    let all = [
        -pt_w2(params, x0),
        -pt_w3(params, x0) / u0,
        pt_bracket4(params, x0),
        pt_bracket5(params, x0),
    ];
    Ok(all[..depth].to_vec())
}

/// Chain specification whose integral-representation constants reproduce
/// the closed-form `u_1..u_order` exactly (`order ≤ 3`).
pub fn pt_chain_spec(params: &PtParams, order: usize, x0: f64) -> Result<ChainSpec> {
    let (u0, du0) = pt_u_with_derivative(0, params, x0)?;
    let mut spec = ChainSpec::new(params.lambda(), ChainSeed::PoschlTeller);
    for j in 1..=order {
        let (y, dy) = pt_u_with_derivative(j, params, x0)?;
        spec = spec.with_level(InnerConstants::from_initial_data(u0, du0, y, dy));
    }
    Ok(spec)
}

/// Jordan chain sampled directly from the closed forms.
pub fn pt_chain(params: &PtParams, order: usize, grid: &Grid) -> Result<JordanChain> {
    let spec = pt_chain_spec(params, order, grid.x_min())?;
    let functions = (0..=order)
        .map(|j| {
            let f = chain_function(j, params.kappa)?;
            SampledFunction::from_fn_with_derivative(*grid, |x| f.eval(x))
        })
        .collect::<Result<Vec<_>>>()?;
    JordanChain::from_functions(spec, PotentialSpec::PoschlTeller, *grid, functions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schrodinger::{schrodinger_residual, simpson, DEFAULT_RESIDUAL_TOL};
    use approx::assert_relative_eq;
    use std::f64::consts::SQRT_2;

    type Oracle = fn(&PtParams, f64) -> f64;

    fn grid() -> Grid {
        Grid::default_domain()
    }

    #[test]
    fn base_values() {
        assert_eq!(pt_v0(0.0), -2.0);
        assert_relative_eq!(pt_psi(0.0), 1.0 / SQRT_2, epsilon = 1e-15);
        let g = grid();
        let v: Vec<f64> = g.abscissae().iter().map(|&x| pt_psi(x).powi(2)).collect();
        assert!((simpson(&v, g.spacing()) - 1.0).abs() < 1e-8);
        assert!((simpson(&v, g.spacing()) - 15.0_f64.tanh()).abs() < 1e-10);
    }

    #[test]
    fn chain_spot_values() {
        let p = PtParams::new(1.0).unwrap();
        assert_relative_eq!(pt_u(0, &p, 0.0).unwrap(), -SQRT_2, epsilon = 1e-15);
        assert_eq!(pt_u(1, &p, 0.0).unwrap(), 0.0);
        assert_eq!(pt_u(2, &p, 0.0).unwrap(), 0.0);
        assert!(pt_u(4, &p, 0.0).is_err());
    }

    #[test]
    fn wronskian_spot_values() {
        let p = PtParams::new(1.0).unwrap();
        assert_relative_eq!(pt_w4_ca0(&p, 0.0), 0.5, epsilon = 1e-15);
        // leading factor of W5 at x = 0, κ = 1 is -4
        let w5 = pt_w5(&p.with_c_b(1.0), 0.0);
        let expected = -4.0 / (2.0 * 2.0_f64.sqrt()) * pt_bracket5(&p.with_c_b(1.0), 0.0);
        assert_relative_eq!(w5, expected, max_relative = 1e-14);
    }

    #[test]
    fn w4_with_zero_constant_is_direct_wronskian() {
        for kappa in [0.5_f64.sqrt(), 1.0, 1.5_f64.sqrt(), 2.0] {
            let p = PtParams::new(kappa).unwrap();
            for x in grid().abscissae().iter().step_by(7) {
                assert_relative_eq!(pt_w4(&p, *x), pt_w4_ca0(&p, *x), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn regular_figure_parameters_have_no_zeros() {
        let g = grid();
        let p4 = PtParams::new(0.5_f64.sqrt()).unwrap().with_c_a(50.0);
        let p5 = PtParams::new(1.5_f64.sqrt()).unwrap().with_c_b(0.01);
        let s4 = pt_w4(&p4, g.x_min()).signum();
        let s5 = pt_w5(&p5, g.x_min()).signum();
        for x in g.abscissae() {
            assert_eq!(pt_w4(&p4, x).signum(), s4);
            assert_eq!(pt_w5(&p5, x).signum(), s5);
        }
    }

    #[test]
    fn constants_enter_affinely() {
        let p = PtParams::new(0.8).unwrap();
        for x in [-3.0, 0.2, 4.0] {
            let w = |c: f64| pt_w4(&p.with_c_a(c), x);
            assert_relative_eq!(w(1.0) - w(0.0), w(2.0) - w(1.0), max_relative = 1e-10);
            let w = |c: f64| pt_w5(&p.with_c_b(c), x);
            assert_relative_eq!(w(1.0) - w(0.0), w(2.0) - w(1.0), max_relative = 1e-10);
        }
    }

    #[test]
    fn log_space_survives_overflow() {
        let p = PtParams::new(1.0).unwrap();
        // exp(4x) overflows at x = 400; W = exp(4x)(1 - tanh x)/2 ≈ exp(2x).
        let w = ln_pt_w4_ca0(&p, 400.0);
        assert_eq!(w.sign, 1.0);
        assert_relative_eq!(w.ln_abs, 800.0, max_relative = 1e-14);
        assert!(pt_w4_ca0(&p, 400.0).is_infinite());
        let w = ln_pt_w4(&p.with_c_a(3.0), -400.0);
        // exp(2κx)(2 - 2 tanh)·C_a ≈ 4·3·exp(-800)
        assert_relative_eq!(w.ln_abs, -800.0 + 12.0_f64.ln(), max_relative = 1e-14);
        let phi = ln_pt_phi4(&PtParams::new(0.5).unwrap().with_c_a(2.0), 500.0);
        assert!(phi.ln_abs.is_finite() && phi.ln_abs < -400.0);
    }

    #[test]
    fn phi4_vanishes_for_unit_kappa() {
        let p = PtParams::new(1.0).unwrap().with_c_a(3.0);
        assert!(grid().abscissae().iter().all(|&x| pt_phi4(&p, x) == 0.0));
    }

    #[test]
    fn phi4_decays() {
        let p = PtParams::new(0.5_f64.sqrt()).unwrap().with_c_a(50.0);
        let g = grid();
        let max = g
            .abscissae()
            .iter()
            .map(|&x| pt_phi4(&p, x).abs())
            .fold(0.0, f64::max);
        assert!(pt_phi4(&p, 15.0).abs() < 1e-4 * max);
        assert!(pt_phi4(&p, -15.0).abs() < 1e-4 * max);
    }

    #[test]
    fn closed_form_chain_satisfies_jordan_equations() {
        let g = grid();
        let v = PotentialSpec::PoschlTeller.sample(&g).unwrap();
        for kappa in [0.5_f64.sqrt(), 1.0, 1.5_f64.sqrt()] {
            let p = PtParams::new(kappa).unwrap();
            let chain = pt_chain(&p, 3, &g).unwrap();
            for j in 0..=3 {
                let src = (j > 0).then(|| chain.functions()[j - 1].values());
                let r = schrodinger_residual(&chain.functions()[j], v.values(), p.lambda(), src);
                assert!(r.passes(1e-5), "kappa {kappa} level {j}: {r:?}");
                assert!(
                    r.passes(DEFAULT_RESIDUAL_TOL),
                    "kappa {kappa} level {j}: {r:?}"
                );
            }
        }
    }

    #[test]
    fn closed_form_derivatives_match_differences() {
        let p = PtParams::new(0.9).unwrap();
        let h = 1e-5;
        for j in 0..=3 {
            for x in [-2.0, 0.0, 1.3] {
                let (_, d) = pt_u_with_derivative(j, &p, x).unwrap();
                let fd = (pt_u(j, &p, x + h).unwrap() - pt_u(j, &p, x - h).unwrap()) / (2.0 * h);
                assert_relative_eq!(d, fd, max_relative = 1e-7, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn eigenfunctions_satisfy_transformed_equations() {
        // V_n from the closed-form Wronskian, differenced numerically.
        let g = grid();
        let cases: [(PtParams, usize); 2] = [
            (PtParams::new(0.5_f64.sqrt()).unwrap().with_c_a(50.0), 4),
            (PtParams::new(1.5_f64.sqrt()).unwrap().with_c_b(0.01), 5),
        ];
        for (p, order) in cases {
            let ln_w: Vec<f64> = g
                .abscissae()
                .iter()
                .map(|&x| {
                    if order == 4 {
                        ln_pt_w4(&p, x).ln_abs
                    } else {
                        ln_pt_w5(&p, x).ln_abs
                    }
                })
                .collect();
            let d2 = crate::schrodinger::second_difference(&ln_w, g.spacing());
            let vn: Vec<f64> = (0..g.len()).map(|i| pt_v0(g.x(i)) - 2.0 * d2[i]).collect();
            let (phi, chi): (Oracle, Oracle) = if order == 4 {
                (pt_phi4, pt_chi4perp)
            } else {
                (pt_phi5, pt_chi5perp)
            };
            let phi = SampledFunction::from_fn(g, |x| phi(&p, x)).unwrap();
            let chi = SampledFunction::from_fn(g, |x| chi(&p, x)).unwrap();
            let r = schrodinger_residual(&phi, &vn, -1.0, None);
            assert!(r.passes(1e-5), "order {order} phi {r:?}");
            let r = schrodinger_residual(&chi, &vn, p.lambda(), None);
            assert!(r.passes(1e-5), "order {order} chi {r:?}");
        }
    }

    #[test]
    fn anchor_constants_reproduce_asymptotic_constants_far_left() {
        let p = PtParams::new(0.8).unwrap().with_c_a(50.0).with_c_b(0.25);
        let c = pt_anchor_constants(&p, -15.0, 4).unwrap();
        assert!(c[0] > 0.0 && c[0] < 1e-9);
        assert!(c[1] > 0.0 && c[1] < 1e-9);
        assert_relative_eq!(c[2], 50.0, max_relative = 1e-9);
        assert_relative_eq!(c[3], 0.25, max_relative = 1e-9);
        assert!(pt_anchor_constants(&p, -15.0, 5).is_err());
    }
}
