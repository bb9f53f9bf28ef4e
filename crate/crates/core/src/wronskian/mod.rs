//! Transformation Wronskians three ways: direct determinant, level-by-level
//! recursion, and the product of the ladder ratios `χ_j = W_j / W_{j-1}`.

mod determinant;
mod tower;

pub use determinant::{direct_wronskian, wronskian_with_solution};
pub use tower::{
    anchor_constants, build_tower, build_tower_asymptotic, build_tower_from_seed,
    match_chain_to_tower, recursive_wronskian, second_solution, ConstantConvention, TowerLevel,
    WronskianTower,
};

use crate::error::{Result, SusyError};
use crate::schrodinger::{first_difference, Residual, SampledFunction};

/// Points with `|reference| < NEAR_ZERO_GUARD · max|reference|` are left out
/// of relative comparisons.
pub const NEAR_ZERO_GUARD: f64 = 1e-8;

/// Largest pointwise `|a - b| / |b|` over points where `b` is not near zero.
pub fn max_relative_difference(a: &[f64], b: &[f64]) -> f64 {
    let m = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    a.iter()
        .zip(b)
        .filter(|(_, e)| e.abs() > NEAR_ZERO_GUARD * m)
        .map(|(v, e)| (v - e).abs() / e.abs())
        .fold(0.0, f64::max)
}

/// Ratio `n / d` with derivative, for functions carrying derivatives.
pub(crate) fn quotient(
    n: &SampledFunction,
    d: &SampledFunction,
    what: &str,
) -> Result<SampledFunction> {
    let (nv, dv) = (n.values(), d.values());
    if let Some(i) = dv.iter().position(|v| *v == 0.0) {
        let x = d.grid().x(i);
        return Err(SusyError::Singularity {
            what: format!("{what} (zero divisor)"),
            brackets: vec![(x, x)],
        });
    }
    let (nd, dd) = (n.derivative_or_fd(), d.derivative_or_fd());
    let values = nv.iter().zip(dv).map(|(a, b)| a / b).collect();
    let derivs = (0..nv.len())
        .map(|i| (nd[i] * dv[i] - nv[i] * dd[i]) / (dv[i] * dv[i]))
        .collect();
    SampledFunction::with_derivatives(*n.grid(), values, derivs)
}

/// `χ_0 = u_0`, `χ_j = W_j / W_{j-1}`.
#[derive(Debug, Clone)]
pub struct ChiLadder {
    chis: Vec<SampledFunction>,
}

impl ChiLadder {
    pub fn new(tower: &WronskianTower) -> Result<Self> {
        let levels = tower.levels();
        let mut chis = vec![levels[0].clone()];
        for j in 1..levels.len() {
            chis.push(quotient(&levels[j], &levels[j - 1], &format!("χ_{j}"))?);
        }
        Ok(Self { chis })
    }

    pub fn chis(&self) -> &[SampledFunction] {
        &self.chis
    }

    pub fn chi(&self, j: usize) -> Option<&SampledFunction> {
        self.chis.get(j)
    }

    pub fn depth(&self) -> usize {
        self.chis.len() - 1
    }
}

/// `∏_{j=0}^{n} χ_j`.
pub fn factorized_wronskian(ladder: &ChiLadder, upto: usize) -> Result<SampledFunction> {
    if upto > ladder.depth() {
        return Err(SusyError::InvalidInput(format!(
            "ladder of depth {} has no χ_{upto}",
            ladder.depth()
        )));
    }
    let first = &ladder.chis[0];
    let mut values = first.values().to_vec();
    for chi in &ladder.chis[1..=upto] {
        for (v, c) in values.iter_mut().zip(chi.values()) {
            *v *= c;
        }
    }
    SampledFunction::new(*first.grid(), values)
}

/// Checks `d/dx (χ_j ξ' - χ_j' ξ) = -χ_j²` by central differences over the
/// interior. The relative figure is taken against `1 + max χ_j²`.
pub fn wronskian_derivative_check(
    ladder: &ChiLadder,
    level: usize,
    xi: &SampledFunction,
) -> Result<Residual> {
    let chi = ladder
        .chi(level)
        .ok_or_else(|| SusyError::InvalidInput(format!("ladder has no χ_{level}")))?;
    if xi.grid() != chi.grid() {
        return Err(SusyError::InvalidInput(
            "ξ is sampled on a different grid".into(),
        ));
    }
    let (c, dc) = (chi.values(), chi.derivative_or_fd());
    let (x, dx) = (xi.values(), xi.derivative_or_fd());
    let w: Vec<f64> = (0..c.len()).map(|i| c[i] * dx[i] - dc[i] * x[i]).collect();
    let dw = first_difference(&w, chi.grid().spacing());
    let n = c.len();
    let mut absolute = 0.0_f64;
    let mut scale = 0.0_f64;
    for i in 2..n - 2 {
        absolute = absolute.max((dw[i] + c[i] * c[i]).abs());
        scale = scale.max(c[i] * c[i]);
    }
    Ok(Residual {
        absolute,
        relative: absolute / (1.0 + scale),
    })
}
