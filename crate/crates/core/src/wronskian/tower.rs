//! The recursion `W_n = -W_{n-2} · [c_n + ∫ (W_{n-1}/W_{n-2})²]` with
//! `W_{-1} ≡ 1`, seeded by `u_0` alone.

use super::determinant::{direct_wronskian, wronskian_of_solutions};
use crate::error::{Result, SusyError};
use crate::jordan_chain::{InnerConstants, JordanChain};
use crate::schrodinger::{
    regularized_product, regularized_product_at, Grid, PotentialSpec, SampledFunction,
};

/// How a recursion constant is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstantConvention {
    /// Value of the bracket at `x_min`.
    #[default]
    Anchor,
    /// Bracket written as `C + ∫_{-∞}^x`; the missing tail below `x_min`
    /// is estimated from the local exponential rate of the integrand. When
    /// the integrand grows towards `x_min` that integral diverges, and the
    /// bracket takes the value `C` where the integrand is smallest instead.
    FromMinusInfinity,
}

/// Bookkeeping for one recursion level `k ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TowerLevel {
    /// Constant as supplied.
    pub constant: f64,
    /// Node at which the bracket is pinned.
    pub anchor_x: f64,
    /// Bracket value at `anchor_x`.
    pub anchor_value: f64,
    /// Tail estimate added under [`ConstantConvention::FromMinusInfinity`];
    /// `None` when the integrand does not decay towards `x_min`.
    pub tail: Option<f64>,
    /// Zeros of the divisor `W_{k-2}` that the level crosses.
    pub poles: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WronskianTower {
    grid: Grid,
    lambda: f64,
    potential: PotentialSpec,
    levels: Vec<SampledFunction>,
    brackets: Vec<Vec<f64>>,
    info: Vec<TowerLevel>,
    convention: ConstantConvention,
}

impl WronskianTower {
    /// Tower holding only `W_{u_0} = u_0`.
    pub fn seed(u0: SampledFunction, lambda: f64, potential: PotentialSpec) -> Result<Self> {
        if u0.derivatives().is_none() {
            return Err(SusyError::InvalidInput(
                "u_0 carries no derivative data".into(),
            ));
        }
        Ok(Self {
            grid: *u0.grid(),
            lambda,
            potential,
            levels: vec![u0],
            brackets: Vec::new(),
            info: Vec::new(),
            convention: ConstantConvention::Anchor,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    /// Highest level index.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[SampledFunction] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> Option<&SampledFunction> {
        self.levels.get(k)
    }

    /// Bracket `c_k + ∫ (W_{k-1}/W_{k-2})²` of level `k ≥ 1`.
    pub fn bracket(&self, k: usize) -> Option<&[f64]> {
        k.checked_sub(1)
            .and_then(|i| self.brackets.get(i))
            .map(Vec::as_slice)
    }

    /// Per-level constants, for levels `1..=depth`.
    pub fn level_info(&self) -> &[TowerLevel] {
        &self.info
    }

    /// Constants as supplied, for levels `1..=depth`.
    pub fn recursion_constants(&self) -> Vec<f64> {
        self.info.iter().map(|l| l.constant).collect()
    }

    pub fn convention(&self) -> ConstantConvention {
        self.convention
    }

    /// Truncated copy holding levels `0..=depth`.
    pub fn truncated(&self, depth: usize) -> Result<Self> {
        if depth > self.depth() {
            return Err(SusyError::InvalidInput(format!(
                "tower of depth {} cannot be truncated to {depth}",
                self.depth()
            )));
        }
        let mut t = self.clone();
        t.levels.truncate(depth + 1);
        t.brackets.truncate(depth);
        t.info.truncate(depth);
        Ok(t)
    }

    /// Appends the next level.
    pub fn extend(&self, constant: f64, convention: ConstantConvention) -> Result<Self> {
        let k = self.levels.len();
        let (level, bracket, info) = self.next_level(constant, convention)?;
        let mut t = self.clone();
        t.levels.push(level);
        t.brackets.push(bracket);
        t.info.push(info);
        if k == 1 {
            t.convention = convention;
        }
        Ok(t)
    }

    fn divisor(&self, k: usize) -> SampledFunction {
        if k >= 2 {
            self.levels[k - 2].clone()
        } else {
            SampledFunction::with_derivatives(
                self.grid,
                vec![1.0; self.grid.len()],
                vec![0.0; self.grid.len()],
            )
            .expect("constant divisor")
        }
    }

    fn next_level(
        &self,
        constant: f64,
        convention: ConstantConvention,
    ) -> Result<(SampledFunction, Vec<f64>, TowerLevel)> {
        let k = self.levels.len();
        let d = self.divisor(k);
        let top = &self.levels[k - 1];
        let q: Vec<f64> = top.values().iter().map(|v| v * v).collect();
        let (anchor, anchor_value, tail) = match convention {
            ConstantConvention::Anchor => (0, constant, None),
            ConstantConvention::FromMinusInfinity => match left_tail(top, &d) {
                Some(t) => (0, constant + t, Some(t)),
                None => (smallest_integrand(&q, d.values()), constant, None),
            },
        };
        let p = regularized_product_at(&d, &q, anchor_value, anchor).map_err(|e| match e {
            SusyError::Singularity { brackets, what } => SusyError::Singularity {
                what: format!("tower level {k}: {what}"),
                brackets,
            },
            other => other,
        })?;
        let level = p.product.scaled(-1.0);
        if level.values().iter().any(|v| !v.is_finite()) {
            return Err(SusyError::BlowUp {
                x: self.grid.x_min(),
            });
        }
        Ok((
            level,
            p.bracket,
            TowerLevel {
                constant,
                anchor_x: self.grid.x(anchor),
                anchor_value,
                tail,
                poles: p.poles,
            },
        ))
    }

    /// Whether the bracket of level `k` never decreases between consecutive
    /// nodes that are not separated by a pole. Quadrature roundoff up to
    /// `1e-12` of the local bracket size is tolerated.
    pub fn bracket_is_monotone(&self, k: usize) -> bool {
        let Some(b) = self.bracket(k) else {
            return false;
        };
        let poles = &self.info[k - 1].poles;
        let h = self.grid.spacing();
        let near_pole = |x: f64| poles.iter().any(|p| (x - p).abs() < 3.0 * h);
        b.windows(2).enumerate().all(|(i, w)| {
            let (x0, x1) = (self.grid.x(i), self.grid.x(i + 1));
            let crosses = poles.iter().any(|&p| x0 < p && p <= x1);
            if crosses || near_pole(x0) || near_pole(x1) || !w[0].is_finite() || !w[1].is_finite() {
                return true;
            }
            w[1] - w[0] >= -1e-12 * w[0].abs().max(w[1].abs()).max(1e-300)
        })
    }
}

/// `∫_{-∞}^{x_min} r²` for `r = W_{k-1}/W_{k-2}` assuming `r² ∝ e^{μx}`
/// below `x_min`.
fn left_tail(top: &SampledFunction, divisor: &SampledFunction) -> Option<f64> {
    let (n, dn) = (top.values()[0], top.derivative_or_fd()[0]);
    let (d, dd) = (divisor.values()[0], divisor.derivative_or_fd()[0]);
    let r = n / d;
    let dr = (dn * d - n * dd) / (d * d);
    if r == 0.0 {
        return Some(0.0);
    }
    let mu = 2.0 * dr / r;
    (mu > 0.0 && mu.is_finite()).then(|| r * r / mu)
}

/// Node minimising `q / D²`, kept away from the grid ends and from zeros
/// of `D`.
fn smallest_integrand(q: &[f64], d: &[f64]) -> usize {
    let n = q.len();
    let margin = 16.min(n / 4);
    let near_zero = |i: usize| {
        let lo = i.saturating_sub(8);
        let hi = (i + 8).min(n - 1);
        d[lo..=hi].windows(2).any(|w| w[0] * w[1] <= 0.0)
    };
    (margin..n - margin)
        .filter(|&i| !near_zero(i))
        .min_by(|&a, &b| (q[a] / (d[a] * d[a])).total_cmp(&(q[b] / (d[b] * d[b]))))
        .unwrap_or(0)
}

/// Tower of depth `constants.len()` seeded by `u_0`.
pub fn build_tower_from_seed(
    u0: SampledFunction,
    lambda: f64,
    potential: PotentialSpec,
    constants: &[f64],
    convention: ConstantConvention,
) -> Result<WronskianTower> {
    let mut t = WronskianTower::seed(u0, lambda, potential)?;
    t.convention = convention;
    for &c in constants {
        t = t.extend(c, convention)?;
    }
    Ok(t)
}

/// Tower from the chain's `u_0` with constants given as bracket values at
/// `x_min` (levels `1..=constants.len()`).
pub fn build_tower(chain: &JordanChain, constants: &[f64]) -> Result<WronskianTower> {
    build_tower_from_seed(
        chain.functions()[0].clone(),
        chain.lambda(),
        chain.potential().clone(),
        constants,
        ConstantConvention::Anchor,
    )
}

/// As [`build_tower`], with constants read as `C + ∫_{-∞}^x`.
pub fn build_tower_asymptotic(chain: &JordanChain, constants: &[f64]) -> Result<WronskianTower> {
    build_tower_from_seed(
        chain.functions()[0].clone(),
        chain.lambda(),
        chain.potential().clone(),
        constants,
        ConstantConvention::FromMinusInfinity,
    )
}

/// `W_{u_0..u_n}` from the tower through level `n - 1`.
pub fn recursive_wronskian(lower: &WronskianTower, constant: f64) -> Result<SampledFunction> {
    let t = lower.extend(constant, ConstantConvention::Anchor)?;
    Ok(t.levels.last().cloned().expect("non-empty tower"))
}

/// Anchor constants `c_1..c_depth` that make the tower reproduce the
/// chain's direct Wronskians: `c_k = -W_k(x_min) / W_{k-2}(x_min)`.
pub fn anchor_constants(chain: &JordanChain, depth: usize) -> Result<Vec<f64>> {
    if depth > chain.order() {
        return Err(SusyError::InvalidInput(format!(
            "matching {depth} levels needs a chain of order ≥ {depth}"
        )));
    }
    let w: Vec<f64> = (0..=depth)
        .map(|k| direct_wronskian(chain, k).map(|w| w.value_at_anchor()))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(depth);
    for k in 1..=depth {
        let below = if k >= 2 { w[k - 2] } else { 1.0 };
        if below == 0.0 {
            return Err(SusyError::Singularity {
                what: format!("W_{} at the anchor", k - 2),
                brackets: vec![(chain.grid().x_min(), chain.grid().x_min())],
            });
        }
        out.push(-w[k] / below);
    }
    Ok(out)
}

/// Second solution at `λ` with `|W_{u_0, v_0}| = 1`, anchored to vanish at
/// the grid end where `|u_0|` is larger, so that it decays there and carries
/// no large multiple of `u_0`.
pub fn second_solution(u0: &SampledFunction) -> Result<SampledFunction> {
    let n = u0.len();
    let ones = vec![1.0; n];
    let v = u0.values();
    if v[0].abs() >= v[n - 1].abs() {
        return Ok(regularized_product(u0, &ones, 0.0)?.product);
    }
    let g = u0.grid();
    let rg = Grid::new(-g.x_max(), -g.x_min(), n)?;
    let rv: Vec<f64> = v.iter().rev().copied().collect();
    let rd: Vec<f64> = u0.derivative_or_fd().iter().rev().map(|d| -d).collect();
    let r = regularized_product(&SampledFunction::with_derivatives(rg, rv, rd)?, &ones, 0.0)?;
    let values = r.product.values().iter().rev().copied().collect();
    let derivs = r
        .product
        .derivatives()
        .expect("product carries derivatives")
        .iter()
        .rev()
        .map(|d| -d)
        .collect();
    SampledFunction::with_derivatives(*g, values, derivs)
}

/// Shifts the chain's top function by a multiple of the second solution at
/// `λ` so that its direct Wronskian matches the tower at `x_min`. The
/// recorded inner constants of the top level are recomputed from its data
/// at `x_min`.
pub fn match_chain_to_tower(chain: &JordanChain, tower: &WronskianTower) -> Result<JordanChain> {
    let m = chain.order();
    if m == 0 {
        return Ok(chain.clone());
    }
    if tower.depth() < m {
        return Err(SusyError::InvalidInput(format!(
            "tower depth {} below chain order {m}",
            tower.depth()
        )));
    }
    let grid = chain.grid();
    let u = chain.functions();
    let v0 = second_solution(&u[0])?;
    let lam = chain.lambda();
    let mut cols: Vec<(&SampledFunction, f64, bool)> =
        u[..m].iter().map(|f| (f, lam, true)).collect();
    cols.push((&v0, lam, false));
    let wv = wronskian_of_solutions(grid, chain.potential(), &cols)?.value_at_anchor();
    if wv == 0.0 {
        return Err(SusyError::Singularity {
            what: "admixture Wronskian at the anchor".into(),
            brackets: vec![(grid.x_min(), grid.x_min())],
        });
    }
    let w = direct_wronskian(chain, m)?.value_at_anchor();
    let delta = (w - tower.levels[m].value_at_anchor()) / wv;
    let top = &u[m];
    let dv = v0.derivatives().expect("product carries derivatives");
    let values = top
        .values()
        .iter()
        .zip(v0.values())
        .map(|(a, b)| a - delta * b)
        .collect();
    let derivs = top
        .derivatives()
        .expect("chain carries derivatives")
        .iter()
        .zip(dv)
        .map(|(a, b)| a - delta * b)
        .collect();
    let top = SampledFunction::with_derivatives(*grid, values, derivs)?;
    let (a, da) = (u[0].values()[0], u[0].derivative_or_fd()[0]);
    let constants = InnerConstants::from_initial_data(
        a,
        da,
        top.value_at_anchor(),
        top.derivatives().expect("derivatives set")[0],
    );
    Ok(chain.clone().with_top(top, constants))
}
