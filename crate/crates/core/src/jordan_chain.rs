//! Jordan chains `u_0'' + (λ - V) u_0 = 0`, `u_j'' + (λ - V) u_j = -u_{j-1}`.
//!
//! Level `j` is built from the integral representation
//! `u_j = -u_0 [b_j + ∫ (a_j + ∫ u_0 u_{j-1}) / u_0²]` with both integrals
//! anchored at `x_min`. The pair `(a_j, b_j)` carries the homogeneous freedom
//! of the level.

use crate::error::{Result, SusyError};
use crate::poschl_teller::{pt_u0_of_lambda, pt_u_with_derivative, PtParams};
use crate::schrodinger::{
    cumulative_integral, ensure_zero_free, integrate_ivp, schrodinger_residual, Grid,
    PotentialSpec, Residual, SampledFunction, DEFAULT_RESIDUAL_TOL,
};

/// How `u_0` is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChainSeed {
    /// Closed-form Pöschl-Teller solution with `κ = sqrt(-λ)`.
    PoschlTeller,
    /// Integrated from `(u_0, u_0')` at `x_min`.
    Initial { y0: f64, dy0: f64 },
}

/// Integration constants of one chain level: `a` enters the inner integral,
/// `b` the outer one.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InnerConstants {
    pub a: f64,
    pub b: f64,
}

impl InnerConstants {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    /// Constants that give `u_j(x_min) = y`, `u_j'(x_min) = dy` for the seed
    /// values `(u0, du0)` at `x_min`.
    pub fn from_initial_data(u0: f64, du0: f64, y: f64, dy: f64) -> Self {
        Self {
            a: -(u0 * dy - du0 * y),
            b: -y / u0,
        }
    }

    /// Inverse of [`InnerConstants::from_initial_data`].
    pub fn initial_data(&self, u0: f64, du0: f64) -> (f64, f64) {
        (-u0 * self.b, -du0 * self.b - self.a / u0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub lambda: f64,
    pub seed: ChainSeed,
    /// Constants for levels `1..=order`.
    pub inner_constants: Vec<InnerConstants>,
    pub residual_tol: f64,
}

impl ChainSpec {
    pub fn new(lambda: f64, seed: ChainSeed) -> Self {
        Self {
            lambda,
            seed,
            inner_constants: Vec::new(),
            residual_tol: DEFAULT_RESIDUAL_TOL,
        }
    }

    /// Chain of the given order with all inner constants zero.
    pub fn with_order(mut self, order: usize) -> Self {
        self.inner_constants = vec![InnerConstants::default(); order];
        self
    }

    pub fn with_level(mut self, constants: InnerConstants) -> Self {
        self.inner_constants.push(constants);
        self
    }

    pub fn with_residual_tol(mut self, tol: f64) -> Self {
        self.residual_tol = tol;
        self
    }

    pub fn order(&self) -> usize {
        self.inner_constants.len()
    }

    fn validate(&self, potential: &PotentialSpec) -> Result<()> {
        if !self.lambda.is_finite() {
            return Err(SusyError::InvalidInput("lambda must be finite".into()));
        }
        if !(self.residual_tol > 0.0) {
            return Err(SusyError::InvalidInput(
                "residual tolerance must be positive".into(),
            ));
        }
        if self.seed == ChainSeed::PoschlTeller {
            if !potential.is_poschl_teller() {
                return Err(SusyError::InvalidInput(
                    "closed-form seed requires the Pöschl-Teller potential".into(),
                ));
            }
            if !(self.lambda < 0.0) {
                return Err(SusyError::InvalidInput(format!(
                    "closed-form seed requires lambda < 0, got {}",
                    self.lambda
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JordanChain {
    spec: ChainSpec,
    potential: PotentialSpec,
    grid: Grid,
    functions: Vec<SampledFunction>,
}

impl JordanChain {
    /// Wraps precomputed functions `u_0..u_n` (each with derivatives).
    pub fn from_functions(
        spec: ChainSpec,
        potential: PotentialSpec,
        grid: Grid,
        functions: Vec<SampledFunction>,
    ) -> Result<Self> {
        if functions.len() != spec.order() + 1 {
            return Err(SusyError::InvalidInput(format!(
                "chain of order {} needs {} functions, got {}",
                spec.order(),
                spec.order() + 1,
                functions.len()
            )));
        }
        for (j, f) in functions.iter().enumerate() {
            if *f.grid() != grid {
                return Err(SusyError::InvalidInput(format!(
                    "u_{j} is sampled on a different grid"
                )));
            }
            if f.derivatives().is_none() {
                return Err(SusyError::InvalidInput(format!(
                    "u_{j} carries no derivative data"
                )));
            }
        }
        Ok(Self {
            spec,
            potential,
            grid,
            functions,
        })
    }

    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn functions(&self) -> &[SampledFunction] {
        &self.functions
    }

    pub fn order(&self) -> usize {
        self.functions.len() - 1
    }

    pub fn lambda(&self) -> f64 {
        self.spec.lambda
    }

    /// Chain restricted to `u_0..u_order`.
    pub fn truncated(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(SusyError::InvalidInput(format!(
                "cannot truncate a chain of order {} to order {order}",
                self.order()
            )));
        }
        let mut spec = self.spec.clone();
        spec.inner_constants.truncate(order);
        Ok(Self {
            spec,
            potential: self.potential.clone(),
            grid: self.grid,
            functions: self.functions[..=order].to_vec(),
        })
    }

    /// Replaces the top function, recording the constants that produced it.
    pub(crate) fn with_top(mut self, top: SampledFunction, constants: InnerConstants) -> Self {
        let n = self.order();
        self.functions[n] = top;
        if n > 0 {
            self.spec.inner_constants[n - 1] = constants;
        }
        self
    }
}

fn seed_function(
    spec: &ChainSpec,
    potential: &PotentialSpec,
    grid: &Grid,
) -> Result<SampledFunction> {
    match spec.seed {
        ChainSeed::PoschlTeller => {
            let p = PtParams::from_lambda(spec.lambda)?;
            let (values, derivs) = (0..grid.len())
                .map(|i| pt_u_with_derivative(0, &p, grid.x(i)))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .unzip();
            SampledFunction::with_derivatives(*grid, values, derivs)
        }
        ChainSeed::Initial { y0, dy0 } => {
            integrate_ivp(potential, spec.lambda, grid, y0, dy0, None)
        }
    }
}

/// One level of the integral representation.
fn next_level(
    u0: &SampledFunction,
    prev: &SampledFunction,
    constants: InnerConstants,
) -> Result<SampledFunction> {
    let grid = *u0.grid();
    let u = u0.values();
    let du = u0.derivatives().expect("seed carries derivatives");
    let src: Vec<f64> = u.iter().zip(prev.values()).map(|(a, b)| a * b).collect();
    let inner = cumulative_integral(&SampledFunction::new(grid, src)?, constants.a);
    let ratio: Vec<f64> = inner
        .values()
        .iter()
        .zip(u)
        .map(|(i, u)| i / (u * u))
        .collect();
    let outer = cumulative_integral(&SampledFunction::new(grid, ratio)?, constants.b);
    let values = u.iter().zip(outer.values()).map(|(u, g)| -u * g).collect();
    let derivs = (0..grid.len())
        .map(|k| -du[k] * outer.values()[k] - inner.values()[k] / u[k])
        .collect();
    SampledFunction::with_derivatives(grid, values, derivs)
}

/// Builds `u_0..u_n` from the integral representation and checks every
/// level's residual against `spec.residual_tol`.
pub fn build_chain(spec: ChainSpec, potential: PotentialSpec, grid: Grid) -> Result<JordanChain> {
    spec.validate(&potential)?;
    let u0 = seed_function(&spec, &potential, &grid)?;
    ensure_zero_free(&u0, "u_0")?;
    let mut functions = vec![u0];
    for c in &spec.inner_constants {
        let next = next_level(&functions[0], functions.last().unwrap(), *c)?;
        functions.push(next);
    }
    let chain = JordanChain::from_functions(spec, potential, grid, functions)?;
    let report = verify_chain(&chain)?;
    if let Some((j, r)) = report.worst() {
        if !r.passes(chain.spec.residual_tol) {
            return Err(SusyError::Accuracy {
                what: format!("chain level {j}"),
                residual: r.relative,
                tolerance: chain.spec.residual_tol,
            });
        }
    }
    Ok(chain)
}

/// Same chain as [`build_chain`], integrated level by level as an
/// inhomogeneous initial-value problem. No residual gate is applied.
pub fn build_chain_ivp(
    spec: ChainSpec,
    potential: PotentialSpec,
    grid: Grid,
) -> Result<JordanChain> {
    spec.validate(&potential)?;
    let u0 = seed_function(&spec, &potential, &grid)?;
    let (a0, da0) = (u0.values()[0], u0.derivatives().unwrap()[0]);
    if a0 == 0.0 {
        return Err(SusyError::Singularity {
            what: "u_0 at the anchor".into(),
            brackets: vec![(grid.x_min(), grid.x_min())],
        });
    }
    let mut functions = vec![u0];
    for c in &spec.inner_constants {
        let (y, dy) = c.initial_data(a0, da0);
        let next = integrate_ivp(&potential, spec.lambda, &grid, y, dy, functions.last())?;
        functions.push(next);
    }
    JordanChain::from_functions(spec, potential, grid, functions)
}

/// Per-level interior residuals of the chain equations.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub levels: Vec<Residual>,
    pub tolerance: f64,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.levels.iter().all(|r| r.passes(self.tolerance))
    }

    /// Level with the largest relative residual.
    pub fn worst(&self) -> Option<(usize, Residual)> {
        self.levels
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.relative.total_cmp(&b.1.relative))
    }
}

pub fn verify_chain(chain: &JordanChain) -> Result<ChainReport> {
    let v = chain.potential.sample(&chain.grid)?;
    let levels = (0..=chain.order())
        .map(|j| {
            let src = (j > 0).then(|| chain.functions[j - 1].values());
            schrodinger_residual(&chain.functions[j], v.values(), chain.lambda(), src)
        })
        .collect();
    Ok(ChainReport {
        levels,
        tolerance: chain.spec.residual_tol,
    })
}

/// Outcome of the parametric-derivative cross-check at level 1.
#[derive(Debug, Clone)]
pub struct ParametricReport {
    /// `∂u_0/∂λ` by central difference.
    pub u1: SampledFunction,
    /// Residual of the level-1 chain equation for `u1`.
    pub residual: Residual,
    /// Residual of the homogeneous equation for `u1` minus the integral
    /// representation's `u_1`.
    pub homogeneous_difference: Residual,
    pub tolerance: f64,
}

impl ParametricReport {
    pub fn passed(&self) -> bool {
        self.residual.passes(self.tolerance) && self.homogeneous_difference.passes(self.tolerance)
    }
}

/// Builds `u_1 ≈ ∂u_0/∂λ` by a central difference with step `dlambda` and
/// checks it against the level-1 chain equation. The reported tolerance is
/// `max(1e-4, dlambda²)`.
pub fn parametric_chain_check(
    spec: &ChainSpec,
    potential: &PotentialSpec,
    grid: &Grid,
    dlambda: f64,
) -> Result<ParametricReport> {
    if spec.seed != ChainSeed::PoschlTeller {
        return Err(SusyError::Unsupported(
            "parametric check needs a seed that depends on lambda in closed form".into(),
        ));
    }
    spec.validate(potential)?;
    if !(dlambda > 0.0 && spec.lambda + dlambda < 0.0) {
        return Err(SusyError::InvalidInput(format!(
            "dlambda must be positive and keep lambda + dlambda < 0, got {dlambda}"
        )));
    }
    let lambda = spec.lambda;
    let u1 = SampledFunction::from_fn_with_derivative(*grid, |x| {
        let f = |l: f64| pt_u0_of_lambda(l, x).unwrap_or(f64::NAN);
        let value = (f(lambda + dlambda) - f(lambda - dlambda)) / (2.0 * dlambda);
        (value, 0.0)
    })?
    .without_derivatives();
    let v = potential.sample(grid)?;
    let integral = build_chain(
        ChainSpec::new(lambda, ChainSeed::PoschlTeller)
            .with_order(1)
            .with_residual_tol(spec.residual_tol.max(1e-4)),
        potential.clone(),
        *grid,
    )?;
    let residual = schrodinger_residual(
        &u1,
        v.values(),
        lambda,
        Some(integral.functions[0].values()),
    );
    let diff: Vec<f64> = u1
        .values()
        .iter()
        .zip(integral.functions[1].values())
        .map(|(a, b)| a - b)
        .collect();
    let diff = SampledFunction::new(*grid, diff)?;
    // measured against the size of the functions being subtracted
    let mut homogeneous_difference = schrodinger_residual(&diff, v.values(), lambda, None);
    let scale = u1.max_abs().max(integral.functions[1].max_abs());
    homogeneous_difference.relative = homogeneous_difference.absolute / (1.0 + scale);
    Ok(ParametricReport {
        u1,
        residual,
        homogeneous_difference,
        tolerance: 1e-4_f64.max(dlambda * dlambda),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poschl_teller::{pt_chain_spec, pt_u};
    use std::f64::consts::SQRT_2;

    fn grid() -> Grid {
        Grid::default_domain()
    }

    fn pt_spec(kappa: f64, order: usize) -> ChainSpec {
        pt_chain_spec(&PtParams::new(kappa).unwrap(), order, grid().x_min()).unwrap()
    }

    #[test]
    fn order_zero_is_seed() {
        let spec = ChainSpec::new(-1.0, ChainSeed::PoschlTeller);
        let c = build_chain(spec, PotentialSpec::PoschlTeller, grid()).unwrap();
        assert_eq!(c.order(), 0);
        let mid = grid().len() / 2;
        assert!((c.functions()[0].values()[mid] + SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn matched_constants_reproduce_closed_forms() {
        for kappa in [1.0, 1.5_f64.sqrt(), 2.0] {
            let p = PtParams::new(kappa).unwrap();
            let c = build_chain(pt_spec(kappa, 3), PotentialSpec::PoschlTeller, grid()).unwrap();
            for j in 0..=3 {
                let f = &c.functions()[j];
                let scale = f.max_abs();
                for i in (0..grid().len()).step_by(13) {
                    let exact = pt_u(j, &p, grid().x(i)).unwrap();
                    let err = (f.values()[i] - exact).abs() / scale;
                    assert!(
                        err < 5e-8,
                        "kappa {kappa} level {j} x {}: {err}",
                        grid().x(i)
                    );
                }
            }
            let mid = grid().len() / 2;
            if kappa == 1.0 {
                assert!(c.functions()[1].values()[mid].abs() < 1e-8);
            }
        }
    }

    #[test]
    fn seed_with_zero_is_rejected() {
        let spec = ChainSpec::new(-0.5, ChainSeed::PoschlTeller).with_order(1);
        assert!(matches!(
            build_chain(spec, PotentialSpec::PoschlTeller, grid()),
            Err(SusyError::Singularity { .. })
        ));
    }

    #[test]
    fn pt_seed_needs_pt_potential_and_negative_lambda() {
        let flat = PotentialSpec::Transformed(SampledFunction::constant(grid(), 0.0));
        assert!(build_chain(ChainSpec::new(-1.0, ChainSeed::PoschlTeller), flat, grid()).is_err());
        assert!(build_chain(
            ChainSpec::new(0.5, ChainSeed::PoschlTeller),
            PotentialSpec::PoschlTeller,
            grid()
        )
        .is_err());
    }

    #[test]
    fn closed_form_chain_verifies() {
        let p = PtParams::new(1.0).unwrap();
        let c = crate::poschl_teller::pt_chain(&p, 3, &grid()).unwrap();
        let r = verify_chain(&c).unwrap();
        assert_eq!(r.levels.len(), 4);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn perturbed_sample_is_flagged() {
        let p = PtParams::new(1.0).unwrap();
        let c = crate::poschl_teller::pt_chain(&p, 1, &grid()).unwrap();
        let mut values = c.functions()[1].values().to_vec();
        let mid = values.len() / 2;
        values[mid] += 1e-3;
        let bumped = SampledFunction::with_derivatives(
            grid(),
            values,
            c.functions()[1].derivatives().unwrap().to_vec(),
        )
        .unwrap();
        let c = c.with_top(bumped, InnerConstants::default());
        let r = verify_chain(&c).unwrap();
        let h = grid().spacing();
        assert!(r.levels[1].absolute >= 1e-3 / (h * h));
        assert!(!r.passed());
    }

    #[test]
    fn zero_source_collapses() {
        // order-2 chain with u_1 forced to zero: u_2 with zero constants is zero
        let spec = ChainSpec::new(-1.0, ChainSeed::PoschlTeller);
        let c = build_chain(spec, PotentialSpec::PoschlTeller, grid()).unwrap();
        let zero = SampledFunction::constant(grid(), 0.0);
        let u2 = next_level(&c.functions()[0], &zero, InnerConstants::default()).unwrap();
        assert!(u2.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn inner_constants_round_trip() {
        let c = InnerConstants::from_initial_data(0.3, -1.2, 0.7, 2.5);
        let (y, dy) = c.initial_data(0.3, -1.2);
        assert!((y - 0.7).abs() < 1e-15 && (dy - 2.5).abs() < 1e-14);
    }

    #[test]
    fn changing_constants_adds_homogeneous_solution() {
        let g = grid();
        let base = build_chain(pt_spec(1.2, 2), PotentialSpec::PoschlTeller, g).unwrap();
        let mut spec = pt_spec(1.2, 2);
        spec.inner_constants[1].a += 1e-3;
        spec.inner_constants[1].b -= 0.5;
        let other = build_chain(spec, PotentialSpec::PoschlTeller, g).unwrap();
        let diff: Vec<f64> = base.functions()[2]
            .values()
            .iter()
            .zip(other.functions()[2].values())
            .map(|(a, b)| a - b)
            .collect();
        let diff = SampledFunction::new(g, diff).unwrap();
        let v = PotentialSpec::PoschlTeller.sample(&g).unwrap();
        let r = schrodinger_residual(&diff, v.values(), base.lambda(), None);
        assert!(r.passes(DEFAULT_RESIDUAL_TOL), "{r:?}");
    }

    #[test]
    fn integral_and_ivp_constructions_agree() {
        let g = grid();
        for kappa in [1.0, 1.5_f64.sqrt()] {
            let a = build_chain(pt_spec(kappa, 3), PotentialSpec::PoschlTeller, g).unwrap();
            let b = build_chain_ivp(pt_spec(kappa, 3), PotentialSpec::PoschlTeller, g).unwrap();
            for j in 0..=3 {
                let fa = &a.functions()[j];
                let fb = &b.functions()[j];
                let scale = fa.max_abs();
                // Forward integration stays accurate up to the right end where
                // the growing solution dominates.
                let err = fa
                    .values()
                    .iter()
                    .zip(fb.values())
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                assert!(
                    err < 10.0 * DEFAULT_RESIDUAL_TOL * scale,
                    "kappa {kappa} level {j}: {err}"
                );
            }
        }
    }

    #[test]
    fn parametric_derivative_solves_level_one() {
        let g = grid();
        let spec = ChainSpec::new(-1.0, ChainSeed::PoschlTeller).with_order(1);
        let r = parametric_chain_check(&spec, &PotentialSpec::PoschlTeller, &g, 1e-4).unwrap();
        assert!(
            r.passed(),
            "{:?} {:?}",
            r.residual,
            r.homogeneous_difference
        );
        assert!(r.residual.relative < 1e-4);
        assert!(r.homogeneous_difference.relative < 1e-4);
    }

    #[test]
    fn parametric_residual_is_second_order() {
        let g = grid();
        let spec = ChainSpec::new(-1.5, ChainSeed::PoschlTeller);
        let pt = PotentialSpec::PoschlTeller;
        let coarse = parametric_chain_check(&spec, &pt, &g, 0.02)
            .unwrap()
            .residual
            .relative;
        let fine = parametric_chain_check(&spec, &pt, &g, 0.01)
            .unwrap()
            .residual
            .relative;
        let ratio = coarse / fine;
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn parametric_check_needs_closed_form_seed() {
        let spec = ChainSpec::new(
            -1.0,
            ChainSeed::Initial {
                y0: 1e-6,
                dy0: 1e-6,
            },
        );
        assert!(matches!(
            parametric_chain_check(&spec, &PotentialSpec::PoschlTeller, &grid(), 1e-4),
            Err(SusyError::Unsupported(_))
        ));
    }
}
