//! Shared numeric substrate: grids, sampled functions, potentials,
//! quadrature, stencils and initial-value integration.

mod grid;
mod ivp;
mod pole;
mod potential;
mod quadrature;
mod stencil;

pub use grid::{Grid, SampledFunction, MIN_POINTS};
pub use ivp::integrate_ivp;
pub use pole::{regularized_product, regularized_product_at, RegularizedProduct};
pub use potential::{eval_potential, PotentialSpec, TabulatedPotential};
pub use quadrature::{cumulative_integral, simpson};
pub use stencil::{
    first_difference, schrodinger_residual, second_difference, second_log_derivative, Residual,
};

pub(crate) use stencil::ensure_zero_free;

/// Default relative residual tolerance for ODE checks.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-6;
