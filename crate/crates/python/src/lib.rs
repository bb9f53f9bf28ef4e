//! Python bindings: grids, Pöschl-Teller oracles, Wronskian towers,
//! transformations and the spectral check.

use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use confluent_susy::poschl_teller::{self as pt, PtParams};
use confluent_susy::schrodinger::{self, PotentialSpec, SampledFunction};
use confluent_susy::spectral;
use confluent_susy::susy_transform::{self as st, IntegralConstant};
use confluent_susy::wronskian::{self as wr, ConstantConvention};
use confluent_susy::SusyError;

create_exception!(confluent_susy, SingularityError, PyArithmeticError);
create_exception!(confluent_susy, AccuracyError, PyArithmeticError);

fn py_err(e: SusyError) -> PyErr {
    match e {
        SusyError::Singularity { .. } => SingularityError::new_err(e.to_string()),
        SusyError::Accuracy { .. } | SusyError::BlowUp { .. } => {
            AccuracyError::new_err(e.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

fn convention(name: &str) -> PyResult<ConstantConvention> {
    match name {
        "minus-infinity" => Ok(ConstantConvention::FromMinusInfinity),
        "anchor" => Ok(ConstantConvention::Anchor),
        other => Err(PyValueError::new_err(format!(
            "convention must be \"minus-infinity\" or \"anchor\", got \"{other}\""
        ))),
    }
}

fn params(kappa: f64, c_a: f64, c_b: f64) -> PyResult<PtParams> {
    Ok(PtParams::new(kappa)
        .map_err(py_err)?
        .with_c_a(c_a)
        .with_c_b(c_b))
}

/// Uniform grid `x_min..=x_max` with `n_points` nodes.
#[pyclass(name = "Grid", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyGrid(schrodinger::Grid);

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (x_min = -15.0, x_max = 15.0, n_points = 6001))]
    fn new(x_min: f64, x_max: f64, n_points: usize) -> PyResult<Self> {
        schrodinger::Grid::new(x_min, x_max, n_points)
            .map(Self)
            .map_err(py_err)
    }

    #[getter]
    fn x_min(&self) -> f64 {
        self.0.x_min()
    }

    #[getter]
    fn x_max(&self) -> f64 {
        self.0.x_max()
    }

    #[getter]
    fn n_points(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.0.spacing()
    }

    fn abscissae(&self) -> Vec<f64> {
        self.0.abscissae()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid({}, {}, {})",
            self.0.x_min(),
            self.0.x_max(),
            self.0.len()
        )
    }
}

fn grid_or_default(grid: Option<PyGrid>) -> schrodinger::Grid {
    grid.map_or_else(schrodinger::Grid::default_domain, |g| g.0)
}

fn sampled(grid: schrodinger::Grid, values: Vec<f64>) -> PyResult<SampledFunction> {
    SampledFunction::new(grid, values).map_err(py_err)
}

/// Bracket constants anchored at `-∞` (default) or `x_min`, one per level.
#[pyclass(name = "Tower", frozen)]
struct PyTower(wr::WronskianTower);

#[pymethods]
impl PyTower {
    /// Tower seeded by the closed-form Pöschl-Teller `u_0` at `λ`.
    #[staticmethod]
    #[pyo3(signature = (lam, constants, grid = None, convention = "minus-infinity"))]
    fn poschl_teller(
        lam: f64,
        constants: Vec<f64>,
        grid: Option<PyGrid>,
        convention: &str,
    ) -> PyResult<Self> {
        let g = grid_or_default(grid);
        let p = PtParams::from_lambda(lam).map_err(py_err)?;
        let chain = pt::pt_chain(&p, 0, &g).map_err(py_err)?;
        wr::build_tower_from_seed(
            chain.functions()[0].clone(),
            lam,
            PotentialSpec::PoschlTeller,
            &constants,
            self::convention(convention)?,
        )
        .map(Self)
        .map_err(py_err)
    }

    #[getter]
    fn depth(&self) -> usize {
        self.0.depth()
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.0.lambda()
    }

    /// `W_{u_0..u_k}` on the grid.
    fn level(&self, k: usize) -> PyResult<Vec<f64>> {
        self.0.level(k).map(|f| f.values().to_vec()).ok_or_else(|| {
            PyValueError::new_err(format!(
                "no level {k} in a tower of depth {}",
                self.0.depth()
            ))
        })
    }

    fn bracket(&self, k: usize) -> PyResult<Vec<f64>> {
        self.0
            .bracket(k)
            .map(<[f64]>::to_vec)
            .ok_or_else(|| PyValueError::new_err(format!("no bracket {k}")))
    }

    fn bracket_is_monotone(&self, k: usize) -> bool {
        self.0.bracket_is_monotone(k)
    }

    /// `∏ χ_j` through level `upto`.
    fn factorized(&self, upto: usize) -> PyResult<Vec<f64>> {
        let ladder = wr::ChiLadder::new(&self.0).map_err(py_err)?;
        Ok(wr::factorized_wronskian(&ladder, upto)
            .map_err(py_err)?
            .into_values())
    }

    fn __repr__(&self) -> String {
        format!("Tower(lam={}, depth={})", self.0.lambda(), self.0.depth())
    }
}

#[pyclass(name = "Regularity", frozen, get_all)]
struct PyRegularity {
    is_regular: bool,
    zero_brackets: Vec<(f64, f64)>,
    min_abs_w: f64,
    notes: Vec<String>,
}

impl From<st::RegularityReport> for PyRegularity {
    fn from(r: st::RegularityReport) -> Self {
        Self {
            is_regular: r.is_regular,
            zero_brackets: r.zero_brackets,
            min_abs_w: r.min_abs_w,
            notes: r.condition_notes,
        }
    }
}

/// Transformed potential and solutions, all sampled on `x`.
#[pyclass(name = "TransformResult", frozen, get_all)]
struct PyTransformResult {
    order: usize,
    lam: f64,
    energy: f64,
    x: Vec<f64>,
    potential: Vec<f64>,
    phi: Vec<f64>,
    chi: Vec<f64>,
    chi_perp: Vec<f64>,
    wronskian: Vec<f64>,
    chi_scale: f64,
    pair_wronskian_deviation: f64,
    residual_phi: f64,
    residual_chi: f64,
    residual_chi_perp: f64,
    is_regular: bool,
    min_abs_w: f64,
}

#[pymethods]
impl PyTransformResult {
    /// Bound states of the transformed potential as `(value, error)` pairs.
    fn bound_states(&self) -> PyResult<Vec<(f64, f64)>> {
        let g = schrodinger::Grid::new(self.x[0], self.x[self.x.len() - 1], self.x.len())
            .map_err(py_err)?;
        bound_states_of(&sampled(g, self.potential.clone())?)
    }

    fn __repr__(&self) -> String {
        format!(
            "TransformResult(order={}, lam={}, energy={}, pair_wronskian_deviation={:.2e})",
            self.order, self.lam, self.energy, self.pair_wronskian_deviation
        )
    }
}

fn bound_states_of(v: &SampledFunction) -> PyResult<Vec<(f64, f64)>> {
    Ok(spectral::bound_states(v)
        .map_err(py_err)?
        .iter()
        .map(|e| (e.value, e.error))
        .collect())
}

/// Order-`order` transformation of `V_0 = -2 sech²` at `λ = lam` applied to
/// the ground state `Ψ` at `E = -1`. `integral_constant` is `None` for the
/// value matched at `x_min`, or a number.
#[pyfunction]
#[pyo3(signature = (lam, order, constants, grid = None, convention = "minus-infinity", integral_constant = None))]
fn transform(
    lam: f64,
    order: usize,
    constants: Vec<f64>,
    grid: Option<PyGrid>,
    convention: &str,
    integral_constant: Option<f64>,
) -> PyResult<PyTransformResult> {
    let g = grid_or_default(grid);
    let tower = PyTower::poschl_teller(lam, constants, Some(PyGrid(g)), convention)?.0;
    let psi =
        SampledFunction::from_fn_with_derivative(g, |x| (pt::pt_psi(x), pt::pt_psi_derivative(x)))
            .map_err(py_err)?;
    let constant =
        integral_constant.map_or(IntegralConstant::MatchAtAnchor, IntegralConstant::Value);
    let r = st::transform(
        &tower,
        &PotentialSpec::PoschlTeller,
        &psi,
        -1.0,
        order,
        constant,
    )
    .map_err(py_err)?;
    let wronskian = tower
        .level(order - 1)
        .expect("checked by transform")
        .values()
        .to_vec();
    Ok(PyTransformResult {
        order,
        lam,
        energy: r.energy,
        x: g.abscissae(),
        potential: r.potential.values().to_vec(),
        phi: r.phi.values().to_vec(),
        chi: r.chi.values().to_vec(),
        chi_perp: r.chi_perp.values().to_vec(),
        wronskian,
        chi_scale: r.chi_scale,
        pair_wronskian_deviation: r.pair_wronskian_deviation,
        residual_phi: r.residuals.phi.relative,
        residual_chi: r.residuals.chi.relative,
        residual_chi_perp: r.residuals.chi_perp.relative,
        is_regular: r.regularity.is_regular,
        min_abs_w: r.regularity.min_abs_w,
    })
}

/// Sign changes of samples of `W` on `grid`.
#[pyfunction]
#[pyo3(signature = (values, grid = None))]
fn regularity_scan(values: Vec<f64>, grid: Option<PyGrid>) -> PyResult<PyRegularity> {
    let w = sampled(grid_or_default(grid), values)?;
    Ok(st::regularity_scan(&w).into())
}

/// Bound states `(value, error)` of samples of `V` on `grid`.
#[pyfunction]
#[pyo3(signature = (values, grid = None))]
fn bound_states(values: Vec<f64>, grid: Option<PyGrid>) -> PyResult<Vec<(f64, f64)>> {
    bound_states_of(&sampled(grid_or_default(grid), values)?)
}

/// Direct determinant `W_{u_0..u_upto}` of the closed-form chain at `κ`.
#[pyfunction]
#[pyo3(signature = (kappa, upto, grid = None))]
fn direct_wronskian(kappa: f64, upto: usize, grid: Option<PyGrid>) -> PyResult<Vec<f64>> {
    let g = grid_or_default(grid);
    let chain = pt::pt_chain(&params(kappa, 0.0, 0.0)?, upto, &g).map_err(py_err)?;
    Ok(wr::direct_wronskian(&chain, upto)
        .map_err(py_err)?
        .into_values())
}

#[pyfunction]
fn pt_v0(x: f64) -> f64 {
    pt::pt_v0(x)
}

#[pyfunction]
fn pt_psi(x: f64) -> f64 {
    pt::pt_psi(x)
}

/// Closed-form chain function `u_j` (`j ≤ 3`).
#[pyfunction]
fn pt_u(j: usize, kappa: f64, x: f64) -> PyResult<f64> {
    pt::pt_u(j, &params(kappa, 0.0, 0.0)?, x).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (kappa, x, c_a = 0.0))]
fn pt_w4(kappa: f64, x: f64, c_a: f64) -> PyResult<f64> {
    Ok(pt::pt_w4(&params(kappa, c_a, 0.0)?, x))
}

#[pyfunction]
#[pyo3(signature = (kappa, x, c_b = 0.0))]
fn pt_w5(kappa: f64, x: f64, c_b: f64) -> PyResult<f64> {
    Ok(pt::pt_w5(&params(kappa, 0.0, c_b)?, x))
}

#[pyfunction]
#[pyo3(signature = (kappa, x, c_a = 0.0))]
fn pt_phi4(kappa: f64, x: f64, c_a: f64) -> PyResult<f64> {
    Ok(pt::pt_phi4(&params(kappa, c_a, 0.0)?, x))
}

#[pyfunction]
#[pyo3(signature = (kappa, x, c_a = 0.0))]
fn pt_chi4perp(kappa: f64, x: f64, c_a: f64) -> PyResult<f64> {
    Ok(pt::pt_chi4perp(&params(kappa, c_a, 0.0)?, x))
}

#[pyfunction]
#[pyo3(signature = (kappa, x, c_b = 0.0))]
fn pt_phi5(kappa: f64, x: f64, c_b: f64) -> PyResult<f64> {
    Ok(pt::pt_phi5(&params(kappa, 0.0, c_b)?, x))
}

#[pyfunction]
#[pyo3(signature = (kappa, x, c_b = 0.0))]
fn pt_chi5perp(kappa: f64, x: f64, c_b: f64) -> PyResult<f64> {
    Ok(pt::pt_chi5perp(&params(kappa, 0.0, c_b)?, x))
}

#[pymodule]
#[pyo3(name = "confluent_susy")]
fn confluent_susy_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyTower>()?;
    m.add_class::<PyRegularity>()?;
    m.add_class::<PyTransformResult>()?;
    m.add("SingularityError", m.py().get_type::<SingularityError>())?;
    m.add("AccuracyError", m.py().get_type::<AccuracyError>())?;
    m.add_function(wrap_pyfunction!(transform, m)?)?;
    m.add_function(wrap_pyfunction!(regularity_scan, m)?)?;
    m.add_function(wrap_pyfunction!(bound_states, m)?)?;
    m.add_function(wrap_pyfunction!(direct_wronskian, m)?)?;
    m.add_function(wrap_pyfunction!(pt_v0, m)?)?;
    m.add_function(wrap_pyfunction!(pt_psi, m)?)?;
    m.add_function(wrap_pyfunction!(pt_u, m)?)?;
    m.add_function(wrap_pyfunction!(pt_w4, m)?)?;
    m.add_function(wrap_pyfunction!(pt_w5, m)?)?;
    m.add_function(wrap_pyfunction!(pt_phi4, m)?)?;
    m.add_function(wrap_pyfunction!(pt_chi4perp, m)?)?;
    m.add_function(wrap_pyfunction!(pt_phi5, m)?)?;
    m.add_function(wrap_pyfunction!(pt_chi5perp, m)?)?;
    Ok(())
}
