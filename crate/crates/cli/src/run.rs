//! The four subcommands. Each writes its files into the configured output
//! directory and returns the report it wrote.

use std::fs;
use std::path::Path;

use serde::Serialize;

use confluent_susy::jordan_chain::{
    build_chain_ivp, verify_chain, ChainSeed, ChainSpec, InnerConstants, JordanChain,
};
use confluent_susy::poschl_teller::{pt_chain, pt_psi, pt_psi_derivative, PtParams};
use confluent_susy::schrodinger::{
    integrate_ivp, second_difference, Grid, PotentialSpec, SampledFunction,
};
use confluent_susy::spectral::{bound_states, build_hamiltonian, spectrum, EigenEstimate};
use confluent_susy::susy_transform::{
    normalize_with_threshold, overlap, regularity_scan_with_context, transform, RegularityContext,
    RegularityReport, TransformResult,
};
use confluent_susy::wronskian::{
    anchor_constants, build_tower, build_tower_from_seed, direct_wronskian, factorized_wronskian,
    max_relative_difference, ChiLadder, WronskianTower,
};

use crate::config::{PotentialConfig, RunConfig, Tolerances};
use crate::error::CliError;

/// Endpoint decay demanded before normalizing for the orthogonality check.
const ORTHOGONALITY_DECAY: f64 = 1e-2;

/// Chain levels used by the recursion-versus-determinant check.
const RECONCILIATION_DEPTH: usize = 3;

#[derive(Debug, Clone, Serialize)]
pub struct GridReport {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularitySummary {
    pub is_regular: bool,
    pub zero_brackets: Vec<(f64, f64)>,
    pub min_abs_w: f64,
    pub notes: Vec<String>,
}

impl From<&RegularityReport> for RegularitySummary {
    fn from(r: &RegularityReport) -> Self {
        Self {
            is_regular: r.is_regular,
            zero_brackets: r.zero_brackets.clone(),
            min_abs_w: r.min_abs_w,
            notes: r.condition_notes.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub constant: f64,
    pub anchor_x: f64,
    pub anchor_value: f64,
    pub tail: Option<f64>,
    pub poles: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Residuals {
    pub phi: f64,
    pub chi: f64,
    pub chi_perp: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Eigenvalue {
    pub value: f64,
    pub error: f64,
}

impl From<&EigenEstimate> for Eigenvalue {
    fn from(e: &EigenEstimate) -> Self {
        Self {
            value: e.value,
            error: e.error,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Failure {
    /// Misses the requested tolerance but meets the default one.
    Tolerance,
    Correctness,
}

impl Failure {
    pub fn label(self) -> &'static str {
        match self {
            Self::Tolerance => "tolerance",
            Self::Correctness => "correctness",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Not applicable to this configuration; counts as passed.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub skipped: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    /// Passes when `value < tolerance`. A failure is a tolerance failure if
    /// the value still meets `default`.
    fn measured(name: &str, value: f64, tolerance: f64, default: f64) -> Self {
        let passed = value < tolerance;
        let failure = (!passed).then_some({
            if value < default {
                Failure::Tolerance
            } else {
                Failure::Correctness
            }
        });
        Self {
            name: name.into(),
            value,
            tolerance,
            passed,
            skipped: false,
            failure,
            note: None,
        }
    }

    fn boolean(name: &str, ok: bool, note: Option<String>) -> Self {
        Self {
            name: name.into(),
            value: if ok { 0.0 } else { 1.0 },
            tolerance: 0.5,
            passed: ok,
            skipped: false,
            failure: (!ok).then_some(Failure::Correctness),
            note,
        }
    }

    fn errored(name: &str, tolerance: f64, message: String) -> Self {
        Self {
            name: name.into(),
            value: f64::NAN,
            tolerance,
            passed: false,
            skipped: false,
            failure: Some(Failure::Correctness),
            note: Some(message),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub potential: PotentialConfig,
    pub lambda: f64,
    pub order: usize,
    pub constants: Vec<f64>,
    pub convention: crate::config::Convention,
    pub grid: GridReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regularity: Option<RegularitySummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<LevelReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<Residuals>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_wronskian_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub eigenvalues: Vec<Eigenvalue>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub files: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    fn new(command: &str, cfg: &RunConfig) -> Self {
        Self {
            command: command.into(),
            potential: cfg.potential.clone(),
            lambda: cfg.lambda,
            order: cfg.order,
            constants: cfg.constants.clone(),
            convention: cfg.convention,
            grid: GridReport {
                x_min: cfg.grid.x_min,
                x_max: cfg.grid.x_max,
                n_points: cfg.grid.n_points,
            },
            energy: None,
            regularity: None,
            levels: Vec::new(),
            residuals: None,
            chi_scale: None,
            pair_wronskian_deviation: None,
            eigenvalues: Vec::new(),
            checks: Vec::new(),
            files: Vec::new(),
            warnings: Vec::new(),
            error: None,
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Grid, potential and the tower of depth `order`.
struct Setup {
    grid: Grid,
    potential: PotentialSpec,
    tower: WronskianTower,
}

fn seed(cfg: &RunConfig, grid: &Grid, potential: &PotentialSpec) -> Result<ChainSeed, CliError> {
    Ok(match (&cfg.potential, cfg.seed) {
        (_, Some(s)) => ChainSeed::Initial {
            y0: s.y0,
            dy0: s.dy0,
        },
        (PotentialConfig::PoschlTeller, None) => ChainSeed::PoschlTeller,
        (PotentialConfig::Tabulated { .. }, None) => {
            // e^{kx} at x_min: decays towards x_min when λ lies below V(x_min)
            let k = (potential.eval(grid.x_min())? - cfg.lambda).max(0.0).sqrt();
            let y0 = if k > 0.0 {
                (k * grid.x_min()).exp()
            } else {
                1.0
            };
            ChainSeed::Initial { y0, dy0: k * y0 }
        }
    })
}

fn setup(cfg: &RunConfig) -> Result<Setup, CliError> {
    let grid = cfg.grid()?;
    let potential = cfg.potential(&grid)?;
    let u0 = match seed(cfg, &grid, &potential)? {
        ChainSeed::PoschlTeller => {
            let p = PtParams::from_lambda(cfg.lambda)?;
            pt_chain(&p, 0, &grid)?.functions()[0].clone()
        }
        ChainSeed::Initial { y0, dy0 } => {
            integrate_ivp(&potential, cfg.lambda, &grid, y0, dy0, None)?
        }
    };
    let tower = build_tower_from_seed(
        u0,
        cfg.lambda,
        potential.clone(),
        &cfg.constants,
        cfg.convention.into(),
    )?;
    Ok(Setup {
        grid,
        potential,
        tower,
    })
}

/// `Ψ` and its energy: the closed-form ground state for Pöschl-Teller at
/// `E = -1`, the shooting ground state when no energy is given, otherwise
/// the solution decaying towards `x_min`.
fn solution(cfg: &RunConfig, s: &Setup) -> Result<(SampledFunction, f64), CliError> {
    let g = s.grid;
    let is_pt = matches!(cfg.potential, PotentialConfig::PoschlTeller);
    match cfg.energy {
        None | Some(-1.0) if is_pt => Ok((
            SampledFunction::from_fn_with_derivative(g, |x| (pt_psi(x), pt_psi_derivative(x)))?,
            -1.0,
        )),
        None => ground_state(&s.potential, &g),
        Some(e) => Ok((left_decaying(&s.potential, &g, e)?, e)),
    }
}

/// Solution at `energy` that behaves like `e^{kx}` at `x_min`.
fn left_decaying(
    potential: &PotentialSpec,
    g: &Grid,
    energy: f64,
) -> Result<SampledFunction, CliError> {
    let k = (potential.eval(g.x_min())? - energy).max(0.0).sqrt();
    let (y0, dy0) = if k > 0.0 {
        let y0 = (k * g.x_min()).exp();
        (y0, k * y0)
    } else {
        (0.0, 1.0)
    };
    Ok(integrate_ivp(potential, energy, g, y0, dy0, None)?)
}

/// Ground state by shooting: the discrete eigenvalue with its Richardson
/// correction brackets the energy at which the left-decaying solution stops
/// ending positive at `x_max`.
fn ground_state(potential: &PotentialSpec, g: &Grid) -> Result<(SampledFunction, f64), CliError> {
    let v = potential.sample(g)?;
    let estimate = spectrum(&v, 1)?[0];
    let centre = estimate.value + estimate.error;
    let mut width = 10.0 * estimate.error.abs().max(1e-9);
    let ends_positive = |e: f64| -> Result<bool, CliError> {
        Ok(*left_decaying(potential, g, e)?
            .values()
            .last()
            .expect("non-empty")
            > 0.0)
    };
    let (mut lo, mut hi) = (centre - width, centre + width);
    for _ in 0..20 {
        if ends_positive(lo)? && !ends_positive(hi)? {
            break;
        }
        width *= 2.0;
        (lo, hi) = (centre - width, centre + width);
    }
    if !(ends_positive(lo)? && !ends_positive(hi)?) {
        // no sign change found: fall back to the discrete eigenvector
        let h = build_hamiltonian(&v)?;
        let e = h.eigenvalue(0);
        return Ok((h.eigenvector(e)?, e));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ends_positive(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((left_decaying(potential, g, lo)?, lo))
}

fn regularity(cfg: &RunConfig, s: &Setup, energy: Option<f64>) -> RegularityReport {
    let w = s
        .tower
        .level(cfg.order - 1)
        .expect("tower depth equals order");
    let ctx = RegularityContext {
        order: cfg.order,
        lambda: cfg.lambda,
        ground_energy: energy,
        top_constant: (cfg.order >= 2).then(|| cfg.constants[cfg.order - 2]),
    };
    regularity_scan_with_context(w, &ctx)
}

fn levels(t: &WronskianTower) -> Vec<LevelReport> {
    t.level_info()
        .iter()
        .enumerate()
        .map(|(k, l)| LevelReport {
            level: k + 1,
            constant: l.constant,
            anchor_x: l.anchor_x,
            anchor_value: l.anchor_value,
            tail: l.tail,
            poles: l.poles.clone(),
        })
        .collect()
}

fn fill_result(report: &mut Report, r: &TransformResult) -> Result<(), CliError> {
    report.residuals = Some(Residuals {
        phi: r.residuals.phi.relative,
        chi: r.residuals.chi.relative,
        chi_perp: r.residuals.chi_perp.relative,
    });
    report.chi_scale = Some(r.chi_scale);
    report.pair_wronskian_deviation = Some(r.pair_wronskian_deviation);
    report.eigenvalues = bound_states(&r.potential)?
        .iter()
        .map(Eigenvalue::from)
        .collect();
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))
}

fn write_function(
    dir: &Path,
    name: &str,
    f: &SampledFunction,
    report: &mut Report,
) -> Result<(), CliError> {
    let path = dir.join(name);
    f.write_csv_path(&path)
        .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
    report.files.push(name.into());
    Ok(())
}

pub fn write_report(dir: &Path, name: &str, report: &Report) -> Result<(), CliError> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    let mut text =
        serde_json::to_string_pretty(report).map_err(|e| CliError::Output(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

/// `V_0 - 2 (ln|W|)''` without the zero check, for forced output.
fn unchecked_potential(s: &Setup, w: &SampledFunction) -> Result<SampledFunction, CliError> {
    let g = s.grid;
    let ln: Vec<f64> = w.values().iter().map(|v| v.abs().ln()).collect();
    let d2 = second_difference(&ln, g.spacing());
    let v0 = s.potential.sample(&g)?;
    let values = v0
        .values()
        .iter()
        .zip(&d2)
        .map(|(v, d)| v - 2.0 * d)
        .collect();
    Ok(SampledFunction::new(g, values)?)
}

/// Runs the transformation and writes the CSVs and `report.json`. A
/// singular Wronskian is reported with its brackets and returned as an
/// error unless `force` is set.
pub fn cmd_transform(cfg: &RunConfig, force: bool) -> Result<Report, CliError> {
    let mut report = Report::new("transform", cfg);
    let s = setup(cfg)?;
    let (psi, energy) = solution(cfg, &s)?;
    report.energy = Some(energy);
    report.levels = levels(&s.tower);
    let reg = regularity(cfg, &s, Some(energy));
    report.regularity = Some((&reg).into());
    let dir = cfg.out.clone();
    ensure_dir(&dir)?;
    let w = s
        .tower
        .level(cfg.order - 1)
        .expect("tower depth equals order")
        .clone();
    if !reg.is_regular {
        let what = format!("W_{{u_0..u_{}}}", cfg.order - 1);
        if !force {
            let err = CliError::Singular {
                what,
                brackets: reg.zero_brackets.clone(),
            };
            report.error = Some(err.to_string());
            write_function(&dir, "wronskian.csv", &w, &mut report)?;
            write_report(&dir, "report.json", &report)?;
            return Err(err);
        }
        report.warnings.push(format!(
            "{what} has {} zero(s); output forced, potential is singular there",
            reg.zero_brackets.len()
        ));
        report
            .warnings
            .push("phi.csv and chi_perp.csv skipped".into());
        write_function(
            &dir,
            "potential.csv",
            &unchecked_potential(&s, &w)?,
            &mut report,
        )?;
        write_function(&dir, "wronskian.csv", &w, &mut report)?;
        write_report(&dir, "report.json", &report)?;
        return Ok(report);
    }
    let r = transform(
        &s.tower,
        &s.potential,
        &psi,
        energy,
        cfg.order,
        cfg.integral_constant()?,
    )?;
    fill_result(&mut report, &r)?;
    write_function(&dir, "potential.csv", &r.potential, &mut report)?;
    write_function(&dir, "phi.csv", &r.phi, &mut report)?;
    write_function(&dir, "chi_perp.csv", &r.chi_perp, &mut report)?;
    write_function(&dir, "wronskian.csv", &w, &mut report)?;
    write_report(&dir, "report.json", &report)?;
    Ok(report)
}

/// Regularity of `W_{u_0..u_{n-1}}` only; writes `wronskian.csv` and
/// `scan.json`. A singular Wronskian is recorded, see [`scan_outcome`].
pub fn cmd_scan(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::new("scan", cfg);
    let s = setup(cfg)?;
    report.levels = levels(&s.tower);
    let ground = match cfg.potential {
        PotentialConfig::PoschlTeller => Some(-1.0),
        PotentialConfig::Tabulated { .. } => None,
    };
    let reg = regularity(cfg, &s, cfg.energy.or(ground));
    report.regularity = Some((&reg).into());
    let dir = cfg.out.clone();
    ensure_dir(&dir)?;
    let w = s
        .tower
        .level(cfg.order - 1)
        .expect("tower depth equals order");
    write_function(&dir, "wronskian.csv", w, &mut report)?;
    let outcome = singular_outcome(cfg, &reg);
    if let Err(e) = &outcome {
        report.error = Some(e.to_string());
    }
    write_report(&dir, "scan.json", &report)?;
    Ok(report)
}

fn singular_outcome(cfg: &RunConfig, reg: &RegularityReport) -> Result<(), CliError> {
    if reg.is_regular {
        Ok(())
    } else {
        Err(CliError::Singular {
            what: format!("W_{{u_0..u_{}}}", cfg.order - 1),
            brackets: reg.zero_brackets.clone(),
        })
    }
}

/// Exit status of a scan report: singular if any zero was bracketed.
pub fn scan_outcome(report: &Report) -> Result<(), CliError> {
    match &report.regularity {
        Some(r) if !r.is_regular => Err(CliError::Singular {
            what: format!("W_{{u_0..u_{}}}", report.order - 1),
            brackets: r.zero_brackets.clone(),
        }),
        _ => Ok(()),
    }
}

/// Eigenvalues of `V_n` (or of `V_0` with `base`), written to
/// `spectrum.csv` as `index,value,error`.
pub fn cmd_spectrum(cfg: &RunConfig, count: Option<usize>, base: bool) -> Result<Report, CliError> {
    let mut report = Report::new("spectrum", cfg);
    let s = setup(cfg)?;
    let v = if base {
        s.potential.sample(&s.grid)?
    } else {
        let reg = regularity(cfg, &s, None);
        report.regularity = Some((&reg).into());
        if !reg.is_regular {
            return Err(CliError::Singular {
                what: format!("W_{{u_0..u_{}}}", cfg.order - 1),
                brackets: reg.zero_brackets,
            });
        }
        let (psi, energy) = solution(cfg, &s)?;
        transform(
            &s.tower,
            &s.potential,
            &psi,
            energy,
            cfg.order,
            cfg.integral_constant()?,
        )?
        .potential
    };
    let states = match count {
        Some(n) => spectrum(&v, n)?,
        None => bound_states(&v)?,
    };
    report.eigenvalues = states.iter().map(Eigenvalue::from).collect();
    let dir = cfg.out.clone();
    ensure_dir(&dir)?;
    let path = dir.join("spectrum.csv");
    fs::write(&path, spectrum_table(&report.eigenvalues))
        .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
    report.files.push("spectrum.csv".into());
    Ok(report)
}

pub fn spectrum_table(values: &[Eigenvalue]) -> String {
    let mut out = String::from("index,value,error\n");
    for (k, e) in values.iter().enumerate() {
        out.push_str(&format!("{k},{},{}\n", e.value, e.error));
    }
    out
}

/// Chain of order `depth` for the reconciliation check: closed forms for
/// Pöschl-Teller, otherwise integrated with each level starting from
/// `(0, u_0(x_min))`, which keeps the Wronskians at `x_min` nonzero.
fn check_chain(cfg: &RunConfig, s: &Setup, depth: usize) -> Result<JordanChain, CliError> {
    match seed(cfg, &s.grid, &s.potential)? {
        ChainSeed::PoschlTeller => Ok(pt_chain(
            &PtParams::from_lambda(cfg.lambda)?,
            depth,
            &s.grid,
        )?),
        seed @ ChainSeed::Initial { y0, dy0 } => {
            let mut spec = ChainSpec::new(cfg.lambda, seed);
            for _ in 0..depth {
                spec = spec.with_level(InnerConstants::from_initial_data(y0, dy0, 0.0, y0));
            }
            Ok(build_chain_ivp(spec, s.potential.clone(), s.grid)?)
        }
    }
}

fn chain_checks(cfg: &RunConfig, s: &Setup, tol: &Tolerances, defaults: &Tolerances) -> Vec<Check> {
    let depth = (cfg.order - 1).min(RECONCILIATION_DEPTH);
    let chain = match check_chain(cfg, s, depth) {
        Ok(c) => c,
        Err(e) => {
            return vec![Check::errored(
                "chain residual",
                tol.residual,
                e.to_string(),
            )]
        }
    };
    let mut checks = Vec::new();
    match verify_chain(&chain) {
        Ok(r) => {
            let worst = r.worst().map_or(0.0, |(_, res)| res.relative);
            checks.push(Check::measured(
                "chain residual",
                worst,
                tol.residual,
                defaults.residual,
            ));
        }
        Err(e) => checks.push(Check::errored(
            "chain residual",
            tol.residual,
            e.to_string(),
        )),
    }
    let name = "recursion vs determinant";
    let reconcile = || -> Result<f64, CliError> {
        let t = build_tower(&chain, &anchor_constants(&chain, depth)?)?;
        let mut worst = 0.0_f64;
        for k in 1..=depth {
            let d = direct_wronskian(&chain, k)?;
            worst = worst.max(max_relative_difference(
                t.level(k).expect("depth").values(),
                d.values(),
            ));
        }
        Ok(worst)
    };
    checks.push(match reconcile() {
        Ok(v) => {
            let mut c = Check::measured(name, v, tol.reconciliation, defaults.reconciliation);
            if depth == 0 {
                c.note = Some("order 1 has no recursion to compare".into());
            }
            c
        }
        Err(e) => Check::errored(name, tol.reconciliation, e.to_string()),
    });
    checks
}

fn transform_checks(r: &TransformResult, tol: &Tolerances, d: &Tolerances) -> Vec<Check> {
    let mut checks = vec![
        Check::measured(
            "Φ residual",
            r.residuals.phi.relative,
            tol.residual,
            d.residual,
        ),
        Check::measured(
            "χ residual",
            r.residuals.chi.relative,
            tol.residual,
            d.residual,
        ),
        Check::measured(
            "χ⊥ residual",
            r.residuals.chi_perp.relative,
            tol.residual,
            d.residual,
        ),
        Check::measured(
            "W(χ⊥, χ) - 1",
            r.pair_wronskian_deviation,
            tol.pair_wronskian,
            d.pair_wronskian,
        ),
    ];
    let top = r.tower.depth();
    match ChiLadder::new(&r.tower).and_then(|l| factorized_wronskian(&l, top)) {
        Ok(f) => {
            let v = max_relative_difference(f.values(), r.tower.level(top).expect("top").values());
            checks.push(Check::measured(
                "telescoping",
                v,
                tol.telescoping,
                d.telescoping,
            ));
        }
        Err(e) => checks.push(Check::errored(
            "telescoping",
            tol.telescoping,
            e.to_string(),
        )),
    }
    let bad: Vec<usize> = (1..=top)
        .filter(|&k| !r.tower.bracket_is_monotone(k))
        .collect();
    checks.push(Check::boolean(
        "brackets monotone",
        bad.is_empty(),
        (!bad.is_empty()).then(|| format!("levels {bad:?}")),
    ));
    let normalized = normalize_with_threshold(&r.phi, ORTHOGONALITY_DECAY).and_then(|a| {
        Ok((
            a,
            normalize_with_threshold(&r.chi_perp, ORTHOGONALITY_DECAY)?,
        ))
    });
    checks.push(match normalized {
        Ok((a, b)) => Check::measured(
            "∫ Φ χ⊥",
            overlap(&a, &b).abs(),
            tol.orthogonality,
            d.orthogonality,
        ),
        Err(e) => Check {
            value: f64::NAN,
            passed: true,
            skipped: true,
            note: Some(e.to_string()),
            ..Check::measured("∫ Φ χ⊥", 0.0, tol.orthogonality, d.orthogonality)
        },
    });
    checks
}

/// Runs every check and writes `verify.json`. Failed checks are recorded in
/// the report, see [`verification_outcome`].
pub fn cmd_verify(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::new("verify", cfg);
    let defaults = Tolerances::default();
    let tol = cfg.tolerances;
    let s = setup(cfg)?;
    let (psi, energy) = solution(cfg, &s)?;
    report.energy = Some(energy);
    report.levels = levels(&s.tower);
    let reg = regularity(cfg, &s, Some(energy));
    report.regularity = Some((&reg).into());
    if !reg.is_regular {
        return Err(CliError::Singular {
            what: format!("W_{{u_0..u_{}}}", cfg.order - 1),
            brackets: reg.zero_brackets,
        });
    }
    report.checks = chain_checks(cfg, &s, &tol, &defaults);
    let r = transform(
        &s.tower,
        &s.potential,
        &psi,
        energy,
        cfg.order,
        cfg.integral_constant()?,
    )?;
    fill_result(&mut report, &r)?;
    report.checks.extend(transform_checks(&r, &tol, &defaults));
    write_report(&cfg.out, "verify.json", &report)?;
    Ok(report)
}

/// Error naming the failed checks and their kind, if any failed.
pub fn verification_outcome(report: &Report) -> Result<(), CliError> {
    let failed: Vec<String> = report
        .failed_checks()
        .map(|c| {
            format!(
                "{} ({})",
                c.name,
                c.failure.unwrap_or(Failure::Correctness).label()
            )
        })
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join(", ")))
    }
}
