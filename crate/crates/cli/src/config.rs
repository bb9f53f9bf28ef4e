//! Run configuration: a TOML file plus command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use confluent_susy::schrodinger::{Grid, PotentialSpec, TabulatedPotential};
use confluent_susy::susy_transform::IntegralConstant;
use confluent_susy::wronskian::ConstantConvention;

use crate::error::CliError;

/// Environment variable that replaces the configured output directory.
pub const OUT_ENV: &str = "CONFLUENT_SUSY_OUT";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
#[derive(Default)]
pub enum PotentialConfig {
    #[default]
    PoschlTeller,
    /// CSV with header `x,v`; relative paths resolve against the config file.
    Tabulated { file: PathBuf },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        let g = Grid::default_domain();
        Self {
            x_min: g.x_min(),
            x_max: g.x_max(),
            n_points: g.len(),
        }
    }
}

impl std::str::FromStr for GridConfig {
    type Err = String;

    /// `x_min,x_max,n_points`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected `x_min,x_max,n_points`, got `{s}`"));
        }
        let f = |p: &str| p.parse::<f64>().map_err(|e| format!("`{p}`: {e}"));
        Ok(Self {
            x_min: f(parts[0])?,
            x_max: f(parts[1])?,
            n_points: parts[2]
                .parse()
                .map_err(|e| format!("`{}`: {e}", parts[2]))?,
        })
    }
}

/// Where the bracket constants are anchored.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `C + ∫_{-∞}^x`.
    #[default]
    MinusInfinity,
    /// `C + ∫_{x_min}^x`.
    Anchor,
}

impl From<Convention> for ConstantConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::MinusInfinity => ConstantConvention::FromMinusInfinity,
            Convention::Anchor => ConstantConvention::Anchor,
        }
    }
}

/// Outermost constant of the transformed solution: `"match"` or a number.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum IntegralConstantConfig {
    Value(f64),
    Keyword(String),
}

impl Default for IntegralConstantConfig {
    fn default() -> Self {
        Self::Keyword("match".into())
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SeedConfig {
    pub y0: f64,
    pub dy0: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative residual of every Schrödinger and chain equation.
    pub residual: f64,
    /// Recursive against direct Wronskians.
    pub reconciliation: f64,
    /// `|W(χ⊥, χ) - 1|`.
    pub pair_wronskian: f64,
    /// `|∫ Φ χ⊥|` after normalization.
    pub orthogonality: f64,
    /// Product of the χ ladder against the top Wronskian.
    pub telescoping: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual: 1e-5,
            reconciliation: 1e-5,
            pair_wronskian: 1e-4,
            orthogonality: 1e-4,
            telescoping: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Self {
            residual: tol,
            reconciliation: tol,
            pair_wronskian: tol,
            orthogonality: tol,
            telescoping: tol,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub potential: PotentialConfig,
    pub lambda: f64,
    pub order: usize,
    /// One bracket constant per tower level, `c_1..c_order`.
    pub constants: Vec<f64>,
    #[serde(default)]
    pub convention: Convention,
    /// Energy of the transformed solution; the ground state of `V_0` if unset.
    #[serde(default)]
    pub energy: Option<f64>,
    #[serde(default)]
    pub integral_constant: IntegralConstantConfig,
    /// Initial data of `u_0` at `x_min` for potentials without a closed form.
    #[serde(default)]
    pub seed: Option<SeedConfig>,
    #[serde(default)]
    pub grid: GridConfig,
    /// Output directory, relative to the working directory.
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Directory the table path resolves against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// Values given on the command line; each replaces its config entry.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub lambda: Option<f64>,
    pub order: Option<usize>,
    pub constants: Option<Vec<f64>>,
    pub grid: Option<GridConfig>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
}

impl RunConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let mut c: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        c.base_dir = base_dir.to_path_buf();
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, dir)
    }

    /// Applies overrides, then the output-directory environment variable
    /// unless `--out` was given, then validates.
    pub fn resolve(mut self, o: &Overrides, env_out: Option<PathBuf>) -> Result<Self, CliError> {
        if let Some(v) = o.lambda {
            self.lambda = v;
        }
        if let Some(v) = o.order {
            self.order = v;
        }
        if let Some(v) = &o.constants {
            self.constants = v.clone();
        }
        if let Some(v) = o.grid {
            self.grid = v;
        }
        if let Some(v) = o.tol {
            self.tolerances = Tolerances::uniform(v);
        }
        match (&o.out, env_out) {
            (Some(p), _) => self.out = p.clone(),
            (None, Some(p)) => self.out = p,
            (None, None) => {}
        }
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.order == 0 {
            return bad("order must be ≥ 1".into());
        }
        if self.constants.len() != self.order {
            return bad(format!(
                "order {} needs {} constants, got {}",
                self.order,
                self.order,
                self.constants.len()
            ));
        }
        if !self.lambda.is_finite() || self.constants.iter().any(|c| !c.is_finite()) {
            return bad("lambda and constants must be finite".into());
        }
        if let Some(e) = self.energy {
            if e == self.lambda {
                return bad("energy must differ from lambda".into());
            }
        }
        let t = &self.tolerances;
        let tols = [
            t.residual,
            t.reconciliation,
            t.pair_wronskian,
            t.orthogonality,
            t.telescoping,
        ];
        if tols.iter().any(|v| !(*v > 0.0)) {
            return bad("tolerances must be positive".into());
        }
        self.integral_constant()?;
        match self.potential {
            PotentialConfig::PoschlTeller if !(self.lambda < 0.0) => bad(format!(
                "Pöschl-Teller seed needs lambda < 0, got {}",
                self.lambda
            )),
            _ => Ok(()),
        }
    }

    pub fn integral_constant(&self) -> Result<IntegralConstant, CliError> {
        match &self.integral_constant {
            IntegralConstantConfig::Value(v) => Ok(IntegralConstant::Value(*v)),
            IntegralConstantConfig::Keyword(k) if k == "match" => {
                Ok(IntegralConstant::MatchAtAnchor)
            }
            IntegralConstantConfig::Keyword(k) => Err(CliError::Config(format!(
                "integral_constant must be a number or \"match\", got \"{k}\""
            ))),
        }
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        let g = self.grid;
        Grid::new(g.x_min, g.x_max, g.n_points).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Loads the potential and checks that it covers the grid.
    pub fn potential(&self, grid: &Grid) -> Result<PotentialSpec, CliError> {
        match &self.potential {
            PotentialConfig::PoschlTeller => Ok(PotentialSpec::PoschlTeller),
            PotentialConfig::Tabulated { file } => {
                let path = self.base_dir.join(file);
                let t = TabulatedPotential::from_path(&path)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                if !t.covers(grid) {
                    let (a, b) = t.domain();
                    return Err(CliError::Config(format!(
                        "table covers [{a}, {b}] but the grid spans [{}, {}]",
                        grid.x_min(),
                        grid.x_max()
                    )));
                }
                Ok(PotentialSpec::Tabulated(t))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = r#"
lambda = -0.5
order = 4
constants = [0.0, 0.0, 50.0, 0.0]
"#;

    #[test]
    fn defaults_and_overrides() {
        let c = RunConfig::from_toml(FIG1, Path::new("/cfg")).unwrap();
        assert_eq!(c.potential, PotentialConfig::PoschlTeller);
        assert_eq!(c.convention, Convention::MinusInfinity);
        assert_eq!(c.grid.n_points, 6001);
        let o = Overrides {
            lambda: Some(-0.6),
            tol: Some(1e-12),
            ..Default::default()
        };
        let r = c.clone().resolve(&o, None).unwrap();
        assert_eq!(r.lambda, -0.6);
        assert_eq!(r.tolerances.telescoping, 1e-12);
        assert_eq!(r.out, PathBuf::from("out"));
        let r = c
            .resolve(&Overrides::default(), Some("/env".into()))
            .unwrap();
        assert_eq!(r.out, PathBuf::from("/env"));
    }

    #[test]
    fn rejects_inconsistent_order() {
        let c = RunConfig::from_toml(FIG1, Path::new(".")).unwrap();
        let o = Overrides {
            order: Some(5),
            ..Default::default()
        };
        assert!(matches!(c.resolve(&o, None), Err(CliError::Config(_))));
        assert!(RunConfig::from_toml(
            "lambda = -1\norder = 1\nconstants = [0]\nbogus = 1",
            Path::new(".")
        )
        .is_err());
    }

    #[test]
    fn integral_constant_forms() {
        let mut c = RunConfig::from_toml(FIG1, Path::new(".")).unwrap();
        assert_eq!(
            c.integral_constant().unwrap(),
            IntegralConstant::MatchAtAnchor
        );
        c.integral_constant = IntegralConstantConfig::Value(0.5);
        assert_eq!(c.integral_constant().unwrap(), IntegralConstant::Value(0.5));
        c.integral_constant = IntegralConstantConfig::Keyword("other".into());
        assert!(c.integral_constant().is_err());
    }

    #[test]
    fn grid_parsing() {
        let g: GridConfig = "-10, 10, 401".parse().unwrap();
        assert_eq!(g.n_points, 401);
        assert!("1,2".parse::<GridConfig>().is_err());
        assert!("1,2,x".parse::<GridConfig>().is_err());
    }
}
