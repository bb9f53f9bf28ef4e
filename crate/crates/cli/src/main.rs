//! `confluent-susy transform|verify|spectrum|scan --config <path> [overrides]`

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod error;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{GridConfig, Overrides, RunConfig, OUT_ENV};
use error::CliError;
use run::Report;

#[derive(Parser, Debug)]
#[command(
    name = "confluent-susy",
    version,
    about = "Confluent SUSY transformations of 1-D Schrödinger problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build V_n, Φ_n and χ_n⊥ and export them as CSV.
    Transform {
        #[command(flatten)]
        common: Common,
        /// Emit output even if the Wronskian has zeros.
        #[arg(long)]
        force: bool,
    },
    /// Run the residual, reconciliation and pair-Wronskian checks.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Eigenvalues of the transformed potential.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Number of lowest eigenvalues; all bound states if omitted.
        #[arg(long)]
        count: Option<usize>,
        /// Use the untransformed potential.
        #[arg(long)]
        base: bool,
    },
    /// Locate zeros of the transformation Wronskian.
    Scan {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long)]
    order: Option<usize>,
    /// Comma-separated bracket constants, one per level.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    constants: Option<Vec<f64>>,
    /// `x_min,x_max,n_points`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<GridConfig>,
    /// Output directory; takes precedence over CONFLUENT_SUSY_OUT.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Single tolerance replacing every configured one.
    #[arg(long)]
    tol: Option<f64>,
}

impl Common {
    fn config(&self) -> Result<RunConfig, CliError> {
        let o = Overrides {
            lambda: self.lambda,
            order: self.order,
            constants: self.constants.clone(),
            grid: self.grid,
            out: self.out.clone(),
            tol: self.tol,
        };
        let env = std::env::var_os(OUT_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from);
        RunConfig::load(&self.config)?.resolve(&o, env)
    }
}

fn summary(r: &Report) {
    if let Some(reg) = &r.regularity {
        println!(
            "regular: {} (min |W| {:.3e}, {} zero bracket(s))",
            reg.is_regular,
            reg.min_abs_w,
            reg.zero_brackets.len()
        );
    }
    if let Some(res) = &r.residuals {
        println!(
            "residuals: Φ {:.2e}, χ {:.2e}, χ⊥ {:.2e}",
            res.phi, res.chi, res.chi_perp
        );
    }
    for c in &r.checks {
        let verdict = match (c.passed, c.skipped) {
            (_, true) => "skipped".to_string(),
            (true, false) => "pass".to_string(),
            (false, false) => format!(
                "FAIL ({})",
                c.failure.unwrap_or(run::Failure::Correctness).label()
            ),
        };
        match &c.note {
            Some(n) => println!(
                "{}: {verdict} ({:.3e} vs {:.1e}; {n})",
                c.name, c.value, c.tolerance
            ),
            None => println!(
                "{}: {verdict} ({:.3e} vs {:.1e})",
                c.name, c.value, c.tolerance
            ),
        }
    }
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Transform { common, force } => {
            let cfg = common.config()?;
            let r = run::cmd_transform(&cfg, force)?;
            summary(&r);
            if !r.eigenvalues.is_empty() {
                let values: Vec<String> = r
                    .eigenvalues
                    .iter()
                    .map(|e| format!("{:.6}", e.value))
                    .collect();
                println!("bound states: {}", values.join(", "));
            }
            println!("wrote {} to {}", r.files.join(", "), cfg.out.display());
        }
        Command::Verify { common } => {
            let r = run::cmd_verify(&common.config()?)?;
            summary(&r);
            run::verification_outcome(&r)?;
        }
        Command::Spectrum {
            common,
            count,
            base,
        } => {
            let cfg = common.config()?;
            let r = run::cmd_spectrum(&cfg, count, base)?;
            print!("{}", run::spectrum_table(&r.eigenvalues));
        }
        Command::Scan { common } => {
            let r = run::cmd_scan(&common.config()?)?;
            summary(&r);
            run::scan_outcome(&r)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
