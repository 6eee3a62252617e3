use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tsdirac_core::verify::{
    registry, run_suite, write_outputs, ReportFormat, Status, Suite, SuiteConfig, VerificationReport, MODEL_NAMES,
};
use tsdirac_core::Error;

#[derive(Parser)]
#[command(name = "tsdirac", version, about = "Run numerical checks of transversely symplectic Dirac operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a model, run checks and write a report. Exits 1 if any check fails.
    Check(Box<CheckArgs>),
    /// Print the check registry.
    ListChecks {
        /// Only checks of this suite (weyl, geometry, operator, spectral).
        #[arg(long)]
        suite: Option<String>,
    },
    /// Print the model catalog.
    ListModels,
}

#[derive(Args)]
struct CheckArgs {
    /// TOML file with the run configuration; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    /// Half the transverse dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Fiber truncation level L.
    #[arg(long)]
    level: Option<usize>,
    /// Fourier cutoff K.
    #[arg(long)]
    modes: Option<i32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Seed for the random model perturbations; defaults to --seed.
    #[arg(long)]
    model_seed: Option<u64>,
    /// Factor applied to every tolerance.
    #[arg(long)]
    tol_scale: Option<f64>,
    /// Holomorphic sectional curvature of chsc-fiber.
    #[arg(long, allow_hyphen_values = true)]
    h: Option<f64>,
    /// Size of the random or warped perturbation.
    #[arg(long)]
    amplitude: Option<f64>,
    /// Replace the connection by its J-compatible modification.
    #[arg(long)]
    j_compatible: bool,
    /// Comma-separated check or suite names.
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    /// Tolerance override, `name=value`; may be repeated.
    #[arg(long = "tolerance", value_name = "NAME=VALUE")]
    tolerances: Vec<String>,
    /// Report path; the report goes to stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// json or markdown.
    #[arg(long)]
    format: Option<String>,
    /// Write every computed eigenvalue to this CSV file.
    #[arg(long)]
    spectra_csv: Option<PathBuf>,
    /// Do not print the per-check summary to stderr.
    #[arg(long, short)]
    quiet: bool,
}

impl CheckArgs {
    fn into_config(self) -> Result<SuiteConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => SuiteConfig::from_file(path)?,
            None => SuiteConfig::default(),
        };
        if let Some(v) = self.model {
            cfg.model = v;
        }
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.level {
            cfg.level = v;
        }
        if let Some(v) = self.modes {
            cfg.modes = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if self.model_seed.is_some() {
            cfg.model_seed = self.model_seed;
        }
        if let Some(v) = self.tol_scale {
            cfg.tol_scale = v;
        }
        if let Some(v) = self.h {
            cfg.h = v;
        }
        if self.amplitude.is_some() {
            cfg.amplitude = self.amplitude;
        }
        cfg.j_compatible |= self.j_compatible;
        if !self.only.is_empty() {
            cfg.checks = self.only.into_iter().filter(|s| !s.trim().is_empty()).collect();
        }
        for t in &self.tolerances {
            let (name, value) = t
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("tolerance `{t}` is not of the form name=value")))?;
            let value: f64 =
                value.trim().parse().map_err(|_| Error::Config(format!("tolerance `{t}` has no numeric value")))?;
            cfg.tolerances.insert(name.trim().to_string(), value);
        }
        if self.report.is_some() {
            cfg.output.report = self.report;
        }
        if let Some(f) = self.format {
            cfg.output.format = ReportFormat::parse(&f)?;
        }
        if self.spectra_csv.is_some() {
            cfg.output.spectra_csv = self.spectra_csv;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn summary(report: &VerificationReport) {
    for c in &report.checks {
        let residual = c.residual.map_or("-".to_string(), |r| format!("{r:.2e}"));
        let note = match c.status {
            Status::Pass => String::new(),
            _ => c.note.clone().unwrap_or_default(),
        };
        eprintln!("{:<8} {:<42} {:>10}  {}", c.status.as_str(), c.name, residual, note);
    }
    eprintln!(
        "{}: {} pass, {} fail, {} skipped ({:.2}s)",
        report.status.as_str(),
        report.count(Status::Pass),
        report.count(Status::Fail),
        report.count(Status::Skipped),
        report.timing.total_seconds
    );
}

fn check(args: CheckArgs) -> Result<ExitCode, Error> {
    let quiet = args.quiet;
    let cfg = args.into_config()?;
    let report = run_suite(&cfg)?;
    write_outputs(&report, &cfg)?;
    if cfg.output.report.is_none() {
        println!("{}", report.render(cfg.output.format)?);
    }
    if !quiet {
        summary(&report);
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn list_checks(suite: Option<String>) -> Result<ExitCode, Error> {
    let suite = match suite {
        Some(s) => Some(
            Suite::ALL
                .into_iter()
                .find(|x| x.as_str() == s)
                .ok_or_else(|| Error::Config(format!("unknown suite `{s}`")))?,
        ),
        None => None,
    };
    for c in registry().into_iter().filter(|c| suite.is_none_or(|s| c.suite == s)) {
        println!("{:<42} {:<9} {:>7.0e}  {}", c.name, c.suite.as_str(), c.tolerance, c.anchor);
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(args) => check(*args),
        Command::ListChecks { suite } => list_checks(suite),
        Command::ListModels => {
            MODEL_NAMES.iter().for_each(|m| println!("{m}"));
            Ok(ExitCode::SUCCESS)
        }
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
