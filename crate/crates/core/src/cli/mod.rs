//! The `qkgeo` command line: `verify`, `sweep`, `list`.
//!
//! Exit codes: 0 success, 1 a check failed or a sweep step left the
//! admissible domain, 2 usage or configuration error.

pub mod config;
pub mod sweep;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::verify::{run_suite, target::FAMILIES, Report, Verdict, CHECKS};

pub use config::{FileConfig, Format, Overrides, RunConfig, SEED_ENV};
pub use sweep::SweepSpec;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Usage or configuration problem (exit code 2).
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Parser)]
#[command(name = "qkgeo", version, about = "Verify hyper-Kähler and quaternionic Kähler identities numerically")]
pub struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// Target identifier, e.g. gabc:0,1,1,-1, bf:perturbed, cmap:2 (repeatable).
    #[arg(long = "target", value_name = "ID")]
    pub targets: Vec<String>,
    /// Where to write the full report (or CSV for sweeps).
    #[arg(long, value_name = "PATH")]
    pub out: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run named checks on targets.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated check names, or `all`.
        #[arg(long, value_name = "LIST")]
        checks: Option<String>,
        /// Tolerance for every check (`1e-8`) or one check (`einstein=1e-6`); repeatable.
        #[arg(long, value_name = "TOL")]
        tol: Vec<String>,
        #[arg(long, value_name = "N")]
        samples: Option<usize>,
        #[arg(long, value_name = "SEED")]
        seed: Option<u64>,
    },
    /// Tabulate a closed-form quantity against its numerical value.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// `quantity:param:lo:hi:steps`, e.g. curvnorm:rho:0.5:5:50.
        #[arg(long, value_name = "SPEC")]
        sweep: Option<String>,
    },
    /// Show the registered targets and checks.
    List,
}

/// Serialized form of a verification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub version: String,
    pub config: RunConfig,
    pub reports: Vec<Report>,
}

impl Document {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.verdict != Verdict::Fail)
    }

    /// Human-readable summary; identical for a document and its JSON
    /// round trip.
    pub fn summary(&self) -> String {
        let c = &self.config;
        let mut out = format!(
            "qkgeo {} seed {} samples {}\n",
            self.version, c.seed, c.samples
        );
        for r in &self.reports {
            out.push_str(&r.summary());
            out.push('\n');
        }
        let count = |v: Verdict| self.reports.iter().filter(|r| r.verdict == v).count();
        out.push_str(&format!(
            "{} checks: {} passed, {} failed, {} skipped\n",
            self.reports.len(),
            count(Verdict::Pass),
            count(Verdict::Fail),
            count(Verdict::Skip)
        ));
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.summary(),
            Format::Json => self.to_json(),
        }
    }
}

/// Listing printed by `qkgeo list`.
pub fn listing() -> String {
    let mut out = String::from("targets:\n");
    for (_, desc) in FAMILIES {
        out.push_str(&format!("  {desc}\n"));
    }
    out.push_str("checks:\n");
    for c in CHECKS.iter() {
        out.push_str(&format!("  {:<21} tol {:.0e}  {}\n", c.name, c.tolerance, c.summary));
    }
    out
}

fn load_file(path: Option<&PathBuf>) -> Result<FileConfig, UsageError> {
    path.map_or_else(|| Ok(FileConfig::default()), |p| FileConfig::load(p))
}

fn write_out(path: &str, content: &str) -> Result<(), UsageError> {
    std::fs::write(path, content).map_err(|e| UsageError(format!("cannot write {path}: {e}")))
}

/// Runs `verify` with a resolved configuration.
pub fn verify(config: RunConfig) -> Result<Document, UsageError> {
    let reports = run_suite(&config.specs()).map_err(|e| UsageError(e.to_string()))?;
    Ok(Document {
        version: VERSION.to_string(),
        config,
        reports,
    })
}

struct Outcome {
    stdout: String,
    code: u8,
}

fn execute(cli: Cli, env_seed: Option<String>) -> Result<Outcome, UsageError> {
    let file = load_file(cli.config.as_ref())?;
    match cli.command {
        Command::List => Ok(Outcome {
            stdout: listing(),
            code: EXIT_OK,
        }),
        Command::Verify {
            common,
            checks,
            tol,
            samples,
            seed,
        } => {
            let flags = Overrides {
                targets: common.targets,
                checks,
                tol,
                samples,
                seed,
                out: common.out,
                format: common.format,
                sweep: None,
            };
            let config = RunConfig::resolve(file, flags, env_seed)?;
            let (out, format) = (config.out.clone(), config.format);
            let doc = verify(config)?;
            let stdout = match &out {
                Some(path) => {
                    write_out(path, &doc.render(format))?;
                    doc.summary()
                }
                None => doc.render(format),
            };
            let code = if doc.passed() { EXIT_OK } else { EXIT_FAIL };
            Ok(Outcome { stdout, code })
        }
        Command::Sweep { common, sweep } => {
            let flags = Overrides {
                targets: common.targets,
                out: common.out,
                format: common.format,
                sweep,
                ..Default::default()
            };
            let config = RunConfig::resolve(file, flags, env_seed)?;
            let spec: SweepSpec = config
                .sweep
                .as_deref()
                .ok_or_else(|| UsageError("sweep needs --sweep quantity:param:lo:hi:steps".into()))?
                .parse()?;
            // the first default target is the gabc representative
            let target = config.targets[0].as_str();
            let base = sweep::sweep_params(target)?;
            let rows = sweep::run(&spec, &base);
            let csv = sweep::to_csv(&spec, &rows);
            let flagged: Vec<f64> = rows.iter().filter(|r| r.flagged()).map(|r| r.value).collect();
            if !flagged.is_empty() {
                eprintln!(
                    "qkgeo: {} sweep step(s) outside the admissible domain of {target}: {flagged:?}",
                    flagged.len()
                );
            }
            let stdout = match &config.out {
                Some(path) => {
                    write_out(path, &csv)?;
                    format!("{} rows written to {path}\n", rows.len())
                }
                None => csv,
            };
            let code = if flagged.is_empty() { EXIT_OK } else { EXIT_FAIL };
            Ok(Outcome { stdout, code })
        }
    }
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn main_with_args<I, T>(args: I, env_seed: Option<String>) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli, env_seed) {
        Ok(o) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(o.stdout.as_bytes());
            let _ = stdout.flush();
            o.code
        }
        Err(e) => {
            eprintln!("qkgeo: {e}");
            EXIT_USAGE
        }
    }
}
