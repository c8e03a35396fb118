//! `eigenpoly`: eigenpolytopes, spectral certificates and Izmestiev matrices
//! from the command line.

mod commands;
mod input;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eigenpoly::{catalog, certify, geometry, graphs, izmestiev, metrics, spectra};
use serde_json::{json, Value};
use thiserror::Error;

use input::InputArgs;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unreadable input: {0}")]
    Input(String),
    #[error("cannot write output: {0}")]
    Output(String),
    #[error(transparent)]
    Graph(#[from] graphs::GraphError),
    #[error(transparent)]
    Spectrum(#[from] spectra::SpectrumError),
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Certify(#[from] certify::CertifyError),
    #[error(transparent)]
    Izmestiev(#[from] izmestiev::IzmestievError),
    #[error(transparent)]
    Metrics(#[from] metrics::MetricsError),
    #[error(transparent)]
    Catalog(#[from] catalog::CatalogError),
}

impl CliError {
    /// Stable code printed with the message; also the process exit status.
    pub fn code(&self) -> (u8, &'static str) {
        match self {
            CliError::Config(_) => (2, "config"),
            CliError::Input(_) | CliError::Graph(_) => (3, "input"),
            CliError::Output(_) => (4, "output"),
            CliError::Spectrum(_) => (10, "spectrum"),
            CliError::Geometry(_) => (11, "geometry"),
            CliError::Certify(_) => (12, "certify"),
            CliError::Izmestiev(_) => (13, "izmestiev"),
            CliError::Metrics(_) => (14, "metrics"),
            CliError::Catalog(_) => (15, "catalog"),
        }
    }
}

/// Exit status of `catalog` when some entry disagrees with its expectation.
pub const CATALOG_MISMATCH: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "eigenpoly", version, about = "Eigenpolytopes of graphs and spectral certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Grouped adjacency spectrum of a graph.
    Spectrum(RunArgs),
    /// Eigenpolytope of a graph (or hull of a point set) with OFF/JSON output.
    Polytope(RunArgs),
    /// Spectral certificate of a graph at index k, or of a polytope.
    Certify(RunArgs),
    /// Izmestiev matrix of a polytope, its audit and the theta2 criterion.
    Izmestiev {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value = "ridge")]
        scheme: SchemeArg,
        /// Finite-difference step.
        #[arg(long, default_value_t = izmestiev::DEFAULT_STEP)]
        step: f64,
        #[arg(long, default_value_t = izmestiev::DEFAULT_AUDIT_TOL)]
        tol_audit: f64,
    },
    /// Edge-length and dihedral-angle identities of a polytope.
    Metrics(RunArgs),
    /// Recompute every catalog expectation.
    Catalog {
        #[command(flatten)]
        tol: TolArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Largest scale class to include.
        #[arg(long, value_enum, default_value = "fast")]
        class: ClassArg,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SchemeArg {
    Ridge,
    Fd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClassArg {
    Fast,
    Slow,
    Stretch,
}

#[derive(Args, Debug, Clone)]
pub struct TolArgs {
    /// Eigenvalue grouping tolerance, relative to the spectral norm.
    #[arg(long, default_value_t = spectra::DEFAULT_GROUPING_TOL)]
    pub tol_grouping: f64,
    /// Hull tolerance, relative to the largest point norm.
    #[arg(long, default_value_t = geometry::DEFAULT_HULL_TOL)]
    pub tol_hull: f64,
    /// Balance residual tolerance used by certificates.
    #[arg(long, default_value_t = certify::DEFAULT_BALANCE_TOL)]
    pub tol_balance: f64,
    /// Relative spread allowed by the theta2 criterion.
    #[arg(long, default_value_t = izmestiev::DEFAULT_CRITERION_TOL)]
    pub tol_criterion: f64,
}

impl TolArgs {
    fn validate(&self) -> Result<(), CliError> {
        for (name, v) in self.pairs() {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Config(format!("--{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    fn pairs(&self) -> [(&'static str, f64); 4] {
        [
            ("tol-grouping", self.tol_grouping),
            ("tol-hull", self.tol_hull),
            ("tol-balance", self.tol_balance),
            ("tol-criterion", self.tol_criterion),
        ]
    }

    fn to_json(&self) -> Value {
        Value::Object(self.pairs().iter().map(|(k, v)| (k.replace('-', "_"), json!(v))).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Json,
    Off,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    /// Artifact formats; printed to stdout unless --out is given.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub emit: Vec<Emit>,
    /// Directory for artifacts (created if missing).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// 1-based eigenvalue index in descending order.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[command(flatten)]
    pub tol: TolArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

impl RunArgs {
    fn validate(&self) -> Result<(), CliError> {
        if self.k == 0 {
            return Err(CliError::Config("--k must be at least 1".into()));
        }
        self.tol.validate()
    }

    fn config(&self) -> Value {
        json!({"input": self.input.describe(), "k": self.k, "tolerances": self.tol.to_json()})
    }
}

/// What a command produced: a human summary, artifacts and status lines.
pub struct Report {
    pub summary: String,
    pub result: Value,
    pub csv: Option<String>,
    pub off: Option<String>,
    /// Status messages and warnings, printed to stderr.
    pub notes: Vec<String>,
    pub exit: u8,
}

impl Report {
    pub fn new(summary: String, result: Value) -> Self {
        Report { summary, result, csv: None, off: None, notes: Vec::new(), exit: 0 }
    }
}

fn artifact(command: &str, config: Value, result: Value) -> String {
    let doc = json!({
        "eigenpoly": {"version": env!("CARGO_PKG_VERSION"), "command": command},
        "config": config,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("artifact serializes");
    s.push('\n');
    s
}

fn deliver(command: &str, config: Value, out: &OutArgs, report: Report) -> Result<u8, CliError> {
    for note in &report.notes {
        eprintln!("{note}");
    }
    let mut files: Vec<(String, String)> = Vec::new();
    for e in &out.emit {
        match e {
            Emit::Json => files.push((format!("{command}.json"), artifact(command, config.clone(), report.result.clone()))),
            Emit::Csv => match &report.csv {
                Some(c) => files.push((format!("{command}.csv"), c.clone())),
                None => eprintln!("note: {command} has no CSV form"),
            },
            Emit::Off => match &report.off {
                Some(o) => files.push((format!("{command}.off"), o.clone())),
                None => eprintln!("note: no OFF output for this command or dimension"),
            },
        }
    }
    match &out.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
            print!("{}", report.summary);
            for (name, body) in &files {
                let path = dir.join(name);
                fs::write(&path, body).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
                println!("wrote {}", path.display());
            }
        }
        None if out.emit.is_empty() => print!("{}", report.summary),
        None => {
            for (_, body) in &files {
                print!("{body}");
            }
        }
    }
    Ok(report.exit)
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("EIGENPOLY_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Config(format!("EIGENPOLY_THREADS must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    configure_threads()?;
    match cli.command {
        Command::Spectrum(a) => {
            a.validate()?;
            deliver("spectrum", a.config(), &a.out, commands::spectrum_cmd(&a)?)
        }
        Command::Polytope(a) => {
            a.validate()?;
            deliver("polytope", a.config(), &a.out, commands::polytope(&a)?)
        }
        Command::Certify(a) => {
            a.validate()?;
            deliver("certify", a.config(), &a.out, commands::certify(&a)?)
        }
        Command::Izmestiev { run, scheme, step, tol_audit } => {
            run.validate()?;
            if !(step.is_finite() && step > 0.0 && tol_audit.is_finite() && tol_audit > 0.0) {
                return Err(CliError::Config("--step and --tol-audit must be positive".into()));
            }
            let mut config = run.config();
            config["scheme"] = json!(format!("{scheme:?}").to_lowercase());
            config["step"] = json!(step);
            config["tolerances"]["tol_audit"] = json!(tol_audit);
            deliver("izmestiev", config, &run.out, commands::izmestiev(&run, scheme, step, tol_audit)?)
        }
        Command::Metrics(a) => {
            a.validate()?;
            deliver("metrics", a.config(), &a.out, commands::metrics(&a)?)
        }
        Command::Catalog { tol, out, class } => {
            tol.validate()?;
            let class = match class {
                ClassArg::Fast => catalog::ScaleClass::Fast,
                ClassArg::Slow => catalog::ScaleClass::Slow,
                ClassArg::Stretch => catalog::ScaleClass::Stretch,
            };
            let config = json!({"class": format!("{class:?}").to_lowercase(), "tolerances": tol.to_json()});
            deliver("catalog", config, &out, commands::catalog(&tol, class)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let (code, tag) = e.code();
            eprintln!("error[{tag}]: {e}");
            ExitCode::from(code)
        }
    }
}
