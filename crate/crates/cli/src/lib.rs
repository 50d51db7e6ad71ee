//! Library side of the `pathsum` command-line tool.
//!
//! [`execute`] runs a parsed command and returns a [`Document`]; the binary
//! only renders it and maps failures to exit codes.

pub mod commands;
pub mod output;
pub mod validate;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pathsum_core::{Error, Truncation};

pub use output::{Document, Format};

/// Default number of series terms when `PATHSUM_MAX_TERMS` is unset.
pub const DEFAULT_MAX_TERMS: usize = 1_000_000;
pub const MAX_TERMS_ENV: &str = "PATHSUM_MAX_TERMS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "pathsum", version, about = "Discrete sum-over-histories numerics")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Relative truncation tolerance for every series.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol: f64,
    /// Significant digits for printed floats.
    #[arg(long, global = true, default_value_t = 15)]
    pub digits: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scope {
    All,
    Combinatorics,
    Kernel,
    Stats,
    Ensemble,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact multiplicity, its logarithm and the entropy of a path class.
    Multiplicity {
        #[arg(long, default_value_t = 1)]
        dim: u8,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        m1: Option<u64>,
        #[arg(long, default_value_t = 0)]
        m2: u64,
        #[arg(long, default_value_t = 0)]
        j: u64,
        #[arg(long, default_value_t = 0)]
        k: u64,
        #[arg(long, default_value_t = 0)]
        l: u64,
        #[arg(long, default_value_t = 1.0)]
        kb: f64,
    },
    /// Lists every step sequence with a given net displacement.
    Paths {
        #[arg(long, default_value_t = 1)]
        dim: u8,
        /// Net displacement per axis, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        net: Vec<i64>,
        #[arg(long)]
        total: u64,
        /// Keep only sequences with these per-axis flip counts.
        #[arg(long, value_delimiter = ',')]
        flips: Option<Vec<u64>>,
        #[arg(long, default_value_t = pathsum_core::combinatorics::DEFAULT_ENUMERATION_CAP)]
        cap: usize,
    },
    /// Truncated kernel sum in one or two dimensions.
    Kernel {
        #[arg(long, default_value_t = 1)]
        dim: u8,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        m: u64,
    },
    /// Convergence scan: kernel sum against exp(-b m^2).
    Fig2 {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        m: Vec<u64>,
        #[arg(long, default_value_t = 0.01)]
        b_min: f64,
        #[arg(long, default_value_t = 2.0)]
        b_max: f64,
        #[arg(long, default_value_t = 200)]
        n_points: usize,
    },
    /// Path-class probabilities P(j, m).
    Fig3 {
        #[arg(long, value_delimiter = ',', default_value = "2,5,10,50,100")]
        m: Vec<u64>,
        #[arg(long, default_value_t = 20)]
        j_max: u64,
    },
    /// Rotated-frame 2D probability with a comparison to a reference value.
    Prob2d {
        #[arg(long, default_value_t = 1)]
        m1: u64,
        #[arg(long, default_value_t = 1)]
        j: u64,
        #[arg(long, default_value_t = 1)]
        k: u64,
        /// Reference probability to compare against.
        #[arg(long, default_value_t = commands::QUOTED_P2D)]
        reference: f64,
    },
    /// Partial sums of the binomial-style alternative probability.
    Alt {
        #[arg(long, default_value_t = 2)]
        m: u64,
        #[arg(long, default_value_t = 1.5)]
        target: f64,
        #[arg(long, default_value_t = 10_000)]
        j_cap: u64,
    },
    /// Two-level ensemble matched to a 1D path class.
    Ensemble {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        j: u64,
        #[arg(long, default_value_t = 1.0)]
        energy: f64,
        #[arg(long, default_value_t = 1.0)]
        kb: f64,
    },
    /// Dimensionless b and the de Broglie check for physical parameters (SI).
    Physical {
        #[arg(long)]
        mass: f64,
        #[arg(long)]
        dx: f64,
        #[arg(long)]
        dt: f64,
        #[arg(long, default_value_t = commands::CODATA_HBAR)]
        hbar: f64,
        #[arg(long, default_value_t = commands::CODATA_KB)]
        kb: f64,
        /// Distance travelled in one time step, for the de Broglie check.
        #[arg(long)]
        distance: Option<f64>,
    },
    /// Closed-form propagator with heat-equation and normalization checks.
    Propagator {
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
    },
    /// Runs the oracle-versus-formula suites.
    Validate {
        #[arg(long, value_enum, default_value = "all")]
        scope: Scope,
    },
}

/// Failure carrying its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn cap(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CAP,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TermLimit { .. } | Error::CapExceeded { .. } => EXIT_CAP,
            Error::InvalidParameter { .. } | Error::Divergent(_) | Error::Domain(_) => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Result of a command: the document plus any named checks that failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub document: Document,
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn ok(document: Document) -> Self {
        Self {
            document,
            failures: Vec::new(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            EXIT_OK
        } else {
            EXIT_VALIDATION
        }
    }
}

/// Per-run settings shared by all commands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub trunc: Truncation,
    pub digits: usize,
}

impl RunConfig {
    pub fn from_opts(opts: &GlobalOpts, max_terms: Option<&str>) -> Result<Self, CliError> {
        if !(opts.tol.is_finite() && opts.tol > 0.0 && opts.tol < 1.0) {
            return Err(CliError::usage(format!(
                "invalid parameter `tol`: must lie in (0, 1), got {}",
                opts.tol
            )));
        }
        if !(1..=17).contains(&opts.digits) {
            return Err(CliError::usage(format!(
                "invalid parameter `digits`: must lie in 1..=17, got {}",
                opts.digits
            )));
        }
        let max_terms = match max_terms {
            None => DEFAULT_MAX_TERMS,
            Some(raw) => match raw.trim().parse::<usize>() {
                Ok(n) if n > 0 => n,
                _ => {
                    return Err(CliError::usage(format!(
                        "{MAX_TERMS_ENV} must be a positive integer, got {raw:?}"
                    )))
                }
            },
        };
        Ok(Self {
            trunc: Truncation::new(opts.tol).with_max_terms(max_terms),
            digits: opts.digits,
        })
    }
}

pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    use commands as c;
    match *command {
        Command::Multiplicity {
            dim,
            m,
            m1,
            m2,
            j,
            k,
            l,
            kb,
        } => c::multiplicity(dim, m.or(m1), m2, j, k, l, kb).map(Outcome::ok),
        Command::Paths {
            dim,
            ref net,
            total,
            ref flips,
            cap,
        } => c::paths(dim, net, total, flips.as_deref(), cap),
        Command::Kernel { dim, b, m } => c::kernel(dim, b, m, cfg).map(Outcome::ok),
        Command::Fig2 {
            ref m,
            b_min,
            b_max,
            n_points,
        } => c::fig2(m, b_min, b_max, n_points, cfg).map(Outcome::ok),
        Command::Fig3 { ref m, j_max } => c::fig3(m, j_max, cfg).map(Outcome::ok),
        Command::Prob2d { m1, j, k, reference } => c::prob2d(m1, j, k, reference, cfg).map(Outcome::ok),
        Command::Alt { m, target, j_cap } => c::alt(m, target, j_cap).map(Outcome::ok),
        Command::Ensemble { m, j, energy, kb } => c::ensemble(m, j, energy, kb).map(Outcome::ok),
        Command::Physical {
            mass,
            dx,
            dt,
            hbar,
            kb,
            distance,
        } => c::physical(mass, dx, dt, hbar, kb, distance).map(Outcome::ok),
        Command::Propagator { mass, hbar, x, t, h } => c::propagator(mass, hbar, x, t, h).map(Outcome::ok),
        Command::Validate { scope } => Ok(validate::run(scope, cfg)),
    }
}

/// Full run: configuration, execution, rendering and output. Returns the
/// exit code; diagnostics go to standard error.
pub fn run(cli: &Cli) -> i32 {
    let env = std::env::var(MAX_TERMS_ENV).ok();
    let result = RunConfig::from_opts(&cli.global, env.as_deref()).and_then(|cfg| {
        let outcome = execute(&cli.command, &cfg)?;
        let text = outcome.document.render(cli.global.format, cfg.digits);
        match &cli.global.out {
            Some(path) => output::write_atomic(path, &text)
                .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?,
            None => print!("{text}"),
        }
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            for name in &outcome.failures {
                eprintln!("pathsum: check failed: {name}");
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("pathsum: {e}");
            e.code
        }
    }
}
