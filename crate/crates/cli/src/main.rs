use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

mod commands;

/// Qubit coherence conversion toolkit.
#[derive(Debug, Parser)]
#[command(name = "coherence", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal conversion probability, or reachability at a given `--p`.
    Convert {
        #[arg(long)]
        initial: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Boundary of the reachable x-z cross-section at probability `--p`.
    Region {
        #[arg(long)]
        initial: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 256)]
        n: usize,
    },
    /// Strictly incoherent instrument for a conversion.
    Synth {
        #[arg(long)]
        initial: String,
        #[arg(long)]
        target: String,
        /// Defaults to the optimal probability.
        #[arg(long)]
        p: Option<f64>,
    },
    /// Assisted conversion: a qubit is taken as Bob's marginal of a pure
    /// two-qubit state, a 4x4 matrix as the joint state.
    Assist {
        #[arg(long)]
        initial: String,
        #[arg(long)]
        target: Option<String>,
    },
    /// Werner-state assisted conversion.
    Werner {
        #[arg(long = "q-w")]
        q_w: f64,
        #[arg(long)]
        target: Option<String>,
        /// Samples of the threshold curve `s_max(s_z)`.
        #[arg(long)]
        n: Option<usize>,
    },
    /// All coherence measures of a state.
    Measures {
        #[arg(long)]
        initial: String,
    },
    /// Asymptotic rate bounds.
    Asymptotic {
        #[command(subcommand)]
        action: AsymptoticAction,
    },
    /// `(C_c, C_d)` along the boundary family of the achievable region.
    Irreversibility {
        #[arg(long, default_value_t = 256)]
        n: usize,
    },
    /// Compare the closed-form probability with the brute-force oracle.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::QubitGrid)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Targets per axis of the grid.
        #[arg(long, default_value_t = 15)]
        n: usize,
    },
    /// Simulate the two-path optical circuit, optionally with shot noise.
    Photonic {
        #[arg(long)]
        initial: String,
        /// Plate angle in degrees.
        #[arg(long)]
        theta0: f64,
        /// Plate angle in degrees.
        #[arg(long)]
        theta1: f64,
        /// Shots per Pauli basis.
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reconstruct the heralded state from a counts CSV (`-` reads stdin).
    Tomo { counts: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum AsymptoticAction {
    /// CSV of the bounds along the example family.
    Scan {
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
    /// Bounds for one pair of states.
    Bounds {
        #[arg(long)]
        initial: String,
        #[arg(long)]
        target: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    QubitGrid,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] coherence_core::Error),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use coherence_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Domain(E::Argument(_) | E::Parse(_)) => 2,
            _ => 1,
        }
    }

    fn kind(&self) -> &'static str {
        use coherence_core::Error as E;
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::Failed(_) => "check_failed",
            CliError::Domain(e) => match e {
                E::InvalidState(_) => "invalid_state",
                E::Dimension { .. } => "dimension",
                E::UnsupportedDimension(_) => "unsupported_dimension",
                E::Precondition(_) => "precondition",
                E::Argument(_) => "argument",
                E::Infeasible { .. } => "infeasible",
                E::UndefinedBound(_) => "undefined_bound",
                E::EmptyRecord => "empty_record",
                E::IncompleteData(_) => "incomplete_data",
                E::Parse(_) => "parse",
            },
        }
    }

    fn to_json(&self) -> Value {
        let mut v = json!({ "error": self.kind(), "message": self.to_string() });
        if let CliError::Domain(coherence_core::Error::Infeasible { violated }) = self {
            v["violated"] = json!(violated);
        }
        v
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Rendered command output.
pub enum Output {
    Json(Value),
    Text(String),
}

pub struct Report {
    pub output: Output,
    /// Set when the command's own check did not hold.
    pub failure: Option<String>,
}

impl From<Output> for Report {
    fn from(output: Output) -> Self {
        Report { output, failure: None }
    }
}

fn emit(out: Option<&PathBuf>, output: &Output) -> CliResult<()> {
    let text = match output {
        Output::Json(v) => serde_json::to_string_pretty(v).expect("values serialize") + "\n",
        Output::Text(t) => t.clone(),
    };
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn read_input(path: &PathBuf) -> CliResult<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Usage(e.render().to_string().trim().to_string())),
    };
    if let Err(e) = coherence_core::numeric::apply_env_override() {
        return fail(&CliError::Usage(e.to_string()));
    }
    let report = match commands::run(&cli.command, cli.format) {
        Ok(report) => report,
        Err(e) => return fail(&e),
    };
    if let Err(e) = emit(cli.out.as_ref(), &report.output) {
        return fail(&e);
    }
    // a failed check still writes its report so the failing rows can be inspected
    match report.failure {
        Some(msg) => fail(&CliError::Failed(msg)),
        None => ExitCode::SUCCESS,
    }
}
