//! `qpersuade`: solvers, oracles and benchmarks for persuading a
//! quantal-response receiver.
//!
//! Output goes to stdout as JSON (or CSV with `--csv`). Failures print a
//! JSON error object to stderr and exit with 2 for bad input or 3 for a
//! numeric failure.

mod commands;
mod spec;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use quantal_persuasion::error::Error;
use quantal_persuasion::model::{Instance, RationalityLevel};
use quantal_persuasion::oracle::DEFAULT_GRID_POINTS;
use serde_json::json;

use commands::{SimulateArgs, SolveArgs};
use spec::parse_levels;

#[derive(Parser)]
#[command(name = "qpersuade", version, about = "Signaling schemes for a quantal-response receiver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Instance JSON file.
    #[arg(long)]
    instance: String,
    /// Emit CSV instead of JSON.
    #[arg(long)]
    csv: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for a scheme at each requested level.
    Solve {
        #[command(flatten)]
        common: Common,
        /// sisu, sdsu-binary, pairwise, four-approx, censorship-approx,
        /// direct-approx or rational.
        #[arg(long)]
        mode: String,
        /// Levels: numbers, `inf`, `lo:hi:N` or `lo:hi:Nlog`, comma-separated.
        /// Defaults to `inf` for the rational mode.
        #[arg(long)]
        beta: Option<String>,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid_points: usize,
    },
    /// Worst-case ratio of a scheme to the optimum over a set of levels.
    Robust {
        #[command(flatten)]
        common: Common,
        /// Scheme file, `rational-censorship` or `binary-robust:K=<k>[,beta0=<b>]`.
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        beta: String,
    },
    /// Separation tables for the built-in instance families.
    Bench {
        /// sisu-direct, sdsu-lower or impossibility.
        #[arg(long)]
        family: String,
        /// State counts, `A..B` inclusive.
        #[arg(long)]
        m: Option<String>,
        /// Levels for the impossibility family (default 1,2,4,16).
        #[arg(long)]
        beta: Option<String>,
        #[arg(long)]
        csv: bool,
    },
    /// Grid LP upper bound, compared with the exact solver where one applies.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        beta: String,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid_points: usize,
        /// Add the exact solver's pooling signal to the grid.
        #[arg(long)]
        augment_analytic: bool,
    },
    /// Monte-Carlo check of response rates with Gumbel utility shocks.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// A single finite level.
        #[arg(long)]
        beta: String,
        /// Scheme file or built-in name; otherwise the scheme comes from `--mode`.
        #[arg(long)]
        scheme: Option<String>,
        /// Solver for the scheme; picked from the instance when omitted.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid_points: usize,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load_instance(path: &str) -> Result<Instance, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInstance(format!("cannot read '{path}': {e}")))?;
    Instance::from_json(&text)
}

fn run(cli: Cli) -> Result<String, Error> {
    match cli.command {
        Command::Solve { common, mode, beta, grid_points } => {
            let instance = load_instance(&common.instance)?;
            let beta = match (beta, mode.as_str()) {
                (Some(b), _) => b,
                (None, "rational") => "inf".into(),
                (None, _) => return Err(Error::InvalidArgument(format!("mode '{mode}' needs --beta"))),
            };
            let levels = parse_levels(&beta)?;
            commands::cmd_solve(SolveArgs { instance: &instance, mode: &mode, levels: &levels, grid_points, csv: common.csv })
        }
        Command::Robust { common, scheme, beta } => {
            let instance = load_instance(&common.instance)?;
            commands::cmd_robust(&instance, &scheme, &parse_levels(&beta)?, common.csv)
        }
        Command::Bench { family, m, beta, csv } => {
            let levels = beta.as_deref().map(parse_levels).transpose()?;
            commands::cmd_bench(&family, m.as_deref(), levels.as_deref(), csv)
        }
        Command::Oracle { common, beta, grid_points, augment_analytic } => {
            let instance = load_instance(&common.instance)?;
            commands::cmd_oracle(&instance, &parse_levels(&beta)?, grid_points, augment_analytic, common.csv)
        }
        Command::Simulate { common, beta, scheme, mode, grid_points, n, seed } => {
            let instance = load_instance(&common.instance)?;
            let level = match parse_levels(&beta)?[..] {
                [l @ RationalityLevel::Finite(_)] => l,
                _ => return Err(Error::InvalidArgument("simulate needs exactly one finite --beta".into())),
            };
            commands::cmd_simulate(SimulateArgs {
                instance: &instance,
                level,
                scheme: scheme.as_deref(),
                mode: mode.as_deref(),
                grid_points,
                n,
                seed,
                csv: common.csv,
            })
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidInstance(_) => "invalid_instance",
        Error::InvalidScheme(_) => "invalid_scheme",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::UnsupportedLevel(_) => "unsupported_level",
        Error::NotStateIndependent(_) => "not_state_independent",
        Error::Numeric(_) => "numeric",
        Error::Infeasible => "infeasible",
        Error::Unbounded => "unbounded",
        Error::SizeLimit(_) => "size_limit",
        Error::Json(_) => "json",
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|()| out.flush());
}

fn fail(kind: &str, message: String, code: u8) -> ExitCode {
    eprintln!("{}", json!({ "error": { "kind": kind, "message": message } }));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            emit(&e.to_string());
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.to_string().trim().to_string(), 2),
    };
    match run(cli) {
        Ok(out) => {
            emit(&out);
            ExitCode::SUCCESS
        }
        Err(e) => fail(error_kind(&e), e.to_string(), if e.is_input_error() { 2 } else { 3 }),
    }
}
