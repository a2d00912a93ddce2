//! Command-line entry point. Parses flags, resolves the effective seed and
//! tolerance, loads the problem file, and dispatches to the subcommand.
//! The process exit code is the final verdict: 0 pass, 1 fail, 2 input
//! error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use hojman::commands::{cmd_check, cmd_invariant, cmd_lagrangian, cmd_verify, ShowWhat, TheoremChoice};
use hojman::problem::{load_problem, resolve_seed_override, Problem};
use hojman::report::{emit, Record, Verdict};

/// Environment variable consulted for a seed when `--seed` is absent.
const SEED_ENV: &str = "HOJMAN_SEED";

#[derive(Parser)]
#[command(
    name = "hojman",
    version,
    about = "Construct and certify first integrals from symmetries and Jacobi multipliers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Problem file (JSON).
    file: PathBuf,

    /// Emit newline-delimited JSON records instead of human-readable lines.
    #[arg(long)]
    json: bool,

    /// Sampling seed; beats HOJMAN_SEED and the seed in the file.
    #[arg(long)]
    seed: Option<u64>,

    /// Relative tolerance for every symbolic-vs-numeric check.
    #[arg(long)]
    rtol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the supplied ingredients without constructing an invariant.
    Check {
        #[command(flatten)]
        common: Common,
    },
    /// Construct a first integral and certify that it is conserved.
    Invariant {
        #[command(flatten)]
        common: Common,

        /// Which construction to run.
        #[arg(long, value_enum, default_value = "auto")]
        theorem: TheoremChoice,
    },
    /// Certify an invariant pointwise and along an integrated trajectory.
    Verify {
        #[command(flatten)]
        common: Common,

        /// Which construction to run (ignored when the file has a `candidate`).
        #[arg(long, value_enum, default_value = "auto")]
        theorem: TheoremChoice,

        /// Integration step; overrides the file's `numeric.step`.
        #[arg(long)]
        step: Option<f64>,

        /// Time span; overrides the file's `numeric.span`.
        #[arg(long, num_args = 2, value_names = ["T0", "T1"])]
        span: Option<Vec<f64>>,

        /// Also write the trajectory as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print the objects derived from a Lagrangian problem.
    Lagrangian {
        #[command(flatten)]
        common: Common,

        /// Print only one family of derived objects.
        #[arg(long, value_enum)]
        show: Option<ShowWhat>,
    },
}

fn read_env_seed() -> Result<Option<u64>, String> {
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| format!("{SEED_ENV} must be an unsigned integer, got \"{text}\"")),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(std::env::VarError::NotUnicode(_)) => {
            Err(format!("{SEED_ENV} is not valid unicode"))
        }
    }
}

/// Emit an input-error report and return the matching exit code.
fn bail_input(json: bool, message: String) -> i32 {
    let records = [
        Record::ProblemError { message },
        Record::Verdict {
            verdict: Verdict::Error,
        },
    ];
    emit(&records, json);
    Verdict::Error.exit_code()
}

fn dispatch(
    common: &Common,
    run: impl FnOnce(&Problem) -> (Vec<Record>, Verdict),
) -> i32 {
    let env_seed = match read_env_seed() {
        Ok(seed) => seed,
        Err(message) => return bail_input(common.json, message),
    };
    let rtol = match common.rtol {
        Some(r) if !(r > 0.0 && r.is_finite()) => {
            return bail_input(
                common.json,
                format!("--rtol must be positive and finite, got {r}"),
            );
        }
        Some(r) => r,
        None => hojman_core::DEFAULT_RTOL,
    };
    let seed_override = resolve_seed_override(common.seed, env_seed);
    let problem = match load_problem(&common.file, seed_override, rtol) {
        Ok(problem) => problem,
        Err(e) => return bail_input(common.json, e.to_string()),
    };
    let (records, verdict) = run(&problem);
    emit(&records, common.json);
    verdict.exit_code()
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check { common } => dispatch(&common, cmd_check),
        Command::Invariant { common, theorem } => {
            dispatch(&common, |p| cmd_invariant(p, theorem))
        }
        Command::Verify {
            common,
            theorem,
            step,
            span,
            csv,
        } => dispatch(&common, |p| {
            cmd_verify(
                p,
                theorem,
                step,
                span.map(|v| (v[0], v[1])),
                csv.as_deref(),
            )
        }),
        Command::Lagrangian { common, show } => dispatch(&common, |p| cmd_lagrangian(p, show)),
    };
    std::process::exit(code);
}
