use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use commands::{Outcome, Status};

/// Multiparking functions, Dirichlet configurations and descending traversals.
///
/// Exit status: 0 = verified, 1 = object rejected (a witness is printed),
/// 2 = unreadable input.
#[derive(Debug, Parser)]
#[command(name = "multipark", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Multiparking functions.
    Mp,
    /// Dirichlet configurations.
    Dc,
    /// Descending R-traversals.
    Dt,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Graph file: `n <count>` then `e <u> <v>` per edge, in edge order.
    #[arg(long)]
    graph: PathBuf,

    /// Comma-separated root vertices, e.g. `1,4`.
    #[arg(long)]
    roots: String,
}

#[derive(Debug, Args)]
pub struct ZetaArg {
    /// Choice function; only `std` (largest frontier edge, else smallest root).
    #[arg(long, default_value = "std")]
    zeta: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a multiparking function and print a burning order.
    CheckMp {
        #[command(flatten)]
        target: GraphArgs,
        /// Function values, `inf` at roots, e.g. `inf,1,1,inf`.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Check a Dirichlet configuration and print a certificate.
    CheckDc {
        #[command(flatten)]
        target: GraphArgs,
        /// Chip counts, `-inf` at roots, e.g. `-inf,1,1,-inf`.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Map a multiparking function to its Dirichlet configuration.
    Omega {
        #[command(flatten)]
        target: GraphArgs,
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Map a Dirichlet configuration back to its multiparking function.
    OmegaInv {
        #[command(flatten)]
        target: GraphArgs,
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Read the multiparking function off a descending traversal.
    Psi {
        #[command(flatten)]
        target: GraphArgs,
        #[command(flatten)]
        zeta: ZetaArg,
        /// Traversal, e.g. `v1,e4,e1,v4,e5,v3,e3,v2,e2`.
        #[arg(long)]
        traversal: String,
    },
    /// Build the canonical traversal of a multiparking function.
    Phi {
        #[command(flatten)]
        target: GraphArgs,
        #[command(flatten)]
        zeta: ZetaArg,
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Validate a descending R-traversal.
    ValidateDt {
        #[command(flatten)]
        target: GraphArgs,
        #[command(flatten)]
        zeta: ZetaArg,
        #[arg(long)]
        traversal: String,
    },
    /// Replay a Dirichlet certificate as an avalanche.
    Avalanche {
        #[command(flatten)]
        target: GraphArgs,
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        /// Firing order, e.g. `1,2,3,4`; defaults to a burning-derived certificate.
        #[arg(long)]
        order: Option<String>,
    },
    /// Fire ready vertices until the configuration is stable.
    Stabilize {
        #[command(flatten)]
        target: GraphArgs,
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// List every member of a family.
    Enumerate {
        #[arg(value_enum)]
        family: Family,
        #[command(flatten)]
        target: GraphArgs,
        #[command(flatten)]
        zeta: ZetaArg,
    },
    /// Cross-check all families on one graph, or on every graph up to a size.
    Crosscheck {
        /// Graph file; requires --roots.
        #[arg(long, requires = "roots", conflicts_with = "suite")]
        graph: Option<PathBuf>,
        #[arg(long)]
        roots: Option<String>,
        /// Check every labelled graph on at most this many vertices, with every valid root set.
        #[arg(long, required_unless_present = "graph")]
        suite: Option<usize>,
        #[command(flatten)]
        zeta: ZetaArg,
    },
}

fn run(cli: Cli) -> Result<Outcome, commands::InputError> {
    use Command::*;
    match cli.command {
        CheckMp { target, values } => commands::check_mp(&target, &values),
        CheckDc { target, values } => commands::check_dc(&target, &values),
        Omega { target, values } => commands::omega(&target, &values),
        OmegaInv { target, values } => commands::omega_inv(&target, &values),
        Psi { target, zeta, traversal } => commands::psi(&target, &zeta, &traversal),
        Phi { target, zeta, values } => commands::phi(&target, &zeta, &values),
        ValidateDt { target, zeta, traversal } => commands::validate_dt(&target, &zeta, &traversal),
        Avalanche { target, values, order } => commands::avalanche(&target, &values, order.as_deref()),
        Stabilize { target, values } => commands::stabilize(&target, &values),
        Enumerate { family, target, zeta } => commands::enumerate(family, &target, &zeta),
        Crosscheck { graph, roots, suite, zeta } => {
            commands::crosscheck(graph.as_deref(), roots.as_deref(), suite, &zeta)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok(outcome) => {
            let text = match format {
                Format::Human => outcome.human,
                Format::Json => {
                    serde_json::to_string_pretty(&outcome.json).expect("report serializes") + "\n"
                }
            };
            // a closed pipe downstream is not an error worth reporting
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            match outcome.status {
                Status::Verified => ExitCode::SUCCESS,
                Status::Rejected => ExitCode::from(1),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
