//! `strata` — exact checks for affine Hecke algebras of type A and the
//! geometry of their parameter spaces: stratifications, fiber algebras,
//! equivalence certificates, and glued non-separated models.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use strata_cli::commands;
use strata_cli::input::{
    load, CliError, HeckeCheckRequest, DEFAULT_PRODUCTS, DEFAULT_RADIUS, DEFAULT_SEED,
    DEFAULT_TRIPLES,
};
use strata_cli::report::ReportFormat;

#[derive(Parser)]
#[command(
    name = "strata",
    version,
    about = "Exact tools for affine Hecke algebras and their parameter geometry"
)]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    report: ReportFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hecke-algebra relation checks.
    Hecke {
        #[command(subcommand)]
        command: HeckeCommand,
    },
    /// Stratification and component census of a finite torus action.
    Exquo {
        /// Action descriptor file.
        #[arg(long)]
        action: PathBuf,
        /// 2-cocycle file; switches to the twisted quotient.
        #[arg(long)]
        cocycle: Option<PathBuf>,
        /// Cross-check fiber sizes over all m-torsion points.
        #[arg(long)]
        m: Option<i64>,
    },
    /// Fiber of an algebra family at a point: dimension, radical, blocks.
    Fiber {
        /// Algebra family descriptor file.
        #[arg(long)]
        algebra: PathBuf,
        /// Point: a file or an inline JSON array of scalars.
        #[arg(long)]
        point: String,
    },
    /// Verify a stratified-equivalence certificate at sample points.
    Certify {
        /// Certificate file.
        #[arg(long)]
        certificate: PathBuf,
        /// Samples file: a JSON array of points.
        #[arg(long)]
        samples: PathBuf,
    },
    /// Multiplicity, closure, and comparison queries on glued models.
    Glue {
        /// Model descriptor file.
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum)]
        query: GlueQuery,
        /// Piece of the model the point lives on.
        #[arg(long, default_value_t = 0)]
        piece: usize,
        /// Set for closure queries: "whole", "punctured-line", inline JSON,
        /// or a file.
        #[arg(long)]
        set: Option<String>,
        /// Point: "origin", inline JSON, or a file; append ":k" to pick
        /// copy k (numbered from 1).
        #[arg(long)]
        point: Option<String>,
        /// Second model for compare queries.
        #[arg(long)]
        with: Option<PathBuf>,
    },
    /// Run the built-in acceptance suite.
    Selftest {
        /// Run a single criterion (1–10) instead of all ten.
        #[arg(long)]
        criterion: Option<usize>,
    },
}

#[derive(Subcommand)]
enum HeckeCommand {
    /// Quadratic relation, associativity sample, and q = 1 specialization.
    Check {
        /// Root-system spec, e.g. "A_SL:3".
        #[arg(long, conflicts_with = "request")]
        spec: Option<String>,
        /// Ball radius the samples are drawn from.
        #[arg(long, default_value_t = DEFAULT_RADIUS)]
        radius: usize,
        /// Number of random associativity triples.
        #[arg(long, default_value_t = DEFAULT_TRIPLES)]
        triples: usize,
        /// Number of random products for the specialization check.
        #[arg(long, default_value_t = DEFAULT_PRODUCTS)]
        products: usize,
        /// Seed of the deterministic sampler.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Request file bundling the same parameters.
        #[arg(long)]
        request: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GlueQuery {
    Multiplicity,
    Closure,
    Compare,
}

fn run(cli: &Cli) -> Result<strata_cli::report::CommandOutput, CliError> {
    match &cli.command {
        Command::Hecke { command } => match command {
            HeckeCommand::Check { spec, radius, triples, products, seed, request } => {
                let req = match (spec, request) {
                    (_, Some(path)) => load::<HeckeCheckRequest>(path)?,
                    (Some(spec), None) => HeckeCheckRequest {
                        spec: spec.clone(),
                        radius: *radius,
                        triples: *triples,
                        products: *products,
                        seed: *seed,
                    },
                    (None, None) => {
                        return Err(CliError("pass --spec or --request".into()));
                    }
                };
                commands::hecke_check(&req)
            }
        },
        Command::Exquo { action, cocycle, m } => {
            commands::exquo(action, cocycle.as_deref(), *m)
        }
        Command::Fiber { algebra, point } => commands::fiber(algebra, point),
        Command::Certify { certificate, samples } => commands::certify(certificate, samples),
        Command::Glue { model, query, piece, set, point, with } => match query {
            GlueQuery::Multiplicity => {
                let point = point.as_deref().ok_or_else(|| {
                    CliError("multiplicity queries need --point".into())
                })?;
                commands::glue_multiplicity(model, *piece, point)
            }
            GlueQuery::Closure => {
                let set = set.as_deref().ok_or_else(|| {
                    CliError("closure queries need --set".into())
                })?;
                let point = point.as_deref().ok_or_else(|| {
                    CliError("closure queries need --point".into())
                })?;
                commands::glue_closure(model, *piece, set, point)
            }
            GlueQuery::Compare => {
                let with = with.as_deref().ok_or_else(|| {
                    CliError("compare queries need --with".into())
                })?;
                commands::glue_compare(model, with)
            }
        },
        Command::Selftest { criterion } => commands::selftest(*criterion),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            // A consumer closing the pipe early (`strata ... | head`) is not
            // an error; keep the verdict's exit code.
            let _ = writeln!(io::stdout(), "{}", output.render(cli.report));
            if output.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
