use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lcft_cli::config::{Format, RunConfig};
use lcft_cli::error::CliError;
use lcft_cli::report::Report;
use lcft_cli::suites::{self, Suite, Symbol};

#[derive(Parser)]
#[command(name = "lcft", version, about = "Explicit local class field theory: cocycles, norm residue symbols and Weil groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Seed for sampled checks; overrides the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output format; overrides the configuration.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct ExtArgs {
    #[command(flatten)]
    common: Common,
    /// Extension name from the configuration.
    #[arg(long)]
    ext: String,
}

#[derive(Subcommand)]
enum Command {
    /// Build an extension and its automorphism group.
    Build(ExtArgs),
    /// The 2-cocycle attached to alpha.
    Cocycle(ExtArgs),
    /// Norm residue symbols: the eta table, eta(s) or theta(a).
    Nrs {
        #[command(flatten)]
        args: ExtArgs,
        /// theta(a) for a = "pi" or an integer.
        #[arg(long, conflicts_with = "eta")]
        theta: Option<String>,
        /// eta(s) for s = "id" or an automorphism index.
        #[arg(long)]
        eta: Option<String>,
    },
    /// Lifts of every automorphism to W(alpha) with the group law checks.
    Weil(ExtArgs),
    /// Run verification suites over the corpus, or one extension.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Suite to run; defaults to the configuration's, else all.
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        /// Restrict to one extension (towers are skipped).
        #[arg(long)]
        ext: Option<String>,
    },
}

fn run(cli: Cli) -> Result<(Report, Format), CliError> {
    let common = match &cli.command {
        Command::Build(a) | Command::Cocycle(a) | Command::Weil(a) | Command::Nrs { args: a, .. } => &a.common,
        Command::Verify { common, .. } => common,
    };
    let cfg = RunConfig::load(&common.config)?;
    let seed = common.seed.unwrap_or(cfg.seed);
    let format = common.format.unwrap_or(cfg.format);
    let report = match &cli.command {
        Command::Build(a) => suites::build(&cfg, &a.ext, seed)?,
        Command::Cocycle(a) => suites::cocycle_cmd(&cfg, &a.ext, seed)?,
        Command::Weil(a) => suites::weil_cmd(&cfg, &a.ext, seed)?,
        Command::Nrs { args, theta, eta } => {
            let symbol = match (theta, eta) {
                (Some(a), _) => Symbol::Theta(a.clone()),
                (_, Some(s)) => Symbol::Eta(s.clone()),
                _ => Symbol::Table,
            };
            suites::nrs_cmd(&cfg, &args.ext, symbol, seed)?
        }
        Command::Verify { suite, ext, .. } => suites::verify(&cfg, suite.unwrap_or(cfg.suite), ext.as_deref(), seed)?,
    };
    Ok((report, format))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((report, format)) => {
            // a closed pipe (e.g. `| head`) is not an error worth reporting
            let _ = writeln!(std::io::stdout().lock(), "{}", report.render(format));
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("lcft: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
