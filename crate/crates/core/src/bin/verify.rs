//! `verify`: runs the check suites and prints a certificate.
//!
//! Exit status is 0 when every check passes, 1 when a mathematical check
//! fails and 2 on a usage or configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cacti_formality::suite::{
    run_all, run_axioms, run_homology, run_model, run_obstruction, SuiteOptions, SuiteRun,
    DEFAULT_SEED, DEFAULT_TRIALS,
};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "verify",
    version,
    about = "Exact F2 verification that D2 is not formal as a planar operad"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,

    /// Number of random lift trials in the obstruction suite.
    #[arg(long, global = true, default_value_t = DEFAULT_TRIALS as u32,
          value_parser = clap::value_parser!(u32).range(1..))]
    trials: u32,

    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Write the output here instead of stdout, only once every suite has run.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Record wall-clock durations in each report (breaks byte stability).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Operad axioms, the differential squaring to zero, worked examples.
    Axioms {
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(2..=5))]
        max_arity: u8,
    },
    /// Betti numbers of S(k).
    Homology {
        #[arg(value_parser = clap::value_parser!(u8).range(2..=5))]
        arity: u8,
    },
    /// Bigraded model rank suite, Gerstenhaber relations, monomial bases.
    Model,
    /// The first obstruction and the non-formality verdict.
    Obstruction,
    /// Every suite in order.
    All {
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(2..=5))]
        max_arity: u8,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let mut opts = SuiteOptions {
        trials: cli.trials as usize,
        seed: cli.seed,
        timings: cli.timings,
        ..SuiteOptions::default()
    };
    let run: SuiteRun = match cli.command {
        Command::Axioms { max_arity } => {
            opts.max_arity = max_arity as usize;
            run_axioms(&opts)
        }
        Command::Homology { arity } => run_homology(arity as usize, &opts),
        Command::Model => run_model(&opts),
        Command::Obstruction => run_obstruction(&opts),
        Command::All { max_arity } => {
            opts.max_arity = max_arity as usize;
            run_all(&opts)
        }
    };
    let rendered = match cli.format {
        Format::Text => run.to_text(),
        Format::Json => run.to_json_string(),
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &rendered) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{rendered}"),
    }
    if run.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
