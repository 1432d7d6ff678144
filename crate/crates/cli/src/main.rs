//! `bfv`: run the BFV pipelines of `bfv-core` on a setup file.
//!
//! Exit codes: 0 success or affirmative verdict, 1 negative verdict, 2 input
//! error, 3 internal invariant failure.

mod commands;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bfv_core::bfv::SetupSpec;
use bfv_core::{Error, Rational};

use crate::commands::Setup;
use crate::report::Report;

#[derive(Parser)]
#[command(
    name = "bfv",
    version,
    about = "Exact BFV computations for coisotropic submanifolds"
)]
struct Cli {
    /// Emit a JSON document instead of `key = value` lines.
    #[arg(long, global = true)]
    structured: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SetupArg {
    /// Path to a TOML setup file.
    #[arg(long)]
    setup: PathBuf,
}

#[derive(Args)]
struct ArityArgs {
    #[command(flatten)]
    setup: SetupArg,
    /// Largest arity to tabulate.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=6))]
    max_arity: u32,
}

#[derive(Args)]
struct SectionArgs {
    #[command(flatten)]
    setup: SetupArg,
    /// The component `μ_j(x)` of the section, once per fiber direction, in
    /// order.
    #[arg(long = "section", allow_hyphen_values = true)]
    sections: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Poisson and coisotropy conditions.
    Check(SetupArg),
    /// Build and print the BFV charge.
    Charge(SetupArg),
    /// Tabulate the derived brackets on all generator tuples.
    Shla(ArityArgs),
    /// Tabulate the transferred brackets and the comparison morphism.
    Transfer(ArityArgs),
    /// Extend a section to an MC element or report its obstruction.
    Mc {
        #[command(flatten)]
        section: SectionArgs,
        /// Degree bound for the coisotrope closure certificates.
        #[arg(long, default_value_t = 2)]
        degree_bound: u32,
    },
    /// Construct two extensions of a section and the gauge between them.
    Gauge {
        #[command(flatten)]
        section: SectionArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the invariant suite on a setup.
    Verify {
        #[command(flatten)]
        setup: SetupArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random samples per randomized check; 0 runs the structural checks
        /// only.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Order in epsilon for formal normalization; defaults to the setup
        /// file's `jet_order_eps`, then 3.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=6))]
        order: Option<u32>,
        /// Run the suite against a deliberately broken bracket sign.
        #[arg(long, hide = true)]
        debug_break_sign: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check(_) => "check",
            Command::Charge(_) => "charge",
            Command::Shla(_) => "shla",
            Command::Transfer(_) => "transfer",
            Command::Mc { .. } => "mc",
            Command::Gauge { .. } => "gauge",
            Command::Verify { .. } => "verify",
        }
    }
}

fn read_spec(arg: &SetupArg) -> Result<SetupSpec<Rational>, Error> {
    let text = std::fs::read_to_string(&arg.setup)
        .map_err(|e| Error::Argument(format!("cannot read {}: {e}", arg.setup.display())))?;
    SetupSpec::from_toml(&text)
}

fn load(arg: &SetupArg) -> Result<Setup, Error> {
    read_spec(arg)?.into_setup()
}

fn run(command: &Command) -> Result<Report, Error> {
    match command {
        Command::Check(arg) => commands::check(&read_spec(arg)?),
        Command::Charge(arg) => commands::charge(&load(arg)?),
        Command::Shla(args) => commands::shla(&load(&args.setup)?, args.max_arity as usize),
        Command::Transfer(args) => commands::transfer(&load(&args.setup)?, args.max_arity as usize),
        Command::Mc {
            section,
            degree_bound,
        } => {
            let setup = load(&section.setup)?;
            let mu = commands::parse_sections(&setup, &section.sections)?;
            commands::mc(&setup, &mu, *degree_bound)
        }
        Command::Gauge { section, seed } => {
            let setup = load(&section.setup)?;
            let mu = commands::parse_sections(&setup, &section.sections)?;
            commands::gauge(&setup, &mu, *seed)
        }
        Command::Verify {
            setup,
            seed,
            trials,
            order,
            debug_break_sign,
        } => {
            let setup = load(setup)?;
            let options = verify::Options {
                seed: *seed,
                trials: *trials,
                order: order.map(|o| o as usize),
                break_sign: *debug_break_sign,
            };
            Ok(verify::verify(&setup, &options))
        }
    }
}

fn exit_code(error: &Error) -> u8 {
    match error {
        Error::Internal(_) => 3,
        Error::Argument(_) | Error::Parse { .. } | Error::Precondition { .. } => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    match run(&cli.command) {
        Ok(report) => {
            if cli.structured {
                print!("{}", report.json());
            } else {
                print!("{}", report.text());
            }
            ExitCode::from(report.verdict().exit_code())
        }
        Err(error) => {
            let code = exit_code(&error);
            if cli.structured {
                print!("{}", report::error_json(name, code, &error.to_string()));
            }
            eprintln!("error: {error}");
            ExitCode::from(code)
        }
    }
}
