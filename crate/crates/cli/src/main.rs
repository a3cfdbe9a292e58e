//! `valstrat`: exact checks of valuative Lipschitz stratification
//! conditions from the command line.
//!
//! Exit codes: 0 when the evaluation completes, whatever the verdict;
//! 1 on input or oracle errors; with `--expect`, 0 iff the overall status
//! matches and 3 otherwise.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use valstrat::verdict::Status;

#[derive(Parser)]
#[command(name = "valstrat", version, about = "Exact checks of valuative Lipschitz stratification conditions over Q(eps)")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Exit 0 only if the overall verdict matches, 3 otherwise.
    #[arg(long, value_enum, global = true)]
    expect: Option<Expect>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Expect {
    Holds,
    Fails,
    Vacuous,
    Indeterminate,
}

impl Expect {
    fn status(self) -> Status {
        match self {
            Expect::Holds => Status::Holds,
            Expect::Fails => Status::Fails,
            Expect::Vacuous => Status::Vacuous,
            Expect::Indeterminate => Status::Indeterminate,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Grassmannian distance between two subspaces, e.g. "span[(1,0)]".
    Delta { w1: String, w2: String },
    /// Classify the points of a chain file.
    CheckValchain { file: PathBuf },
    /// Valuative Mostowski condition vm1 or vm2 at a chain file.
    CheckVm { file: PathBuf },
    /// Classical Mostowski condition with explicit constants.
    CheckClassical {
        file: PathBuf,
        /// Five positive elements c, c', C', C'', C'''.
        #[arg(long, default_value = "1/2, 1/2, 1, 2, 1")]
        constants: String,
    },
    /// Flag family checks and the flags lemma, from a family or a chain file.
    CheckFlags { file: PathBuf },
    /// Sedation inequalities on sample points.
    CheckSedated { file: PathBuf },
    /// Run every check on the chains of a bundled example.
    Demo { catalog: String },
    /// Run the bundled exact suites.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Delta { w1, w2 } => commands::delta_cmd(w1, w2),
        Command::CheckValchain { file } => commands::check_valchain(file),
        Command::CheckVm { file } => commands::check_vm(file),
        Command::CheckClassical { file, constants } => commands::check_classical(file, constants),
        Command::CheckFlags { file } => commands::check_flags(file),
        Command::CheckSedated { file } => commands::check_sedated(file),
        Command::Demo { catalog } => commands::demo(catalog),
        Command::Selftest => Ok(commands::selftest()),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match cli.format {
        Format::Text => print!("{}", report.text()),
        Format::Json => print!("{}", report.json()),
    }
    let selftest_failed = matches!(cli.command, Command::Selftest) && report.status() == Status::Fails;
    match cli.expect {
        Some(e) if report.status() == e.status() => ExitCode::SUCCESS,
        Some(_) => ExitCode::from(3),
        None if selftest_failed => ExitCode::from(1),
        None => ExitCode::SUCCESS,
    }
}
