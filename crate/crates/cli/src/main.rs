//! `arrgate`: topological obstruction checks for line arrangement
//! combinatorics.

mod commands;
mod error;
mod render;
mod scan;

use arrgate_core::combinatorics::DEFAULT_SCAN_CAP;
use arrgate_core::enumerate::DEFAULT_NODE_BUDGET;
use arrgate_core::{Outcome, RealizationClass};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use commands::{CheckInput, EnumerateRequest};
use error::{CliError, EXIT_FAIL, EXIT_NOT_APPLICABLE, EXIT_PASS, EXIT_USAGE};
use render::ReportFormat;
use scan::{ScanFormat, ScanRequest};
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "arrgate",
    version,
    about = "Obstruction checks for line arrangement combinatorics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Realization {
    Pseudoline,
    Complex,
    LocallyFlat,
}

impl From<Realization> for RealizationClass {
    fn from(r: Realization) -> Self {
        match r {
            Realization::Pseudoline => RealizationClass::Pseudoline,
            Realization::Complex => RealizationClass::Complex,
            Realization::LocallyFlat => RealizationClass::LocallyFlat,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check an incidence file, or weak combinatorics given by --degree and --counts.
    Check {
        #[arg(conflicts_with_all = ["degree", "counts"], required_unless_present = "degree")]
        file: Option<PathBuf>,
        #[arg(long)]
        degree: Option<u64>,
        /// Multiplicity counts as `m:t_m` pairs, e.g. `2:3,3:1`.
        #[arg(long, requires = "degree", default_value = "")]
        counts: String,
        /// Also apply the classical inequalities for this realization class.
        #[arg(long, value_enum)]
        realization: Option<Realization>,
        #[arg(long, value_enum, default_value = "table")]
        format: ReportFormat,
    },
    /// One row per candidate weak combinatorics for each degree in range.
    Scan {
        d_min: u64,
        d_max: u64,
        /// Only odd multiplicities (at least 3).
        #[arg(long)]
        odd_only: bool,
        /// One row per degree with only triple points.
        #[arg(long)]
        triple_only: bool,
        #[arg(long, value_enum)]
        realization: Option<Realization>,
        #[arg(long, value_enum, default_value = "markdown")]
        format: ScanFormat,
        /// Largest degree for count-vector scans.
        #[arg(long, env = "ARRGATE_SCAN_CAP", default_value_t = DEFAULT_SCAN_CAP)]
        cap: u64,
    },
    /// All only-triple-point incidence structures on d lines, up to relabeling.
    Enumerate {
        degree: usize,
        /// Attach the blow-up lattice residue and verdict to every class.
        #[arg(long)]
        verify: bool,
        #[arg(long, env = "ARRGATE_ENUM_BUDGET_NODES", default_value_t = DEFAULT_NODE_BUDGET)]
        max_nodes: u64,
        #[arg(long, env = "ARRGATE_ENUM_BUDGET_SECS")]
        max_secs: Option<u64>,
        /// Permit degree 15.
        #[arg(long)]
        allow_slow: bool,
        /// Worker threads; defaults to one per core.
        #[arg(long)]
        workers: Option<usize>,
        /// Write the certificate here instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print a bundled fixture as an incidence file.
    Fixture {
        /// pencil, fano, dual_hesse or sts13.
        name: String,
        /// Degree for pencil, class index for sts13.
        param: Option<usize>,
    },
}

fn exit_for(outcome: Outcome) -> ExitCode {
    ExitCode::from(match outcome {
        Outcome::Pass => EXIT_PASS,
        Outcome::Fail => EXIT_FAIL,
        Outcome::NotApplicable => EXIT_NOT_APPLICABLE,
    })
}

/// A closed pipe downstream is not an error of ours.
fn emit(text: &str) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::io("<stdout>", e)),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Check {
            file,
            degree,
            counts,
            realization,
            format,
        } => {
            let input = match (&file, degree) {
                (Some(path), _) => CheckInput::File(path),
                (None, Some(degree)) => CheckInput::Counts {
                    degree,
                    counts: &counts,
                },
                (None, None) => return Err(CliError::Usage("give a file or --degree".into())),
            };
            let checked = commands::check(input, realization.map(Into::into))?;
            emit(&render::render(&checked.report, format))?;
            if let Some(expect) = checked.expect {
                if expect != checked.report.overall() {
                    eprintln!(
                        "note: file expects {expect}, checks give {}",
                        checked.report.overall()
                    );
                }
            }
            Ok(exit_for(checked.report.overall()))
        }
        Command::Scan {
            d_min,
            d_max,
            odd_only,
            triple_only,
            realization,
            format,
            cap,
        } => {
            let req = ScanRequest {
                d_min,
                d_max,
                odd_only,
                triple_only,
                realization: realization.map(Into::into),
                cap,
            };
            let stdout = io::stdout();
            let mut out = io::BufWriter::new(stdout.lock());
            match scan::run_scan(&req, format, &mut out)? {
                Ok(outcome) => Ok(exit_for(outcome)),
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(ExitCode::SUCCESS),
                Err(e) => Err(CliError::io("<stdout>", e)),
            }
        }
        Command::Enumerate {
            degree,
            verify,
            max_nodes,
            max_secs,
            allow_slow,
            workers,
            output,
        } => {
            if workers == Some(0) {
                return Err(CliError::Usage("--workers must be at least 1".into()));
            }
            let req = EnumerateRequest {
                degree,
                verify,
                budget: commands::budget(max_nodes, max_secs, allow_slow, workers),
            };
            let done = commands::enumerate(&req)?;
            match output {
                Some(path) => std::fs::write(&path, &done.document)
                    .map_err(|e| CliError::io(path.display().to_string(), e))?,
                None => emit(&done.document)?,
            }
            eprintln!("{}", done.summary);
            Ok(exit_for(done.outcome))
        }
        Command::Fixture { name, param } => {
            emit(&commands::fixture(&name, param)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("arrgate: {e}");
            e.exit_code()
        }
    }
}
