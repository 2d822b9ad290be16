//! `wdl`: command-line front end for Tate's algorithm and the local and
//! global density computations.
//!
//! JSON (schema "1") goes to stdout, diagnostics to stderr. Exit codes:
//! 0 success, 1 usage error or failed verification, 2 singular input.

mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CliError, GlobalArgs, LocalArgs, TateArgs, VerifyArgs};
use report::Format;

#[derive(Debug, Parser)]
#[command(name = "wdl", version, about = "Reduction types and densities of Weierstrass equations")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads: a positive integer or "auto". WDL_THREADS overrides.
    #[arg(long, global = true, default_value = "auto")]
    threads: String,
    /// Omit the timestamp so that identical runs give identical output.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Progress and per-check lines on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tate's algorithm for one equation at one prime.
    Tate(TateArgs),
    /// Local density table at a prime (closed form, exact or Monte Carlo).
    Local(LocalArgs),
    /// Global density: predicted value, Monte Carlo estimate or box count.
    Global(GlobalArgs),
    /// Run the built-in verification suites.
    Verify(VerifyArgs),
}

fn thread_count(flag: &str) -> Result<Option<usize>, CliError> {
    let v = std::env::var("WDL_THREADS").ok().filter(|s| !s.trim().is_empty()).unwrap_or_else(|| flag.to_string());
    match v.trim() {
        "auto" => Ok(None),
        s => match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("threads must be a positive integer or \"auto\", got {s:?}"))),
        },
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = thread_count(&cli.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot set up the thread pool: {e}")))?;
    }
    let (report, failed) = match &cli.command {
        Command::Tate(a) => (commands::tate(a)?, 0),
        Command::Local(a) => (commands::local(a, cli.verbose)?, 0),
        Command::Global(a) => (commands::global(a)?, 0),
        Command::Verify(a) => commands::verify(a, cli.verbose)?,
    };
    let mut out = std::io::stdout().lock();
    match report.write(cli.format, !cli.no_timestamp, &mut out).and_then(|_| out.flush()) {
        // A closed pipe (e.g. `| head`) is not an error of the computation.
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            return Err(CliError::Usage(format!("cannot write output: {e}")));
        }
        _ => {}
    }
    if failed > 0 {
        return Err(CliError::Failed(failed));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
