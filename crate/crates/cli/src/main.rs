use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hbd_cli::config::parse_config;
use hbd_cli::run::{run_config, verify_outcome, Format};
use hbd_cli::suites::{Suite, SUITE_NAMES};
use hbd_cli::{exit, CliError};
use hbd_core::QuadratureConfig;

#[derive(Parser)]
#[command(name = "hbd", version, about = "Local Dirichlet integrals, de Branges-Rovnyak kernels and Carleson tests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenarios of a JSON config and write one artifact per scenario plus report.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
    },
    /// Run a named verification suite and print one line per check.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the named built-in functions and measures.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, out, format } => run(&config, &out, format),
        Command::Verify { suite, seed } => verify(&suite, seed),
        Command::List => {
            for e in hbd_core::named::catalog() {
                println!("{:<14} {:<13} {}  {}", e.name, e.kind, e.description, e.facts);
            }
            Ok(exit::OK)
        }
    };
    match code {
        Ok(c) => ExitCode::from(c as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(config: &PathBuf, out: &PathBuf, format: OutFormat) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(config).map_err(|e| CliError::Io(format!("{}: {e}", config.display())))?;
    let cfg = parse_config(&text)?;
    let format = match format {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
    };
    let report = run_config(&cfg, out, format)?;
    for s in &report.scenarios {
        let status = if s.passed() { "PASS" } else { "FAIL" };
        println!("{status} {} ({:?}, {:.2}s)", s.id, s.kind, s.wall_seconds);
        if let Some(e) = &s.error {
            println!("  error: {e}");
        }
        for a in s.assertions.iter().filter(|a| !a.pass) {
            println!("  {}: {}", a.name, a.detail);
        }
    }
    println!("{}/{} scenarios passed", report.summary.passed, report.summary.scenarios);
    Ok(if report.all_pass() { exit::OK } else { exit::ASSERTION_FAILED })
}

fn verify(name: &str, seed: u64) -> Result<i32, CliError> {
    let suite = Suite::from_name(name).ok_or_else(|| CliError::Config {
        field: "suite".into(),
        message: format!("unknown suite {name:?}; known: {}", SUITE_NAMES.join(", ")),
    })?;
    let outcome = verify_outcome(suite, seed, &QuadratureConfig::default());
    for a in &outcome.assertions {
        println!("{} {}: {}", if a.pass { "PASS" } else { "FAIL" }, a.name, a.detail);
    }
    let failed = outcome.assertions.iter().filter(|a| !a.pass).count();
    println!("{}/{} checks passed", outcome.assertions.len() - failed, outcome.assertions.len());
    Ok(if failed == 0 { exit::OK } else { exit::ASSERTION_FAILED })
}
