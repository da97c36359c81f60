//! `halfline`: eigenvalue enclosures for halfline Schrödinger operators.

mod commands;
mod output;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use commands::{execute, Failure};
use scenario::{Command, Format, Scenario};

#[derive(Debug, Parser)]
#[command(name = "halfline", version)]
#[command(about = "Eigenvalue enclosures for Schrödinger operators with complex potentials")]
struct Cli {
    /// JSON scenario file {command, parameters, output_path, format}
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; stdout when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format [default: json for *.json paths, else csv]
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Option<Command>,
}

fn scenario(cli: Cli) -> Result<Scenario, Failure> {
    let mut s = match (cli.config, cli.command) {
        (Some(path), None) => {
            let text =
                std::fs::read_to_string(&path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
            Scenario::from_json(&text)?
        }
        (None, Some(command)) => Scenario {
            command,
            output_path: None,
            format: None,
        },
        (Some(_), Some(_)) => {
            return Err(Failure::Invalid(
                "give either --config or a subcommand, not both".into(),
            ))
        }
        (None, None) => return Err(Failure::Invalid("no command given; see --help".into())),
    };
    if cli.out.is_some() {
        s.output_path = cli.out;
    }
    if cli.format.is_some() {
        s.format = cli.format;
    }
    Ok(s)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("HS_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Invalid(format!("HS_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Invalid(format!("thread pool: {e}")))
}

fn emit(s: &Scenario) -> Result<bool, Failure> {
    let artifact = execute(&s.command)?;
    let name = s.command.name();
    let io = |e: std::io::Error| Failure::Invalid(format!("writing output: {e}"));
    match (s.resolved_format(), &s.output_path) {
        (Format::Json, Some(path)) => output::write_atomic(path, &output::json_string(name, &artifact)).map_err(io)?,
        (Format::Json, None) => print!("{}", output::json_string(name, &artifact)),
        (Format::Csv, Some(path)) => {
            if let Some((main, rest)) = artifact.tables.split_first() {
                output::write_atomic(path, &output::csv_string(main)).map_err(io)?;
                for table in rest {
                    output::write_atomic(&output::companion_path(path, table.name), &output::csv_string(table))
                        .map_err(io)?;
                }
            }
        }
        (Format::Csv, None) => {
            if let Some(main) = artifact.tables.first() {
                print!("{}", output::csv_string(main));
            }
        }
    }
    eprintln!("{name}: {}", serde_json::Value::Object(artifact.summary));
    Ok(artifact.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = configure_threads().and_then(|()| scenario(cli)).and_then(|s| emit(&s));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("check failed");
            ExitCode::from(2)
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(match f {
                Failure::Invalid(_) => 1,
                Failure::Numerical(_) => 2,
            })
        }
    }
}
