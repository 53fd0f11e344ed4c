use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hdg_cli::{run_solve, run_study, run_variational, write_study, CliError, Overrides, StudyConfig};
use hdg_core::{Diagonal, WeightMode};

#[derive(Parser)]
#[command(name = "hdg", version, about = "HDG solver for elliptic problems on triangle meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve once and print a JSON report.
    Solve(Common),
    /// Sweep mesh sizes and weights; print a CSV table.
    Study {
        #[command(flatten)]
        common: Common,
        /// Directory for study.csv and study.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimize the discrete functional and print a JSON report.
    Varmin(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config file, or the name of a built-in preset.
    #[arg(long)]
    config: String,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum)]
    weight: Option<WeightArg>,
    #[arg(long, value_enum)]
    diagonal: Option<DiagonalArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightArg {
    Unit,
    Invh,
    H,
}

#[derive(Clone, Copy, ValueEnum)]
enum DiagonalArg {
    Ne,
    Nw,
}

fn load(common: &Common, output: Option<PathBuf>) -> Result<StudyConfig, CliError> {
    let mut config = if hdg_cli::presets::preset(&common.config).is_some() {
        StudyConfig::preset(&common.config)
    } else {
        let text = std::fs::read_to_string(&common.config).map_err(|source| CliError::Read {
            path: common.config.clone(),
            source,
        })?;
        StudyConfig::from_json(&text)?
    };
    config.apply(&Overrides {
        k: common.k,
        n: common.n,
        weight: common.weight.map(|w| match w {
            WeightArg::Unit => WeightMode::Unit,
            WeightArg::Invh => WeightMode::InvH,
            WeightArg::H => WeightMode::H,
        }),
        diagonal: common.diagonal.map(|d| match d {
            DiagonalArg::Ne => Diagonal::Ne,
            DiagonalArg::Nw => Diagonal::Nw,
        }),
        output,
    });
    config.validate()?;
    Ok(config)
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Solve(common) => {
            let report = run_solve(&load(&common, None)?)?;
            emit(&(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"))?;
        }
        Command::Study { common, out } => {
            let config = load(&common, out)?;
            let table = run_study(&config)?;
            if let Some(dir) = &config.output {
                write_study(&table, dir)?;
            }
            emit(&table.to_csv()?)?;
            for row in table.rows.iter().filter(|r| r.error.is_some()) {
                eprintln!("n={} weight={}: {}", row.n, row.weight, row.error.as_deref().unwrap_or(""));
            }
            if table.failed_rows() > 0 {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Varmin(common) => {
            let report = run_variational(&load(&common, None)?)?;
            emit(&(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
