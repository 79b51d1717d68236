use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wittsum_cli::{csv_exports, parse_input, run, CliError, Command, RunOptions};

#[derive(Parser)]
#[command(name = "wittsum", version, about = "Exact exponential sums over Witt vectors")]
struct Cli {
    /// Input document, `-` for stdin.
    input: PathBuf,
    #[command(subcommand)]
    command: Cmd,
    /// Cap on worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override the point budget of the input document.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Include per-stage wall-clock times in the report.
    #[arg(long, global = true)]
    timing: bool,
    /// Write polygon and histogram CSV files here.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    Validate,
    Degree,
    Sums {
        #[arg(long)]
        max_k: u32,
    },
    Lfun {
        #[arg(long)]
        buffer: Option<u32>,
    },
    Newton,
    Hodge,
    Compare,
    Cohom,
    AhBattery,
    Report,
}

impl From<Cmd> for Command {
    fn from(cmd: Cmd) -> Self {
        match cmd {
            Cmd::Validate => Command::Validate,
            Cmd::Degree => Command::Degree,
            Cmd::Sums { max_k } => Command::Sums { max_k },
            Cmd::Lfun { buffer } => Command::Lfun { buffer },
            Cmd::Newton => Command::Newton,
            Cmd::Hodge => Command::Hodge,
            Cmd::Compare => Command::Compare,
            Cmd::Cohom => Command::Cohom,
            Cmd::AhBattery => Command::AhBattery,
            Cmd::Report => Command::Report,
        }
    }
}

fn read_input(path: &PathBuf) -> Result<String, CliError> {
    let io_err = |from| CliError::Io { path: path.display().to_string(), from };
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map_err(io_err)?;
        return Ok(text);
    }
    std::fs::read_to_string(path).map_err(io_err)
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let text = read_input(&cli.input)?;
    let (doc, sum) = parse_input(&text)?;
    let opts = RunOptions { threads: cli.threads, budget_points: cli.budget, timing: cli.timing };
    let report = run(cli.command.into(), &doc, &sum, &opts)?;
    if let Some(dir) = &cli.out_dir {
        let io_err = |from| CliError::Io { path: dir.display().to_string(), from };
        std::fs::create_dir_all(dir).map_err(io_err)?;
        for (name, body) in csv_exports(&report) {
            std::fs::write(dir.join(name), body).map_err(io_err)?;
        }
    }
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{json}");
    let failed = report.failed_checks();
    if failed.is_empty() {
        return Ok(0);
    }
    eprintln!("failed checks: {}", failed.join(", "));
    Ok(3)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
