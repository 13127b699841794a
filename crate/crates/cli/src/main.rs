use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use genconvex::Execution;
use genconvex_cli::report::{to_machine, to_text, write_csv};
use genconvex_cli::scenario::Command as ScenarioCommand;
use genconvex_cli::{exit, run, Overrides, Report, Scenario};

#[derive(Parser)]
#[command(name = "genconvex", version, about = "Generalized-convexity checks and Hermite–Hadamard-type inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario file.
    Run {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a sweep scenario and write one CSV row per cell and theorem.
    Sweep {
        file: PathBuf,
        #[arg(long)]
        csv: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Search for a counterexample to the scenario's class.
    Falsify {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Args)]
struct Common {
    /// Also write the machine-readable report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Format of the report on stdout.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Worker threads (1 runs sequentially).
    #[arg(long, env = "GENCONVEX_JOBS")]
    jobs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "tol-quad")]
    tol_quad: Option<f64>,
    #[arg(long = "tol-report")]
    tol_report: Option<f64>,
}

fn load(path: &Path, common: &Common, command: Option<ScenarioCommand>) -> Result<Scenario, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let overrides =
        Overrides { seed: common.seed, tol_quad: common.tol_quad, tol_report: common.tol_report, command };
    Scenario::from_toml(&text, &overrides).map_err(|e| format!("{}: {e}", path.display()))
}

fn execution(jobs: Option<usize>) -> Result<Execution> {
    match jobs {
        Some(0) => anyhow::bail!("--jobs must be at least 1"),
        Some(1) => Ok(Execution::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the worker pool")?;
            Ok(Execution::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(Execution::Sequential),
        None => Ok(Execution::Parallel),
    }
}

fn emit(report: &Report, common: &Common) -> Result<()> {
    if let Some(path) = &common.out {
        fs::write(path, to_machine(report)).with_context(|| format!("writing {}", path.display()))?;
    }
    match common.format {
        Format::Text => print!("{}", to_text(report)),
        Format::Machine => print!("{}", to_machine(report)),
    }
    Ok(())
}

fn main_inner(cli: Cli) -> Result<i32> {
    let (file, common, csv, forced) = match &cli.command {
        Cmd::Run { file, common } => (file, common, None, None),
        Cmd::Sweep { file, csv, common } => (file, common, Some(csv), Some(ScenarioCommand::Sweep)),
        Cmd::Falsify { file, common } => (file, common, None, Some(ScenarioCommand::Falsify)),
    };
    let scenario = match load(file, common, forced) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(exit::USAGE);
        }
    };
    let exec = execution(common.jobs)?;
    let report = run(&scenario, exec);
    emit(&report, common)?;
    if let Some(path) = csv {
        let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_csv(&report, std::io::BufWriter::new(f)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(report.exit_status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match main_inner(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::USAGE as u8)
        }
    }
}
