//! `mustab`: run the analysis pipeline on a system document.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mustab_core::harness::{
    emit_outputs, parse_stages, parse_system, run_pipeline, RunOptions, Stage, SystemDocument, EXIT_INPUT,
    WORKED_EXAMPLE,
};
use mustab_core::sampling::DEFAULT_SEED;

#[derive(Parser, Debug)]
#[command(name = "mustab", version, about = "Stability checks and long-horizon simulation for positive delayed systems")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Stages to run: check, transform, criterion, simulate, fit or all (comma lists accepted).
    #[arg(value_name = "STAGES")]
    stages: Vec<String>,

    /// System document (JSON).
    #[arg(long, short, value_name = "FILE")]
    input: Option<PathBuf>,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Output directory for report.json, trajectory.csv and rateplot.csv.
    #[arg(long, short, value_name = "DIR", default_value = "mustab-out")]
    out: PathBuf,

    /// Seed for every sampling check and property suite.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the built-in two-dimensional worked example.
    ReproExample {
        /// Stages to run (default: all).
        #[arg(value_name = "STAGES")]
        stages: Vec<String>,

        #[command(flatten)]
        common: Common,
    },
}

fn fail(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_INPUT as u8)
}

fn run(doc: &SystemDocument, stages: &[String], common: &Common) -> ExitCode {
    let stages: Vec<Stage> = match parse_stages(stages) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let opts = RunOptions { seed: common.seed, ..RunOptions::default() };
    let output = match run_pipeline(doc, &stages, &opts) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    let written = match emit_outputs(&output, &common.out) {
        Ok(w) => w,
        Err(e) => return fail(e),
    };
    for outcome in &output.report.stages {
        println!("{:<9} {}  {}", outcome.stage, if outcome.passed { "PASS" } else { "FAIL" }, outcome.detail);
    }
    for path in &written {
        println!("wrote {}", path.display());
    }
    ExitCode::from(output.report.exit_code as u8)
}

fn load(path: &Path) -> Result<SystemDocument, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_system(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT as u8 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Some(Command::ReproExample { stages, common }) => {
            let doc = parse_system(WORKED_EXAMPLE).expect("built-in example is valid");
            let stages = if stages.is_empty() { vec!["all".to_string()] } else { stages };
            run(&doc, &stages, &common)
        }
        None => {
            let Some(input) = cli.input else {
                return fail("--input <FILE> is required");
            };
            let doc = match load(&input) {
                Ok(d) => d,
                Err(e) => return fail(e),
            };
            run(&doc, &cli.stages, &cli.common)
        }
    }
}
