//! The `approxgrp` command line.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::report::Report;
use crate::scenario::{run_scenario_str, Overrides};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Machine,
    Both,
}

#[derive(Debug, Parser)]
#[command(name = "approxgrp", version, about = "Check and build quasi-homomorphisms described by scenario files")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario file.
    Run(RunArgs),
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// Scenario file (JSON).
    pub scenario: PathBuf,
    /// Pair-evaluation budget before switching to sampling.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Seed for sampled checks.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of samples for sampled checks.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write `report.txt` and/or `report.json` here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What a run produced: the exit code and the rendered outputs.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn render(report: &Report, format: Format) -> (Option<String>, Option<String>) {
    let text = matches!(format, Format::Text | Format::Both).then(|| report.to_text());
    let machine = matches!(format, Format::Machine | Format::Both).then(|| report.to_machine());
    (text, machine)
}

fn write_outputs(dir: &Path, text: Option<&str>, machine: Option<&str>) -> Result<Vec<PathBuf>> {
    let io = |e: std::io::Error, p: &Path| Error::Parameter(format!("cannot write {}: {e}", p.display()));
    fs::create_dir_all(dir).map_err(|e| io(e, dir))?;
    let mut written = Vec::new();
    for (name, body) in [("report.txt", text), ("report.json", machine)] {
        if let Some(body) = body {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| io(e, &path))?;
            written.push(path);
        }
    }
    Ok(written)
}

pub fn run(args: &RunArgs) -> Outcome {
    let fail = |e: Error| Outcome {
        code: EXIT_ERROR,
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
    };
    let text = match fs::read_to_string(&args.scenario) {
        Ok(t) => t,
        Err(e) => {
            return fail(Error::Parameter(format!("cannot read {}: {e}", args.scenario.display())))
        }
    };
    let overrides = Overrides {
        budget: args.budget,
        samples: args.samples,
        seed: args.seed,
    };
    let report = match run_scenario_str(&text, &overrides) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let (txt, machine) = render(&report, args.format);
    let mut stdout = String::new();
    match &args.out {
        Some(dir) => match write_outputs(dir, txt.as_deref(), machine.as_deref()) {
            Ok(paths) => {
                for p in paths {
                    stdout.push_str(&format!("wrote {}\n", p.display()));
                }
            }
            Err(e) => return fail(e),
        },
        None => {
            if let Some(t) = txt {
                stdout.push_str(&t);
            }
            if let Some(m) = machine {
                stdout.push_str(&m);
            }
        }
    }
    Outcome {
        code: report.exit_code(),
        stdout,
        stderr: String::new(),
    }
}

/// Parses `argv` and runs; clap usage errors exit with code 2 as well.
pub fn main_with_args<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => match cli.command {
            Command::Run(args) => run(&args),
        },
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: rendered }
            } else {
                Outcome { code, stdout: rendered, stderr: String::new() }
            }
        }
    }
}
