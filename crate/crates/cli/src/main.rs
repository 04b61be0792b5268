//! `normhol` command-line interface.
//!
//! Every subcommand reads one JSON document (`--input`, or `--algebra` for
//! `curvature-space`; `-` reads standard input) and prints a report with
//! sorted keys and a trailing newline. Exit codes: 0 success, 2 invalid
//! input, 3 internal invariant violation, 64 unknown subcommand.

mod commands;
mod text;

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use commands::{Command as Cmd, Config};
use normhol::geometry::Mode;

const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "normhol", version, about = "Normal holonomy toolkit: curvature tensors, screen holonomy and Lorentzian classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Curvature tensor of a shape family and its identities
    Curvature(Common),
    /// Screen components P0, P_k, Q_ij and the screen algebra
    Screen(Common),
    /// Invariant subspace analysis and Borel-Lichnerowicz decomposition
    Decompose(Common),
    /// Classify (or construct and classify) a Lorentzian holonomy algebra
    ClassifyBbi(Common),
    /// Weak Berger test for a matrix algebra
    WeakBerger(Common),
    /// Dimensions of K(h) and B_h(h)
    CurvatureSpace(CurvatureSpaceArgs),
    /// Jets, shape operators and geometric checks of an immersion
    Geometry(Common),
    /// Full analysis of an immersion
    Pipeline(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Input JSON file (`-` for standard input)
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Arithmetic for the algebraic stages
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Float-mode rank tolerance
    #[arg(long, default_value_t = 1e-9, value_parser = positive_float)]
    tol: f64,
    /// Seed for all pseudo-random choices (decimal or 0x-prefixed hex)
    #[arg(long, default_value = "0xB10C", value_parser = parse_seed)]
    seed: u64,
    /// Report format
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    report: ReportFormat,
}

#[derive(Args, Debug)]
struct CurvatureSpaceArgs {
    /// Algebra JSON file; alias of --input
    #[arg(long, value_name = "PATH")]
    algebra: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

fn positive_float(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|_| format!("invalid seed {s:?}"))
}

fn read_input(path: Option<&Path>) -> anyhow::Result<Value> {
    let path = path.ok_or_else(|| anyhow!(normhol::Error::Input("missing --input".into())))?;
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
        s
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    serde_json::from_str(&text).with_context(|| format!("parsing {} as JSON", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<String> {
    let (cmd, common, path) = match cli.command {
        Command::Curvature(c) => (Cmd::Curvature, c.clone(), c.input),
        Command::Screen(c) => (Cmd::Screen, c.clone(), c.input),
        Command::Decompose(c) => (Cmd::Decompose, c.clone(), c.input),
        Command::ClassifyBbi(c) => (Cmd::ClassifyBbi, c.clone(), c.input),
        Command::WeakBerger(c) => (Cmd::WeakBerger, c.clone(), c.input),
        Command::CurvatureSpace(a) => {
            let path = a.algebra.or(a.common.input.clone());
            (Cmd::CurvatureSpace, a.common, path)
        }
        Command::Geometry(c) => (Cmd::Geometry, c.clone(), c.input),
        Command::Pipeline(c) => (Cmd::Pipeline, c.clone(), c.input),
    };
    let input = read_input(path.as_deref())?;
    let mode = match common.mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Float => Mode::Float,
    };
    let cfg = Config { mode, tol: common.tol, seed: common.seed };
    let report = commands::execute(cmd, &input, &cfg)?;
    Ok(match common.report {
        ReportFormat::Json => normhol::report::to_pretty(&report),
        ReportFormat::Text => text::render(&report),
    })
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<normhol::Error>() {
        Some(e) if !e.is_input_error() => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_USAGE,
                _ => EXIT_INPUT,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
