mod commands;
mod config;
mod error;
mod fields;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{ConfigFile, Format, Overrides, RunConfig};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "knotfield", version, about = "Build, diagnose, trace and relax knotted field configurations")]
struct Cli {
    /// Strict JSON config; command-line flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "NX,NY,NZ", value_parser = parse_counts)]
    grid: Option<[usize; 3]>,
    #[arg(long = "box", global = true, value_name = "LX,LY,LZ", value_parser = parse_triple)]
    box_lengths: Option<[f64; 3]>,
    /// Field-line seed; repeatable.
    #[arg(long, global = true, value_name = "x,y,z", value_parser = parse_triple, allow_hyphen_values = true)]
    seed: Vec<[f64; 3]>,
    /// Tolerance override; repeatable.
    #[arg(long, global = true, value_name = "NAME=VALUE", value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    #[arg(long, global = true, value_parser = clap::builder::ValueParser::new(parse_format))]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a field on the grid and write it.
    Build,
    /// Energy, helicity, null and Arnold diagnostics with pass/fail gates.
    Diagnose { input: Option<PathBuf> },
    /// Trace field lines from seeds; linking numbers and knot types.
    Trace { input: Option<PathBuf> },
    /// Relax a field to the helicity-constrained energy minimizer.
    Relax { input: Option<PathBuf> },
    /// Collect the artifacts in the output directory.
    Report,
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<[T; 3], String>
where
    T::Err: std::fmt::Display,
{
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated values, got {s:?}"));
    }
    let mut out = Vec::with_capacity(3);
    for p in parts {
        out.push(p.parse::<T>().map_err(|e| format!("{p:?}: {e}"))?);
    }
    out.try_into().map_err(|_| unreachable!())
}

fn parse_counts(s: &str) -> Result<[usize; 3], String> {
    parse_list(s)
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let v: [f64; 3] = parse_list(s)?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(format!("values must be finite, got {s:?}"));
    }
    Ok(v)
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    Ok((k.trim().to_string(), v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"))?))
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

fn run(cli: Cli) -> Result<String, CliError> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let (name, input) = match cli.command {
        Command::Build => ("build", None),
        Command::Diagnose { input } => ("diagnose", input),
        Command::Trace { input } => ("trace", input),
        Command::Relax { input } => ("relax", input),
        Command::Report => ("report", None),
    };
    let flags = Overrides {
        grid: cli.grid,
        box_lengths: cli.box_lengths,
        seeds: cli.seed,
        tolerances: cli.tol,
        out: cli.out,
        format: cli.format,
        input,
    };
    let cfg = RunConfig::resolve(name, file, flags)?;
    match name {
        "build" => commands::build(&cfg),
        "diagnose" => commands::diagnose(&cfg),
        "trace" => commands::trace(&cfg),
        "relax" => commands::relax(&cfg),
        _ => commands::report(&cfg.out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
