use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tockcheck::run::{self, default_assert_path, Options, Overrides, ToolError};
use tockcheck_core::machine::ParamValue;
use tockcheck_core::{CheckOptions, ExploreOptions};

#[derive(Parser)]
#[command(name = "tockcheck", version, about = "Check timed refinement assertions over state machine models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every assertion and print a result table.
    Check {
        model: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Run this many assertions at once.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Print and replay the counterexample of one assertion.
    Trace {
        model: PathBuf,
        assertion: String,
        #[command(flatten)]
        common: Common,
    },
    /// State space sizes per machine and per controller.
    Stats {
        model: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Args)]
struct Common {
    /// Assertion file [default: the model path with a .twassert extension]
    #[arg(long = "assert", value_name = "FILE")]
    assertions: Option<PathBuf>,
    /// Start from a named config block of the model.
    #[arg(long)]
    config: Option<String>,
    /// Range of the core integer type.
    #[arg(long = "core-int", value_name = "LO..HI", value_parser = parse_range, allow_hyphen_values = true)]
    core_int: Option<(i64, i64)>,
    /// Override any parameter, as NAME=VALUE or NAME=LO..HI.
    #[arg(long = "param", value_name = "NAME=VALUE", value_parser = parse_param, allow_hyphen_values = true)]
    params: Vec<(String, ParamValue)>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Give up once an exploration passes this many states.
    #[arg(long, env = "TOCKCHECK_MAX_STATES")]
    max_states: Option<usize>,
    /// Echoed in reports; verification is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once("..").ok_or("expected LO..HI")?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

fn parse_param(s: &str) -> Result<(String, ParamValue), String> {
    let (name, v) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let value = if v.contains("..") {
        let (lo, hi) = parse_range(v)?;
        ParamValue::Range(lo, hi)
    } else {
        ParamValue::Int(v.trim().parse().map_err(|e| format!("bad value: {e}"))?)
    };
    Ok((name.trim().to_string(), value))
}

impl Common {
    fn overrides(&self) -> Overrides {
        let mut params: Vec<_> = self.params.iter().map(|(n, v)| (n.as_str().into(), *v)).collect();
        if let Some((lo, hi)) = self.core_int {
            params.push(("core_int".into(), ParamValue::Range(lo, hi)));
        }
        Overrides {
            config: self.config.clone(),
            params,
        }
    }

    fn options(&self, jobs: usize) -> Options {
        let mut explore = ExploreOptions::default();
        if let Some(n) = self.max_states {
            explore.max_states = n;
        }
        Options {
            explore,
            check: CheckOptions::default(),
            jobs,
            seed: self.seed,
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports always serialise")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<u8, ToolError> = match &cli.command {
        Command::Check { model, common, jobs } => {
            let assertions = common.assertions.clone().unwrap_or_else(|| default_assert_path(model));
            run::check(model, &assertions, &common.overrides(), &common.options(*jobs)).map(|r| {
                match common.format {
                    Format::Table => print!("{}", r.to_table()),
                    Format::Json => println!("{}", r.to_json()),
                }
                r.exit_code() as u8
            })
        }
        Command::Trace { model, assertion, common } => {
            let assertions = common.assertions.clone().unwrap_or_else(|| default_assert_path(model));
            run::trace(model, &assertions, assertion, &common.overrides(), &common.options(1)).map(|r| {
                match common.format {
                    Format::Table => print!("{}", r.to_text()),
                    Format::Json => println!("{}", json(&r)),
                }
                u8::from(r.passed)
            })
        }
        Command::Stats { model, common } => run::stats(model, &common.overrides(), &common.options(1)).map(|r| {
            match common.format {
                Format::Table => print!("{}", r.to_table()),
                Format::Json => println!("{}", json(&r)),
            }
            0
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", e.render());
            ExitCode::from(2)
        }
    }
}
