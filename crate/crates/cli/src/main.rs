mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use cutfsi::analysis::StudyMode;
use cutfsi::SimulationConfig;

#[derive(Parser)]
#[command(name = "cutfsi", version, about = "Cut finite element solver for linear fluid-structure interaction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ConfigArgs {
    /// Flat `key = value` file; missing keys keep their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `key=value` overrides applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<SimulationConfig> {
        let cfg = match &self.config {
            Some(path) => {
                SimulationConfig::from_file(path).with_context(|| format!("reading config {}", path.display()))?
            }
            None => SimulationConfig::default(),
        };
        Ok(cfg.with_overrides(self.overrides.iter().map(String::as_str))?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Space,
    Time,
}

impl From<ModeArg> for StudyMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Space => StudyMode::Space,
            ModeArg::Time => StudyMode::Time,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write the step log and optional VTU dumps.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        /// Write fluid and solid VTU files every N steps (and at step 0).
        #[arg(long)]
        dump_every: Option<usize>,
        #[arg(long, default_value = "output")]
        output: PathBuf,
    },
    /// Convergence study against a finer nested reference run.
    Convergence {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Comma-separated mesh widths (space) or time steps (time), coarse first.
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<f64>,
        /// Reference mesh width or time step.
        #[arg(long = "ref")]
        reference: f64,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        solid_order: Option<u8>,
        /// Value of the parameter held fixed: `k` in space mode (default 1),
        /// `h` in time mode (default 0.0625).
        #[arg(long)]
        fixed: Option<f64>,
        /// Lift the mesh width and system size limits.
        #[arg(long)]
        allow_large: bool,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the property checks; exits nonzero if any fails.
    Verify {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run {
            config,
            dump_every,
            output,
        } => {
            let summary = commands::run(&config.load()?, &output, dump_every)?;
            println!(
                "{} steps, max residual {:.3e}, max constraint residual {:.3e}",
                summary.steps, summary.max_residual, summary.max_constraint_residual
            );
            Ok(true)
        }
        Command::Convergence {
            config,
            mode,
            levels,
            reference,
            solid_order,
            fixed,
            allow_large,
            output,
        } => {
            let mut cfg = config.load()?;
            if let Some(m) = solid_order {
                cfg.m_s = m as usize;
            }
            cfg.allow_large |= allow_large;
            let study = commands::StudyRequest {
                mode: mode.into(),
                levels,
                reference,
                fixed,
            };
            let csv = commands::convergence(&cfg, &study)?;
            match output {
                Some(path) => std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{csv}"),
            }
            Ok(true)
        }
        Command::Verify { config, seed } => {
            let (passed, report) = commands::verify(&config.load()?, seed)?;
            print!("{report}");
            Ok(passed)
        }
    }
}
