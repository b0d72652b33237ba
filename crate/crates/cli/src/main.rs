//! `stripfe`: free energies, BPS tables and partition-function series for
//! strip-geometry mirror curves.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{exit_code, RouteArg, Suite};
use crate::config::{Format, Overrides};
use crate::output::Emitter;

#[derive(Parser, Debug)]
#[command(name = "stripfe", version, about = "Free energies and BPS data for strip-geometry mirror curves")]
struct Cli {
    /// Working precision in bits for the numeric route.
    #[arg(long, global = true, env = "STRIPFE_PRECISION")]
    precision: Option<u32>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for deterministic sample points.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a geometry config against the standing assumptions.
    Validate { config: PathBuf },
    /// Genus-g free energies by the chosen route.
    FreeEnergy {
        config: PathBuf,
        #[arg(long)]
        g_max: Option<usize>,
        #[arg(long, value_enum, default_value = "closed")]
        route: RouteArg,
    },
    /// The 5D BPS index table; needs Kähler labels.
    BpsTable { config: PathBuf },
    /// Coefficients of the partition function from its product formula.
    ZSeries {
        config: PathBuf,
        #[arg(long)]
        q_order: Option<u32>,
        #[arg(long)]
        degree: Option<i64>,
        /// Print log Z instead of Z.
        #[arg(long)]
        log: bool,
    },
    /// Run a verification suite; exits 0 only if every check passes.
    Verify {
        config: PathBuf,
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        g_max: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut over = Overrides { precision: cli.precision, format: cli.format, seed: cli.seed, ..Overrides::default() };
    let path = match &cli.command {
        Command::Validate { config } | Command::BpsTable { config } => config,
        Command::FreeEnergy { config, g_max, .. } | Command::Verify { config, g_max, .. } => {
            over.g_max = *g_max;
            config
        }
        Command::ZSeries { config, q_order, degree, .. } => {
            over.q_order = *q_order;
            over.degree = *degree;
            config
        }
    };
    let cfg = match config::load(path, &over) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let mut em = Emitter::new(cfg.format);
    let result = match &cli.command {
        Command::Validate { .. } => Ok(commands::validate(&cfg, &mut em)),
        Command::FreeEnergy { route, .. } => commands::free_energy(&cfg, *route, &mut em),
        Command::BpsTable { .. } => commands::bps_table(&cfg, &mut em),
        Command::ZSeries { log, .. } => commands::z_series(&cfg, *log, &mut em),
        Command::Verify { suite, .. } => commands::verify(&cfg, *suite, &mut em),
    };
    print!("{}", em.finish());
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
