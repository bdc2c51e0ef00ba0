use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lgweak_cli::{
    cmd_bounds, cmd_simulate, cmd_sweep, cmd_theory, to_json, CliError, RunConfig, SweepSpec,
};
use lgweak_core::AnglesPi;

/// Leggett-Garg tests with sequential weak measurements: theory, violation
/// maps, Monte Carlo experiments and macrorealist bounds. Angles are in
/// units of π.
#[derive(Parser, Debug)]
#[command(name = "lgweak", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact correlators, weak values and B4 for one configuration.
    Theory {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// B4 and its classification over an (alpha, delta) grid at fixed gamma.
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        /// Grid nodes per axis.
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[arg(long, default_value_t = 0.0)]
        alpha_start: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha_stop: f64,
        #[arg(long, default_value_t = 0.0)]
        delta_start: f64,
        #[arg(long, default_value_t = 1.0)]
        delta_stop: f64,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate the three post-selection runs and estimate B4.
    Simulate(SimulateArgs),
    /// Closed-form (and optionally enumerated) macrorealist bounds of B_n.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        brute: bool,
    },
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Flat key = value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    /// Heralded photons per post-selection run.
    #[arg(long)]
    photons: Option<u64>,
    #[arg(long)]
    g_over_sigma: Option<f64>,
    #[arg(long)]
    pixels: Option<usize>,
    #[arg(long)]
    pitch_over_sigma: Option<f64>,
    #[arg(long)]
    dark_rate: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for report.json and the three frame file pairs.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SimulateArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => { $( if let Some(v) = self.$field { cfg.$field = v; } )* };
        }
        set!(
            alpha,
            gamma,
            delta,
            photons,
            g_over_sigma,
            pixels,
            pitch_over_sigma,
            dark_rate,
            seed
        );
        Ok(cfg)
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Theory {
            alpha,
            gamma,
            delta,
            out,
        } => {
            let report = cmd_theory(AnglesPi {
                alpha,
                gamma,
                delta,
            })?;
            emit(&to_json(&report)?, out.as_ref())
        }
        Command::Sweep {
            gamma,
            grid,
            alpha_start,
            alpha_stop,
            delta_start,
            delta_stop,
            out,
        } => {
            let spec = SweepSpec {
                gamma,
                alpha_range: (alpha_start, alpha_stop, grid),
                delta_range: (delta_start, delta_stop, grid),
            };
            let table = cmd_sweep(&spec)?;
            emit(&table.to_csv(), out.as_ref())?;
            eprint!("{}", to_json(&table.summary())?);
            Ok(())
        }
        Command::Simulate(args) => {
            let cfg = args.resolve()?;
            let report = cmd_simulate(&cfg, args.out.as_deref())?;
            let text = to_json(&report)?;
            if let Some(dir) = &args.out {
                std::fs::write(dir.join("report.json"), &text)?;
            }
            print!("{text}");
            Ok(())
        }
        Command::Bounds { n, brute } => emit(&to_json(&cmd_bounds(n, brute)?)?, None),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
