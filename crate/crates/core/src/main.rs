use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use heading_consensus::builtin::Builtin;
use heading_consensus::cli::{self, CliError, FrameMode, RunConfig};
use heading_consensus::dynamics::{SimParams, DEFAULT_DT, DEFAULT_RECORD_EVERY, DEFAULT_T_FINAL};
use heading_consensus::Tolerances;

#[derive(Parser)]
#[command(name = "heading-consensus", version, about = "Simulate planar pointing consensus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario file and write trajectory.csv and report.json.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DT)]
        dt: f64,
        #[arg(long, default_value_t = DEFAULT_T_FINAL)]
        t_final: f64,
        #[arg(long, default_value_t = DEFAULT_RECORD_EVERY)]
        record_every: usize,
        /// Draw initial headings from this seed instead of the file's.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory. Defaults to $HEADING_CONSENSUS_OUT, then ./out.
        #[arg(long)]
        out: Option<PathBuf>,
        /// global, local-random, or local:θ1,θ2,...
        #[arg(long, default_value = "global")]
        frames: FrameMode,
        /// Run N seeded simulations concurrently (seeds seed, seed+1, ...).
        #[arg(long)]
        batch: Option<usize>,
        #[arg(long, default_value_t = heading_consensus::analysis::DEFAULT_TOL_ANGLE)]
        tol_angle: f64,
        #[arg(long, default_value_t = heading_consensus::analysis::DEFAULT_TOL_RESIDUAL)]
        tol_residual: f64,
    },
    /// Run a built-in scenario and check its expected outcome.
    Reproduce {
        /// hexagon, hexagon-misdirected, torricelli or torricelli-misdirected
        which: Builtin,
    },
    /// Print a built-in scenario document.
    Export { which: Builtin },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenario, dt, t_final, record_every, seed, out, frames, batch, tol_angle, tol_residual } => {
            SimParams::new(dt, t_final, record_every).map_err(CliError::from).and_then(|params| {
                let config = RunConfig {
                    scenario,
                    params,
                    seed,
                    out_dir: cli::resolve_out_dir(out),
                    frames,
                    batch,
                    tolerances: Tolerances { angle: tol_angle, residual: tol_residual },
                };
                cli::run(&config).map(|outcome| println!("{}", outcome.summary()))
            })
        }
        Command::Reproduce { which } => cli::reproduce(which).and_then(|r| {
            println!("{}", r.render());
            if r.passed() {
                Ok(())
            } else {
                let diff: Vec<String> = r.checks.iter().filter(|c| !c.passed).map(|c| c.to_string()).collect();
                Err(CliError::Assertion(diff.join("\n")))
            }
        }),
        Command::Export { which } => {
            print!("{}", which.json());
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
