//! `fullbody` command-line front end.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fullbody::config::{Integrator, SimConfig};
use fullbody::par::threads_from_env;
use fullbody::runner::{compare, converge, run, RunError};
use fullbody::Error;

const EXIT_RUNTIME: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NO_CONVERGENCE: u8 = 3;
const EXIT_OVERLAP: u8 = 4;

#[derive(Parser)]
#[command(
    name = "fullbody",
    version,
    about = "Two rigid bodies in mutual gravity, integrated on SO(3)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and write its trajectory and summary.
    Simulate(Common),
    /// Run the configured variational integrator next to RK4 and tabulate
    /// the conserved-quantity errors.
    Compare(Common),
    /// Estimate the global order of accuracy over a ladder of step sizes.
    Converge {
        #[command(flatten)]
        common: Common,
        /// Strictly decreasing step sizes, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        steps: Vec<f64>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    config: PathBuf,
    /// Output directory (defaults to `run.output`, then `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write every k-th step to the trajectory.
    #[arg(long, value_name = "K")]
    sample_every: Option<usize>,
    /// Integrator override, e.g. lgvi-relative-h or rk4-inertial.
    #[arg(long)]
    integrator: Option<Integrator>,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        let code = match &e {
            RunError::Io(_) => EXIT_RUNTIME,
            RunError::Config(inner) => exit_code(inner).unwrap_or(EXIT_CONFIG),
            RunError::Step { source, .. } => exit_code(source).unwrap_or(EXIT_RUNTIME),
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e).unwrap_or(EXIT_CONFIG),
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_RUNTIME,
        message: format!("{}: {e}", path.display()),
    }
}

fn exit_code(e: &Error) -> Option<u8> {
    match e {
        Error::BodiesOverlap { .. } => Some(EXIT_OVERLAP),
        Error::NoConvergence { .. }
        | Error::SingularJacobian
        | Error::OutsideCaptureBasin { .. } => Some(EXIT_NO_CONVERGENCE),
        _ => None,
    }
}

impl Common {
    fn load(&self) -> Result<(SimConfig, PathBuf), Failure> {
        let mut cfg = SimConfig::load(&self.config)?;
        if let Some(k) = self.sample_every {
            cfg.sample_every = k;
        }
        if let Some(i) = self.integrator {
            cfg.integrator = i;
        }
        cfg.validate()?;
        let out = self
            .out
            .clone()
            .or_else(|| cfg.output.clone())
            .unwrap_or_else(|| PathBuf::from("out"));
        fs::create_dir_all(&out).map_err(|e| io_failure(&out, e))?;
        Ok((cfg, out))
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn simulate(args: &Common) -> Result<(), Failure> {
    let (cfg, out) = args.load()?;
    let csv_path = out.join("trajectory.csv");
    let file = File::create(&csv_path).map_err(|e| io_failure(&csv_path, e))?;
    let mut csv = BufWriter::new(file);
    let output = run(&cfg, Some(&mut csv))?;
    csv.flush().map_err(|e| io_failure(&csv_path, e))?;
    let report = output.summary.to_string();
    write_text(&out.join("summary.txt"), &report)?;
    print!("{report}");
    Ok(())
}

fn compare_cmd(args: &Common) -> Result<(), Failure> {
    let (cfg, out) = args.load()?;
    let (report, outputs) = compare(&cfg, threads_from_env())?;
    let mut text = report.to_string();
    if let [a, b] = outputs.as_slice() {
        let ratio = b.summary.max_orth_err / a.summary.max_orth_err.max(f64::MIN_POSITIVE);
        text.push_str(&format!(
            "orth_err ratio ({} / {}) = {ratio:.3e}\n",
            b.summary.integrator, a.summary.integrator
        ));
    }
    write_text(&out.join("compare.txt"), &text)?;
    print!("{text}");
    Ok(())
}

fn converge_cmd(args: &Common, steps: &[f64]) -> Result<(), Failure> {
    let (cfg, out) = args.load()?;
    let report = converge(&cfg, steps, threads_from_env())?;
    let text = report.to_string();
    write_text(&out.join("converge.txt"), &text)?;
    print!("{text}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Compare(args) => compare_cmd(args),
        Command::Converge { common, steps } => converge_cmd(common, steps),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("fullbody: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
