//! `teich`: file-driven batch runs of the teich-core constructions.
//!
//! Exit status is 0 when every pass flag in the artifact is true, 1 on a
//! numerical failure (the artifact then embeds a failing report) and 2 when
//! the job cannot be parsed.

mod jobs;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "teich", version, about = "Batch front end for teich-core")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON artifact path; stdout when omitted.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// CSV table path for commands that produce one.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Series truncation N.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(3..=4096))]
    pub truncation: Option<u64>,
    /// Boundary sample count M (a power of two, at least 64).
    #[arg(long, global = true, value_parser = parse_samples)]
    pub samples: Option<usize>,
    /// Residual or equivalence tolerance.
    #[arg(long, global = true, value_parser = parse_tol)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true, env = "TEICH_JOBS", value_parser = clap::value_parser!(u64).range(1..=1024))]
    pub jobs: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Norm of a series file.
    Norm {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = NormKind::Bergman)]
        kind: NormKind,
    },
    /// Pre-Schwarzian coordinates of a map, or the map from coordinates.
    Chi {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long)]
        inverse: bool,
    },
    /// Welding pair and certificates of a circle homeomorphism.
    Weld {
        #[arg(long, short)]
        input: PathBuf,
    },
    /// Classifying coordinates along `s * eps` for one disc, `s` in `[0, 1]`.
    SchifferSweep {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        disc: usize,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..=1000))]
        steps: u64,
    },
    /// Sews caps onto a rigged sphere.
    Sew {
        #[arg(long, short)]
        input: PathBuf,
        /// Random charts used for the chart independence report.
        #[arg(long, default_value_t = 0)]
        charts: usize,
    },
    /// Compares two non-overlapping map files modulo Möbius maps.
    Equiv {
        /// Given twice, once per configuration.
        #[arg(long, short, required = true)]
        input: Vec<PathBuf>,
    },
    /// Runs a suite manifest; the standard manifest when no input is given.
    VerifySuite {
        #[arg(long, short)]
        input: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum NormKind {
    Bergman,
    Dirichlet,
    SupHyp,
}

fn parse_samples(s: &str) -> Result<usize, String> {
    let m: usize = s.parse().map_err(|e| format!("{e}"))?;
    if m >= 64 && m.is_power_of_two() && m <= 1 << 20 {
        Ok(m)
    } else {
        Err(format!("{m} is not a power of two in [64, 2^20]"))
    }
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t > 0.0 && t < 1.0 { Ok(t) } else { Err(format!("tolerance {t} must lie in (0, 1)")) }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.common.jobs.map_or(0, |j| j as usize);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("teich: worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    let common = cli.common.clone();
    let outcome = pool.install(|| match &cli.command {
        Command::Norm { input, kind } => jobs::norm(input, *kind, &common),
        Command::Chi { input, inverse } => jobs::chi(input, *inverse, &common),
        Command::Weld { input } => jobs::weld(input, &common),
        Command::SchifferSweep { input, disc, steps } => jobs::schiffer_sweep(input, *disc, *steps as usize, &common),
        Command::Sew { input, charts } => jobs::sew(input, *charts, &common),
        Command::Equiv { input } => match input.as_slice() {
            [a, b] => jobs::equiv(a, b, &common),
            _ => Err(jobs::JobError::Parse(format!("equiv needs exactly two --input files, got {}", input.len()))),
        },
        Command::VerifySuite { input } => jobs::verify_suite(input.as_deref(), &common),
    });
    jobs::finish(outcome, &common)
}
