use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rankup::{Result, ToleranceConfig};

#[derive(Debug, Parser)]
#[command(
    name = "rankup",
    version,
    about = "Pseudoinverse updates for rank-augmenting low-rank perturbations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: GlobalOpts,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Relative singular value cutoff for numerical rank
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub rank_tol: f64,

    /// Tolerance for the Penrose condition residuals
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub penrose_tol: f64,

    /// Tolerance for subspace membership and orthogonality
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub subspace_tol: f64,

    /// Write the result matrix here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

impl GlobalOpts {
    pub fn tolerances(&self) -> Result<ToleranceConfig> {
        ToleranceConfig::new(self.rank_tol, self.penrose_tol, self.subspace_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Jsonl,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pseudoinverse of A + X1·G·X2ᵀ from the inputs
    Update {
        #[arg(value_parser = existing_file)]
        a: PathBuf,
        #[arg(value_parser = existing_file)]
        x1: PathBuf,
        #[arg(value_parser = existing_file)]
        g: PathBuf,
        /// Right factor; defaults to X1
        #[arg(value_parser = existing_file)]
        x2: Option<PathBuf>,
    },
    /// Check the four Penrose conditions for a candidate pseudoinverse
    Verify {
        #[arg(value_parser = existing_file)]
        omega: PathBuf,
        #[arg(value_parser = existing_file)]
        candidate: PathBuf,
    },
    /// Least squares fit through the centered SSP decomposition
    Regress {
        #[arg(value_parser = existing_file)]
        csv: PathBuf,
        /// Only compute the SSP pseudoinverse; no response column needed
        #[arg(long)]
        no_fit: bool,
    },
    /// Time the update formula against full recomputation
    Bench {
        size: usize,
        rank: usize,
        k: usize,
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn existing_file(s: &str) -> std::result::Result<PathBuf, String> {
    let p = PathBuf::from(s);
    if p.is_file() {
        Ok(p)
    } else {
        Err(format!("no such file: {s}"))
    }
}
