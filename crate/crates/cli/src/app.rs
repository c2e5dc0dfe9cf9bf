use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use skewmask_core::{MaskConfig, Method, NoiseMode, Seed};

use crate::commands::{
    cmd_mask, cmd_report, cmd_simulate, report_json, MaskJob, ReportJob, SimulationConfig,
    DEFAULT_BINS, DEFAULT_MU, DEFAULT_N, DEFAULT_SEED, DEFAULT_SIGMA_SQ,
};
use crate::error::{CliError, EXIT_CODES};
use crate::output::write_atomic;

pub const SEED_ENV: &str = "SKEWMASK_SEED";
pub const OUTDIR_ENV: &str = "SKEWMASK_OUTDIR";

fn exit_code_help() -> String {
    let mut s = String::from("Exit codes:\n");
    for (n, name, what) in EXIT_CODES {
        s.push_str(&format!("  {n:>3}  {name:<24} {what}\n"));
    }
    s.push_str(
        "\nErrors are printed to stderr as one line:\n  error code=<CODE> exit=<n> message=\"...\"\n",
    );
    s
}

#[derive(Debug, Parser)]
#[command(
    name = "skewmask",
    version,
    about = "Mask confidential numeric microdata with additive or skewness-preserving multiplicative noise",
    after_help = exit_code_help()
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mask one column of a CSV file and write a report beside the output.
    Mask(MaskArgs),
    /// Simulate a lognormal column and mask it over a grid of alphas.
    Simulate(SimulateArgs),
    /// Compare an original and a masked CSV file.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Additive,
    Multiplicative,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Additive => Method::Additive,
            MethodArg::Multiplicative => Method::Multiplicative,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Exact,
    Stochastic,
}

impl From<ModeArg> for NoiseMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => NoiseMode::Exact,
            ModeArg::Stochastic => NoiseMode::Stochastic,
        }
    }
}

#[derive(Debug, Args)]
pub struct MaskArgs {
    #[arg(long, value_enum)]
    pub method: MethodArg,
    /// Similarity in [0, 1]; 1 releases the original values.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Confidential column to mask.
    #[arg(long)]
    pub column: String,
    /// Non-confidential key column (additive method only).
    #[arg(long)]
    pub key_column: Option<String>,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long = "out")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = DEFAULT_N)]
    pub n: usize,
    /// Log-scale mean.
    #[arg(long, default_value_t = DEFAULT_MU, allow_negative_numbers = true)]
    pub mu: f64,
    /// Log-scale variance.
    #[arg(long, default_value_t = DEFAULT_SIGMA_SQ, allow_negative_numbers = true)]
    pub sigma_sq: f64,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.999,0.95,0.9,0.8,0.7",
        allow_negative_numbers = true
    )]
    pub alpha_grid: Vec<f64>,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    #[arg(long, env = OUTDIR_ENV, default_value = "simulation")]
    pub outdir: PathBuf,
    /// Histogram bins for the density series.
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// Worker threads across the alpha grid (output does not depend on it).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub masked: PathBuf,
    #[arg(long)]
    pub column: String,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub key_column: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long = "out")]
    pub output: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Mask(a) => {
            let job = MaskJob {
                config: MaskConfig {
                    method: a.method.into(),
                    alpha: a.alpha,
                    mode: a.mode.into(),
                    seed: Seed(a.seed),
                    target_column: a.column,
                    key_column: a.key_column,
                },
                input: a.input,
                output: a.output,
            };
            let outcome = cmd_mask(&job)?;
            println!(
                "wrote {} and {}",
                outcome.output.display(),
                outcome.report_path.display()
            );
        }
        Command::Simulate(a) => {
            let config = SimulationConfig {
                n: a.n,
                mu: a.mu,
                sigma_sq: a.sigma_sq,
                alpha_grid: a.alpha_grid,
                seed: Seed(a.seed),
                mode: a.mode.into(),
                bins: a.bins,
                jobs: a.jobs,
            };
            let sim = cmd_simulate(&config, &a.outdir)?;
            println!("alpha\tpearson_xy\tspearman_xy\trank_swaps");
            for p in &sim.points {
                println!(
                    "{}\t{:.4}\t{:.4}\t{}",
                    p.alpha,
                    p.report.pearson_xy.unwrap_or(f64::NAN),
                    p.report.spearman_xy.unwrap_or(f64::NAN),
                    p.report.rank_swaps
                );
            }
        }
        Command::Report(a) => {
            let job = ReportJob {
                original: a.input,
                masked: a.masked,
                config: MaskConfig {
                    method: a.method.into(),
                    alpha: a.alpha,
                    mode: a.mode.into(),
                    seed: Seed(a.seed),
                    target_column: a.column,
                    key_column: a.key_column,
                },
            };
            let json = report_json(&cmd_report(&job)?);
            match a.output {
                Some(path) => write_atomic(&path, json.as_bytes())?,
                None => print!("{json}"),
            }
        }
    }
    Ok(())
}
