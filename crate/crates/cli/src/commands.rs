use std::path::{Path, PathBuf};

use rayon::prelude::*;
use skewmask_core::{
    build_report, ranks, standard_normals, tail_exposure, MaskConfig, MaskError, MaskReport,
    Method, NoiseMode, Seed, TailExposure, DEFAULT_TOP_FRACTION,
};

use crate::dataset::{format_float, load_csv, Dataset};
use crate::error::CliError;
use crate::output::write_all_atomic;

pub const DEFAULT_SEED: u64 = 2010;
pub const DEFAULT_N: usize = 1000;
pub const DEFAULT_MU: f64 = 4.0;
pub const DEFAULT_SIGMA_SQ: f64 = 2.0;
pub const PAPER_ALPHA_GRID: [f64; 5] = [0.999, 0.95, 0.9, 0.8, 0.7];
pub const DEFAULT_BINS: usize = 50;

#[derive(Debug, Clone)]
pub struct MaskJob {
    pub config: MaskConfig,
    pub input: PathBuf,
    pub output: PathBuf,
}

#[derive(Debug, Clone)]
pub struct MaskOutcome {
    pub output: PathBuf,
    pub report_path: PathBuf,
    pub report: MaskReport,
}

/// `masked.csv` -> `masked.report.json`
pub fn report_path_for(output: &Path) -> PathBuf {
    output.with_extension("report.json")
}

pub fn report_json(report: &MaskReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn cmd_mask(job: &MaskJob) -> Result<MaskOutcome, CliError> {
    job.config.validate()?;
    let mut dataset = load_csv(&job.input)?;
    let target = &job.config.target_column;
    let x = dataset.numeric_column(target)?;
    let key = match &job.config.key_column {
        Some(name) => Some(dataset.numeric_column(name)?),
        None => None,
    };
    let y = job.config.apply(&x, key.as_deref())?;
    let report = build_report(&x, &y, &job.config)?;
    dataset.replace_numeric_column(target, &y)?;

    let report_path = report_path_for(&job.output);
    write_all_atomic(&[
        (job.output.clone(), dataset.to_csv_string().into_bytes()),
        (report_path.clone(), report_json(&report).into_bytes()),
    ])?;
    Ok(MaskOutcome {
        output: job.output.clone(),
        report_path,
        report,
    })
}

#[derive(Debug, Clone)]
pub struct ReportJob {
    pub original: PathBuf,
    pub masked: PathBuf,
    pub config: MaskConfig,
}

/// Report on an existing (original, masked) pair of files.
pub fn cmd_report(job: &ReportJob) -> Result<MaskReport, CliError> {
    if !(0.0..=1.0).contains(&job.config.alpha) {
        return Err(MaskError::AlphaOutOfRange(job.config.alpha).into());
    }
    let original = load_csv(&job.original)?;
    let masked = load_csv(&job.masked)?;
    let x = original.numeric_column(&job.config.target_column)?;
    let y = masked.numeric_column(&job.config.target_column)?;
    Ok(build_report(&x, &y, &job.config)?)
}

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub n: usize,
    pub mu: f64,
    pub sigma_sq: f64,
    pub alpha_grid: Vec<f64>,
    pub seed: Seed,
    pub mode: NoiseMode,
    pub bins: usize,
    /// Worker threads for the alpha grid; `None` uses rayon's default.
    pub jobs: Option<usize>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            n: DEFAULT_N,
            mu: DEFAULT_MU,
            sigma_sq: DEFAULT_SIGMA_SQ,
            alpha_grid: PAPER_ALPHA_GRID.to_vec(),
            seed: Seed(DEFAULT_SEED),
            mode: NoiseMode::Exact,
            bins: DEFAULT_BINS,
            jobs: None,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.n < 2 {
            return Err(CliError::Config(format!("n = {} must be at least 2", self.n)));
        }
        if !self.mu.is_finite() || !self.sigma_sq.is_finite() || self.sigma_sq < 0.0 {
            return Err(CliError::Config(format!(
                "need finite mu and sigma_sq >= 0, got ({}, {})",
                self.mu, self.sigma_sq
            )));
        }
        if self.alpha_grid.is_empty() {
            return Err(CliError::Config("alpha grid is empty".into()));
        }
        if let Some(&a) = self.alpha_grid.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(MaskError::AlphaOutOfRange(a).into());
        }
        if self.bins == 0 {
            return Err(CliError::Config("bins must be positive".into()));
        }
        if self.jobs == Some(0) {
            return Err(CliError::Config("jobs must be positive".into()));
        }
        Ok(())
    }

    fn mask_config(&self, alpha: f64) -> MaskConfig {
        MaskConfig {
            method: Method::Multiplicative,
            alpha,
            mode: self.mode,
            seed: self.seed,
            target_column: "x".into(),
            key_column: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GridPoint {
    pub alpha: f64,
    pub masked: Vec<f64>,
    pub report: MaskReport,
    pub tail: TailExposure,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub original: Vec<f64>,
    pub points: Vec<GridPoint>,
}

/// Draw `x ~ LN(mu, sigma_sq)` and mask it at every alpha of the grid.
/// Everything stays in memory.
pub fn run_simulation(config: &SimulationConfig) -> Result<Simulation, CliError> {
    config.validate()?;
    let sd = config.sigma_sq.sqrt();
    let original: Vec<f64> = standard_normals(config.seed, "simulate/x", config.n)?
        .iter()
        .map(|z| (config.mu + sd * z).exp())
        .collect();

    let point = |alpha: f64| -> Result<GridPoint, CliError> {
        let mask_config = config.mask_config(alpha);
        let masked = mask_config.apply(&original, None)?.into_inner();
        let report = build_report(&original, &masked, &mask_config)?;
        let tail = tail_exposure(&original, &masked, DEFAULT_TOP_FRACTION)?;
        Ok(GridPoint {
            alpha,
            masked,
            report,
            tail,
        })
    };

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = config.jobs {
        builder = builder.num_threads(jobs);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let points = pool.install(|| {
        config
            .alpha_grid
            .par_iter()
            .map(|&a| point(a))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(Simulation { original, points })
}

/// Equal-width histogram over `[min, max]` as `(lower, upper, density)`.
pub fn histogram(values: &[f64], bins: usize) -> Vec<(f64, f64, f64)> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for v in values {
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let n = values.len() as f64;
    counts
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let lower = lo + k as f64 * width;
            let upper = if k + 1 == bins { hi } else { lo + (k + 1) as f64 * width };
            (lower, upper, *c as f64 / (n * width))
        })
        .collect()
}

fn histogram_csv(values: &[f64], bins: usize) -> String {
    let mut out = String::from("bin_lower,bin_upper,density\n");
    for (lo, hi, d) in histogram(values, bins) {
        out.push_str(&format!("{},{},{}\n", format_float(lo), format_float(hi), format_float(d)));
    }
    out
}

fn opt(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

fn id_column_csv(values: &[f64]) -> Result<String, CliError> {
    let mut d = Dataset::with_header(&["id", "x"]);
    for (i, v) in values.iter().enumerate() {
        d.push_row(vec![(i + 1).to_string(), format_float(*v)])?;
    }
    Ok(d.to_csv_string())
}

/// Directory name of one grid point, e.g. `alpha_0.95`.
pub fn alpha_dir(alpha: f64) -> String {
    format!("alpha_{alpha}")
}

/// Render every output file of a simulation, paths relative to the output
/// directory.
pub fn simulation_files(
    sim: &Simulation,
    config: &SimulationConfig,
) -> Result<Vec<(PathBuf, Vec<u8>)>, CliError> {
    let mut files = vec![
        (PathBuf::from("original.csv"), id_column_csv(&sim.original)?.into_bytes()),
        (
            PathBuf::from("histogram_original.csv"),
            histogram_csv(&sim.original, config.bins).into_bytes(),
        ),
    ];
    let mut summary = String::from(
        "alpha,pearson_xy,spearman_xy,pearson_log_xy,rank_swaps,mean_abs_perturbation_top,mean_abs_perturbation_rest\n",
    );
    let original_ranks = ranks(&sim.original)?;
    for p in &sim.points {
        let dir = PathBuf::from(alpha_dir(p.alpha));
        files.push((dir.join("masked.csv"), id_column_csv(&p.masked)?.into_bytes()));
        files.push((dir.join("report.json"), report_json(&p.report).into_bytes()));
        files.push((
            dir.join("histogram_masked.csv"),
            histogram_csv(&p.masked, config.bins).into_bytes(),
        ));

        let mut abs_diff = String::from("original_rank,abs_diff\n");
        for (rank, d) in &p.report.abs_diff_series {
            abs_diff.push_str(&format!("{rank},{}\n", format_float(*d)));
        }
        files.push((dir.join("abs_diff.csv"), abs_diff.into_bytes()));

        let mut pairs = String::from("id,original_rank,masked_rank\n");
        for (i, (a, b)) in original_ranks.iter().zip(ranks(&p.masked)?).enumerate() {
            pairs.push_str(&format!("{},{a},{b}\n", i + 1));
        }
        files.push((dir.join("rank_pairs.csv"), pairs.into_bytes()));

        summary.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.alpha,
            opt(p.report.pearson_xy),
            opt(p.report.spearman_xy),
            opt(p.report.pearson_log_xy),
            p.report.rank_swaps,
            format_float(p.tail.mean_abs_perturbation_top),
            format_float(p.tail.mean_abs_perturbation_rest),
        ));
    }
    files.push((PathBuf::from("correlation_summary.csv"), summary.into_bytes()));
    Ok(files)
}

pub fn cmd_simulate(config: &SimulationConfig, outdir: &Path) -> Result<Simulation, CliError> {
    let sim = run_simulation(config)?;
    let files: Vec<(PathBuf, Vec<u8>)> = simulation_files(&sim, config)?
        .into_iter()
        .map(|(rel, bytes)| (outdir.join(rel), bytes))
        .collect();
    write_all_atomic(&files)?;
    Ok(sim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_densities_integrate_to_one() {
        let values = [1.0, 2.0, 2.5, 3.0, 10.0];
        let h = histogram(&values, 4);
        assert_eq!(h.len(), 4);
        let mass: f64 = h.iter().map(|(lo, hi, d)| (hi - lo) * d).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        assert_eq!(h[0].0, 1.0);
        assert_eq!(h[3].1, 10.0);
        let flat = histogram(&[3.0, 3.0], 2);
        let mass: f64 = flat.iter().map(|(lo, hi, d)| (hi - lo) * d).sum();
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simulation_rejects_bad_config() {
        let mut c = SimulationConfig { n: 1, ..Default::default() };
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
        c.n = 10;
        c.alpha_grid = vec![0.5, 1.2];
        assert!(matches!(
            c.validate(),
            Err(CliError::Mask(MaskError::AlphaOutOfRange(_)))
        ));
        c.alpha_grid = vec![0.5];
        c.sigma_sq = -1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn paper_defaults() {
        let c = SimulationConfig::default();
        assert_eq!(c.n, 1000);
        assert_eq!((c.mu, c.sigma_sq), (4.0, 2.0));
        assert_eq!(c.alpha_grid, vec![0.999, 0.95, 0.9, 0.8, 0.7]);
    }

    #[test]
    fn report_path_sits_beside_output() {
        assert_eq!(
            report_path_for(Path::new("out/masked.csv")),
            PathBuf::from("out/masked.report.json")
        );
    }
}
