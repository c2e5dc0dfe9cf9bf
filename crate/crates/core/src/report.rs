//! Utility and disclosure-risk diagnostics for an (original, masked) pair.

use serde::{Deserialize, Serialize};

use crate::config::{MaskConfig, Method};
use crate::error::{MaskError, Result};
use crate::multiplicative::{estimate_log_params, LognormalParams};
use crate::rng::NoiseMode;
use crate::stats::{
    ascending_order, ensure_positive, pearson, rank_swap_count, skewness, spearman, MomentSummary,
};

/// Default share of largest original values treated as the exposed tail.
pub const DEFAULT_TOP_FRACTION: f64 = 0.05;

/// Side-by-side diagnostics of one masked column.
///
/// Correlations and skewness are `None` where they are undefined (constant
/// columns); the log-scale fields are `None` unless both columns are
/// strictly positive, and `pearson_log_xy` / `ks_stat_log` are only filled
/// for the multiplicative method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskReport {
    pub method: Method,
    /// Similarity: 1 releases the original values.
    pub alpha: f64,
    pub mode: NoiseMode,
    pub n: usize,
    pub raw_moments_original: MomentSummary,
    pub raw_moments_masked: MomentSummary,
    pub log_params_original: Option<LognormalParams>,
    pub log_params_masked: Option<LognormalParams>,
    pub pearson_xy: Option<f64>,
    pub spearman_xy: Option<f64>,
    pub pearson_log_xy: Option<f64>,
    pub rank_swaps: usize,
    pub skewness_original: Option<f64>,
    pub skewness_masked: Option<f64>,
    pub ks_stat_log: Option<f64>,
    /// `(original_rank, |y_i - x_i|)` in ascending order of the original value.
    pub abs_diff_series: Vec<(usize, f64)>,
}

fn ensure_same_len(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(MaskError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(())
}

/// Absolute perturbations ordered by the original value, tagged with the
/// original 1-based rank.
pub fn abs_diff_series(x: &[f64], y: &[f64]) -> Result<Vec<(usize, f64)>> {
    ensure_same_len(x, y)?;
    Ok(ascending_order(x)
        .into_iter()
        .enumerate()
        .map(|(rank, i)| (rank + 1, (y[i] - x[i]).abs()))
        .collect())
}

pub fn build_report(x: &[f64], y: &[f64], config: &MaskConfig) -> Result<MaskReport> {
    ensure_same_len(x, y)?;
    let raw_moments_original = MomentSummary::of(x)?;
    let raw_moments_masked = MomentSummary::of(y)?;

    let positive = ensure_positive(x).is_ok() && ensure_positive(y).is_ok();
    let (log_params_original, log_params_masked) = if positive {
        (Some(estimate_log_params(x)?), Some(estimate_log_params(y)?))
    } else {
        (None, None)
    };

    let multiplicative = config.method == Method::Multiplicative;
    let (pearson_log_xy, ks_stat_log) = match (multiplicative, log_params_original) {
        (true, Some(reference)) => {
            let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
            let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
            (pearson(&lx, &ly).ok(), Some(ks_log_normality(y, reference)?))
        }
        _ => (None, None),
    };

    Ok(MaskReport {
        method: config.method,
        alpha: config.alpha,
        mode: config.mode,
        n: x.len(),
        raw_moments_original,
        raw_moments_masked,
        log_params_original,
        log_params_masked,
        pearson_xy: pearson(x, y).ok(),
        spearman_xy: spearman(x, y).ok(),
        pearson_log_xy,
        rank_swaps: rank_swap_count(x, y)?,
        skewness_original: skewness(x).ok(),
        skewness_masked: skewness(y).ok(),
        ks_stat_log,
        abs_diff_series: abs_diff_series(x, y)?,
    })
}

fn normal_cdf(t: f64) -> f64 {
    0.5 * libm::erfc(-t / std::f64::consts::SQRT_2)
}

/// One-sample Kolmogorov–Smirnov statistic of `ln y` against
/// `N(reference.mu, reference.sigma_sq)`.
///
/// With a zero reference variance the statistic is 0 if every log matches
/// `mu` (to 1e-12 relative) and 1 otherwise.
pub fn ks_log_normality(y: &[f64], reference: LognormalParams) -> Result<f64> {
    if y.is_empty() {
        return Err(MaskError::EmptyColumn);
    }
    ensure_positive(y)?;
    let mut logs: Vec<f64> = y.iter().map(|v| v.ln()).collect();

    if reference.sigma_sq == 0.0 {
        let tol = 1e-12 * reference.mu.abs().max(1.0);
        let matches = logs.iter().all(|l| (l - reference.mu).abs() <= tol);
        return Ok(if matches { 0.0 } else { 1.0 });
    }

    logs.sort_by(f64::total_cmp);
    let n = logs.len() as f64;
    let sd = reference.sigma();
    let d = logs
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let f = normal_cdf((l - reference.mu) / sd);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max);
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailExposure {
    pub mean_abs_perturbation_top: f64,
    pub mean_abs_perturbation_rest: f64,
}

/// Mean `|y - x|` over the `top_fraction` largest originals and over the rest.
///
/// The tail holds `round(top_fraction * n)` rows, kept within `[1, n - 1]`.
pub fn tail_exposure(x: &[f64], y: &[f64], top_fraction: f64) -> Result<TailExposure> {
    ensure_same_len(x, y)?;
    if !(top_fraction > 0.0 && top_fraction < 1.0) {
        return Err(MaskError::InvalidArgument(format!(
            "top_fraction {top_fraction} must lie strictly between 0 and 1"
        )));
    }
    let n = x.len();
    if n < 2 {
        return Err(MaskError::InvalidArgument(
            "tail exposure needs at least two rows".into(),
        ));
    }
    let top = ((top_fraction * n as f64).round() as usize).clamp(1, n - 1);
    let diffs: Vec<f64> = ascending_order(x)
        .into_iter()
        .map(|i| (y[i] - x[i]).abs())
        .collect();
    let (rest, tail) = diffs.split_at(n - top);
    Ok(TailExposure {
        mean_abs_perturbation_top: tail.iter().sum::<f64>() / tail.len() as f64,
        mean_abs_perturbation_rest: rest.iter().sum::<f64>() / rest.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{standard_normals, Seed};

    fn multiplicative_config(alpha: f64) -> MaskConfig {
        MaskConfig {
            method: Method::Multiplicative,
            alpha,
            mode: NoiseMode::Exact,
            seed: Seed(3),
            target_column: "x".into(),
            key_column: None,
        }
    }

    #[test]
    fn identity_mask_report() {
        let x = [3.0, 1.0, 8.0, 2.0, 5.5];
        let r = build_report(&x, &x, &multiplicative_config(1.0)).unwrap();
        assert_eq!(r.pearson_xy, Some(1.0));
        assert_eq!(r.spearman_xy, Some(1.0));
        assert_eq!(r.rank_swaps, 0);
        assert_eq!(r.skewness_original, r.skewness_masked);
        assert_eq!(r.log_params_original, r.log_params_masked);
        assert_eq!(r.abs_diff_series.len(), x.len());
        assert!(r.abs_diff_series.iter().all(|(_, d)| *d == 0.0));
        let ranks: Vec<usize> = r.abs_diff_series.iter().map(|(k, _)| *k).collect();
        assert_eq!(ranks, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn log_fields_absent_on_non_positive_data() {
        let x = [-1.0, 0.0, 2.0, 3.0];
        let y = [-0.5, 0.5, 1.5, 2.0];
        let mut config = multiplicative_config(0.5);
        config.method = Method::Additive;
        config.key_column = Some("k".into());
        let r = build_report(&x, &y, &config).unwrap();
        assert!(r.log_params_original.is_none() && r.log_params_masked.is_none());
        assert!(r.pearson_log_xy.is_none() && r.ks_stat_log.is_none());
        assert!(r.pearson_xy.is_some());
    }

    #[test]
    fn report_rejects_length_mismatch() {
        assert!(matches!(
            build_report(&[1.0, 2.0], &[1.0], &multiplicative_config(0.5)),
            Err(MaskError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn abs_diff_series_follows_original_order() {
        let x = [30.0, 10.0, 20.0];
        let y = [31.0, 10.5, 18.0];
        assert_eq!(
            abs_diff_series(&x, &y).unwrap(),
            vec![(1, 0.5), (2, 2.0), (3, 1.0)]
        );
    }

    #[test]
    fn ks_degenerate_reference() {
        let mu = 1.3f64;
        let y = vec![mu.exp(); 4];
        let reference = LognormalParams { mu, sigma_sq: 0.0 };
        assert_eq!(ks_log_normality(&y, reference).unwrap(), 0.0);
        let y = [mu.exp(), 2.0 * mu.exp()];
        assert_eq!(ks_log_normality(&y, reference).unwrap(), 1.0);
    }

    #[test]
    fn ks_sample_from_reference_law() {
        let n = 100_000;
        let reference = LognormalParams { mu: 4.0, sigma_sq: 2.0 };
        let z = standard_normals(Seed(77), "ks", n).unwrap();
        let y: Vec<f64> = z.iter().map(|v| (4.0 + 2f64.sqrt() * v).exp()).collect();
        let d = ks_log_normality(&y, reference).unwrap();
        assert!(d < 1.63 / (n as f64).sqrt(), "D = {d}");
    }

    #[test]
    fn ks_detects_shifted_reference() {
        let n = 10_000;
        let z = standard_normals(Seed(78), "ks", n).unwrap();
        let y: Vec<f64> = z.iter().map(|v| v.exp()).collect();
        let d = ks_log_normality(&y, LognormalParams { mu: 5.0, sigma_sq: 1.0 }).unwrap();
        assert!(d > 0.9, "D = {d}");
        // brute force: fraction of logs below the point where the shifted CDF is 1/2
        let below_mu = y.iter().filter(|v| v.ln() < 5.0).count() as f64 / n as f64;
        assert!(d >= below_mu - 0.5);
    }

    #[test]
    fn ks_matches_brute_force_on_small_sample() {
        let y = [0.5f64.exp(), (-1.0f64).exp(), 2.0f64.exp()];
        let reference = LognormalParams { mu: 0.0, sigma_sq: 1.0 };
        // F at sorted logs -1, 0.5, 2 via erfc
        let f: Vec<f64> = [-1.0, 0.5, 2.0].iter().map(|t| normal_cdf(*t)).collect();
        let mut brute: f64 = 0.0;
        for (i, fi) in f.iter().enumerate() {
            brute = brute.max(((i + 1) as f64 / 3.0 - fi).abs());
            brute = brute.max((fi - i as f64 / 3.0).abs());
        }
        let d = ks_log_normality(&y, reference).unwrap();
        assert!((d - brute).abs() < 1e-15);
        assert!(matches!(
            ks_log_normality(&[1.0, -2.0], reference),
            Err(MaskError::NonPositiveValue { index: 1, .. })
        ));
    }

    #[test]
    fn tail_exposure_cases() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let t = tail_exposure(&x, &x, 0.25).unwrap();
        assert_eq!((t.mean_abs_perturbation_top, t.mean_abs_perturbation_rest), (0.0, 0.0));
        let y = [1.5, 2.0, 3.0, 10.0];
        let t = tail_exposure(&x, &y, 0.25).unwrap();
        assert_eq!(t.mean_abs_perturbation_top, 6.0);
        assert!((t.mean_abs_perturbation_rest - 0.5 / 3.0).abs() < 1e-15);
        assert!(tail_exposure(&x, &y, 0.0).is_err());
        assert!(tail_exposure(&x, &y, 1.0).is_err());
        assert!(matches!(
            tail_exposure(&x, &y[..2], 0.5),
            Err(MaskError::LengthMismatch { .. })
        ));
    }
}
