//! Additive hybrid generator (Muralidhar–Sarathy).
//!
//! The masked value is
//!
//! ```text
//! y_i = [(1 - α) mean(x) - β mean(s)] + α x_i + β s_i + u_i
//! ```
//!
//! with `β = (1 - α) cov(s, x) / var(s)` and `u ~ N(0, σ_uu²)`,
//! `σ_uu² = (1 - α²) (var(x) - cov(s, x)² / var(s))`. These two choices
//! keep the mean and variance of `x` and its covariance with the key `s`.
//! The bracketed constant re-centers raw, non-zero-mean data, so callers
//! never pre-center.

use serde::{Deserialize, Serialize};

use crate::error::{MaskError, Result};
use crate::rng::{standard_normals, standardize_exact, NoiseMode, Seed};
use crate::stats::{covariance, ColumnVector, MomentSummary};

/// Below this (relative to `var(x)`) a negative noise variance is treated
/// as rounding and floored to zero.
const NEGATIVE_VARIANCE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdditiveNoiseSpec {
    pub alpha: f64,
    pub beta: f64,
    /// Variance of the noise term `u`.
    pub sigma_uu: f64,
    pub x_moments: MomentSummary,
    pub s_moments: MomentSummary,
    pub cov_sx: f64,
}

impl AdditiveNoiseSpec {
    /// Additive constant `(1 - α) mean(x) - β mean(s)`.
    pub fn intercept(&self) -> f64 {
        (1.0 - self.alpha) * self.x_moments.mean - self.beta * self.s_moments.mean
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(MaskError::AlphaOutOfRange(alpha));
    }
    Ok(())
}

pub fn calibrate_additive(x: &[f64], s: &[f64], alpha: f64) -> Result<AdditiveNoiseSpec> {
    check_alpha(alpha)?;
    if x.len() != s.len() {
        return Err(MaskError::LengthMismatch {
            left: x.len(),
            right: s.len(),
        });
    }
    let x_moments = MomentSummary::of(x)?;
    let s_moments = MomentSummary::of(s)?;
    if s_moments.variance <= 0.0 {
        return Err(MaskError::ZeroVariance);
    }
    let cov_sx = covariance(s, x)?;
    let beta = (1.0 - alpha) * cov_sx / s_moments.variance;
    let mut sigma_uu =
        (1.0 - alpha * alpha) * (x_moments.variance - cov_sx * cov_sx / s_moments.variance);
    if sigma_uu < 0.0 {
        if sigma_uu < -NEGATIVE_VARIANCE_TOLERANCE * x_moments.variance.max(1.0) {
            return Err(MaskError::NegativeNoiseVariance(sigma_uu));
        }
        sigma_uu = 0.0;
    }
    Ok(AdditiveNoiseSpec {
        alpha,
        beta,
        sigma_uu,
        x_moments,
        s_moments,
        cov_sx,
    })
}

/// Apply the hybrid equation with a caller-supplied noise vector `u`.
///
/// Bypasses noise generation; used to check worked examples.
pub fn mask_additive_with_noise(
    x: &[f64],
    s: &[f64],
    alpha: f64,
    u: &[f64],
) -> Result<ColumnVector> {
    let spec = calibrate_additive(x, s, alpha)?;
    apply(&spec, x, s, u)
}

fn apply(spec: &AdditiveNoiseSpec, x: &[f64], s: &[f64], u: &[f64]) -> Result<ColumnVector> {
    if u.len() != x.len() {
        return Err(MaskError::LengthMismatch {
            left: x.len(),
            right: u.len(),
        });
    }
    let c = spec.intercept();
    let y = x
        .iter()
        .zip(s)
        .zip(u)
        .map(|((xi, si), ui)| c + spec.alpha * xi + spec.beta * si + ui)
        .collect();
    ColumnVector::new(y)
}

/// Mask `x` against the key `s`. Noise comes from the stream `(seed, label)`.
pub fn mask_additive(
    x: &[f64],
    s: &[f64],
    alpha: f64,
    seed: Seed,
    label: &str,
    mode: NoiseMode,
) -> Result<ColumnVector> {
    let spec = calibrate_additive(x, s, alpha)?;
    let z = standard_normals(seed, label, x.len())?;
    let u = match mode {
        NoiseMode::Exact => standardize_exact(&z, 0.0, spec.sigma_uu, &[x, s])?.into_inner(),
        NoiseMode::Stochastic => {
            let sd = spec.sigma_uu.sqrt();
            z.iter().map(|v| sd * v).collect()
        }
    };
    apply(&spec, x, s, &u)
}
