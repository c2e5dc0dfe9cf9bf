//! Multiplicative lognormal masking, `Y = X^α · U^(1-α)`.
//!
//! If `ln X ~ N(μ, σ²)` and the noise `U` is lognormal with log-mean `μ` and
//! log-variance `(1 + α)/(1 - α) · σ²`, then `ln Y` is again `N(μ, σ²)`: the
//! masked column has the same lognormal law as the original, skewness
//! included, while `α` sets how close each masked value stays to its
//! original.
//!
//! The noise variance diverges as `α → 1` while its exponent `1 - α` goes to
//! zero. The masker therefore works on the log scale in the collapsed form
//!
//! ```text
//! ln y_i = α ln x_i + (1 - α) μ + sqrt(1 - α²) σ z_i,   z ~ N(0, 1)
//! ```
//!
//! which is the same random variable with bounded coefficients.

use serde::{Deserialize, Serialize};

use crate::additive::check_alpha;
use crate::error::{MaskError, Result};
use crate::rng::{standard_normals, standardize_exact, NoiseMode, Seed};
use crate::stats::{self, ensure_positive, ColumnVector};

/// Log-scale mean and population variance of a lognormal law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LognormalParams {
    pub mu: f64,
    pub sigma_sq: f64,
}

impl LognormalParams {
    pub fn new(mu: f64, sigma_sq: f64) -> Result<Self> {
        if !mu.is_finite() || !sigma_sq.is_finite() || sigma_sq < 0.0 {
            return Err(MaskError::InvalidArgument(format!(
                "lognormal parameters ({mu}, {sigma_sq}) must be finite with sigma_sq >= 0"
            )));
        }
        Ok(Self { mu, sigma_sq })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma_sq.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplicativeNoiseSpec {
    pub alpha: f64,
    pub source_params: LognormalParams,
    pub noise_params: LognormalParams,
}

/// Mean and population variance of `ln x`.
pub fn estimate_log_params(x: &[f64]) -> Result<LognormalParams> {
    if x.is_empty() {
        return Err(MaskError::EmptyColumn);
    }
    ensure_positive(x)?;
    let logs: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    Ok(LognormalParams {
        mu: stats::mean(&logs)?,
        sigma_sq: stats::variance(&logs)?,
    })
}

/// `(E[X], Var[X])` for `X ~ LN(mu, sigma_sq)`.
pub fn lognormal_moments(p: LognormalParams) -> (f64, f64) {
    let mean = (p.mu + p.sigma_sq / 2.0).exp();
    let variance = p.sigma_sq.exp_m1() * (2.0 * p.mu + p.sigma_sq).exp();
    (mean, variance)
}

/// `(exp(σ²) + 2) · sqrt(exp(σ²) - 1)`; does not depend on `mu`.
pub fn lognormal_skewness(p: LognormalParams) -> f64 {
    let e = p.sigma_sq.exp_m1();
    (e + 3.0) * e.sqrt()
}

/// Log-scale variance the noise needs for the masked law to match the
/// source: `(1 - α²)/(1 - α)² · σ²`, evaluated as `(1 + α)/(1 - α) · σ²`.
pub fn noise_variance_multiplicative(alpha: f64, sigma_sq: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(MaskError::AlphaOutOfRange(alpha));
    }
    if !(sigma_sq >= 0.0) {
        return Err(MaskError::InvalidArgument(format!(
            "sigma_sq {sigma_sq} must be >= 0"
        )));
    }
    Ok((1.0 + alpha) / (1.0 - alpha) * sigma_sq)
}

/// Law of `X^exponent` for `X ~ LN(p)`.
pub fn power_law_params(p: LognormalParams, exponent: f64) -> LognormalParams {
    LognormalParams {
        mu: exponent * p.mu,
        sigma_sq: exponent * exponent * p.sigma_sq,
    }
}

/// Law of the product of independent lognormals.
pub fn product_law_params(p: LognormalParams, q: LognormalParams) -> LognormalParams {
    LognormalParams {
        mu: p.mu + q.mu,
        sigma_sq: p.sigma_sq + q.sigma_sq,
    }
}

/// Noise law for `alpha < 1`. At `alpha = 1` no noise exists and the masker
/// returns its input.
pub fn calibrate_multiplicative(x: &[f64], alpha: f64) -> Result<MultiplicativeNoiseSpec> {
    check_alpha(alpha)?;
    let source_params = estimate_log_params(x)?;
    let noise_params = LognormalParams {
        mu: source_params.mu,
        sigma_sq: noise_variance_multiplicative(alpha, source_params.sigma_sq)?,
    };
    Ok(MultiplicativeNoiseSpec {
        alpha,
        source_params,
        noise_params,
    })
}

/// Mask with caller-supplied standard normals `z`, used as given.
pub fn mask_multiplicative_with_normals(
    x: &[f64],
    alpha: f64,
    z: &[f64],
) -> Result<ColumnVector> {
    check_alpha(alpha)?;
    if z.len() != x.len() {
        return Err(MaskError::LengthMismatch {
            left: x.len(),
            right: z.len(),
        });
    }
    if alpha == 1.0 {
        ensure_positive(x)?;
        return ColumnVector::new(x.to_vec());
    }
    let params = estimate_log_params(x)?;
    apply(x, alpha, params, z)
}

fn apply(x: &[f64], alpha: f64, params: LognormalParams, z: &[f64]) -> Result<ColumnVector> {
    let shift = (1.0 - alpha) * params.mu;
    let noise_scale = (1.0 - alpha * alpha).sqrt() * params.sigma();
    let y = x
        .iter()
        .zip(z)
        .map(|(xi, zi)| (alpha * xi.ln() + shift + noise_scale * zi).exp())
        .collect();
    ColumnVector::new(y)
}

/// Mask a strictly positive column. Noise comes from the stream
/// `(seed, label)`.
///
/// In exact mode the draw is standardized against `ln x`, so the masked
/// column reproduces the log-scale mean and variance of `x` in sample and
/// `pearson(ln x, ln y) = α`. A column with constant logs is returned as is.
pub fn mask_multiplicative(
    x: &[f64],
    alpha: f64,
    seed: Seed,
    label: &str,
    mode: NoiseMode,
) -> Result<ColumnVector> {
    check_alpha(alpha)?;
    if x.is_empty() {
        return Err(MaskError::EmptyColumn);
    }
    ensure_positive(x)?;
    if alpha == 1.0 {
        return ColumnVector::new(x.to_vec());
    }
    let params = estimate_log_params(x)?;
    if params.sigma_sq == 0.0 {
        return ColumnVector::new(x.to_vec());
    }
    let z = standard_normals(seed, label, x.len())?;
    let z = match mode {
        NoiseMode::Exact => {
            let logs: Vec<f64> = x.iter().map(|v| v.ln()).collect();
            standardize_exact(&z, 0.0, 1.0, &[&logs])?
        }
        NoiseMode::Stochastic => z,
    };
    apply(x, alpha, params, &z)
}
