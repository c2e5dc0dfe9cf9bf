//! Masking of confidential numeric microdata columns.
//!
//! Two maskers are provided, both driven by a similarity parameter `α` in
//! `[0, 1]` (`α = 1` releases the original values):
//!
//! * [`additive`]: the Muralidhar–Sarathy hybrid generator, which keeps the
//!   mean, the variance and the covariance with a non-confidential key.
//! * [`multiplicative`]: `Y = X^α U^(1-α)` with lognormal noise calibrated so
//!   that the masked column keeps the lognormal law of the original, and
//!   with it the skewness.
//!
//! [`report`] measures what a mask preserved and how much it moved the data.

pub mod additive;
pub mod config;
pub mod error;
pub mod multiplicative;
pub mod report;
pub mod rng;
pub mod stats;

pub use additive::{calibrate_additive, mask_additive, mask_additive_with_noise, AdditiveNoiseSpec};
pub use config::{MaskConfig, Method};
pub use error::{MaskError, Result};
pub use multiplicative::{
    calibrate_multiplicative, estimate_log_params, lognormal_moments, lognormal_skewness,
    mask_multiplicative, mask_multiplicative_with_normals, noise_variance_multiplicative,
    power_law_params, product_law_params, LognormalParams, MultiplicativeNoiseSpec,
};
pub use report::{
    abs_diff_series, build_report, ks_log_normality, tail_exposure, MaskReport, TailExposure,
    DEFAULT_TOP_FRACTION,
};
pub use rng::{standard_normals, standardize_exact, NoiseMode, Seed};
pub use stats::{
    covariance, mean, pearson, rank_swap_count, ranks, skewness, spearman, variance, ColumnVector,
    MomentSummary,
};
