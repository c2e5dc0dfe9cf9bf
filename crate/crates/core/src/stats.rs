//! Sample moments and association measures.
//!
//! Every moment here is population style: sums are divided by `n`, never
//! `n - 1`. The functions take plain slices so that reporting code and test
//! oracles can call them on intermediate buffers; [`ColumnVector`] derefs to
//! a slice and is what the maskers accept.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{MaskError, Result};

/// Finite, non-empty observations of one variable, indexed by respondent.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnVector(Vec<f64>);

impl ColumnVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(MaskError::EmptyColumn);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(MaskError::NonFinite { index, value });
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn ln(&self) -> Result<ColumnVector> {
        ensure_positive(&self.0)?;
        Ok(Self(self.0.iter().map(|v| v.ln()).collect()))
    }
}

impl Deref for ColumnVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for ColumnVector {
    type Error = MaskError;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<ColumnVector> for Vec<f64> {
    fn from(column: ColumnVector) -> Self {
        column.0
    }
}

/// Mean and population variance of a column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub mean: f64,
    pub variance: f64,
    pub n: usize,
}

impl MomentSummary {
    pub fn of(x: &[f64]) -> Result<Self> {
        Ok(Self {
            mean: mean(x)?,
            variance: variance(x)?,
            n: x.len(),
        })
    }
}

pub(crate) fn ensure_positive(x: &[f64]) -> Result<()> {
    match x.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        Some((index, &value)) => Err(MaskError::NonPositiveValue { index, value }),
        None => Ok(()),
    }
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

/// Arithmetic mean, with one correction pass for the rounding error of the
/// naive sum.
pub fn mean(x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(MaskError::EmptyColumn);
    }
    let n = x.len() as f64;
    let rough = x.iter().sum::<f64>() / n;
    let correction = x.iter().map(|v| v - rough).sum::<f64>() / n;
    Ok(rough + correction)
}

/// Population variance. Shares its code path with [`covariance`] so that
/// `covariance(x, x) == variance(x)` holds bit for bit.
pub fn variance(x: &[f64]) -> Result<f64> {
    covariance(x, x)
}

pub fn covariance(x: &[f64], s: &[f64]) -> Result<f64> {
    ensure_same_len(x, s)?;
    let mx = mean(x)?;
    let ms = mean(s)?;
    let n = x.len() as f64;
    Ok(x.iter()
        .zip(s)
        .map(|(a, b)| (a - mx) * (b - ms))
        .sum::<f64>()
        / n)
}

/// Pearson correlation, clamped to `[-1, 1]`.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    ensure_same_len(x, y)?;
    let vx = variance(x)?;
    let vy = variance(y)?;
    if vx <= 0.0 || vy <= 0.0 {
        return Err(MaskError::ZeroVariance);
    }
    let r = covariance(x, y)? / (vx * vy).sqrt();
    Ok(r.clamp(-1.0, 1.0))
}

/// 1-based ascending ranks; ties keep their original index order.
pub fn ranks(x: &[f64]) -> Result<Vec<usize>> {
    if x.is_empty() {
        return Err(MaskError::EmptyColumn);
    }
    let order = ascending_order(x);
    let mut out = vec![0; x.len()];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = rank + 1;
    }
    Ok(out)
}

/// Indices that sort `x` ascending (stable).
pub fn ascending_order(x: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    order
}

pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    ensure_same_len(x, y)?;
    if x.len() < 2 {
        return Err(MaskError::ZeroVariance);
    }
    let rx: Vec<f64> = ranks(x)?.into_iter().map(|r| r as f64).collect();
    let ry: Vec<f64> = ranks(y)?.into_iter().map(|r| r as f64).collect();
    pearson(&rx, &ry)
}

/// Number of respondents whose rank differs between `x` and `y`.
pub fn rank_swap_count(x: &[f64], y: &[f64]) -> Result<usize> {
    ensure_same_len(x, y)?;
    if x.is_empty() {
        return Ok(0);
    }
    let rx = ranks(x)?;
    let ry = ranks(y)?;
    Ok(rx.iter().zip(&ry).filter(|(a, b)| a != b).count())
}

/// Third standardized moment, `(1/n) Σ ((x_i - mean) / sd)^3`.
pub fn skewness(x: &[f64]) -> Result<f64> {
    let var = variance(x)?;
    if x.len() < 2 || var <= 0.0 {
        return Err(MaskError::ZeroVariance);
    }
    let m = mean(x)?;
    let sd = var.sqrt();
    let n = x.len() as f64;
    Ok(x.iter().map(|v| ((v - m) / sd).powi(3)).sum::<f64>() / n)
}
