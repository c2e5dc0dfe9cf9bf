//! Seeded normal deviates and exact sample standardization.
//!
//! # Generator
//!
//! Each request is keyed by a `(seed, label)` pair. The key is hashed as
//! `SHA-256("skewmask/normal/v1" || seed as u64 little-endian || 0x00 || label bytes)`
//! and the 32-byte digest seeds a ChaCha20 stream (`rand_chacha::ChaCha20Rng`).
//! Successive 64-bit outputs `w` become open-interval uniforms
//! `((w >> 11) + 0.5) * 2^-53`, and pairs of uniforms `(u1, u2)` become two
//! standard normals by the Box–Muller transform
//! `sqrt(-2 ln u1) * cos(2π u2)`, `sqrt(-2 ln u1) * sin(2π u2)`.
//! Transcendentals come from `libm`, so output is identical on every
//! platform. This algorithm is frozen: seeded tests depend on it.

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{MaskError, Result};
use crate::stats::{self, ColumnVector};

const DOMAIN_TAG: &[u8] = b"skewmask/normal/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed(pub u64);

impl From<u64> for Seed {
    fn from(value: u64) -> Self {
        Seed(value)
    }
}

/// How noise is realized.
///
/// `Exact` projects and rescales the finite draw so that the moment and
/// orthogonality conditions hold in sample; `Stochastic` uses i.i.d. draws
/// for which they hold only in expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    #[default]
    Exact,
    Stochastic,
}

impl NoiseMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            NoiseMode::Exact => "exact",
            NoiseMode::Stochastic => "stochastic",
        }
    }
}

impl fmt::Display for NoiseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NoiseMode {
    type Err = MaskError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(NoiseMode::Exact),
            "stochastic" => Ok(NoiseMode::Stochastic),
            other => Err(MaskError::InvalidArgument(format!("unknown noise mode {other:?}"))),
        }
    }
}

fn stream(seed: Seed, label: &str) -> ChaCha20Rng {
    let mut hasher = Sha256::new();
    hasher.update(DOMAIN_TAG);
    hasher.update(seed.0.to_le_bytes());
    hasher.update([0u8]);
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha20Rng::from_seed(key)
}

fn open_uniform(rng: &mut ChaCha20Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// `n` standard normal deviates from the stream keyed by `(seed, label)`.
pub fn standard_normals(seed: Seed, label: &str, n: usize) -> Result<ColumnVector> {
    if n == 0 {
        return Err(MaskError::EmptyRequest);
    }
    let mut rng = stream(seed, label);
    let mut out = Vec::with_capacity(n + 1);
    while out.len() < n {
        let u1 = open_uniform(&mut rng);
        let u2 = open_uniform(&mut rng);
        let radius = libm::sqrt(-2.0 * libm::log(u1));
        let angle = 2.0 * std::f64::consts::PI * u2;
        out.push(radius * libm::cos(angle));
        out.push(radius * libm::sin(angle));
    }
    out.truncate(n);
    ColumnVector::new(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn centered(v: &[f64]) -> Result<Vec<f64>> {
    let m = stats::mean(v)?;
    Ok(v.iter().map(|x| x - m).collect())
}

fn project_out(r: &mut [f64], basis: &[Vec<f64>]) {
    // two sweeps of modified Gram-Schmidt
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, r);
            r.iter_mut().zip(q).for_each(|(ri, qi)| *ri -= c * qi);
        }
    }
}

/// Rescale `z` so that, in sample, its mean is `target_mean`, its population
/// variance is `target_var`, and its covariance with every vector in
/// `orthogonal_to` is zero.
///
/// Constraint vectors are centered before projection, so orthogonality is
/// in the covariance sense. Constraints that are constant or already in the
/// span of earlier ones are skipped, and at least `2 + k` observations are
/// needed for `k` independent constraints. A zero `target_var` returns the
/// constant vector at `target_mean` without looking at `z`.
pub fn standardize_exact(
    z: &[f64],
    target_mean: f64,
    target_var: f64,
    orthogonal_to: &[&[f64]],
) -> Result<ColumnVector> {
    let n = z.len();
    if n == 0 {
        return Err(MaskError::EmptyColumn);
    }
    if !target_mean.is_finite() || !target_var.is_finite() || target_var < 0.0 {
        return Err(MaskError::InvalidArgument(format!(
            "target moments ({target_mean}, {target_var}) must be finite with variance >= 0"
        )));
    }
    for v in orthogonal_to {
        if v.len() != n {
            return Err(MaskError::LengthMismatch {
                left: n,
                right: v.len(),
            });
        }
    }
    if target_var == 0.0 {
        return ColumnVector::new(vec![target_mean; n]);
    }
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(orthogonal_to.len());
    for v in orthogonal_to {
        let mut c = centered(v)?;
        let original_norm = dot(&c, &c).sqrt();
        if original_norm == 0.0 {
            continue;
        }
        project_out(&mut c, &basis);
        let norm = dot(&c, &c).sqrt();
        if norm <= 1e-10 * original_norm {
            continue;
        }
        c.iter_mut().for_each(|x| *x /= norm);
        basis.push(c);
    }

    let required = 2 + basis.len();
    if n < required {
        return Err(MaskError::DegenerateResidual(format!(
            "{n} observations cannot satisfy {required} moment constraints"
        )));
    }

    let mut r = centered(z)?;
    let start_norm = dot(&r, &r).sqrt();
    project_out(&mut r, &basis);
    let m = stats::mean(&r)?;
    r.iter_mut().for_each(|x| *x -= m);
    let norm = dot(&r, &r).sqrt();
    if norm == 0.0 || norm <= 1e-10 * start_norm {
        return Err(MaskError::DegenerateResidual(
            "draw lies in the span of the constraint vectors".into(),
        ));
    }
    let scale = (target_var / stats::variance(&r)?).sqrt();
    ColumnVector::new(r.into_iter().map(|x| target_mean + scale * x).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{covariance, mean, variance};

    #[test]
    fn same_key_same_draws() {
        let a = standard_normals(Seed(42), "u", 5).unwrap();
        let b = standard_normals(Seed(42), "u", 5).unwrap();
        assert_eq!(a, b);
        let bits: Vec<u64> = a.iter().map(|v| v.to_bits()).collect();
        let again: Vec<u64> = b.iter().map(|v| v.to_bits()).collect();
        assert_eq!(bits, again);
    }

    #[test]
    fn labels_select_independent_streams() {
        let u = standard_normals(Seed(42), "u", 5).unwrap();
        let v = standard_normals(Seed(42), "v", 5).unwrap();
        assert_ne!(u, v);
        let other_seed = standard_normals(Seed(43), "u", 5).unwrap();
        assert_ne!(u, other_seed);
    }

    #[test]
    fn prefix_stable_across_lengths() {
        let short = standard_normals(Seed(7), "x", 3).unwrap();
        let long = standard_normals(Seed(7), "x", 10).unwrap();
        assert_eq!(&short[..], &long[..3]);
    }

    #[test]
    fn zero_request_is_an_error() {
        assert_eq!(standard_normals(Seed(1), "u", 0), Err(MaskError::EmptyRequest));
    }

    #[test]
    fn large_draw_has_unit_moments() {
        let n = 100_000;
        let z = standard_normals(Seed(20_100), "moments", n).unwrap();
        // 4/sqrt(n) bound on the mean; variance of the sample variance is 2/n
        assert!(mean(&z).unwrap().abs() < 4.0 / (n as f64).sqrt());
        assert!(mean(&z).unwrap().abs() < 0.02);
        let v = variance(&z).unwrap();
        assert!((0.97..=1.03).contains(&v), "variance {v}");
    }

    #[test]
    fn zero_target_variance_gives_constant() {
        let u = standardize_exact(&[3.0, -1.0, 8.0], 2.5, 0.0, &[]).unwrap();
        assert_eq!(&u[..], &[2.5, 2.5, 2.5]);
    }

    #[test]
    fn center_and_rescale_by_hand() {
        let u = standardize_exact(&[-1.0, 1.0], 0.0, 4.0, &[]).unwrap();
        assert!((u[0] + 2.0).abs() < 1e-12 && (u[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn single_constraint_zero_covariance() {
        let x = [1.0, 4.0, 2.0, 8.0, 5.0, 7.0];
        let z = standard_normals(Seed(3), "z", x.len()).unwrap();
        let u = standardize_exact(&z, 1.5, 2.0, &[&x]).unwrap();
        let scale = (2.0 * variance(&x).unwrap()).sqrt();
        assert!(covariance(&u, &x).unwrap().abs() <= 1e-12 * scale);
        assert!((mean(&u).unwrap() - 1.5).abs() <= 1e-12 * 1.5);
        assert!((variance(&u).unwrap() - 2.0).abs() <= 1e-12 * 2.0);
    }

    #[test]
    fn degenerate_when_draw_in_span() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let err = standardize_exact(&x, 0.0, 1.0, &[&x]).unwrap_err();
        assert!(matches!(err, MaskError::DegenerateResidual(_)));
        let err = standardize_exact(&[5.0, 5.0, 5.0], 0.0, 1.0, &[]).unwrap_err();
        assert!(matches!(err, MaskError::DegenerateResidual(_)));
    }

    #[test]
    fn too_few_observations_for_constraints() {
        let err = standardize_exact(&[1.0, 2.0], 0.0, 1.0, &[&[3.0, 1.0]]).unwrap_err();
        assert!(matches!(err, MaskError::DegenerateResidual(_)));
        assert!(standardize_exact(&[1.0, 2.0], 0.0, 1.0, &[]).is_ok());
    }

    #[test]
    fn dependent_constraints_are_skipped() {
        let x = [1.0, 3.0, 2.0, 7.0, 4.0];
        let twice: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let z = standard_normals(Seed(9), "z", x.len()).unwrap();
        let u = standardize_exact(&z, 0.0, 1.0, &[&x, &twice]).unwrap();
        assert!(covariance(&u, &x).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_targets() {
        assert!(matches!(
            standardize_exact(&[1.0, 2.0], 0.0, -1.0, &[]),
            Err(MaskError::InvalidArgument(_))
        ));
        assert!(matches!(
            standardize_exact(&[1.0, 2.0, 3.0], 0.0, 1.0, &[&[1.0]]),
            Err(MaskError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn noise_mode_parses() {
        assert_eq!("exact".parse::<NoiseMode>().unwrap(), NoiseMode::Exact);
        assert_eq!("stochastic".parse::<NoiseMode>().unwrap(), NoiseMode::Stochastic);
        assert!("fuzzy".parse::<NoiseMode>().is_err());
        assert_eq!(NoiseMode::default(), NoiseMode::Exact);
    }
}
