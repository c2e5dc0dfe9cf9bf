use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::additive::{check_alpha, mask_additive};
use crate::error::{MaskError, Result};
use crate::multiplicative::mask_multiplicative;
use crate::rng::{NoiseMode, Seed};
use crate::stats::ColumnVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Additive,
    Multiplicative,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Additive => "additive",
            Method::Multiplicative => "multiplicative",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = MaskError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "additive" => Ok(Method::Additive),
            "multiplicative" => Ok(Method::Multiplicative),
            other => Err(MaskError::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

/// What to mask and how.
///
/// The target column name doubles as the noise stream label, so each column
/// gets its own stream and results do not depend on the order in which
/// columns are processed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskConfig {
    pub method: Method,
    pub alpha: f64,
    pub mode: NoiseMode,
    pub seed: Seed,
    pub target_column: String,
    pub key_column: Option<String>,
}

impl MaskConfig {
    /// Checks that need no data: alpha range and key-column binding.
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        match (self.method, &self.key_column) {
            (Method::Additive, None) => Err(MaskError::InvalidArgument(
                "additive method requires a key column".into(),
            )),
            (Method::Multiplicative, Some(_)) => Err(MaskError::InvalidArgument(
                "multiplicative method takes no key column".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn noise_label(&self) -> String {
        format!("mask/{}", self.target_column)
    }

    /// Mask `x`; `key` must be present exactly when the method is additive.
    pub fn apply(&self, x: &[f64], key: Option<&[f64]>) -> Result<ColumnVector> {
        self.validate()?;
        let label = self.noise_label();
        match (self.method, key) {
            (Method::Additive, Some(s)) => {
                mask_additive(x, s, self.alpha, self.seed, &label, self.mode)
            }
            (Method::Multiplicative, None) => {
                mask_multiplicative(x, self.alpha, self.seed, &label, self.mode)
            }
            (Method::Additive, None) => Err(MaskError::InvalidArgument(
                "additive method requires key values".into(),
            )),
            (Method::Multiplicative, Some(_)) => Err(MaskError::InvalidArgument(
                "multiplicative method takes no key values".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(method: Method, key: Option<&str>, alpha: f64) -> MaskConfig {
        MaskConfig {
            method,
            alpha,
            mode: NoiseMode::Exact,
            seed: Seed(1),
            target_column: "income".into(),
            key_column: key.map(String::from),
        }
    }

    #[test]
    fn key_column_binding() {
        assert!(config(Method::Additive, Some("age"), 0.5).validate().is_ok());
        assert!(config(Method::Multiplicative, None, 0.5).validate().is_ok());
        assert!(config(Method::Additive, None, 0.5).validate().is_err());
        assert!(config(Method::Multiplicative, Some("age"), 0.5).validate().is_err());
    }

    #[test]
    fn alpha_checked_before_data() {
        assert_eq!(
            config(Method::Multiplicative, None, 1.2).validate(),
            Err(MaskError::AlphaOutOfRange(1.2))
        );
    }

    #[test]
    fn method_round_trips_through_text() {
        for m in [Method::Additive, Method::Multiplicative] {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("swap".parse::<Method>().is_err());
    }
}
