use std::path::PathBuf;

use skewmask_core::MaskError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("malformed record at row {row}: {reason}")]
    MalformedRecord { row: usize, reason: String },

    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("cannot parse {value:?} as a number (row {row}, column {column:?})")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },

    #[error("unknown column {0:?}")]
    UnknownColumn(String),

    #[error(transparent)]
    Mask(#[from] MaskError),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Exit codes, one per failure class. Listed in `--help`.
pub const EXIT_CODES: &[(i32, &str, &str)] = &[
    (0, "OK", "success"),
    (2, "CONFIG", "invalid flags or configuration"),
    (3, "FILE_NOT_FOUND", "input file does not exist"),
    (4, "IO", "read or write failure"),
    (5, "MALFORMED_HEADER", "missing, empty or duplicate header names"),
    (6, "MALFORMED_RECORD", "unterminated quoted cell"),
    (7, "RAGGED_ROWS", "a row has the wrong number of cells"),
    (8, "PARSE_ERROR", "a targeted cell is not a finite number"),
    (9, "UNKNOWN_COLUMN", "a named column is absent"),
    (10, "ALPHA_OUT_OF_RANGE", "alpha outside [0, 1]"),
    (11, "NON_POSITIVE_VALUE", "multiplicative masking of a value <= 0"),
    (12, "ZERO_VARIANCE", "key column (or statistic input) is constant"),
    (13, "NEGATIVE_NOISE_VARIANCE", "inconsistent moments give negative noise variance"),
    (14, "DEGENERATE_RESIDUAL", "too few rows for exact noise"),
    (15, "LENGTH_MISMATCH", "columns of different lengths"),
    (16, "EMPTY_COLUMN", "no rows to mask"),
    (17, "NON_FINITE", "a computed value is not finite"),
];

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Config(_) => "CONFIG",
            CliError::FileNotFound(_) => "FILE_NOT_FOUND",
            CliError::Io(_) => "IO",
            CliError::MalformedHeader(_) => "MALFORMED_HEADER",
            CliError::MalformedRecord { .. } => "MALFORMED_RECORD",
            CliError::RaggedRows { .. } => "RAGGED_ROWS",
            CliError::Parse { .. } => "PARSE_ERROR",
            CliError::UnknownColumn(_) => "UNKNOWN_COLUMN",
            CliError::Mask(e) => match e {
                MaskError::AlphaOutOfRange(_) => "ALPHA_OUT_OF_RANGE",
                MaskError::NonPositiveValue { .. } => "NON_POSITIVE_VALUE",
                MaskError::ZeroVariance => "ZERO_VARIANCE",
                MaskError::NegativeNoiseVariance(_) => "NEGATIVE_NOISE_VARIANCE",
                MaskError::DegenerateResidual(_) => "DEGENERATE_RESIDUAL",
                MaskError::LengthMismatch { .. } => "LENGTH_MISMATCH",
                MaskError::EmptyColumn | MaskError::EmptyRequest => "EMPTY_COLUMN",
                MaskError::NonFinite { .. } => "NON_FINITE",
                MaskError::InvalidArgument(_) => "CONFIG",
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        let code = self.code();
        EXIT_CODES
            .iter()
            .find(|(_, name, _)| *name == code)
            .map(|(n, _, _)| *n)
            .unwrap_or(1)
    }

    /// `error code=<CODE> exit=<n> message=<json string>`
    pub fn one_line(&self) -> String {
        let message = self.to_string().replace('\n', " ");
        format!(
            "error code={} exit={} message={}",
            self.code(),
            self.exit_code(),
            serde_json::Value::String(message)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_distinct() {
        let mut seen: Vec<i32> = EXIT_CODES.iter().map(|(n, _, _)| *n).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), EXIT_CODES.len());
    }

    #[test]
    fn mask_errors_map_to_codes() {
        let e = CliError::from(MaskError::NonPositiveValue { index: 0, value: 0.0 });
        assert_eq!((e.code(), e.exit_code()), ("NON_POSITIVE_VALUE", 11));
        let e = CliError::from(MaskError::AlphaOutOfRange(2.0));
        assert_eq!(e.exit_code(), 10);
        assert!(e.one_line().starts_with("error code=ALPHA_OUT_OF_RANGE exit=10 message=\""));
    }
}
