use thiserror::Error;

/// Errors surfaced by the simulator core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("{name} = {value} is outside [{min}, {max}] degrees")]
    AngleOutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("state norm^2 = {norm_sq} deviates from 1 by more than {tolerance}")]
    NotNormalized { norm_sq: f64, tolerance: f64 },

    #[error("priors ({plus}, {minus}) must be nonnegative and sum to 1")]
    InvalidPriors { plus: f64, minus: f64 },

    #[error("{name} = {value} is not a valid probability in [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("{name} = {value} is outside its valid domain")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("pulse count must be at least 1")]
    EmptyEnsemble,

    #[error("calibration line {line}: {message}")]
    CalibrationSyntax { line: usize, message: String },

    #[error("calibration key {key} = {value} is not a power fraction in [0, 1]")]
    CalibrationValue { key: String, value: f64 },

    #[error("calibration {row} row sums to {sum}; rows must sum to 1 within {tolerance}")]
    CalibrationRowSum {
        row: &'static str,
        sum: f64,
        tolerance: f64,
    },

    #[error(
        "energy-conservation repair would move an amplitude magnitude by {max_move:.4}, \
         above the {cap} cap; the table is not consistent with a passive lossless splitter"
    )]
    CalibrationInconsistent { max_move: f64, cap: f64 },

    #[error("grid_points = {got} is below the minimum of {min}")]
    GridTooCoarse { got: usize, min: usize },

    #[error("cannot estimate a rate from zero total counts")]
    EmptyCounts,
}

pub type Result<T> = std::result::Result<T, CoreError>;
