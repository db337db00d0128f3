use thiserror::Error;

use crate::dynamics::EvolutionReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid physical constants: {0}")]
    InvalidConstants(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shift {distance} is not an integer number of grid steps (dx = {dx})")]
    NonCommensurateShift { distance: f64, dx: f64 },

    #[error("shift of {steps} steps does not fit a grid of {n_points} points")]
    StepTooLarge { steps: isize, n_points: usize },

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("wavefunction has zero norm")]
    ZeroNorm,

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("negative or non-finite density at index {index}")]
    InvalidDensity { index: usize },

    #[error("finite-difference bump too large at index {index}: p - eps falls below the density floor")]
    BumpTooLarge { index: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("time step {dt} exceeds the explicit stability limit {dt_max}")]
    UnstableStep { dt: f64, dt_max: f64 },

    #[error("evolution produced a non-finite amplitude at step {}", .0.times.len().saturating_sub(1))]
    EvolutionDiverged(Box<EvolutionReport>),

    #[error("too many states requested: {requested} (grid supports at most {limit})")]
    TooManyStates { requested: usize, limit: usize },

    #[error("potential has singular points; the spectral solver needs a regular potential")]
    SingularPotential,

    #[error("eigen-solver did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("density has a node at x = {x}; the nodeless shift integral is undefined")]
    NodeDetected { x: f64 },

    #[error("objective returned a non-finite value at eta = {eta}")]
    NonFiniteObjective { eta: f64 },

    #[error("every grid point was excluded from the residual")]
    AllPointsExcluded,

    #[error("domain too short: exp(-2 kappa x_max) = {tail:e} exceeds 1e-10")]
    DomainTooShort { tail: f64 },

    #[error("config parse error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("config validation error at line {line}: {message}")]
    ConfigValidation { line: usize, message: String },

    #[error("refusing to write a non-finite value in row {row}")]
    NonFiniteOutput { row: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by the user's configuration rather than by the numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::ConfigParse { .. }
                | Error::ConfigValidation { .. }
                | Error::InvalidConstants(_)
                | Error::InvalidGrid(_)
                | Error::NonCommensurateShift { .. }
                | Error::Domain(_)
                | Error::TooManyStates { .. }
                | Error::DomainTooShort { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
