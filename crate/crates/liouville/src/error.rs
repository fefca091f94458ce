use crate::numerics::Vec2;
use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("density contains a non-finite value at cell {index}")]
    NonFinite { index: usize },

    #[error("density value {value} at cell {index} violates positivity")]
    NegativeDensity { index: usize, value: f64 },

    #[error("density has zero (or non-finite) total mass {mass}")]
    ZeroMass { mass: f64 },

    #[error("grids do not match: {0}")]
    GridMismatch(String),

    #[error("frame matrix is singular at {at:?} (det = {det:e})")]
    SingularFrame { at: Vec2, det: f64 },

    #[error("operation requires a 2-field frame, family has m = {m}")]
    NotAFrame { m: usize },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("trajectory from {start:?} left the escape box at {at:?} (t = {t})")]
    BlowUp { start: Vec2, at: Vec2, t: f64 },

    #[error("flow Jacobian determinant {det:e} is not positive at t = {t} (start {start:?})")]
    OrientationLoss { start: Vec2, t: f64, det: f64 },

    #[error("pushforward mass {mass} drifted more than {tol} from 1 before renormalization")]
    ExcessiveMassDrift { mass: f64, tol: f64 },

    #[error("problem size {n} exceeds solver limit {max}")]
    SizeExceeded { n: usize, max: usize },

    #[error("weights must each sum to 1 within {tol:e}: got {sum_mu} and {sum_nu}")]
    WeightMismatch { sum_mu: f64, sum_nu: f64, tol: f64 },

    #[error("{what} did not converge after {iters} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iters: usize,
        residual: f64,
    },

    #[error("1D density must be nonnegative with positive mass")]
    NonPositive1D,

    #[error("transport plan row {row} has zero mass")]
    EmptyRow { row: usize },

    #[error("isotopy folds over at t = {t}, node {node:?} (det = {det:e})")]
    FoldOver { t: f64, node: Vec2, det: f64 },

    #[error("Newton inversion diverged at {at:?} (residual {residual:e}); increase the fragment count")]
    NewtonDivergence { at: Vec2, residual: f64 },

    #[error("fragment map is not near-identity: {0}; increase the fragment count")]
    NotNearIdentity(String),

    #[error("shear map is not monotone along its active axis ({0})")]
    NonMonotoneShear(String),

    #[error("source term mean {mean:e} violates the zero-mean compatibility condition")]
    IncompatibleSource { mean: f64 },

    #[error("synthesis stage '{stage}' failed: {source}")]
    StageFailed {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Wrap an error with the synthesis stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::StageFailed {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
