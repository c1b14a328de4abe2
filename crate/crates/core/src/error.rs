use thiserror::Error;

/// Errors raised anywhere in the construction / certification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension n = {0}: need 3 <= n <= {max}", max = crate::params::MAX_DIMENSION)]
    InvalidDimension(u32),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        reason: &'static str,
    },

    #[error("inadmissible closure target (l, r) = ({l}, {r}): need gcd(l, r) = 1 and r < 2l < sqrt(2) r")]
    InadmissibleTarget { l: u32, r: u32 },

    #[error("root bracket failed on [{lo}, {hi}] (Q = {q_lo}, {q_hi}); level misclassified?")]
    BracketFailure {
        lo: f64,
        hi: f64,
        q_lo: f64,
        q_hi: f64,
    },

    #[error("deflation remainder {remainder:e} exceeds bound {bound:e}")]
    DeflationFailure { remainder: f64, bound: f64 },

    #[error("orbit is degenerate: (alpha - beta)/u_star = {relative_gap:e} is below {threshold:e}")]
    DegenerateOrbit { relative_gap: f64, threshold: f64 },

    #[error("quadrature did not converge with {nodes} nodes: last two estimates {last} and {previous}")]
    QuadratureFailure {
        nodes: usize,
        last: f64,
        previous: f64,
    },

    #[error("no sign change of I(d) - {angle} found up to d = {d_max:e} ({} samples)", samples.len())]
    NoBracket {
        angle: f64,
        d_max: f64,
        samples: Vec<(f64, f64)>,
    },

    #[error("closure solver stalled on [{d_lo}, {d_hi}] with |I - angle| = {residual:e}")]
    SolverStalled {
        d_lo: f64,
        d_hi: f64,
        residual: f64,
    },

    #[error("integration failed at s = {s}: {reason}")]
    IntegrationFailure { s: f64, reason: &'static str },

    #[error("first integral drifted by {drift:e} (relative to d) at s = {s}")]
    DriftExceeded { s: f64, drift: f64 },

    #[error("pole condition violated at s = {s}: d u^3 - rho p^2 = {value:e}")]
    PoleCondition { s: f64, value: f64 },

    #[error("curve does not close: gap {gap:e} > {tolerance:e}, total psi = {psi_total}")]
    ClosureFailure {
        gap: f64,
        tolerance: f64,
        psi_total: f64,
    },

    #[error("insufficient data: {got} samples, need at least {need}")]
    InsufficientData { got: usize, need: usize },

    #[error("geometry violation at s = {s}: 1 - rho x1^2 - x1'^2 = {value:e}")]
    GeometryViolation { s: f64, value: f64 },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line surface: 2 for bad input, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidDimension(_)
            | Error::Domain(_)
            | Error::InvalidParameter { .. }
            | Error::InadmissibleTarget { .. }
            | Error::InsufficientData { .. }
            | Error::Schema(_)
            | Error::Config { .. }
            | Error::Io(_)
            | Error::Json(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
