use thiserror::Error;

/// Every failure the library can report. Each variant maps to a stable
/// process exit code through [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("geometry error: interfaces touch or cross (min gap {min_gap:.3e})")]
    Geometry { min_gap: f64 },

    #[error("vorticity solve diverged after {} iterations (last residual {:.3e})", .history.len(), .history.last().copied().unwrap_or(f64::NAN))]
    Divergence { history: Vec<f64> },

    #[error("method unavailable: {0}")]
    MethodUnavailable(String),

    #[error("series diverges: {0}")]
    DivergentSeries(String),

    #[error("regime error: {0}")]
    Regime(String),

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("step-size error: dt {dt} exceeds the stability guard (limit {limit:.3e})")]
    StepSize { dt: f64, limit: f64 },

    #[error("blow-up detected at t = {time}")]
    BlowUp {
        time: f64,
        last_valid: Box<crate::spectral::SpectralField>,
    },

    #[error("budget inequality violated at t = {time} (s = {s}, lhs {lhs:.6e} > rhs {rhs:.6e})")]
    Budget { time: f64, s: u8, lhs: f64, rhs: f64 },

    #[error("datum is not admissible: {0}")]
    Inadmissible(String),

    #[error("oracle discrepancy {value:.3e} in {what} exceeds bound {bound:.1e}")]
    OracleMismatch { what: String, value: f64, bound: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code. The table is part of the public contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::Range(_) | Error::Json(_) => 2,
            Error::Geometry { .. } => 3,
            Error::Divergence { .. } | Error::MethodUnavailable(_) => 4,
            Error::Budget { .. } => 5,
            Error::Inadmissible(_) => 6,
            Error::OracleMismatch { .. } => 7,
            Error::StepSize { .. } | Error::BlowUp { .. } => 8,
            Error::Io(_) => 9,
            Error::Regime(_) | Error::Consistency(_) | Error::DivergentSeries(_) => 10,
        }
    }
}
