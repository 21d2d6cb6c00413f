use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("degenerate geometry: {what} has length {length_m:e} m")]
    DegenerateGeometry { what: &'static str, length_m: f64 },

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch { expected: [usize; 3], found: [usize; 3] },

    #[error("pilot denominator vanishes at index {index:?} (|value| = {modulus:e})")]
    ZeroDenominator { index: [usize; 3], modulus: f64 },

    #[error("matrix is rank deficient: {0}")]
    RankDeficient(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid fake-path plan: {0}")]
    InvalidPlan(String),

    #[error("CFAR window of {window} cells does not fit a spectrum of {len} cells")]
    DegenerateWindow { len: usize, window: usize },

    #[error("operation needs square codebooks (M = N_R and S = N_T)")]
    NonSquareCodebook,
}

impl Error {
    /// True for errors caused by numerically degenerate inputs rather than bad configuration.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateGeometry { .. }
                | Error::ZeroDenominator { .. }
                | Error::RankDeficient(_)
        )
    }
}
