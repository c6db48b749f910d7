use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("truncation at n_max = {n_max} leaves tail mass {tail:e}, tolerance is {tolerance:e}")]
    Truncation { n_max: usize, tail: f64, tolerance: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("sector {sector} block is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositive { sector: usize, eigenvalue: f64 },

    #[error("sector {sector} has length {len}, expected {expected}")]
    SectorShape { sector: usize, len: usize, expected: usize },

    #[error("distribution has already been smeared with detector efficiency {eta}")]
    DoubleSmear { eta: f64 },

    #[error("analytic and finite-difference derivatives disagree (relative deviation {deviation:e})")]
    DerivativeMismatch { deviation: f64 },

    #[error("closed-form QFI reference exists only at chi = pi/2, got {chi}")]
    UnsupportedChi { chi: f64 },

    #[error("Fisher information {value} carries no phase information")]
    ZeroInformation { value: f64 },

    #[error("g2(0) undefined: mean photon number {mean:e} is zero")]
    UndefinedG2 { mean: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
