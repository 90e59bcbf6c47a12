use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Probability mass lost to the photon-number cutoff exceeds tolerance.
    #[error("cutoff {cutoff} too small: truncated mass {tail:.3e} exceeds tolerance {tol:.3e}")]
    Truncation { cutoff: usize, tail: f64, tol: f64 },

    #[error("state is not normalized: norm^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("no sign change in bracket [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_nonneg(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, reason: "must be finite and nonnegative" })
    }
}
