use thiserror::Error;

/// Errors produced by the QFI library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain where the quantity is defined.
    #[error("{name} = {value} is out of range: {requirement}")]
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// A covariance matrix violates the Heisenberg uncertainty relation or
    /// is not a valid covariance at all.
    #[error("invalid covariance matrix: {0}")]
    InvalidCovariance(String),

    /// The pure-state QFI formula was handed a mixed state.
    #[error("state is not pure: largest symplectic eigenvalue {max_eigenvalue} exceeds 1/2")]
    NotPure { max_eigenvalue: f64 },

    /// Fock truncation is too small for the requested state.
    #[error("Fock cutoff {cutoff} too small: tail population {tail:e} (norm deficit {deficit:e})")]
    CutoffTooSmall {
        cutoff: usize,
        tail: f64,
        deficit: f64,
    },

    /// The oracle would need a basis larger than the configured cap.
    #[error("parameters infeasible for the Fock oracle: cutoff would exceed {max_cutoff}")]
    Infeasible { max_cutoff: usize },

    /// Finite-difference step too small to resolve the derivative.
    #[error("finite-difference step {0:e} underflows")]
    StepUnderflow(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    requirement: &'static str,
) -> Result<f64> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            requirement,
        })
    }
}

pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<f64> {
    check_range(
        name,
        value,
        f64::NEG_INFINITY,
        f64::INFINITY,
        "must be finite",
    )
}
