use thiserror::Error;

use crate::wkb::Branch;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The scattering amplitude is numerically zero, so its phase (and every
    /// derivative of it) is undefined.
    #[error("indeterminate at amplitude node (|A| = {magnitude:e})")]
    AmplitudeNode { magnitude: f64 },

    #[error("indeterminate at transmission node (|T| = {magnitude:e})")]
    TransmissionNode { magnitude: f64 },

    #[error("no peak found in window [{lo}, {hi}]")]
    NoPeak { lo: f64, hi: f64 },

    #[error("no classical turning point for J = {j}")]
    NoTurningPoint { j: f64 },

    #[error(
        "quadrature did not converge: estimate {estimate:e}, error {error:e} after {intervals} intervals"
    )]
    Quadrature {
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    /// Stationary-phase reduction needs exactly one classical branch.
    #[error("{} classical branches contribute at this angle: {branches:?}", branches.len())]
    MultiBranch { branches: Vec<Branch> },

    #[error("expectation value is not real: imaginary part {imaginary:e}")]
    NonHermitian { imaginary: f64 },
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
