//! Scattering time observables from partial-wave theory.
//!
//! The crate computes the angular time delay `t(θ) = ∂E arg A(E, θ)`, the
//! space shift `b(θ) = -(1/k) ∂θ arg A(E, θ)`, Eisenbud–Wigner partial-wave
//! delays, one-dimensional transmission and reflection delays, thin-detector
//! arrival-time densities, and their WKB / classical counterparts.
//!
//! Units: ħ = 1 throughout. The hard-sphere tooling works in the
//! dimensionless convention `m = 1`, `R = 1`, so times come out in units of
//! `m R²` and lengths in units of `R`.

pub mod arrival;
pub mod error;
pub mod hardsphere;
pub mod kinematics;
pub mod onedim;
pub mod partialwave;
pub mod peak;
pub mod quad;
pub mod specfun;
pub mod wkb;

pub use error::{Error, Result};
pub use hardsphere::{HardSphere, PointScatterer};
pub use kinematics::{Kinematics, UnitSystem};
pub use partialwave::{
    AmplitudeSample, ClassicalReference, DelayProfile, DelayRow, EnergyRow, PhaseShiftModel,
    PhaseShiftTable,
};
pub use peak::{find_peak, locate_peak, Peak, PeakColumn, Polarity};

/// Library version, stamped into CLI output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
