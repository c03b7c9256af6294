//! Units, kinematic conversions and small numerical-derivative helpers.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Mass and wavenumber of the projectile (ħ = 1), with `E = k² / 2m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    mass: f64,
    k: f64,
}

impl Kinematics {
    pub fn new(mass: f64, k: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return domain(format!("mass must be positive, got {mass}"));
        }
        if !(k > 0.0 && k.is_finite()) {
            return domain(format!("wavenumber must be positive, got {k}"));
        }
        Ok(Self { mass, k })
    }

    pub fn from_energy(mass: f64, energy: f64) -> Result<Self> {
        Self::new(mass, k_from_energy(energy, mass)?)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn energy(&self) -> f64 {
        self.k * self.k / (2.0 * self.mass)
    }

    /// Group velocity `k / m`.
    pub fn velocity(&self) -> f64 {
        self.k / self.mass
    }

    /// `∂k/∂E = m / k`, the factor converting wavenumber derivatives into
    /// energy derivatives.
    pub fn dk_de(&self) -> f64 {
        self.mass / self.k
    }

    pub fn with_energy(&self, energy: f64) -> Result<Self> {
        Self::from_energy(self.mass, energy)
    }

    pub fn with_k(&self, k: f64) -> Result<Self> {
        Self::new(self.mass, k)
    }
}

pub fn energy_from_k(k: f64, mass: f64) -> Result<f64> {
    Ok(Kinematics::new(mass, k)?.energy())
}

pub fn k_from_energy(energy: f64, mass: f64) -> Result<f64> {
    if !(energy > 0.0 && energy.is_finite()) {
        return domain(format!("energy must be positive, got {energy}"));
    }
    if !(mass > 0.0 && mass.is_finite()) {
        return domain(format!("mass must be positive, got {mass}"));
    }
    Ok((2.0 * mass * energy).sqrt())
}

/// Fourth-order central difference
/// `(-f(x+2h) + 8f(x+h) - 8f(x-h) + f(x-2h)) / 12h`.
pub fn central_derivative<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(h > 0.0) {
        return domain(format!("finite-difference step must be positive, got {h}"));
    }
    Ok((-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h))
}

/// Default step for validation derivatives at `x`.
pub fn validation_step(x: f64) -> f64 {
    1e-5 * x.abs().max(1.0)
}

/// Shift `phase` by a multiple of 2π so that it lies within π of `reference`.
pub fn unwrap_phase(reference: f64, phase: f64) -> f64 {
    phase - 2.0 * PI * ((phase - reference) / (2.0 * PI)).round()
}

/// Unwrap a sampled phase in place along its grid.
pub fn unwrap_phases(phases: &mut [f64]) {
    for i in 1..phases.len() {
        phases[i] = unwrap_phase(phases[i - 1], phases[i]);
    }
}

/// Mass and length units of the dimensionless output convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub mass_unit: f64,
    pub length_unit: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self {
            mass_unit: 1.0,
            length_unit: 1.0,
        }
    }
}

impl UnitSystem {
    pub fn time_unit(&self) -> f64 {
        self.mass_unit * self.length_unit * self.length_unit
    }

    pub fn energy_unit(&self) -> f64 {
        1.0 / self.time_unit()
    }

    /// One-line description used in output headers.
    pub fn describe(&self) -> String {
        format!(
            "hbar = 1, m = {}, R = {}; times in m R^2, lengths in R, energies in 1/(m R^2)",
            self.mass_unit, self.length_unit
        )
    }
}
