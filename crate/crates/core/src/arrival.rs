//! Occurrence-time distributions for wave packets given by an energy-space
//! wave function `ψ(E)`: the Kijowski density, its moments, and delays
//! between two dynamics expressed through per-energy time kernels `t^P(E)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::kinematics::Kinematics;
use crate::onedim::{transmission_delay, Potential1D};

/// Minimum number of energy samples for generated packets.
pub const MIN_POINTS: usize = 2048;

/// Half-width of the generated Gaussian packets in units of `σ_E`;
/// `exp(-11²/4) < 1e-12` so the packet vanishes at the grid ends.
pub const GAUSSIAN_HALF_WIDTH: f64 = 11.0;

/// Fraction of probability the time grid must capture before the result is
/// flagged as truncated.
pub const COVERAGE: f64 = 0.999;

/// Largest tolerated imaginary part of an occurrence-time expectation.
pub const HERMITICITY_TOLERANCE: f64 = 1e-6;

/// Energy-space wave function sampled on a strictly increasing grid of
/// positive energies, normalized so that `∫|ψ|² dE = 1` (trapezoidal rule).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPacket {
    energies: Vec<f64>,
    psi: Vec<Complex64>,
}

fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

impl SpectralPacket {
    pub fn new(energies: Vec<f64>, psi: Vec<Complex64>) -> Result<Self> {
        if energies.len() != psi.len() {
            return domain("energy grid and wave function differ in length");
        }
        if energies.len() < 3 {
            return domain("packet needs at least three energy samples");
        }
        if !(energies[0] > 0.0) || energies.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("energy grid must be positive and strictly increasing");
        }
        if psi.iter().any(|p| !p.is_finite()) {
            return domain("wave function must be finite");
        }
        let mut packet = Self { energies, psi };
        let norm = packet.norm();
        if !(norm > 0.0) {
            return domain("wave function vanishes identically");
        }
        let scale = 1.0 / norm.sqrt();
        packet.psi.iter_mut().for_each(|p| *p *= scale);
        Ok(packet)
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(energies: Vec<f64>, f: F) -> Result<Self> {
        let psi = energies.iter().map(|&e| f(e)).collect();
        Self::new(energies, psi)
    }

    /// Real Gaussian `ψ ∝ exp(-(E - E0)² / 4σ²)`, so that `|ψ|²` has
    /// standard deviation `σ`, sampled on `E0 ± 11σ`.
    pub fn gaussian(e0: f64, sigma: f64, points: usize) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return domain(format!("energy spread must be positive, got {sigma}"));
        }
        let lo = e0 - GAUSSIAN_HALF_WIDTH * sigma;
        let hi = e0 + GAUSSIAN_HALF_WIDTH * sigma;
        if !(lo > 0.0) {
            return domain(format!(
                "Gaussian packet reaches non-positive energies (E0 = {e0}, sigma = {sigma})"
            ));
        }
        let n = points.max(MIN_POINTS);
        let energies: Vec<f64> = (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect();
        Self::from_fn(energies, |e| {
            Complex64::new((-(e - e0).powi(2) / (4.0 * sigma * sigma)).exp(), 0.0)
        })
    }

    /// Free propagation to a detector at distance `D`: `ψ → ψ e^{ikD}`.
    pub fn with_detector_distance(&self, mass: f64, distance: f64) -> Result<Self> {
        let psi = self
            .energies
            .iter()
            .zip(&self.psi)
            .map(|(&e, &p)| Ok(p * Complex64::cis(Kinematics::from_energy(mass, e)?.k() * distance)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            energies: self.energies.clone(),
            psi,
        })
    }

    /// `ψ → ψ e^{iEτ}`, which delays every arrival by `τ`.
    pub fn with_time_shift(&self, tau: f64) -> Self {
        self.map(|e, p| p * Complex64::cis(e * tau))
    }

    pub fn with_global_phase(&self, phase: f64) -> Self {
        let c = Complex64::cis(phase);
        self.map(|_, p| p * c)
    }

    fn map<F: Fn(f64, Complex64) -> Complex64>(&self, f: F) -> Self {
        Self {
            energies: self.energies.clone(),
            psi: self.energies.iter().zip(&self.psi).map(|(&e, &p)| f(e, p)).collect(),
        }
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn psi(&self) -> &[Complex64] {
        &self.psi
    }

    /// `∫|ψ|² dE`.
    pub fn norm(&self) -> f64 {
        trapezoid(&self.energies, &self.probability())
    }

    fn probability(&self) -> Vec<f64> {
        self.psi.iter().map(|p| p.norm_sqr()).collect()
    }

    /// `∂Eψ` by centered differences: fourth order where the grid is
    /// locally uniform, second order next to the ends, one-sided at them.
    fn derivative(&self) -> Vec<Complex64> {
        let (e, p) = (&self.energies, &self.psi);
        let n = e.len();
        (0..n)
            .map(|i| {
                if i >= 2 && i + 2 < n {
                    let h = e[i + 1] - e[i];
                    let uniform = [e[i] - e[i - 1], e[i + 2] - e[i + 1], e[i - 1] - e[i - 2]]
                        .iter()
                        .all(|d| (d - h).abs() <= 1e-9 * h);
                    if uniform {
                        return (-p[i + 2] + 8.0 * p[i + 1] - 8.0 * p[i - 1] + p[i - 2]) / (12.0 * h);
                    }
                }
                let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
                (p[b] - p[a]) / (e[b] - e[a])
            })
            .collect()
    }

    /// First two time moments `(⟨t⟩, ⟨t²⟩)` of the Kijowski density,
    /// evaluated in energy space.
    pub fn time_moments(&self) -> (f64, f64) {
        let d = self.derivative();
        let first: Vec<f64> = self
            .psi
            .iter()
            .zip(&d)
            .map(|(p, dp)| (p.conj() * (-Complex64::i() * dp)).re)
            .collect();
        let second: Vec<f64> = d.iter().map(|dp| dp.norm_sqr()).collect();
        (trapezoid(&self.energies, &first), trapezoid(&self.energies, &second))
    }

    /// Uniform time grid spanning `⟨t⟩ ± n_sigma` standard deviations.
    pub fn time_grid(&self, n_sigma: f64, points: usize) -> Vec<f64> {
        let (m1, m2) = self.time_moments();
        let sd = (m2 - m1 * m1).max(0.0).sqrt();
        let (lo, hi) = (m1 - n_sigma * sd, m1 + n_sigma * sd);
        let n = points.max(2);
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }
}

/// Sampled arrival-time density with its moments.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalDistribution {
    pub t_grid: Vec<f64>,
    pub density: Vec<f64>,
    /// `∫Π dt` over the grid.
    pub total: f64,
    pub mean: f64,
    pub variance: f64,
    /// False when the grid captures less than [`COVERAGE`] of the probability.
    pub covered: bool,
}

/// `Π(t) = (1/2π) |∫ψ(E) e^{-iEt} dE|²` for a thin detector at the origin.
pub fn kijowski_density(packet: &SpectralPacket, t_grid: &[f64]) -> Result<ArrivalDistribution> {
    if t_grid.len() < 2 || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("time grid needs at least two strictly increasing points");
    }
    let e = &packet.energies;
    let p = &packet.psi;
    let weights: Vec<f64> = (0..e.len())
        .map(|i| {
            let left = if i > 0 { e[i] - e[i - 1] } else { 0.0 };
            let right = if i + 1 < e.len() { e[i + 1] - e[i] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect();
    let density: Vec<f64> = t_grid
        .par_iter()
        .map(|&t| {
            let amp: Complex64 = e
                .iter()
                .zip(p)
                .zip(&weights)
                .map(|((&en, &ps), &w)| ps * Complex64::cis(-en * t) * w)
                .sum();
            (amp.norm_sqr() / (2.0 * PI)).max(0.0)
        })
        .collect();
    let total = trapezoid(t_grid, &density);
    let first: Vec<f64> = t_grid.iter().zip(&density).map(|(t, d)| t * d).collect();
    let mean = trapezoid(t_grid, &first) / total;
    let second: Vec<f64> = t_grid
        .iter()
        .zip(&density)
        .map(|(t, d)| (t - mean).powi(2) * d)
        .collect();
    let variance = trapezoid(t_grid, &second) / total;
    Ok(ArrivalDistribution {
        t_grid: t_grid.to_vec(),
        density,
        total,
        mean,
        variance,
        covered: total >= COVERAGE,
    })
}

/// Per-energy occurrence time `t^P(E)` of a detector setup.
pub trait TimeKernel: Sync {
    fn time(&self, energy: f64) -> Result<f64>;
}

impl<F> TimeKernel for F
where
    F: Fn(f64) -> f64 + Sync,
{
    fn time(&self, energy: f64) -> Result<f64> {
        Ok(self(energy))
    }
}

/// Free flight to a detector at distance `D`: `t^P = mD/k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeFlight {
    pub mass: f64,
    pub distance: f64,
}

impl TimeKernel for FreeFlight {
    fn time(&self, energy: f64) -> Result<f64> {
        let kin = Kinematics::from_energy(self.mass, energy)?;
        Ok(kin.dk_de() * self.distance)
    }
}

/// Transmission through `potential` to a detector at distance `D`:
/// `t^P = mD/k + ∂E arg T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transmission {
    pub potential: Potential1D,
    pub mass: f64,
    pub distance: f64,
}

impl TimeKernel for Transmission {
    fn time(&self, energy: f64) -> Result<f64> {
        let kin = Kinematics::from_energy(self.mass, energy)?;
        Ok(kin.dk_de() * self.distance + transmission_delay(&self.potential, &kin)?)
    }
}

fn kernel_values<K: TimeKernel + ?Sized>(packet: &SpectralPacket, kernel: &K) -> Result<Vec<f64>> {
    packet.energies.par_iter().map(|&e| kernel.time(e)).collect()
}

/// `⟨Ψ|T^P|Ψ⟩ = ∫ψ̄ (-i∂E) ψ dE + ∫|ψ|² t^P(E) dE`.
pub fn occurrence_mean_with_kernel<K: TimeKernel + ?Sized>(packet: &SpectralPacket, kernel: &K) -> Result<f64> {
    let d = packet.derivative();
    let (re, im): (Vec<f64>, Vec<f64>) = packet
        .psi
        .iter()
        .zip(&d)
        .map(|(p, dp)| {
            let z = p.conj() * (-Complex64::i() * dp);
            (z.re, z.im)
        })
        .unzip();
    let imaginary = trapezoid(&packet.energies, &im);
    if imaginary.abs() > HERMITICITY_TOLERANCE {
        return Err(Error::NonHermitian { imaginary });
    }
    let weighted: Vec<f64> = kernel_values(packet, kernel)?
        .iter()
        .zip(packet.probability())
        .map(|(t, w)| t * w)
        .collect();
    Ok(trapezoid(&packet.energies, &re) + trapezoid(&packet.energies, &weighted))
}

/// `∫|ψ|² (t^P_with - t^P_free) dE`: the derivative terms of the two
/// expectation values cancel identically for a common packet.
pub fn delay_between_dynamics<A, B>(packet: &SpectralPacket, with: &A, free: &B) -> Result<f64>
where
    A: TimeKernel + ?Sized,
    B: TimeKernel + ?Sized,
{
    let a = kernel_values(packet, with)?;
    let b = kernel_values(packet, free)?;
    let integrand: Vec<f64> = a
        .iter()
        .zip(&b)
        .zip(packet.probability())
        .map(|((x, y), w)| (x - y) * w)
        .collect();
    Ok(trapezoid(&packet.energies, &integrand))
}
