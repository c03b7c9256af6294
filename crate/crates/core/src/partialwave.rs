//! Scattering amplitude, cross sections, angular time delay and space shift
//! assembled from per-partial-wave phase shifts.
//!
//! All angular observables are evaluated from analytic derivative sums:
//!
//! * `A = (1/k) Σ (2ℓ+1) sin δ_ℓ e^{iδ_ℓ} P_ℓ(cos θ)`
//! * `t(θ) = ∂E arg A = Im[ Σ (2ℓ+1) ∂Eδ_ℓ e^{2iδ_ℓ} P_ℓ / Σ (2ℓ+1) sin δ_ℓ e^{iδ_ℓ} P_ℓ ]`
//! * `b(θ) = -(1/k) ∂θ arg A = -(1/k) Im[ ∂θA / A ]`
//!
//! so `arg A` is never differenced numerically.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::kinematics::Kinematics;
use crate::specfun::legendre_with_theta_derivatives;

/// Relative amplitude size, in units of the model's length scale, below
/// which `arg A` is treated as undefined.
pub const NODE_THRESHOLD: f64 = 1e-13;

/// Classical time delay and space shift for comparison with quantum values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalReference {
    pub t_delay: f64,
    pub b: f64,
}

/// A source of partial-wave phase shifts `δ_ℓ(E)` and their energy
/// derivatives.
///
/// Implementations must be stateless (or internally synchronized): scans
/// evaluate them from several threads.
pub trait PhaseShiftModel: Sync {
    fn delta(&self, ell: usize, kin: &Kinematics) -> f64;

    /// `∂δ_ℓ/∂E`, in radians per unit energy.
    fn ddelta_de(&self, ell: usize, kin: &Kinematics) -> f64;

    /// Partial-wave cutoff beyond which `δ_ℓ` is negligible.
    fn suggested_ellmax(&self, kin: &Kinematics) -> usize;

    /// Phase shifts for `ℓ = 0..=ellmax`. Models that share work between
    /// orders (recurrences) should override this.
    fn table(&self, kin: &Kinematics, ellmax: usize) -> PhaseShiftTable {
        let delta = (0..=ellmax).map(|l| self.delta(l, kin)).collect();
        let ddelta = (0..=ellmax).map(|l| self.ddelta_de(l, kin)).collect();
        PhaseShiftTable::new(*kin, delta, ddelta)
    }

    fn classical_reference(&self, _kin: &Kinematics, _theta: f64) -> Option<ClassicalReference> {
        None
    }

    /// Length scale used for the amplitude-node threshold.
    fn length_unit(&self) -> f64 {
        1.0
    }
}

/// Phase shifts `δ_ℓ` and `∂Eδ_ℓ` for `ℓ = 0..=ellmax` at fixed kinematics.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShiftTable {
    kin: Kinematics,
    delta: Vec<f64>,
    ddelta_de: Vec<f64>,
    // (2ℓ+1) sin δ e^{iδ} and (2ℓ+1) ∂Eδ e^{2iδ}
    amp_weights: Vec<Complex64>,
    delay_weights: Vec<Complex64>,
}

/// Raw sums at one angle; `amplitude` already carries the `1/k` factor.
#[derive(Debug, Clone, Copy)]
struct AngularSums {
    amplitude: Complex64,
    dtheta_amplitude: Complex64,
    denergy_numerator: Complex64,
}

impl PhaseShiftTable {
    pub fn new(kin: Kinematics, delta: Vec<f64>, ddelta_de: Vec<f64>) -> Self {
        assert_eq!(delta.len(), ddelta_de.len(), "phase-shift columns differ in length");
        assert!(!delta.is_empty(), "phase-shift table needs at least ℓ = 0");
        let amp_weights = delta
            .iter()
            .enumerate()
            .map(|(l, &d)| (2 * l + 1) as f64 * d.sin() * Complex64::cis(d))
            .collect();
        let delay_weights = delta
            .iter()
            .zip(&ddelta_de)
            .enumerate()
            .map(|(l, (&d, &dd))| (2 * l + 1) as f64 * dd * Complex64::cis(2.0 * d))
            .collect();
        Self {
            kin,
            delta,
            ddelta_de,
            amp_weights,
            delay_weights,
        }
    }

    pub fn kinematics(&self) -> &Kinematics {
        &self.kin
    }

    pub fn ellmax(&self) -> usize {
        self.delta.len() - 1
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    pub fn ddelta_de(&self) -> &[f64] {
        &self.ddelta_de
    }

    /// `σ = 4π/k² Σ (2ℓ+1) sin²δ_ℓ`.
    pub fn total_cross_section(&self) -> f64 {
        let k = self.kin.k();
        4.0 * PI / (k * k)
            * self
                .delta
                .iter()
                .enumerate()
                .map(|(l, d)| (2 * l + 1) as f64 * d.sin().powi(2))
                .sum::<f64>()
    }

    fn sums(&self, theta: f64) -> AngularSums {
        let (p, dp) = legendre_with_theta_derivatives(self.ellmax(), theta);
        let mut amp = Complex64::new(0.0, 0.0);
        let mut damp = Complex64::new(0.0, 0.0);
        let mut num = Complex64::new(0.0, 0.0);
        for l in 0..=self.ellmax() {
            amp += self.amp_weights[l] * p[l];
            damp += self.amp_weights[l] * dp[l];
            num += self.delay_weights[l] * p[l];
        }
        let inv_k = 1.0 / self.kin.k();
        AngularSums {
            amplitude: amp * inv_k,
            dtheta_amplitude: damp * inv_k,
            denergy_numerator: num * inv_k,
        }
    }

    pub fn amplitude(&self, theta: f64) -> Result<AmplitudeSample> {
        check_angle(theta)?;
        Ok(AmplitudeSample::from_complex(theta, self.sums(theta).amplitude))
    }

    /// Angular time delay and space shift at `theta`, together with the
    /// amplitude they were derived from.
    pub fn observables(&self, theta: f64, length_unit: f64) -> Result<AngularObservables> {
        check_angle(theta)?;
        let s = self.sums(theta);
        let sample = AmplitudeSample::from_complex(theta, s.amplitude);
        let magnitude = s.amplitude.norm();
        let (t_delay, b) = if magnitude < NODE_THRESHOLD * length_unit {
            (
                Err(Error::AmplitudeNode { magnitude }),
                Err(Error::AmplitudeNode { magnitude }),
            )
        } else {
            (
                Ok((s.denergy_numerator / s.amplitude).im),
                Ok(-(s.dtheta_amplitude / s.amplitude).im / self.kin.k()),
            )
        };
        Ok(AngularObservables { sample, t_delay, b })
    }
}

/// Amplitude, time delay and space shift at one angle. The delay entries
/// are errors at amplitude nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularObservables {
    pub sample: AmplitudeSample,
    pub t_delay: Result<f64>,
    pub b: Result<f64>,
}

/// Complex amplitude at one angle, with derived cross section and phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeSample {
    pub theta: f64,
    pub a_re: f64,
    pub a_im: f64,
    pub dsigma_domega: f64,
    /// Principal value in `(-π, π]`.
    pub arg_a: f64,
}

impl AmplitudeSample {
    fn from_complex(theta: f64, a: Complex64) -> Self {
        Self {
            theta,
            a_re: a.re,
            a_im: a.im,
            dsigma_domega: a.re * a.re + a.im * a.im,
            arg_a: a.im.atan2(a.re),
        }
    }

    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.a_re, self.a_im)
    }
}

fn check_angle(theta: f64) -> Result<()> {
    if theta > 0.0 && theta <= PI {
        Ok(())
    } else {
        domain(format!(
            "scattering angle must lie in (0, π] (forward direction excluded), got {theta}"
        ))
    }
}

pub fn amplitude<M: PhaseShiftModel + ?Sized>(
    model: &M,
    kin: &Kinematics,
    theta: f64,
    ellmax: usize,
) -> Result<AmplitudeSample> {
    check_angle(theta)?;
    model.table(kin, ellmax).amplitude(theta)
}

/// `∂E arg A(E, θ)` from the analytic derivative sum.
pub fn angular_time_delay<M: PhaseShiftModel + ?Sized>(
    model: &M,
    kin: &Kinematics,
    theta: f64,
    ellmax: usize,
) -> Result<f64> {
    check_angle(theta)?;
    model
        .table(kin, ellmax)
        .observables(theta, model.length_unit())?
        .t_delay
}

/// Signed space shift `b = -(1/k) ∂θ arg A`.
pub fn space_shift<M: PhaseShiftModel + ?Sized>(
    model: &M,
    kin: &Kinematics,
    theta: f64,
    ellmax: usize,
) -> Result<f64> {
    check_angle(theta)?;
    model
        .table(kin, ellmax)
        .observables(theta, model.length_unit())?
        .b
}

/// Partial-wave delay `2 ∂Eδ_ℓ`.
pub fn eisenbud_wigner_delay<M: PhaseShiftModel + ?Sized>(model: &M, kin: &Kinematics, ell: usize) -> f64 {
    2.0 * model.ddelta_de(ell, kin)
}

/// Delay at `theta` measured against a detector at the reference angle `theta0`.
pub fn relative_delay<M: PhaseShiftModel + ?Sized>(
    model: &M,
    kin: &Kinematics,
    theta: f64,
    theta0: f64,
    ellmax: usize,
) -> Result<f64> {
    check_angle(theta)?;
    check_angle(theta0)?;
    let table = model.table(kin, ellmax);
    let t = table.observables(theta, model.length_unit())?.t_delay?;
    let t0 = table.observables(theta0, model.length_unit())?.t_delay?;
    Ok(t - t0)
}

/// One θ-row of a delay scan. `None` marks an amplitude node or a model
/// without a classical counterpart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayRow {
    pub theta: f64,
    pub t_delay: Option<f64>,
    pub b: Option<f64>,
    pub dsigma_domega: f64,
    pub t_class: Option<f64>,
    pub b_class: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelayProfile {
    pub kinematics: Kinematics,
    pub rows: Vec<DelayRow>,
}

impl DelayProfile {
    pub fn thetas(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.theta).collect()
    }
}

/// Uniform grid of `points` angles on `[theta_min, theta_max]`.
pub fn theta_grid(theta_min: f64, theta_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(theta_min > 0.0 && theta_min < theta_max && theta_max <= PI) {
        return domain(format!(
            "need 0 < theta_min < theta_max <= π, got [{theta_min}, {theta_max}]"
        ));
    }
    if points < 2 {
        return domain("angular grid needs at least two points");
    }
    let step = (theta_max - theta_min) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i == points - 1 {
                theta_max
            } else {
                theta_min + step * i as f64
            }
        })
        .collect())
}

/// Time delay, space shift, cross section and classical references on an
/// angular grid.
pub fn delay_profile_scan<M: PhaseShiftModel + ?Sized>(
    model: &M,
    kin: &Kinematics,
    theta_grid: &[f64],
    ellmax: usize,
) -> Result<DelayProfile> {
    for &t in theta_grid {
        check_angle(t)?;
    }
    if theta_grid.windows(2).any(|w| w[1] <= w[0]) {
        return domain("angular grid must be strictly increasing");
    }
    let table = model.table(kin, ellmax);
    let unit = model.length_unit();
    let rows = theta_grid
        .par_iter()
        .map(|&theta| {
            let obs = table.observables(theta, unit)?;
            let classical = model.classical_reference(kin, theta);
            Ok(DelayRow {
                theta,
                t_delay: obs.t_delay.ok(),
                b: obs.b.ok(),
                dsigma_domega: obs.sample.dsigma_domega,
                t_class: classical.map(|c| c.t_delay),
                b_class: classical.map(|c| c.b),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DelayProfile {
        kinematics: *kin,
        rows,
    })
}

/// One row of a fixed-angle energy scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRow {
    pub k: f64,
    pub energy: f64,
    pub t_delay: Option<f64>,
    pub b: Option<f64>,
}

/// Time delay and space shift at fixed `theta` over a wavenumber grid, each
/// point using the model's suggested partial-wave cutoff.
pub fn energy_scan<M: PhaseShiftModel + ?Sized>(
    model: &M,
    mass: f64,
    theta: f64,
    k_grid: &[f64],
) -> Result<Vec<EnergyRow>> {
    check_angle(theta)?;
    if k_grid.windows(2).any(|w| w[1] <= w[0]) {
        return domain("wavenumber grid must be strictly increasing");
    }
    let unit = model.length_unit();
    k_grid
        .par_iter()
        .map(|&k| {
            let kin = Kinematics::new(mass, k)?;
            let table = model.table(&kin, model.suggested_ellmax(&kin));
            let obs = table.observables(theta, unit)?;
            Ok(EnergyRow {
                k,
                energy: kin.energy(),
                t_delay: obs.t_delay.ok(),
                b: obs.b.ok(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Free;

    impl PhaseShiftModel for Free {
        fn delta(&self, _: usize, _: &Kinematics) -> f64 {
            0.0
        }
        fn ddelta_de(&self, _: usize, _: &Kinematics) -> f64 {
            0.0
        }
        fn suggested_ellmax(&self, _: &Kinematics) -> usize {
            10
        }
    }

    /// Two partial waves with analytic energy dependence, for checking the
    /// sums against a hand-coded amplitude.
    struct TwoWave;

    impl PhaseShiftModel for TwoWave {
        fn delta(&self, ell: usize, kin: &Kinematics) -> f64 {
            match ell {
                0 => 0.3 + 0.2 * kin.energy(),
                1 => -0.1 * kin.energy().powi(2),
                _ => 0.0,
            }
        }
        fn ddelta_de(&self, ell: usize, kin: &Kinematics) -> f64 {
            match ell {
                0 => 0.2,
                1 => -0.2 * kin.energy(),
                _ => 0.0,
            }
        }
        fn suggested_ellmax(&self, _: &Kinematics) -> usize {
            1
        }
    }

    fn two_wave_amplitude(e: f64, theta: f64) -> Complex64 {
        let k = (2.0 * e).sqrt();
        let d0: f64 = 0.3 + 0.2 * e;
        let d1: f64 = -0.1 * e * e;
        (Complex64::cis(2.0 * d0) - 1.0 + 3.0 * (Complex64::cis(2.0 * d1) - 1.0) * theta.cos())
            / Complex64::new(0.0, 2.0 * k)
    }

    #[test]
    fn no_scattering_gives_zero_amplitude() {
        let kin = Kinematics::new(1.0, 1.3).unwrap();
        let a = amplitude(&Free, &kin, 1.0, 10).unwrap();
        assert_eq!(a.a_re, 0.0);
        assert_eq!(a.a_im, 0.0);
        assert!(matches!(
            angular_time_delay(&Free, &kin, 1.0, 10),
            Err(Error::AmplitudeNode { .. })
        ));
    }

    #[test]
    fn forward_direction_rejected() {
        let kin = Kinematics::new(1.0, 1.0).unwrap();
        assert!(amplitude(&TwoWave, &kin, 0.0, 1).is_err());
        assert!(amplitude(&TwoWave, &kin, PI + 1e-9, 1).is_err());
        assert!(amplitude(&TwoWave, &kin, PI, 1).is_ok());
    }

    #[test]
    fn sums_match_hand_coded_amplitude() {
        let e = 0.7;
        let kin = Kinematics::from_energy(1.0, e).unwrap();
        for &theta in &[0.2, 1.0, 2.5, PI] {
            let a = amplitude(&TwoWave, &kin, theta, 1).unwrap();
            let want = two_wave_amplitude(e, theta);
            assert!((a.complex() - want).norm() < 1e-14);
            assert_eq!(a.dsigma_domega, a.a_re * a.a_re + a.a_im * a.a_im);

            let fd_e = crate::kinematics::central_derivative(
                |x| two_wave_amplitude(x, theta).arg(),
                e,
                1e-4,
            )
            .unwrap();
            let t = angular_time_delay(&TwoWave, &kin, theta, 1).unwrap();
            assert!((t - fd_e).abs() < 1e-8 * fd_e.abs().max(1.0));
        }
        let theta = 1.1;
        let fd_theta = crate::kinematics::central_derivative(
            |x| two_wave_amplitude(e, x).arg(),
            theta,
            1e-4,
        )
        .unwrap();
        let b = space_shift(&TwoWave, &kin, theta, 1).unwrap();
        assert!((b + fd_theta / kin.k()).abs() < 1e-8);
    }

    #[test]
    fn eisenbud_wigner_is_twice_derivative() {
        let kin = Kinematics::from_energy(1.0, 2.0).unwrap();
        assert_eq!(eisenbud_wigner_delay(&TwoWave, &kin, 1), -0.8);
        assert_eq!(eisenbud_wigner_delay(&Free, &kin, 3), 0.0);
    }

    #[test]
    fn relative_delay_identity_and_antisymmetry() {
        let kin = Kinematics::from_energy(1.0, 0.9).unwrap();
        assert_eq!(relative_delay(&TwoWave, &kin, 1.2, 1.2, 1).unwrap(), 0.0);
        let a = relative_delay(&TwoWave, &kin, 0.4, 2.2, 1).unwrap();
        let b = relative_delay(&TwoWave, &kin, 2.2, 0.4, 1).unwrap();
        assert_eq!(a, -b);
    }

    #[test]
    fn empty_grid_gives_empty_profile() {
        let kin = Kinematics::new(1.0, 1.0).unwrap();
        let p = delay_profile_scan(&TwoWave, &kin, &[], 1).unwrap();
        assert!(p.rows.is_empty());
    }

    #[test]
    fn scan_rejects_unordered_grid() {
        let kin = Kinematics::new(1.0, 1.0).unwrap();
        assert!(delay_profile_scan(&TwoWave, &kin, &[1.0, 0.5], 1).is_err());
        assert!(delay_profile_scan(&TwoWave, &kin, &[0.0, 0.5], 1).is_err());
    }

    #[test]
    fn node_rows_are_flagged() {
        let kin = Kinematics::new(1.0, 1.0).unwrap();
        let p = delay_profile_scan(&Free, &kin, &[0.5, 1.0], 4).unwrap();
        assert!(p.rows.iter().all(|r| r.t_delay.is_none() && r.b.is_none()));
        assert!(p.rows.iter().all(|r| r.t_class.is_none()));
    }

    #[test]
    fn theta_grid_endpoints() {
        let g = theta_grid(0.01, PI, 2000).unwrap();
        assert_eq!(g.len(), 2000);
        assert_eq!(g[0], 0.01);
        assert_eq!(g[1999], PI);
        assert!(theta_grid(0.0, 1.0, 10).is_err());
        assert!(theta_grid(1.0, 0.5, 10).is_err());
        assert!(theta_grid(0.1, 4.0, 10).is_err());
    }
}
