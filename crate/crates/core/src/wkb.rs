//! WKB phase shifts with the Langer replacement `J = ℓ + ½`, the classical
//! deflection function and stationary-phase time delay and space shift.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::kinematics::Kinematics;
use crate::quad::{bisect, integrate, QuadConfig};

/// Spherically symmetric potential `V(r)`, optionally with an impenetrable
/// core of radius `R_core`.
pub trait RadialPotential: Sync {
    fn value(&self, r: f64) -> f64;

    fn hard_core(&self) -> f64 {
        0.0
    }

    /// Radius beyond which `V` is negligible.
    fn range(&self) -> f64;
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FreePotential;

impl RadialPotential for FreePotential {
    fn value(&self, _r: f64) -> f64 {
        0.0
    }

    fn range(&self) -> f64 {
        0.0
    }
}

/// Impenetrable sphere: `V = ∞` inside `R`, zero outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardCore {
    pub radius: f64,
}

impl RadialPotential for HardCore {
    fn value(&self, _r: f64) -> f64 {
        0.0
    }

    fn hard_core(&self) -> f64 {
        self.radius
    }

    fn range(&self) -> f64 {
        self.radius
    }
}

/// `V(r) = V0 exp(-r² / w²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBarrier {
    pub height: f64,
    pub width: f64,
}

impl RadialPotential for GaussianBarrier {
    fn value(&self, r: f64) -> f64 {
        self.height * (-(r / self.width).powi(2)).exp()
    }

    fn range(&self) -> f64 {
        // exp(-36) ≈ 2e-16
        6.0 * self.width
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbResult {
    pub j: f64,
    pub r0: f64,
    pub delta_wkb: f64,
    pub ddelta_de: f64,
    pub deflection: f64,
}

/// One stationary angular momentum `J*` with `θ = sign·Θ(J*) + 2πn`.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub j: f64,
    pub deflection: f64,
    pub sign: i8,
    pub winding: i32,
}

fn radial_momentum_sq<P: RadialPotential + ?Sized>(pot: &P, kin: &Kinematics, j: f64, r: f64) -> f64 {
    2.0 * kin.mass() * (kin.energy() - pot.value(r)) - j * j / (r * r)
}

/// Largest root of `2m(E - V(r)) - J²/r²`, or the core radius if that is
/// larger.
pub fn turning_point<P: RadialPotential + ?Sized>(pot: &P, kin: &Kinematics, j: f64) -> Result<f64> {
    if !(j > 0.0 && j.is_finite()) {
        return domain(format!("angular momentum must be positive, got {j}"));
    }
    let core = pot.hard_core();
    let g = |r: f64| radial_momentum_sq(pot, kin, j, r);
    let mut upper = 2.0 * pot.range().max(j / kin.k()).max(core);
    if !(g(upper) > 0.0) {
        return Err(Error::NoTurningPoint { j });
    }
    let floor = core.max(upper * 1e-12);
    loop {
        let lower = upper * 0.98;
        if lower <= floor {
            if core > 0.0 && g(core) > 0.0 {
                return Ok(core);
            }
            if core > 0.0 {
                return bisect(g, core, upper)
                    .map(|r| r.max(core))
                    .ok_or(Error::NoTurningPoint { j });
            }
            return Err(Error::NoTurningPoint { j });
        }
        if g(lower) <= 0.0 {
            let root = bisect(g, lower, upper).ok_or(Error::NoTurningPoint { j })?;
            return Ok(root.max(core));
        }
        upper = lower;
    }
}

/// Closed-form `∫_{rs}^∞ (√(k² - J²/r²) - k) dr`.
fn free_tail(k: f64, j: f64, rs: f64) -> f64 {
    let x = k * rs;
    -j * FRAC_PI_2 - ((x * x - j * j).sqrt() - j * (j / x).acos() - x)
}

/// Closed-form `∫_{rs}^∞ (m/√(k² - J²/r²) - m/k) dr`.
fn free_tail_de(kin: &Kinematics, j: f64, rs: f64) -> f64 {
    let b = j / kin.k();
    kin.dk_de() * (rs - (rs * rs - b * b).sqrt())
}

/// `∫_{rs}^∞ f`, integrated over doubling chunks until a chunk contributes
/// less than `tiny`.
fn outer_integral<F: Fn(f64) -> f64>(f: F, rs: f64, span: f64, tiny: f64, cfg: &QuadConfig) -> Result<f64> {
    let mut total = 0.0;
    let mut a = rs;
    let mut width = span.max(rs);
    for _ in 0..64 {
        let piece = integrate(&f, a, a + width, cfg)?;
        total += piece;
        if piece.abs() < tiny {
            return Ok(total);
        }
        a += width;
        width *= 2.0;
    }
    Err(Error::Quadrature {
        estimate: total,
        error: f64::NAN,
        intervals: 64,
    })
}

/// `(δ^WKB, ∂E δ^WKB, r0)` at real angular momentum `J`:
///
/// `δ = (π/2) J + ∫_{r0}^∞ (p - k) dr - k r0`,
/// `∂E δ = ∫_{r0}^∞ (m/p - m/k) dr - (m/k) r0`.
fn phase_at<P: RadialPotential + ?Sized>(pot: &P, kin: &Kinematics, j: f64) -> Result<(f64, f64, f64)> {
    let k = kin.k();
    let m = kin.mass();
    let r0 = turning_point(pot, kin, j)?;
    let rs = 2.0 * r0.max(j / k);
    let cfg = QuadConfig::default();
    let p_at = |r: f64| radial_momentum_sq(pot, kin, j, r).max(0.0).sqrt();

    // r = r0 cosh u removes the square-root endpoint behaviour at r0.
    let u_max = (rs / r0).acosh();
    let inner = integrate(
        |u| {
            let r = r0 * u.cosh();
            (p_at(r) - k) * r0 * u.sinh()
        },
        0.0,
        u_max,
        &cfg,
    )?;
    let inner_de = integrate(
        |u| {
            let r = r0 * u.cosh();
            let p = p_at(r);
            if p > 0.0 {
                (m / p - m / k) * r0 * u.sinh()
            } else {
                0.0
            }
        },
        0.0,
        u_max,
        &cfg,
    )?;

    // p - p_free = -2mV / (p + p_free), free of cancellation.
    let span = pot.range();
    let free_p = |r: f64| (k * k - j * j / (r * r)).sqrt();
    let tiny = 1e-14 * k;
    let outer = outer_integral(
        |r| {
            let v = pot.value(r);
            if v == 0.0 {
                0.0
            } else {
                -2.0 * m * v / (p_at(r) + free_p(r))
            }
        },
        rs,
        span,
        tiny,
        &cfg,
    )?;
    let outer_de = outer_integral(
        |r| {
            let v = pot.value(r);
            if v == 0.0 {
                0.0
            } else {
                let (p, pf) = (p_at(r), free_p(r));
                m * (pf - p) / (p * pf)
            }
        },
        rs,
        span,
        tiny * kin.dk_de() / k,
        &cfg,
    )?;

    let delta = FRAC_PI_2 * j + inner + outer + free_tail(k, j, rs) - k * r0;
    let ddelta = inner_de + outer_de + free_tail_de(kin, j, rs) - kin.dk_de() * r0;
    Ok((delta, ddelta, r0))
}

/// `Θ(J) = 2 ∂J δ^WKB`, centered difference with step `min(½, J/2)`.
pub fn deflection_function<P: RadialPotential + ?Sized>(pot: &P, kin: &Kinematics, j: f64) -> Result<f64> {
    if !(j > 0.0) {
        return domain(format!("angular momentum must be positive, got {j}"));
    }
    let h = (0.5f64).min(0.5 * j);
    let plus = phase_at(pot, kin, j + h)?.0;
    let minus = phase_at(pot, kin, j - h)?.0;
    Ok((plus - minus) / h)
}

/// WKB phase, energy derivative and deflection at real `J`.
pub fn wkb_at<P: RadialPotential + ?Sized>(pot: &P, kin: &Kinematics, j: f64) -> Result<WkbResult> {
    let (delta_wkb, ddelta_de, r0) = phase_at(pot, kin, j)?;
    Ok(WkbResult {
        j,
        r0,
        delta_wkb,
        ddelta_de,
        deflection: deflection_function(pot, kin, j)?,
    })
}

/// WKB phase shift of partial wave `ℓ` (`J = ℓ + ½`).
pub fn wkb_phase_shift<P: RadialPotential + ?Sized>(pot: &P, kin: &Kinematics, ell: usize) -> Result<WkbResult> {
    wkb_at(pot, kin, ell as f64 + 0.5)
}

const J_GRID_POINTS: usize = 400;

/// All `J*` solving `θ = ±Θ(J*) mod 2π` on the scanned range.
pub fn find_branches<P: RadialPotential + ?Sized>(pot: &P, kin: &Kinematics, theta: f64) -> Result<Vec<Branch>> {
    if !(theta > 0.0 && theta <= PI) {
        return domain(format!("scattering angle must lie in (0, π], got {theta}"));
    }
    let k = kin.k();
    let j_max = k * (pot.range() + pot.hard_core()) * 1.2 + 5.0;
    let j_min = 0.05f64.min(0.01 * j_max);
    let grid: Vec<f64> = (0..J_GRID_POINTS)
        .map(|i| j_min + (j_max - j_min) * i as f64 / (J_GRID_POINTS - 1) as f64)
        .collect();
    let deflections = grid
        .par_iter()
        .map(|&j| deflection_function(pot, kin, j))
        .collect::<Result<Vec<_>>>()?;

    let lo = deflections.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = deflections.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let n_lo = ((lo - PI) / (2.0 * PI)).floor() as i32;
    let n_hi = ((hi + PI) / (2.0 * PI)).ceil() as i32;

    let mut branches = Vec::new();
    for sign in [1i8, -1] {
        for n in n_lo..=n_hi {
            let target = f64::from(sign) * theta + 2.0 * PI * f64::from(n);
            for i in 0..grid.len() - 1 {
                let (fa, fb) = (deflections[i] - target, deflections[i + 1] - target);
                let brackets = (fa < 0.0 && fb >= 0.0) || (fa > 0.0 && fb <= 0.0);
                if !brackets {
                    continue;
                }
                let f = |j: f64| deflection_function(pot, kin, j).map_or(f64::NAN, |d| d - target);
                if let Some(j) = bisect(f, grid[i], grid[i + 1]) {
                    branches.push(Branch {
                        j,
                        deflection: deflection_function(pot, kin, j)?,
                        sign,
                        winding: n,
                    });
                }
            }
        }
    }
    branches.sort_by(|a, b| a.j.total_cmp(&b.j));
    Ok(branches)
}

fn single_branch<P: RadialPotential + ?Sized>(pot: &P, kin: &Kinematics, theta: f64) -> Result<Branch> {
    let mut branches = find_branches(pot, kin, theta)?;
    if branches.len() == 1 {
        Ok(branches.remove(0))
    } else {
        Err(Error::MultiBranch { branches })
    }
}

/// Stationary-phase time delay `2 ∂E δ^WKB(J*)`.
pub fn semiclassical_delay<P: RadialPotential + ?Sized>(pot: &P, kin: &Kinematics, theta: f64) -> Result<f64> {
    let branch = single_branch(pot, kin, theta)?;
    Ok(2.0 * phase_at(pot, kin, branch.j)?.1)
}

/// Stationary-phase space shift `±J*/k`, signed by the branch.
pub fn semiclassical_space_shift<P: RadialPotential + ?Sized>(pot: &P, kin: &Kinematics, theta: f64) -> Result<f64> {
    let branch = single_branch(pot, kin, theta)?;
    Ok(f64::from(branch.sign) * branch.j / kin.k())
}
