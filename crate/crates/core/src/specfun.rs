//! Spherical Bessel functions and Legendre polynomials.
//!
//! `j_ℓ` is evaluated by Miller's downward recurrence (upward when `x > ℓ`),
//! `n_ℓ` by upward recurrence, which is stable for the irregular solution.
//! Orders where `|n_ℓ|` would exceed [`SATURATION`] are flagged rather than
//! overflowing; there `j_ℓ / n_ℓ` is far below double precision.

use std::f64::consts::PI;

use crate::error::{domain, Result};

pub const MAX_ORDER: usize = 100_000;

/// Magnitude above which `n_ℓ` is reported as saturated.
pub const SATURATION: f64 = 1e280;

const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// `j_ℓ(x)`, `n_ℓ(x)` and their `x`-derivatives at one order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselPair {
    pub ell: usize,
    pub x: f64,
    pub j: f64,
    pub n: f64,
    pub jprime: f64,
    pub nprime: f64,
    /// `n_ℓ` overflowed; `n` and `nprime` are infinite and `j` is negligible
    /// relative to them.
    pub saturated: bool,
}

/// `j_ℓ(x)` and `n_ℓ(x)` for all orders `0..=ellmax` at a single `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselTable {
    x: f64,
    ellmax: usize,
    j: Vec<f64>,
    n: Vec<f64>,
    saturated_from: Option<usize>,
}

impl BesselTable {
    pub fn new(ellmax: usize, x: f64) -> Result<Self> {
        if !(x > 0.0 && x.is_finite()) {
            return domain(format!("spherical Bessel argument must be positive, got {x}"));
        }
        if ellmax > MAX_ORDER {
            return domain(format!("order {ellmax} exceeds {MAX_ORDER}"));
        }
        // One extra order so that derivatives at ℓ = 0 can use ℓ = 1.
        let top = ellmax.max(1);
        let j = if x > top as f64 {
            j_upward(top, x)
        } else {
            j_downward(top, x)
        };
        let (n, saturated_from) = n_upward(top, x);
        Ok(Self {
            x,
            ellmax,
            j,
            n,
            saturated_from,
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn ellmax(&self) -> usize {
        self.ellmax
    }

    pub fn j(&self, ell: usize) -> f64 {
        self.j[ell]
    }

    pub fn n(&self, ell: usize) -> f64 {
        self.n[ell]
    }

    pub fn is_saturated(&self, ell: usize) -> bool {
        self.saturated_from.is_some_and(|s| ell >= s)
    }

    pub fn pair(&self, ell: usize) -> BesselPair {
        assert!(ell <= self.ellmax, "order {ell} outside table");
        let x = self.x;
        let (jprime, nprime) = if ell == 0 {
            (-self.j[1], -self.n[1])
        } else {
            let c = (ell as f64 + 1.0) / x;
            (
                self.j[ell - 1] - c * self.j[ell],
                self.n[ell - 1] - c * self.n[ell],
            )
        };
        let saturated = self.is_saturated(ell);
        BesselPair {
            ell,
            x,
            j: self.j[ell],
            n: self.n[ell],
            jprime,
            nprime: if saturated { f64::INFINITY } else { nprime },
            saturated,
        }
    }
}

pub fn spherical_bessel(ell: usize, x: f64) -> Result<BesselPair> {
    Ok(BesselTable::new(ell, x)?.pair(ell))
}

pub(crate) fn j0(x: f64) -> f64 {
    if x < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

pub(crate) fn j1(x: f64) -> f64 {
    if x < 0.1 {
        let x2 = x * x;
        x / 3.0 * (1.0 - x2 / 10.0 * (1.0 - x2 / 28.0 * (1.0 - x2 / 54.0)))
    } else {
        (x.sin() / x - x.cos()) / x
    }
}

fn miller_start(ell: usize, x: f64) -> usize {
    let l = ell as f64;
    let offset = 20f64.max((10.0 * (l + 10.0).ln()).ceil()) + (8.0 * x.cbrt()).ceil();
    (l.max(x.ceil()) + offset) as usize
}

fn j_upward(top: usize, x: f64) -> Vec<f64> {
    let mut j = Vec::with_capacity(top + 1);
    j.push(j0(x));
    j.push(j1(x));
    for l in 1..top {
        let next = (2 * l + 1) as f64 / x * j[l] - j[l - 1];
        j.push(next);
    }
    j
}

fn j_downward(top: usize, x: f64) -> Vec<f64> {
    let start = miller_start(top, x);
    let mut out = vec![0.0; top + 1];
    let mut upper = 0.0; // f_{l+1}
    let mut current = 1.0; // f_l
    for l in (1..=start).rev() {
        if l <= top {
            out[l] = current;
        }
        let lower = (2 * l + 1) as f64 / x * current - upper;
        upper = current;
        current = lower;
        if current.abs() > RESCALE_ABOVE {
            current *= RESCALE_BY;
            upper *= RESCALE_BY;
            for v in out.iter_mut().skip(l.min(top + 1)) {
                *v *= RESCALE_BY;
            }
        }
    }
    out[0] = current;
    // Normalize against whichever of j0, j1 is larger in magnitude.
    let (t0, t1) = (j0(x), j1(x));
    let scale = if t0.abs() >= t1.abs() {
        t0 / out[0]
    } else {
        t1 / out[1]
    };
    for v in &mut out {
        *v *= scale;
    }
    out
}

fn n_upward(top: usize, x: f64) -> (Vec<f64>, Option<usize>) {
    let mut n = Vec::with_capacity(top + 1);
    n.push(-x.cos() / x);
    n.push(-x.cos() / (x * x) - x.sin() / x);
    let mut saturated_from = None;
    for l in 1..top {
        let next = (2 * l + 1) as f64 / x * n[l] - n[l - 1];
        if !(next.abs() <= SATURATION) {
            saturated_from = Some(l + 1);
            break;
        }
        n.push(next);
    }
    if let Some(s) = saturated_from {
        n.resize(top + 1, f64::NEG_INFINITY);
        debug_assert!(s <= top);
    }
    // n_0 or n_1 themselves can overflow for tiny x.
    if let Some(first) = n.iter().position(|v| !(v.abs() <= SATURATION)) {
        saturated_from = Some(saturated_from.map_or(first, |s: usize| s.min(first)));
        for v in n.iter_mut().skip(first) {
            *v = f64::NEG_INFINITY;
        }
    }
    (n, saturated_from)
}

/// `P_ℓ(x)` for `ℓ = 0..=ellmax` at one `x = cos θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreSequence {
    pub x: f64,
    pub values: Vec<f64>,
}

pub fn legendre_all(ellmax: usize, costheta: f64) -> Result<LegendreSequence> {
    if !(costheta.abs() <= 1.0) {
        return domain(format!("Legendre argument must lie in [-1, 1], got {costheta}"));
    }
    Ok(LegendreSequence {
        x: costheta,
        values: legendre_values(ellmax, costheta),
    })
}

fn legendre_values(ellmax: usize, x: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(ellmax + 1);
    p.push(1.0);
    if ellmax >= 1 {
        p.push(x);
    }
    for l in 1..ellmax {
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * x * p[l] - lf * p[l - 1]) / (lf + 1.0);
        p.push(next);
    }
    p
}

/// `P_ℓ(cos θ)` and `∂θ P_ℓ(cos θ)` for `ℓ = 0..=ellmax`, valid on `[0, π]`.
///
/// The angular derivative is `-sin θ · P'_ℓ(cos θ)` with `P'` from
/// `P'_{ℓ+1} = P'_{ℓ-1} + (2ℓ+1) P_ℓ`, so it vanishes exactly on the axis.
pub fn legendre_with_theta_derivatives(ellmax: usize, theta: f64) -> (Vec<f64>, Vec<f64>) {
    let (s, c) = theta.sin_cos();
    let p = legendre_values(ellmax + 1, c);
    let mut dp = vec![0.0; ellmax + 2];
    if ellmax + 1 >= 1 {
        dp[1] = 1.0;
    }
    for l in 1..=ellmax {
        dp[l + 1] = dp[l - 1] + (2 * l + 1) as f64 * p[l];
    }
    let dtheta = dp[..=ellmax].iter().map(|d| -s * d).collect();
    let mut p = p;
    p.truncate(ellmax + 1);
    (p, dtheta)
}

/// `d/dθ P_ℓ(cos θ)` on the open interval `0 < θ < π`.
pub fn legendre_theta_derivative(ell: usize, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < PI) {
        return domain(format!("θ must lie strictly inside (0, π), got {theta}"));
    }
    let (_, d) = legendre_with_theta_derivatives(ell, theta);
    Ok(d[ell])
}

/// Large-ℓ form `2/√(2πℓ sin θ) · cos((ℓ+½)θ − π/4)`.
pub fn legendre_asymptotic(ell: usize, theta: f64) -> Result<f64> {
    if ell == 0 {
        return domain("asymptotic Legendre form needs ℓ ≥ 1");
    }
    if !(theta > 0.0 && theta < PI) {
        return domain(format!("θ must lie strictly inside (0, π), got {theta}"));
    }
    let l = ell as f64;
    Ok(2.0 / (2.0 * PI * l * theta.sin()).sqrt() * ((l + 0.5) * theta - PI / 4.0).cos())
}
