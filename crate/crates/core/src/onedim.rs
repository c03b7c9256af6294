//! One-dimensional scattering on piecewise-constant potentials: reflection
//! and transmission coefficients and the associated time delays.

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::kinematics::{unwrap_phase, Kinematics};

/// Smallest `|T|` for which `arg T` is considered meaningful.
pub const TRANSMISSION_NODE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Potential1D {
    /// `V = 0` for `x < 0`, `V = V0` for `x > 0`.
    Step { v0: f64 },
    /// `V = values[i]` on `[breakpoints[i], breakpoints[i+1])`, zero outside.
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
}

impl Potential1D {
    pub fn step(v0: f64) -> Result<Self> {
        if !(v0 > 0.0 && v0.is_finite()) {
            return domain(format!("step height must be positive, got {v0}"));
        }
        Ok(Potential1D::Step { v0 })
    }

    pub fn piecewise(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || breakpoints.len() != values.len() + 1 {
            return domain(format!(
                "need n + 1 breakpoints for n segments, got {} and {}",
                breakpoints.len(),
                values.len()
            ));
        }
        if breakpoints.iter().chain(&values).any(|v| !v.is_finite()) {
            return domain("breakpoints and segment values must be finite");
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return domain("breakpoints must be strictly increasing");
        }
        Ok(Potential1D::PiecewiseConstant { breakpoints, values })
    }

    /// Rectangular barrier of height `v0` on `[0, width]`.
    pub fn square_barrier(v0: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return domain(format!("barrier width must be positive, got {width}"));
        }
        Self::piecewise(vec![0.0, width], vec![v0])
    }

    /// Potential values that the energy must avoid straddling when
    /// differentiating in `E`.
    fn levels(&self) -> Vec<f64> {
        match self {
            Potential1D::Step { v0 } => vec![0.0, *v0],
            Potential1D::PiecewiseConstant { values, .. } => {
                let mut v = values.clone();
                v.push(0.0);
                v
            }
        }
    }
}

/// Reflection and transmission amplitudes for unit incidence from the left:
/// `ψ = e^{ikx} + R e^{-ikx}` on the left, `ψ = T e^{iqx}` on the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterCoefficients {
    pub energy: f64,
    pub r: Complex64,
    pub t: Complex64,
}

impl ScatterCoefficients {
    pub fn reflection_probability(&self) -> f64 {
        self.r.norm_sqr()
    }

    pub fn transmission_probability(&self) -> f64 {
        self.t.norm_sqr()
    }
}

type Mat2 = [[Complex64; 2]; 2];

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Local solution basis of one constant region.
#[derive(Debug, Clone, Copy)]
enum Region {
    /// `e^{±iq(x - origin)}`, used where `R` and `T` are defined.
    Waves { q: Complex64, origin: f64 },
    /// `cos(q(x - origin))`, `sin(q(x - origin))/q` with `q² = 2m(E - V)`:
    /// real, unimodular, and reducing to `1, x - origin` at `E = V`.
    Standing { q2: f64, origin: f64 },
}

impl Region {
    fn waves(mass: f64, energy: f64, v: f64, origin: f64) -> Self {
        let q = Complex64::new(2.0 * mass * (energy - v), 0.0).sqrt();
        Region::Waves { q, origin }
    }

    fn standing(mass: f64, energy: f64, v: f64, origin: f64) -> Self {
        Region::Standing {
            q2: 2.0 * mass * (energy - v),
            origin,
        }
    }

    /// Maps coefficients to `(ψ, ψ')` at `x`.
    fn values(&self, x: f64) -> Mat2 {
        match *self {
            Region::Waves { q, origin } => {
                let d = x - origin;
                if q == Complex64::new(0.0, 0.0) {
                    return real_matrix([[1.0, d], [0.0, 1.0]]);
                }
                let ip = (Complex64::i() * q * d).exp();
                let im = (-Complex64::i() * q * d).exp();
                let iq = Complex64::i() * q;
                [[ip, im], [iq * ip, -iq * im]]
            }
            Region::Standing { q2, origin } => {
                let (c, s) = cos_sinc(q2, x - origin);
                real_matrix([[c, s], [-q2 * s, c]])
            }
        }
    }

    /// Maps `(ψ, ψ')` at `x` back to coefficients.
    fn inverse_values(&self, x: f64) -> Mat2 {
        match *self {
            Region::Waves { q, origin } => {
                let d = x - origin;
                if q == Complex64::new(0.0, 0.0) {
                    return real_matrix([[1.0, -d], [0.0, 1.0]]);
                }
                let ip = (Complex64::i() * q * d).exp();
                let im = (-Complex64::i() * q * d).exp();
                let inv_2iq = 1.0 / (2.0 * Complex64::i() * q);
                [[im * 0.5, im * inv_2iq], [ip * 0.5, -ip * inv_2iq]]
            }
            Region::Standing { q2, origin } => {
                let (c, s) = cos_sinc(q2, x - origin);
                real_matrix([[c, -s], [q2 * s, c]])
            }
        }
    }
}

fn real_matrix(m: [[f64; 2]; 2]) -> Mat2 {
    m.map(|row| row.map(|v| Complex64::new(v, 0.0)))
}

/// `(cos(qd), sin(qd)/q)` for real `q² `, continued to `cosh`/`sinh` below
/// the level and evaluated by series near `q² d² = 0`.
fn cos_sinc(q2: f64, d: f64) -> (f64, f64) {
    let z = q2 * d * d;
    if z.abs() < 1e-3 {
        let c = 1.0 - z / 2.0 * (1.0 - z / 12.0 * (1.0 - z / 30.0 * (1.0 - z / 56.0)));
        let s = d * (1.0 - z / 6.0 * (1.0 - z / 20.0 * (1.0 - z / 42.0 * (1.0 - z / 72.0))));
        (c, s)
    } else if q2 > 0.0 {
        let q = q2.sqrt();
        ((q * d).cos(), (q * d).sin() / q)
    } else {
        let kappa = (-q2).sqrt();
        ((kappa * d).cosh(), (kappa * d).sinh() / kappa)
    }
}

/// Exact transfer-matrix solution of the piecewise-constant problem.
pub fn transfer_coefficients(pot: &Potential1D, kin: &Kinematics) -> Result<ScatterCoefficients> {
    let m = kin.mass();
    let e = kin.energy();
    // Outer regions use the global origin; interior segments their left edge.
    let (boundaries, regions): (Vec<f64>, Vec<Region>) = match pot {
        Potential1D::Step { v0 } => (
            vec![0.0],
            vec![Region::waves(m, e, 0.0, 0.0), Region::waves(m, e, *v0, 0.0)],
        ),
        Potential1D::PiecewiseConstant { breakpoints, values } => {
            let mut regions = vec![Region::waves(m, e, 0.0, 0.0)];
            for (i, &v) in values.iter().enumerate() {
                regions.push(Region::standing(m, e, v, breakpoints[i]));
            }
            regions.push(Region::waves(m, e, 0.0, 0.0));
            (breakpoints.clone(), regions)
        }
    };
    let mut total: Mat2 = [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ];
    for (i, &x) in boundaries.iter().enumerate() {
        let step = mul(&regions[i + 1].inverse_values(x), &regions[i].values(x));
        total = mul(&step, &total);
    }
    let r = -total[1][0] / total[1][1];
    let t = total[0][0] + total[0][1] * r;
    if !(r.is_finite() && t.is_finite()) {
        return Err(Error::Domain(format!(
            "transfer matrix overflowed at E = {e}; barrier too opaque for double precision"
        )));
    }
    Ok(ScatterCoefficients { energy: e, r, t })
}

/// Energy step for phase derivatives: the validation step, shrunk so the
/// stencil stays on one side of every potential level.
fn phase_step(pot: &Potential1D, e: f64) -> f64 {
    let mut h = crate::kinematics::validation_step(e);
    for v in pot.levels() {
        let gap = (e - v).abs();
        if gap > 0.0 {
            h = h.min(gap / 4.0);
        }
    }
    h
}

fn phase_derivative<F>(pot: &Potential1D, kin: &Kinematics, phase: F) -> Result<f64>
where
    F: Fn(&ScatterCoefficients) -> f64,
{
    let e = kin.energy();
    let h = phase_step(pot, e);
    let center = phase(&transfer_coefficients(pot, kin)?);
    let at = |x: f64| -> Result<f64> {
        let c = transfer_coefficients(pot, &kin.with_energy(x)?)?;
        Ok(unwrap_phase(center, phase(&c)))
    };
    let (p2, p1, m1, m2) = (at(e + 2.0 * h)?, at(e + h)?, at(e - h)?, at(e - 2.0 * h)?);
    Ok((-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h))
}

/// `∂E arg T`, by fourth-order differences of the unwrapped phase.
pub fn transmission_delay(pot: &Potential1D, kin: &Kinematics) -> Result<f64> {
    let c = transfer_coefficients(pot, kin)?;
    let magnitude = c.t.norm();
    if magnitude < TRANSMISSION_NODE {
        return Err(Error::TransmissionNode { magnitude });
    }
    phase_derivative(pot, kin, |c| c.t.arg())
}

/// Reflection delay for a detector at distance `D` to the left of the
/// origin: `(m/k) 2D + ∂E arg R`.
pub fn reflection_delay(pot: &Potential1D, kin: &Kinematics, distance: f64) -> Result<f64> {
    let c = transfer_coefficients(pot, kin)?;
    if c.r.norm() < TRANSMISSION_NODE {
        return Err(Error::TransmissionNode {
            magnitude: c.r.norm(),
        });
    }
    Ok(kin.dk_de() * 2.0 * distance + phase_derivative(pot, kin, |c| c.r.arg())?)
}

/// Total-reflection delay at a semi-infinite step, `0 < E < V0`.
pub fn reflection_delay_semiinfinite_step(v0: f64, kin: &Kinematics, distance: f64) -> Result<f64> {
    if kin.energy() >= v0 {
        return domain(format!(
            "total reflection needs E < V0, got E = {} and V0 = {v0}",
            kin.energy()
        ));
    }
    reflection_delay(&Potential1D::step(v0)?, kin, distance)
}

/// Closed-form excess reflection delay `(m/k)(2/κ)` at a step, with
/// `κ = √(2m(V0 - E))`: twice the penetration depth `1/κ` over the velocity.
pub fn step_reflection_excess(v0: f64, kin: &Kinematics) -> Result<f64> {
    let gap = v0 - kin.energy();
    if !(gap > 0.0) {
        return domain(format!("total reflection needs E < V0, got gap {gap}"));
    }
    let kappa = (2.0 * kin.mass() * gap).sqrt();
    Ok(kin.dk_de() * 2.0 / kappa)
}

/// `∂E arg T` for a point barrier `α δ(x)`, where `T = 1 / (1 + i mα/k)`.
pub fn point_barrier_delay(alpha: f64, kin: &Kinematics) -> f64 {
    let k = kin.k();
    let c = kin.mass() * alpha;
    kin.dk_de() * c / (k * k + c * c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn kin_e(e: f64) -> Kinematics {
        Kinematics::from_energy(1.0, e).unwrap()
    }

    fn random_potential(rng: &mut ChaCha8Rng) -> Potential1D {
        let n = rng.gen_range(1..=8);
        let mut x = rng.gen_range(-3.0..0.0);
        let mut breakpoints = vec![x];
        let mut values = Vec::new();
        for _ in 0..n {
            x += rng.gen_range(0.05..1.0);
            breakpoints.push(x);
            values.push(rng.gen_range(-2.0..3.0));
        }
        Potential1D::piecewise(breakpoints, values).unwrap()
    }

    #[test]
    fn free_space() {
        let pot = Potential1D::square_barrier(0.0, 1.0).unwrap();
        let c = transfer_coefficients(&pot, &kin_e(0.8)).unwrap();
        assert!((c.t - 1.0).norm() < 1e-14);
        assert!(c.r.norm() < 1e-14);
        assert!(transmission_delay(&pot, &kin_e(0.8)).unwrap().abs() < 1e-9);
    }

    #[test]
    fn square_barrier_closed_form() {
        let (v0, a) = (1.5, 1.3);
        let pot = Potential1D::square_barrier(v0, a).unwrap();
        for &e in &[1.6, 2.0, 3.7, 10.0] {
            let c = transfer_coefficients(&pot, &kin_e(e)).unwrap();
            let q = (2.0 * (e - v0)).sqrt();
            let want = 1.0 / (1.0 + v0 * v0 * (q * a).sin().powi(2) / (4.0 * e * (e - v0)));
            assert!((c.transmission_probability() - want).abs() < 1e-10);
        }
    }

    #[test]
    fn energy_at_level_uses_linear_solution() {
        let pot = Potential1D::square_barrier(1.0, 0.7).unwrap();
        let at = transfer_coefficients(&pot, &kin_e(1.0)).unwrap();
        let near = transfer_coefficients(&pot, &kin_e(1.0 + 1e-9)).unwrap();
        assert!((at.t - near.t).norm() < 1e-7);
        assert!((at.reflection_probability() + at.transmission_probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn step_is_totally_reflecting_below_height() {
        for &(v0, e) in &[(2.0, 1.0), (5.0, 1.0), (1.1, 1.0)] {
            let c = transfer_coefficients(&Potential1D::step(v0).unwrap(), &kin_e(e)).unwrap();
            assert!((c.r.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn step_reflection_delay_closed_form() {
        let k = kin_e(1.0);
        let d = 10.0;
        for &v0 in &[2.0, 5.0, 1.1] {
            let t = reflection_delay_semiinfinite_step(v0, &k, d).unwrap();
            let excess = t - 2.0 * d / k.k();
            let want = step_reflection_excess(v0, &k).unwrap();
            assert!(((excess - want) / want).abs() < 1e-8);
        }
        // k = q = √2: the excess is (1/√2)(2/√2) = 1, twice the
        // penetration depth 2/q = √2 over the velocity.
        let excess = step_reflection_excess(2.0, &k).unwrap();
        assert!((excess - 1.0).abs() < 1e-14);
        assert!(reflection_delay_semiinfinite_step(1.0, &k, 1.0).is_err());
    }

    #[test]
    fn step_transmission_above_height() {
        // T = 2k / (k + q) is real and positive, so arg T is constant.
        let k = kin_e(3.0);
        let pot = Potential1D::step(2.0).unwrap();
        let c = transfer_coefficients(&pot, &k).unwrap();
        let q = 2f64.sqrt();
        assert!((c.t - 2.0 * k.k() / (k.k() + q)).norm() < 1e-13);
        assert!(transmission_delay(&pot, &k).unwrap().abs() < 1e-9);
    }

    #[test]
    fn thin_barrier_approaches_point_limit() {
        let alpha = 0.8;
        let a = 1e-5;
        let pot = Potential1D::square_barrier(alpha / a, a).unwrap();
        let k = kin_e(0.7);
        let t = transmission_delay(&pot, &k).unwrap();
        let want = point_barrier_delay(alpha, &k);
        assert!(t.is_finite());
        assert!(((t - want) / want).abs() < 1e-3, "{t} vs {want}");
    }

    #[test]
    fn thick_opaque_barrier_advances_phase() {
        let pot = Potential1D::square_barrier(5.0, 3.0).unwrap();
        let t = transmission_delay(&pot, &kin_e(1.0)).unwrap();
        assert!(t < 0.0);
    }

    #[test]
    fn segment_splitting_is_invisible() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let pot = random_potential(&mut rng);
            let Potential1D::PiecewiseConstant { breakpoints, values } = pot.clone() else {
                unreachable!()
            };
            let i = rng.gen_range(0..values.len());
            let cut = breakpoints[i] + rng.gen_range(0.1..0.9) * (breakpoints[i + 1] - breakpoints[i]);
            let mut b2 = breakpoints.clone();
            b2.insert(i + 1, cut);
            let mut v2 = values.clone();
            v2.insert(i, values[i]);
            let split = Potential1D::piecewise(b2, v2).unwrap();
            let k = kin_e(rng.gen_range(3.1..6.0));
            let a = transfer_coefficients(&pot, &k).unwrap();
            let b = transfer_coefficients(&split, &k).unwrap();
            assert!((a.r - b.r).norm() < 1e-12);
            assert!((a.t - b.t).norm() < 1e-12);
        }
    }

    #[test]
    fn unitarity_random_potentials() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let pot = random_potential(&mut rng);
            let e = rng.gen_range(0.05..6.0);
            let c = transfer_coefficients(&pot, &kin_e(e)).unwrap();
            let s = c.reflection_probability() + c.transmission_probability();
            assert!((s - 1.0).abs() < 1e-10, "{s}");
        }
    }

    #[test]
    fn invalid_potentials() {
        assert!(Potential1D::step(0.0).is_err());
        assert!(Potential1D::piecewise(vec![0.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(Potential1D::piecewise(vec![1.0, 0.0], vec![1.0]).is_err());
        assert!(Potential1D::square_barrier(1.0, 0.0).is_err());
    }
}
