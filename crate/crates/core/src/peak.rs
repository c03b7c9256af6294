//! Peak location and width extraction on sampled profiles.

use crate::error::{Error, Result};
use crate::partialwave::DelayProfile;

/// Which delay-profile column to analyse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeakColumn {
    TimeDelay,
    SpaceShift,
}

impl PeakColumn {
    /// Time-delay peaks point downward, space-shift peaks upward.
    pub fn polarity(self) -> Polarity {
        match self {
            PeakColumn::TimeDelay => Polarity::Minimum,
            PeakColumn::SpaceShift => Polarity::Maximum,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Maximum,
    Minimum,
}

impl Polarity {
    fn sign(self) -> f64 {
        match self {
            Polarity::Maximum => 1.0,
            Polarity::Minimum => -1.0,
        }
    }
}

/// A located extremum.
///
/// `half_width` is the full width at the level halfway between `baseline`
/// (the mean of the adjacent local minima of the peak) and `height`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub theta: f64,
    pub height: f64,
    pub half_width: f64,
    pub baseline: f64,
}

/// Most pronounced interior extremum of `ys` with abscissa in `(lo, hi]`.
///
/// Non-finite samples act as barriers: an extremum needs finite neighbours,
/// and the baseline/width search stops at them.
pub fn locate_peak(xs: &[f64], ys: &[f64], window: (f64, f64), polarity: Polarity) -> Result<Peak> {
    assert_eq!(xs.len(), ys.len(), "abscissae and ordinates differ in length");
    let (lo, hi) = window;
    let no_peak = Error::NoPeak { lo, hi };
    let s = polarity.sign();
    // Work on the flipped profile so that the peak is always a maximum.
    let f: Vec<f64> = ys.iter().map(|&y| s * y).collect();

    let mut best: Option<usize> = None;
    for i in 1..xs.len().saturating_sub(1) {
        if !(xs[i] > lo && xs[i] <= hi) {
            continue;
        }
        let (a, b, c) = (f[i - 1], f[i], f[i + 1]);
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            continue;
        }
        let is_extremum = b >= a && b >= c && (b > a || b > c);
        if is_extremum && best.map_or(true, |j| b > f[j]) {
            best = Some(i);
        }
    }
    let i = best.ok_or(no_peak)?;

    let (x_star, f_star) = parabolic_vertex(
        (xs[i - 1], f[i - 1]),
        (xs[i], f[i]),
        (xs[i + 1], f[i + 1]),
    );

    let left_min = walk_downhill(&f, i, -1);
    let right_min = walk_downhill(&f, i, 1);
    let base = 0.5 * (f[left_min] + f[right_min]);
    let level = base + 0.5 * (f_star - base);

    let left = crossing(xs, &f, i, left_min, level);
    let right = crossing(xs, &f, i, right_min, level);

    Ok(Peak {
        theta: x_star,
        height: s * f_star,
        half_width: right - left,
        baseline: s * base,
    })
}

/// Peak of a delay-profile column within `window`. Time delays are searched
/// for minima, space shifts for maxima.
pub fn find_peak(profile: &DelayProfile, column: PeakColumn, window: (f64, f64)) -> Result<Peak> {
    let xs = profile.thetas();
    let ys: Vec<f64> = profile
        .rows
        .iter()
        .map(|r| {
            match column {
                PeakColumn::TimeDelay => r.t_delay,
                PeakColumn::SpaceShift => r.b,
            }
            .unwrap_or(f64::NAN)
        })
        .collect();
    locate_peak(&xs, &ys, window, column.polarity())
}

/// Vertex of the parabola through three points; falls back to the middle
/// point when the points are collinear.
fn parabolic_vertex(p0: (f64, f64), p1: (f64, f64), p2: (f64, f64)) -> (f64, f64) {
    let (x0, y0) = p0;
    let (x1, y1) = p1;
    let (x2, y2) = p2;
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curvature = (d12 - d01) / (x2 - x0);
    if curvature >= 0.0 || !curvature.is_finite() {
        return p1;
    }
    // y = y1 + slope (x - x1) + curvature (x - x1)^2 with slope at x1.
    let slope = d01 + curvature * (x1 - x0);
    let dx = (-slope / (2.0 * curvature)).clamp(x0 - x1, x2 - x1);
    (x1 + dx, y1 + slope * dx + curvature * dx * dx)
}

/// Index of the local minimum reached by walking downhill from `start` in
/// direction `dir`, stopping at non-finite samples or the profile edge.
fn walk_downhill(f: &[f64], start: usize, dir: isize) -> usize {
    let mut i = start;
    loop {
        let next = i as isize + dir;
        if next < 0 || next as usize >= f.len() {
            return i;
        }
        let n = next as usize;
        if !f[n].is_finite() || f[n] > f[i] {
            return i;
        }
        i = n;
    }
}

/// Abscissa where the profile falls through `level` between the peak index
/// and `stop`, linearly interpolated. Returns the abscissa of `stop` if the
/// level is never reached.
fn crossing(xs: &[f64], f: &[f64], peak: usize, stop: usize, level: f64) -> f64 {
    let dir: isize = if stop < peak { -1 } else { 1 };
    let mut i = peak;
    while i != stop {
        let n = (i as isize + dir) as usize;
        if f[n] <= level {
            let t = (f[i] - level) / (f[i] - f[n]);
            return xs[i] + t * (xs[n] - xs[i]);
        }
        i = n;
    }
    xs[stop]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn monotone_profile_has_no_peak() {
        let xs = grid(100, 0.0, 1.0);
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        assert!(matches!(
            locate_peak(&xs, &ys, (0.0, 1.0), Polarity::Maximum),
            Err(Error::NoPeak { .. })
        ));
    }

    #[test]
    fn gaussian_width_on_zero_baseline() {
        let xs = grid(2001, -1.0, 1.0);
        let sigma: f64 = 0.05;
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| 3.0 * (-(x - 0.1234).powi(2) / (2.0 * sigma * sigma)).exp())
            .collect();
        let p = locate_peak(&xs, &ys, (-1.0, 1.0), Polarity::Maximum).unwrap();
        let fwhm = 2.0 * (2.0 * 2f64.ln()).sqrt() * sigma;
        assert!((p.theta - 0.1234).abs() < 1e-5);
        assert!((p.height - 3.0).abs() < 1e-5);
        assert!(p.baseline.abs() < 1e-12);
        assert!((p.half_width - fwhm).abs() < 1e-4);
    }

    #[test]
    fn minimum_polarity_reports_signed_height() {
        let xs = grid(501, 0.0, 1.0);
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 - 4.0 * (x - 0.5f64).powi(2)).map(|y| -y).collect();
        let p = locate_peak(&xs, &ys, (0.0, 1.0), Polarity::Minimum).unwrap();
        assert!((p.theta - 0.5).abs() < 1e-12);
        assert!((p.height + 1.0).abs() < 1e-12);
    }

    #[test]
    fn baseline_is_mean_of_adjacent_minima() {
        // Peak of height 3 between minima at 1 and 0.
        let xs: Vec<f64> = (0..7).map(f64::from).collect();
        let ys = [2.0, 1.0, 2.0, 3.0, 2.0, 0.0, 1.0];
        let p = locate_peak(&xs, &ys, (0.0, 6.0), Polarity::Maximum).unwrap();
        assert_eq!(p.baseline, 0.5);
        assert_eq!(p.theta, 3.0);
        // Half level 1.75: crossings at 1.75 and 4.125.
        assert!((p.half_width - (4.125 - 1.75)).abs() < 1e-12);
    }

    #[test]
    fn window_selects_peak() {
        let xs = grid(1001, 0.0, 10.0);
        let ys: Vec<f64> = xs.iter().map(|x| x.sin() * (1.0 + 0.1 * x)).collect();
        let p = locate_peak(&xs, &ys, (5.0, 10.0), Polarity::Maximum).unwrap();
        assert!((p.theta - 7.85).abs() < 0.1);
        assert!(locate_peak(&xs, &ys, (2.0, 4.0), Polarity::Maximum).is_err());
    }

    #[test]
    fn nan_samples_block_extremum() {
        let xs: Vec<f64> = (0..5).map(f64::from).collect();
        let ys = [0.0, f64::NAN, 5.0, f64::NAN, 0.0];
        assert!(locate_peak(&xs, &ys, (0.0, 4.0), Polarity::Maximum).is_err());
    }
}
