//! Subcommand implementations.

use std::f64::consts::PI;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Subcommand};
use scattime::arrival::{
    delay_between_dynamics, kijowski_density, occurrence_mean_with_kernel, FreeFlight,
    SpectralPacket, Transmission,
};
use scattime::hardsphere::suggested_ellmax;
use scattime::onedim::{
    point_barrier_delay, reflection_delay_semiinfinite_step, step_reflection_excess,
    transfer_coefficients, transmission_delay, Potential1D,
};
use scattime::partialwave::{delay_profile_scan, energy_scan, theta_grid};
use scattime::wkb::{find_branches, wkb_at, HardCore};
use scattime::{
    locate_peak, HardSphere, Kinematics, PeakColumn, PhaseShiftModel, Polarity, UnitSystem,
    VERSION,
};

use crate::output::CsvWriter;
use crate::Usage;

fn positive(s: &str) -> std::result::Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("must be a positive number, got {s}"))
    }
}

fn non_negative(s: &str) -> std::result::Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("must be a non-negative number, got {s}"))
    }
}

fn angle(s: &str) -> std::result::Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x <= PI {
        Ok(x)
    } else {
        Err(format!("angle must lie in (0, π], got {s}"))
    }
}

/// Mass, radius and output path shared by the hard-sphere commands.
#[derive(Debug, Args)]
pub struct Common {
    /// Particle mass.
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub mass: f64,
    /// Sphere radius R.
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub radius: f64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Common {
    fn units(&self) -> UnitSystem {
        UnitSystem {
            mass_unit: self.mass,
            length_unit: self.radius,
        }
    }

    fn kinematics(&self, kr: f64) -> Result<Kinematics> {
        Ok(Kinematics::new(self.mass, kr / self.radius)?)
    }

    fn time_unit(&self) -> f64 {
        self.units().time_unit()
    }
}

fn open(out: &Option<PathBuf>, command: &str, params: &str, units: &str) -> Result<CsvWriter> {
    let mut w = CsvWriter::open(out.as_deref())
        .with_context(|| format!("cannot open output {:?}", out.as_deref().unwrap_or("-".as_ref())))?;
    w.comment(&format!("scattime {VERSION} {command}"))?;
    w.comment(&format!("parameters: {params}"))?;
    w.comment(&format!("units: {units}"))?;
    Ok(w)
}

#[derive(Debug, Args)]
pub struct PhaseShiftsArgs {
    #[arg(long = "kR", value_parser = positive, allow_negative_numbers = true)]
    pub kr: f64,
    /// Highest partial wave; defaults to the model's cutoff.
    #[arg(long)]
    pub ellmax: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

pub fn phase_shifts(a: &PhaseShiftsArgs) -> Result<()> {
    let sphere = HardSphere::new(a.common.radius)?;
    let kin = a.common.kinematics(a.kr)?;
    let ellmax = a.ellmax.unwrap_or_else(|| suggested_ellmax(a.common.radius, &kin));
    let table = sphere.table(&kin, ellmax);
    let mut w = open(
        &a.common.out,
        "phase-shifts",
        &format!("kR={}, mass={}, radius={}, ellmax={ellmax}", a.kr, a.common.mass, a.common.radius),
        &format!("{}; ddelta_dE in m R^2", a.common.units().describe()),
    )?;
    w.header(&["ell", "delta_rad", "ddelta_dE"])?;
    let tu = a.common.time_unit();
    for (l, (&d, &dd)) in table.delta().iter().zip(table.ddelta_de()).enumerate() {
        w.row(&[l.into(), d.into(), (dd / tu).into()])?;
    }
    Ok(w.finish()?)
}

#[derive(Debug, Args)]
pub struct DelayScanArgs {
    #[arg(long = "kR", value_parser = positive, allow_negative_numbers = true)]
    pub kr: f64,
    #[arg(long, default_value_t = 0.01, value_parser = angle)]
    pub theta_min: f64,
    #[arg(long, default_value_t = PI, value_parser = angle)]
    pub theta_max: f64,
    #[arg(long, default_value_t = 2000)]
    pub points: usize,
    #[arg(long)]
    pub ellmax: Option<usize>,
    /// Report time-delay and space-shift peaks with θ in (LO, HI].
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub peak_window: Option<Vec<f64>>,
    #[command(flatten)]
    pub common: Common,
}

pub fn delay_scan(a: &DelayScanArgs) -> Result<()> {
    if a.theta_min >= a.theta_max {
        return Err(Usage(format!(
            "--theta-min ({}) must be below --theta-max ({})",
            a.theta_min, a.theta_max
        ))
        .into());
    }
    let sphere = HardSphere::new(a.common.radius)?;
    let kin = a.common.kinematics(a.kr)?;
    let ellmax = a.ellmax.unwrap_or_else(|| suggested_ellmax(a.common.radius, &kin));
    let grid = theta_grid(a.theta_min, a.theta_max, a.points)?;
    let profile = delay_profile_scan(&sphere, &kin, &grid, ellmax)?;

    let (m, r, k) = (a.common.mass, a.common.radius, kin.k());
    let t_scale = k / (m * r);
    let mut w = open(
        &a.common.out,
        "delay-scan",
        &format!(
            "kR={}, theta=[{}, {}], points={}, ellmax={ellmax}, mass={m}, radius={r}",
            a.kr, a.theta_min, a.theta_max, a.points
        ),
        &format!(
            "{}; t_delay_k = k t / (m R), b_over_R = b / R, dsdo_over_R2 = (dσ/dΩ) / R^2",
            a.common.units().describe()
        ),
    )?;
    if let Some(win) = &a.peak_window {
        let window = (win[0], win[1]);
        let xs = profile.thetas();
        for (column, name, scale) in [
            (PeakColumn::TimeDelay, "t_delay_k", t_scale),
            (PeakColumn::SpaceShift, "b_over_R", 1.0 / r),
        ] {
            let ys: Vec<f64> = profile
                .rows
                .iter()
                .map(|row| match column {
                    PeakColumn::TimeDelay => row.t_delay,
                    PeakColumn::SpaceShift => row.b,
                })
                .map(|v| v.map_or(f64::NAN, |v| v * scale))
                .collect();
            let line = match locate_peak(&xs, &ys, window, column.polarity()) {
                Ok(p) => format!(
                    "peak {name}: theta={}, height={}, half_width={}, baseline={}",
                    p.theta, p.height, p.half_width, p.baseline
                ),
                Err(e) => format!("peak {name}: {e}"),
            };
            w.comment(&line)?;
        }
    }
    w.header(&["theta_rad", "t_delay_k", "b_over_R", "dsdo_over_R2", "t_class_k", "b_class_over_R"])?;
    for row in &profile.rows {
        w.row(&[
            row.theta.into(),
            row.t_delay.map(|t| t * t_scale).into(),
            row.b.map(|b| b / r).into(),
            (row.dsigma_domega / (r * r)).into(),
            row.t_class.map(|t| t * t_scale).into(),
            row.b_class.map(|b| b / r).into(),
        ])?;
    }
    Ok(w.finish()?)
}

#[derive(Debug, Args)]
pub struct EnergyScanArgs {
    #[arg(long, value_parser = angle)]
    pub theta: f64,
    #[arg(long = "kR-min", value_parser = positive, default_value_t = 10.0)]
    pub kr_min: f64,
    #[arg(long = "kR-max", value_parser = positive, default_value_t = 30.0)]
    pub kr_max: f64,
    #[arg(long, default_value_t = 4000)]
    pub points: usize,
    /// Report the time-delay minimum with E m R^2 in (LO, HI].
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub peak_window: Option<Vec<f64>>,
    #[command(flatten)]
    pub common: Common,
}

pub fn energy_scan_cmd(a: &EnergyScanArgs) -> Result<()> {
    if a.kr_min >= a.kr_max {
        return Err(Usage(format!(
            "empty range: --kR-min ({}) must be below --kR-max ({})",
            a.kr_min, a.kr_max
        ))
        .into());
    }
    if a.points < 2 {
        return Err(Usage("--points must be at least 2".into()).into());
    }
    let (m, r) = (a.common.mass, a.common.radius);
    let sphere = HardSphere::new(r)?;
    let n = a.points;
    let kr: Vec<f64> = (0..n)
        .map(|i| a.kr_min + (a.kr_max - a.kr_min) * i as f64 / (n - 1) as f64)
        .collect();
    let k_grid: Vec<f64> = kr.iter().map(|x| x / r).collect();
    let rows = energy_scan(&sphere, m, a.theta, &k_grid)?;

    let tu = a.common.time_unit();
    let e_mr2: Vec<f64> = rows.iter().map(|row| row.energy * tu).collect();
    let t_mr2: Vec<f64> = rows.iter().map(|row| row.t_delay.map_or(f64::NAN, |t| t / tu)).collect();

    let mut w = open(
        &a.common.out,
        "energy-scan",
        &format!(
            "theta={}, kR=[{}, {}], points={n}, mass={m}, radius={r}",
            a.theta, a.kr_min, a.kr_max
        ),
        &format!(
            "{}; E_mR2 = E m R^2, t_delay_mR2 = t / (m R^2), b_over_R = b / R",
            a.common.units().describe()
        ),
    )?;
    if let Some(win) = &a.peak_window {
        let line = match locate_peak(&e_mr2, &t_mr2, (win[0], win[1]), Polarity::Minimum) {
            Ok(p) => format!(
                "peak t_delay_mR2: E_mR2={}, height={}, half_width={}, baseline={}",
                p.theta, p.height, p.half_width, p.baseline
            ),
            Err(e) => format!("peak t_delay_mR2: {e}"),
        };
        w.comment(&line)?;
    }
    w.header(&["kR", "E_mR2", "t_delay_mR2", "b_over_R"])?;
    for (i, row) in rows.iter().enumerate() {
        w.row(&[kr[i].into(), e_mr2[i].into(), t_mr2[i].into(), row.b.map(|b| b / r).into()])?;
    }
    Ok(w.finish()?)
}

#[derive(Debug, Subcommand)]
pub enum OneDimMode {
    /// Total reflection at a semi-infinite step (E < V0).
    Step {
        #[arg(long = "V0", value_parser = positive)]
        v0: f64,
        #[arg(long = "E", value_parser = positive)]
        e: f64,
        /// Detector distance to the left of the step.
        #[arg(long = "D", value_parser = non_negative, default_value_t = 0.0)]
        d: f64,
    },
    /// Transmission through a square barrier on [0, width].
    Barrier {
        #[arg(long = "V0", allow_negative_numbers = true)]
        v0: f64,
        #[arg(long, value_parser = positive)]
        width: f64,
        #[arg(long = "E", value_parser = positive)]
        e: f64,
        /// Detector distance beyond the barrier.
        #[arg(long = "D", value_parser = non_negative, default_value_t = 0.0)]
        d: f64,
    },
    /// Transmission through a point barrier α δ(x).
    Point {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long = "E", value_parser = positive)]
        e: f64,
    },
}

#[derive(Debug, Args)]
pub struct OneDimArgs {
    #[command(subcommand)]
    pub mode: OneDimMode,
    #[arg(long, default_value_t = 1.0, value_parser = positive, global = true)]
    pub mass: f64,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

pub fn oned(a: &OneDimArgs) -> Result<()> {
    let m = a.mass;
    let units = format!("hbar = 1, m = {m}; energies, lengths and times in consistent units");
    match a.mode {
        OneDimMode::Step { v0, e, d } => {
            let kin = Kinematics::from_energy(m, e)?;
            let total = reflection_delay_semiinfinite_step(v0, &kin, d)?;
            let free = kin.dk_de() * 2.0 * d;
            let closed = step_reflection_excess(v0, &kin)?;
            let kappa = (2.0 * m * (v0 - e)).sqrt();
            let r = transfer_coefficients(&Potential1D::step(v0)?, &kin)?.r;
            let mut w = open(&a.out, "oned step", &format!("V0={v0}, E={e}, D={d}, mass={m}"), &units)?;
            w.comment("excess_delay = reflection_delay - 2 m D / k; twice_penetration_depth = 2 / kappa")?;
            w.header(&[
                "E",
                "V0",
                "D",
                "abs_R",
                "reflection_delay",
                "free_delay",
                "excess_delay",
                "excess_delay_closed_form",
                "twice_penetration_depth",
            ])?;
            w.row(&[
                e.into(),
                v0.into(),
                d.into(),
                r.norm().into(),
                total.into(),
                free.into(),
                (total - free).into(),
                closed.into(),
                (2.0 / kappa).into(),
            ])?;
            Ok(w.finish()?)
        }
        OneDimMode::Barrier { v0, width, e, d } => {
            let kin = Kinematics::from_energy(m, e)?;
            let pot = Potential1D::square_barrier(v0, width)?;
            let c = transfer_coefficients(&pot, &kin)?;
            let delay = transmission_delay(&pot, &kin)?;
            let free = kin.dk_de() * d;
            let mut w = open(
                &a.out,
                "oned barrier",
                &format!("V0={v0}, width={width}, E={e}, D={d}, mass={m}"),
                &units,
            )?;
            w.comment("transmission_delay = dE arg T; arrival_time = m D / k + transmission_delay")?;
            w.header(&["E", "V0", "width", "D", "abs_T2", "abs_R2", "transmission_delay", "free_time", "arrival_time"])?;
            w.row(&[
                e.into(),
                v0.into(),
                width.into(),
                d.into(),
                c.transmission_probability().into(),
                c.reflection_probability().into(),
                delay.into(),
                free.into(),
                (free + delay).into(),
            ])?;
            Ok(w.finish()?)
        }
        OneDimMode::Point { alpha, e } => {
            let kin = Kinematics::from_energy(m, e)?;
            let k = kin.k();
            let c = m * alpha;
            let mut w = open(&a.out, "oned point", &format!("alpha={alpha}, E={e}, mass={m}"), &units)?;
            w.header(&["E", "alpha", "abs_T2", "transmission_delay"])?;
            w.row(&[
                e.into(),
                alpha.into(),
                (k * k / (k * k + c * c)).into(),
                point_barrier_delay(alpha, &kin).into(),
            ])?;
            Ok(w.finish()?)
        }
    }
}

#[derive(Debug, Args)]
pub struct ArrivalArgs {
    /// Central energy of the Gaussian packet.
    #[arg(long = "E0", value_parser = positive)]
    pub e0: f64,
    /// Energy spread: standard deviation of |ψ(E)|².
    #[arg(long = "sigmaE", value_parser = positive)]
    pub sigma_e: f64,
    /// Detector distance.
    #[arg(long = "D", value_parser = non_negative)]
    pub d: f64,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub mass: f64,
    /// Energy quadrature points.
    #[arg(long, default_value_t = 4096)]
    pub points: usize,
    /// Time grid points.
    #[arg(long, default_value_t = 2001)]
    pub time_points: usize,
    /// Half-width of the time grid in standard deviations.
    #[arg(long, default_value_t = 8.0, value_parser = positive)]
    pub n_sigma: f64,
    /// Square barrier height; the packet is transmitted through it.
    #[arg(long = "V0", requires = "width", allow_negative_numbers = true)]
    pub v0: Option<f64>,
    #[arg(long, requires = "v0", value_parser = positive)]
    pub width: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn arrival(a: &ArrivalArgs) -> Result<()> {
    if a.time_points < 2 {
        return Err(Usage("--time-points must be at least 2".into()).into());
    }
    let m = a.mass;
    let packet = SpectralPacket::gaussian(a.e0, a.sigma_e, a.points)?;
    let free = FreeFlight {
        mass: m,
        distance: a.d,
    };
    let mut params = format!(
        "E0={}, sigmaE={}, D={}, mass={m}, points={}, time_points={}, n_sigma={}",
        a.e0,
        a.sigma_e,
        a.d,
        packet.energies().len(),
        a.time_points,
        a.n_sigma
    );
    let mut notes = Vec::new();
    let detected = match (a.v0, a.width) {
        (Some(v0), Some(width)) => {
            params.push_str(&format!(", V0={v0}, width={width}"));
            let pot = Potential1D::square_barrier(v0, width)?;
            let through = Transmission {
                potential: pot.clone(),
                mass: m,
                distance: a.d,
            };
            notes.push(format!(
                "kernel_delay (barrier vs free flight) = {}",
                delay_between_dynamics(&packet, &through, &free)?
            ));
            notes.push(format!("kernel_mean = {}", occurrence_mean_with_kernel(&packet, &through)?));
            let e = packet.energies().to_vec();
            let psi = packet
                .energies()
                .iter()
                .zip(packet.psi())
                .map(|(&en, &p)| {
                    let kin = Kinematics::from_energy(m, en)?;
                    Ok(p * transfer_coefficients(&pot, &kin)?.t)
                })
                .collect::<Result<Vec<_>>>()?;
            notes.push("density of the transmitted part, renormalized".into());
            SpectralPacket::new(e, psi)?.with_detector_distance(m, a.d)?
        }
        _ => {
            notes.push(format!("kernel_mean = {}", occurrence_mean_with_kernel(&packet, &free)?));
            packet.with_detector_distance(m, a.d)?
        }
    };
    let grid = detected.time_grid(a.n_sigma, a.time_points);
    let dist = kijowski_density(&detected, &grid)?;
    let (m1, m2) = detected.time_moments();

    let mut w = open(
        &a.out,
        "arrival",
        &params,
        &format!("hbar = 1, m = {m}; energies, lengths and times in consistent units"),
    )?;
    w.comment(&format!("mean = {}", dist.mean))?;
    w.comment(&format!("variance = {}", dist.variance))?;
    w.comment(&format!("total = {}", dist.total))?;
    w.comment(&format!("moment_mean = {}", m1))?;
    w.comment(&format!("moment_variance = {}", m2 - m1 * m1))?;
    for n in &notes {
        w.comment(n)?;
    }
    if !dist.covered {
        w.comment(&format!("warning: time grid captures only {} of the probability", dist.total))?;
    }
    w.header(&["t", "density"])?;
    for (&t, &p) in dist.t_grid.iter().zip(&dist.density) {
        w.row(&[t.into(), p.into()])?;
    }
    Ok(w.finish()?)
}

#[derive(Debug, Args)]
pub struct WkbArgs {
    #[arg(long = "kR", value_parser = positive, allow_negative_numbers = true)]
    pub kr: f64,
    #[arg(long, value_parser = angle)]
    pub theta: f64,
    #[command(flatten)]
    pub common: Common,
}

pub fn wkb(a: &WkbArgs) -> Result<()> {
    let (m, r) = (a.common.mass, a.common.radius);
    let kin = a.common.kinematics(a.kr)?;
    let core = HardCore { radius: r };
    let sphere = HardSphere::new(r)?;
    let ellmax = suggested_ellmax(r, &kin);
    let tu = a.common.time_unit();
    let table = sphere.table(&kin, ellmax);
    let exact = table.observables(a.theta, sphere.length_unit())?;
    let t_exact = exact.t_delay.ok().map(|t| t / tu);
    let b_exact = exact.b.ok().map(|b| b / r);
    let branches = find_branches(&core, &kin, a.theta)?;

    let mut w = open(
        &a.common.out,
        "wkb",
        &format!("kR={}, theta={}, mass={m}, radius={r}, ellmax={ellmax}", a.kr, a.theta),
        &format!(
            "{}; t in m R^2, b in R, angles and phases in rad",
            a.common.units().describe()
        ),
    )?;
    w.comment(&format!("branches = {}", branches.len()))?;
    if branches.len() > 1 {
        w.comment("several classical branches contribute; stationary-phase values are per branch")?;
    }
    let mut rows = Vec::with_capacity(branches.len());
    for br in &branches {
        let res = wkb_at(&core, &kin, br.j)?;
        let t = 2.0 * res.ddelta_de / tu;
        let b = f64::from(br.sign) * br.j / kin.k() / r;
        rows.push((br, res, t, b));
    }
    if let ([(_, _, t, _)], Some(te)) = (rows.as_slice(), t_exact) {
        w.comment(&format!("relative_difference_t = {}", (t - te).abs() / te.abs()))?;
    }
    w.header(&[
        "j_star",
        "deflection_rad",
        "sign",
        "winding",
        "delta_wkb_rad",
        "t_semiclassical_mR2",
        "b_semiclassical_over_R",
        "t_exact_mR2",
        "b_exact_over_R",
    ])?;
    for (br, res, t, b) in rows {
        w.row(&[
            br.j.into(),
            br.deflection.into(),
            i64::from(br.sign).into(),
            i64::from(br.winding).into(),
            res.delta_wkb.into(),
            t.into(),
            b.into(),
            t_exact.into(),
            b_exact.into(),
        ])?;
    }
    Ok(w.finish()?)
}
