use scattime::arrival::{delay_between_dynamics, FreeFlight, SpectralPacket, Transmission};
use scattime::hardsphere::{classical_delay, classical_space_shift, suggested_ellmax};
use scattime::onedim::{transmission_delay, Potential1D};
use scattime::partialwave::{
    angular_time_delay, delay_profile_scan, energy_scan, relative_delay, space_shift, theta_grid,
};
use scattime::wkb::{semiclassical_delay, semiclassical_space_shift, HardCore};
use scattime::{find_peak, HardSphere, Kinematics, PeakColumn};

#[test]
fn energy_and_angle_scans_agree() {
    let sphere = HardSphere::new(1.0).unwrap();
    let theta = 0.8;
    let ks = [3.0, 7.5, 12.0];
    let rows = energy_scan(&sphere, 1.0, theta, &ks).unwrap();
    for (row, &k) in rows.iter().zip(&ks) {
        let kin = Kinematics::new(1.0, k).unwrap();
        let ellmax = suggested_ellmax(1.0, &kin);
        let t = angular_time_delay(&sphere, &kin, theta, ellmax).unwrap();
        let b = space_shift(&sphere, &kin, theta, ellmax).unwrap();
        assert_eq!(row.t_delay.unwrap(), t);
        assert_eq!(row.b.unwrap(), b);
        assert_eq!(row.energy, kin.energy());
    }
}

#[test]
fn backward_hemisphere_approaches_classical_at_large_kr() {
    let sphere = HardSphere::new(1.0).unwrap();
    let kin = Kinematics::new(1.0, 50.0).unwrap();
    let grid = theta_grid(1.5, 3.0, 7).unwrap();
    let profile = delay_profile_scan(&sphere, &kin, &grid, suggested_ellmax(1.0, &kin)).unwrap();
    for row in &profile.rows {
        let t = row.t_delay.unwrap();
        let tc = classical_delay(1.0, &kin, row.theta);
        assert!((t - tc).abs() < 0.01 * tc.abs(), "θ = {}: {t} vs {tc}", row.theta);
        let b = row.b.unwrap();
        assert!((b - classical_space_shift(1.0, row.theta)).abs() < 0.01);
    }
}

#[test]
fn stationary_phase_tracks_partial_waves() {
    let sphere = HardSphere::new(1.0).unwrap();
    let core = HardCore { radius: 1.0 };
    let kin = Kinematics::new(1.0, 50.0).unwrap();
    let ellmax = suggested_ellmax(1.0, &kin);
    for theta in [1.0, 2.0, 2.8] {
        let t = angular_time_delay(&sphere, &kin, theta, ellmax).unwrap();
        let ts = semiclassical_delay(&core, &kin, theta).unwrap();
        assert!((t - ts).abs() < 0.05 * t.abs(), "θ = {theta}: {t} vs {ts}");
        let b = space_shift(&sphere, &kin, theta, ellmax).unwrap();
        let bs = semiclassical_space_shift(&core, &kin, theta).unwrap();
        assert!((b - bs).abs() < 0.05, "θ = {theta}: {b} vs {bs}");
    }
}

#[test]
fn relative_delay_is_antisymmetric() {
    let sphere = HardSphere::new(1.0).unwrap();
    let kin = Kinematics::new(1.0, 4.0).unwrap();
    let n = suggested_ellmax(1.0, &kin);
    let a = relative_delay(&sphere, &kin, 0.7, 2.1, n).unwrap();
    let b = relative_delay(&sphere, &kin, 2.1, 0.7, n).unwrap();
    assert_eq!(a, -b);
}

#[test]
fn peak_finder_on_scaled_radius() {
    // Observables scale as b ∝ R and θ-structure depends only on kR.
    let kr = 20.0;
    let grid = theta_grid(0.01, 0.5, 400).unwrap();
    let mut peaks = Vec::new();
    for r in [1.0, 2.5] {
        let sphere = HardSphere::new(r).unwrap();
        let kin = Kinematics::new(1.0, kr / r).unwrap();
        let profile = delay_profile_scan(&sphere, &kin, &grid, suggested_ellmax(r, &kin)).unwrap();
        peaks.push((r, find_peak(&profile, PeakColumn::SpaceShift, (0.0, 0.5)).unwrap()));
    }
    let (r0, p0) = peaks[0];
    let (r1, p1) = peaks[1];
    assert!((p0.theta - p1.theta).abs() < 1e-9);
    assert!((p0.height / r0 - p1.height / r1).abs() < 1e-9);
}

#[test]
fn kernel_delay_is_packet_average_of_transmission_delay() {
    let pot = Potential1D::square_barrier(0.3, 2.0).unwrap();
    let packet = SpectralPacket::gaussian(0.5, 0.02, 2048).unwrap();
    let with = Transmission {
        potential: pot.clone(),
        mass: 1.0,
        distance: 10.0,
    };
    let free = FreeFlight {
        mass: 1.0,
        distance: 10.0,
    };
    let kernel = delay_between_dynamics(&packet, &with, &free).unwrap();

    let e = packet.energies();
    let w: Vec<f64> = packet.psi().iter().map(|p| p.norm_sqr()).collect();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 1..e.len() {
        let h = e[i] - e[i - 1];
        let f = |j: usize| {
            let kin = Kinematics::from_energy(1.0, e[j]).unwrap();
            transmission_delay(&pot, &kin).unwrap() * w[j]
        };
        num += 0.5 * h * (f(i - 1) + f(i));
        den += 0.5 * h * (w[i - 1] + w[i]);
    }
    assert!((kernel - num / den).abs() < 1e-9 * kernel.abs());
}
