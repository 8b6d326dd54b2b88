//! The orbit solver and the integrator describe the same steady rotation.

use pilotwave::integrator::Integrator;
use pilotwave::orbit::{orbit_integrals, orbital_past, solve_orbit, OrbitScan};
use pilotwave::{simulate, Model64, SimConfig64};

#[test]
fn memory_force_on_the_orbit_matches_the_quadrature() {
    let model = Model64::reference();
    let orbit = solve_orbit(&model, &OrbitScan::default()).unwrap()[0];
    let ((is, ic), _) = orbit_integrals(orbit.r0, orbit.omega, &model).unwrap();

    // at x(0) = (r0, 0) the balance equations say the memory force is (I_s, I_c)
    for dt in [1.0 / 64.0, 1.0 / 128.0] {
        let cfg = SimConfig64::new(model.clone(), dt, 1.0).with_past(orbit.past());
        let m = Integrator::new(&cfg).unwrap().memory_force().unwrap();
        let err = ((m.x - is).powi(2) + (m.y - ic).powi(2)).sqrt();
        // trapezoid error O(dt^2) plus the e^-19 window tail
        assert!(err < 40.0 * dt * dt, "dt = {dt}: ({}, {}) vs ({is}, {ic})", m.x, m.y);
    }
}

/// Radius and angular speed averaged over the last 10 time units of a
/// noiseless run started on the orbit.
fn settled(dt: f64) -> (f64, f64, f64) {
    let model = Model64::reference().with_sigma(0.0);
    let orbit = solve_orbit(&model, &OrbitScan::default()).unwrap()[0];
    let cfg = SimConfig64::new(model, dt, 40.0);
    let past = orbital_past(&orbit, cfg.horizon, cfg.dt, cfg.horizon).unwrap();
    let traj = simulate(&cfg.with_past(past)).unwrap();
    let tail = traj.times.partition_point(|&t| t < 30.0);
    let n = (traj.len() - tail) as f64;
    let radius = traj.positions[tail..].iter().map(|x| x.norm()).sum::<f64>() / n;
    let spin = traj.positions[tail..]
        .iter()
        .zip(&traj.velocities[tail..])
        .map(|(x, v)| (x.x * v.y - x.y * v.x) / x.norm_sq())
        .sum::<f64>()
        / n;
    (radius, spin, orbit.r0)
}

#[test]
fn noiseless_walker_settles_on_the_orbit_to_first_order() {
    let (r_coarse, w_coarse, r0) = settled(1.0 / 128.0);
    let (r_fine, w_fine, _) = settled(1.0 / 256.0);
    let (e_coarse, e_fine) = (r_coarse - r0, r_fine - r0);
    assert!(e_coarse.abs() < 5e-3, "{r_coarse} vs {r0}");
    assert!((e_coarse / e_fine - 2.0).abs() < 0.3, "offsets {e_coarse}, {e_fine}");
    let omega = 0.821_156_19;
    assert!((w_coarse / omega - 1.0).abs() < 0.02 && (w_fine / omega - 1.0).abs() < 0.01, "{w_coarse} {w_fine}");
}
