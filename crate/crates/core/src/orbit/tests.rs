use super::*;
use crate::model::{bessel_j1, ModelParams};
use crate::Vector;

/// Independent check: plain trapezoid on `[0, 40]`, step `1e-4`.
fn trapezoid_integrals(r0: f64, omega: f64) -> (f64, f64) {
    let h = 1e-4;
    let n = 400_000;
    let (mut s, mut c) = (0.0, 0.0);
    for i in 0..=n {
        let z = i as f64 * h;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        let (sin, cos) = (0.5 * omega * z).sin_cos();
        let j = bessel_j1(4.0 * std::f64::consts::PI * r0 * sin).unwrap() * (-z).exp();
        s += w * j * sin;
        c += w * j * cos;
    }
    (s * h, c * h)
}

#[test]
fn origin_is_a_trivial_root() {
    let model = Model::<f64>::reference();
    for omega in [0.1, 1.0, 2.5] {
        assert_eq!(orbit_residual(0.0, omega, &model).unwrap(), (0.0, 0.0));
    }
}

#[test]
fn without_memory_the_equations_are_contradictory() {
    let model = Model::<f64>::reference().with_alpha(0.0);
    let w = (0.35f64 / 0.42).sqrt();
    let (f1, f2) = orbit_residual(1.0, w, &model).unwrap();
    assert!(f1.abs() < 1e-15);
    assert!((f2 - w).abs() < 1e-15);
    assert!(solve_orbit(&model, &OrbitScan::default()).unwrap().is_empty());
}

#[test]
fn reference_parameters_have_one_orbit() {
    let model = Model::<f64>::reference();
    let found = solve_orbit(&model, &OrbitScan::default()).unwrap();
    assert_eq!(found.len(), 1, "{found:?}");
    let orbit = found[0];
    assert!(orbit.residual_norm < RESIDUAL_TOL);
    assert!((orbit.r0 - 0.920_391_86).abs() < 1e-6, "{orbit:?}");
    assert!((orbit.omega - 0.821_156_19).abs() < 1e-6, "{orbit:?}");

    let (f1, f2) = orbit_residual(orbit.r0, orbit.omega, &model).unwrap();
    assert!(f1.abs().max(f2.abs()) < 1e-10);

    let (ts, tc) = trapezoid_integrals(orbit.r0, orbit.omega);
    let kappa = 0.42;
    let alpha = 4.47;
    let f1_trap = kappa * orbit.r0 * orbit.omega.powi(2) - 0.35 * orbit.r0 + alpha * ts;
    let f2_trap = orbit.r0 * orbit.omega - alpha * tc;
    assert!(f1_trap.abs() < 1e-8 && f2_trap.abs() < 1e-8, "{f1_trap} {f2_trap}");
}

#[test]
fn quadratures_agree_away_from_the_root() {
    let model = Model::<f64>::reference();
    for (r0, omega) in [(0.3, 0.4), (0.92, 0.82), (1.2, 0.6), (2.9, 0.06), (0.05, 2.8)] {
        let ((s, c), nodes) = orbit_integrals(r0, omega, &model).unwrap();
        let (ts, tc) = trapezoid_integrals(r0, omega);
        assert!((s - ts).abs() < 1e-8 && (c - tc).abs() < 1e-8, "({r0},{omega}) with {nodes} nodes");
    }
}

#[test]
fn fast_oscillation_exhausts_the_rules() {
    let model = Model::<f64>::reference();
    let err = orbit_integrals(1.7, 2.2, &model).unwrap_err();
    assert!(matches!(err, Error::NoConvergence(_)));
    assert!(err.is_numerical());
}

#[test]
fn line_model_has_no_circles() {
    let model = Model::<f64>::new(ModelParams {
        dim: Dim::One,
        ..ModelParams::reference()
    })
    .unwrap();
    assert!(matches!(orbit_residual(1.0, 1.0, &model), Err(Error::Precondition(_))));
}

#[test]
fn bad_scans_are_rejected() {
    let model = Model::<f64>::reference();
    let scan = OrbitScan { r_min: 0.0, ..OrbitScan::default() };
    assert!(matches!(solve_orbit(&model, &scan), Err(Error::InvalidConfig { .. })));
    assert!(orbit_residual(f64::NAN, 1.0, &model).is_err());
}

#[test]
fn orbital_past_samples_the_circle() {
    let sol: OrbitSolution<f64> = OrbitSolution {
        r0: 0.92,
        omega: 0.82,
        residual_norm: 0.0,
        quadrature_nodes: 64,
    };
    let dt = 1.0 / 64.0;
    let past = orbital_past(&sol, 19.0, dt, 19.0).unwrap();
    assert_eq!(past.anchor(), (Vector::new(0.92, 0.0), Vector::new(0.0, 0.92 * 0.82)));
    let InitialPast::Tabulated(tab) = &past else { panic!("tabulated expected") };
    assert_eq!(tab.times().len(), 19 * 64 + 1);
    for (x, v) in tab.positions().iter().zip(tab.velocities()) {
        assert!((x.norm() - 0.92).abs() < 1e-14);
        assert!((v.norm() - 0.92 * 0.82).abs() < 1e-14);
    }
    let period = 2.0 * std::f64::consts::PI / 0.82;
    let (x_then, _) = past.value_at(-period).unwrap();
    // linear interpolation between samples
    assert!((x_then - Vector::new(0.92, 0.0)).norm() < 1e-4);

    assert!(matches!(orbital_past(&sol, 10.0, dt, 19.0), Err(Error::Precondition(_))));
}
