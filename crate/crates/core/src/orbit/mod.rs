//! Steady circular orbits `x(t) = r0 (cos wt, sin wt)` of the noiseless
//! planar model.
//!
//! On such an orbit the memory force is a pair of Laplace-type integrals
//! over the chord `2 r0 sin(wz/2)`; balancing it against drag, inertia and
//! the spring gives two equations in `(r0, w)`.

mod laguerre;

use rayon::prelude::*;

use crate::integrator::{Extension, InitialPast, TabulatedPast};
use crate::model::{bessel, Dim, Model};
use crate::{Error, Result, Scalar};

pub use laguerre::{cached_rule, LaguerreRule, MAX_NODES, MIN_NODES};

/// Successive quadrature refinements must agree this closely.
pub const QUADRATURE_TOL: f64 = 1e-12;
/// Largest residual `max(|F1|, |F2|)` accepted for a root.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Roots closer than this in both coordinates are the same orbit.
pub const DEDUP_TOL: f64 = 1e-6;
const FD_STEP: f64 = 1e-6;
const SCAN_NODES: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitSolution<T> {
    pub r0: T,
    /// Angular frequency; positive (counter-clockwise) by convention.
    pub omega: T,
    /// `max(|F1|, |F2|)` at the root.
    pub residual_norm: T,
    pub quadrature_nodes: usize,
}

impl<T: Scalar> OrbitSolution<T> {
    /// The orbit as an analytic past.
    pub fn past(&self) -> InitialPast<T> {
        InitialPast::Orbital {
            r0: self.r0,
            omega: self.omega,
        }
    }
}

/// Rectangular search region for roots and its sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitScan<T> {
    pub r_min: T,
    pub r_max: T,
    pub omega_min: T,
    pub omega_max: T,
    pub r_points: usize,
    pub omega_points: usize,
}

impl<T: Scalar> Default for OrbitScan<T> {
    fn default() -> Self {
        Self {
            r_min: T::lit(0.05),
            r_max: T::lit(3.0),
            omega_min: T::lit(0.05),
            omega_max: T::lit(3.0),
            r_points: 30,
            omega_points: 30,
        }
    }
}

impl<T: Scalar> OrbitScan<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > T::zero() && self.r_min < self.r_max && self.r_max.is_finite()) {
            return Err(Error::config("orbit.r_min", "need 0 < r_min < r_max < inf"));
        }
        if !(self.omega_min > T::zero() && self.omega_min < self.omega_max && self.omega_max.is_finite()) {
            return Err(Error::config("orbit.omega_min", "need 0 < omega_min < omega_max < inf"));
        }
        if self.r_points < 2 || self.omega_points < 2 {
            return Err(Error::config("orbit.r_points", "need at least 2 points per axis"));
        }
        Ok(())
    }
}

/// Model constants the orbit equations depend on, in `f64`.
#[derive(Debug, Clone, Copy)]
struct Coefficients {
    kappa: f64,
    alpha: f64,
    spring: f64,
    decay: f64,
    amplitude: f64,
}

impl Coefficients {
    fn of<T: Scalar>(model: &Model<T>) -> Result<Self> {
        model.validate()?;
        if model.params.dim != Dim::Two {
            return Err(Error::Precondition("circular orbits need the planar model".into()));
        }
        Ok(Self {
            kappa: model.params.kappa.as_f64(),
            alpha: model.params.alpha.as_f64(),
            spring: model.params.spring_k.as_f64(),
            decay: model.kernel.decay_rate().as_f64(),
            amplitude: model.kernel.amplitude().as_f64(),
        })
    }

    /// `(I_s, I_c)`: the kernel-weighted integrals of
    /// `J1(4 pi r0 sin(wz/2))` against `sin(wz/2)` and `cos(wz/2)`.
    fn integrals(&self, r0: f64, omega: f64, rule: &LaguerreRule) -> [f64; 2] {
        let four_pi_r = 4.0 * std::f64::consts::PI * r0;
        let half_rate = 0.5 * omega / self.decay;
        let [s, c] = rule.integrate(|u| {
            let (sin, cos) = (half_rate * u).sin_cos();
            let j = bessel::j1(four_pi_r * sin);
            [j * sin, j * cos]
        });
        let scale = self.amplitude / self.decay;
        [scale * s, scale * c]
    }

    fn converged_integrals(&self, r0: f64, omega: f64) -> Result<([f64; 2], usize)> {
        let mut n = MIN_NODES;
        let mut prev = self.integrals(r0, omega, cached_rule(n));
        while n < MAX_NODES {
            n *= 2;
            let next = self.integrals(r0, omega, cached_rule(n));
            let change = (next[0] - prev[0]).abs().max((next[1] - prev[1]).abs());
            if change < QUADRATURE_TOL {
                return Ok((next, n));
            }
            prev = next;
        }
        Err(Error::NoConvergence(format!(
            "orbit integrals at r0 = {r0}, omega = {omega} still moving after {MAX_NODES} Gauss-Laguerre nodes"
        )))
    }

    fn residual_from(&self, r0: f64, omega: f64, [is, ic]: [f64; 2]) -> [f64; 2] {
        [
            self.kappa * r0 * omega * omega - self.spring * r0 + self.alpha * is,
            r0 * omega - self.alpha * ic,
        ]
    }

    fn residual(&self, r0: f64, omega: f64) -> Result<([f64; 2], usize)> {
        let (integrals, nodes) = self.converged_integrals(r0, omega)?;
        Ok((self.residual_from(r0, omega, integrals), nodes))
    }

    fn coarse_residual(&self, r0: f64, omega: f64) -> [f64; 2] {
        self.residual_from(r0, omega, self.integrals(r0, omega, cached_rule(SCAN_NODES)))
    }
}

/// `(I_s, I_c)` for the given model, with the node count that met the
/// refinement tolerance.
pub fn orbit_integrals<T: Scalar>(r0: T, omega: T, model: &Model<T>) -> Result<((T, T), usize)> {
    let coef = Coefficients::of(model)?;
    check_finite(r0, omega)?;
    let ([s, c], n) = coef.converged_integrals(r0.as_f64(), omega.as_f64())?;
    Ok(((T::lit(s), T::lit(c)), n))
}

/// `(F1, F2)`: radial and tangential force balance on the circle.
pub fn orbit_residual<T: Scalar>(r0: T, omega: T, model: &Model<T>) -> Result<(T, T)> {
    let coef = Coefficients::of(model)?;
    check_finite(r0, omega)?;
    let ([f1, f2], _) = coef.residual(r0.as_f64(), omega.as_f64())?;
    Ok((T::lit(f1), T::lit(f2)))
}

fn check_finite<T: Scalar>(r0: T, omega: T) -> Result<()> {
    if r0.is_finite() && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("orbit residual at non-finite point ({r0}, {omega})")))
    }
}

fn max_abs([a, b]: [f64; 2]) -> f64 {
    a.abs().max(b.abs())
}

/// Damped Newton with a central-difference Jacobian. Returns the last
/// iterate, its residual and node count; fails only if the start point
/// itself cannot be evaluated.
fn newton(coef: &Coefficients, start: [f64; 2]) -> Result<([f64; 2], [f64; 2], usize)> {
    let mut p = start;
    let (mut f, mut nodes) = coef.residual(p[0], p[1])?;
    for _ in 0..60 {
        if max_abs(f) < 1e-14 {
            break;
        }
        let mut jac = [[0.0; 2]; 2];
        for j in 0..2 {
            let mut hi = p;
            let mut lo = p;
            hi[j] += FD_STEP;
            lo[j] -= FD_STEP;
            let (Ok((fh, _)), Ok((fl, _))) = (coef.residual(hi[0], hi[1]), coef.residual(lo[0], lo[1])) else {
                return Ok((p, f, nodes));
            };
            for i in 0..2 {
                jac[i][j] = (fh[i] - fl[i]) / (2.0 * FD_STEP);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let step = [
            -(jac[1][1] * f[0] - jac[0][1] * f[1]) / det,
            -(-jac[1][0] * f[0] + jac[0][0] * f[1]) / det,
        ];
        let mut damping = 1.0;
        let mut accepted = false;
        while damping > 1e-4 {
            let trial = [p[0] + damping * step[0], p[1] + damping * step[1]];
            // points where the quadrature cannot be certified count as rejected steps
            if let (true, Ok((ft, nt))) = (trial[0] > 0.0, coef.residual(trial[0], trial[1])) {
                if max_abs(ft) < max_abs(f) {
                    p = trial;
                    f = ft;
                    nodes = nt;
                    accepted = true;
                    break;
                }
            }
            damping *= 0.5;
        }
        let size = (damping * step[0]).abs().max((damping * step[1]).abs());
        if !accepted || size < 1e-15 * (1.0 + p[0].abs() + p[1].abs()) {
            break;
        }
    }
    Ok((p, f, nodes))
}

/// All circular orbits with `(r0, |w|)` inside `scan`, sorted by radius.
///
/// Candidates are scan cells whose corners show sign changes of both
/// residual components; each is refined by Newton from the cell centre.
/// An empty list means no orbit was found.
pub fn solve_orbit<T: Scalar>(model: &Model<T>, scan: &OrbitScan<T>) -> Result<Vec<OrbitSolution<T>>> {
    let coef = Coefficients::of(model)?;
    scan.validate()?;
    let axis = |lo: T, hi: T, n: usize| -> Vec<f64> {
        let (lo, hi) = (lo.as_f64(), hi.as_f64());
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    };
    let rs = axis(scan.r_min, scan.r_max, scan.r_points);
    let ws = axis(scan.omega_min, scan.omega_max, scan.omega_points);

    let grid: Vec<Vec<[f64; 2]>> = rs
        .par_iter()
        .map(|&r| ws.iter().map(|&w| coef.coarse_residual(r, w)).collect())
        .collect();

    let changes_sign = |k: usize, i: usize, j: usize| {
        let corners = [grid[i][j][k], grid[i + 1][j][k], grid[i][j + 1][k], grid[i + 1][j + 1][k]];
        let lo = corners.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = corners.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        lo <= 0.0 && hi >= 0.0
    };
    let mut starts = Vec::new();
    for i in 0..rs.len() - 1 {
        for j in 0..ws.len() - 1 {
            if changes_sign(0, i, j) && changes_sign(1, i, j) {
                starts.push([0.5 * (rs[i] + rs[i + 1]), 0.5 * (ws[j] + ws[j + 1])]);
            }
        }
    }

    let refined = starts
        .par_iter()
        .map(|&s| newton(&coef, s))
        .collect::<Result<Vec<_>>>()?;

    let inside = |v: f64, lo: T, hi: T| v >= lo.as_f64() * (1.0 - 1e-12) && v <= hi.as_f64() * (1.0 + 1e-12);
    let mut found: Vec<OrbitSolution<f64>> = Vec::new();
    for (p, f, nodes) in refined {
        let (r0, omega) = (p[0], p[1].abs());
        let residual = max_abs(f);
        if !(residual <= RESIDUAL_TOL)
            || !inside(r0, scan.r_min, scan.r_max)
            || !inside(omega, scan.omega_min, scan.omega_max)
        {
            continue;
        }
        let duplicate = found
            .iter()
            .any(|s| (s.r0 - r0).abs() < DEDUP_TOL && (s.omega - omega).abs() < DEDUP_TOL);
        if !duplicate {
            found.push(OrbitSolution {
                r0,
                omega,
                residual_norm: residual,
                quadrature_nodes: nodes,
            });
        }
    }
    found.sort_by(|a, b| a.r0.total_cmp(&b.r0));
    Ok(found
        .into_iter()
        .map(|s| OrbitSolution {
            r0: T::lit(s.r0),
            omega: T::lit(s.omega),
            residual_norm: T::lit(s.residual_norm),
            quadrature_nodes: s.quadrature_nodes,
        })
        .collect())
}

/// The orbit sampled every `dt` on `[-duration, 0]`, without extension.
/// `duration` must cover the memory window `horizon`.
pub fn orbital_past<T: Scalar>(
    solution: &OrbitSolution<T>,
    duration: T,
    dt: T,
    horizon: T,
) -> Result<InitialPast<T>> {
    if !(dt > T::zero() && dt.is_finite()) {
        return Err(Error::config("sim.dt", "must be finite and > 0"));
    }
    if !(duration >= horizon) || !duration.is_finite() {
        return Err(Error::Precondition(format!(
            "orbital past of duration {duration} is shorter than the memory window {horizon}"
        )));
    }
    let steps = (duration / dt - T::lit(1e-9)).ceil().to_usize().unwrap_or(0).max(1);
    let analytic = solution.past();
    let mut times = Vec::with_capacity(steps + 1);
    let mut positions = Vec::with_capacity(steps + 1);
    let mut velocities = Vec::with_capacity(steps + 1);
    for m in (0..=steps).rev() {
        let s = -T::of_usize(m) * dt;
        let (x, v) = analytic.value_at(s)?;
        times.push(s);
        positions.push(x);
        velocities.push(v);
    }
    Ok(InitialPast::Tabulated(TabulatedPast::new(
        times,
        positions,
        velocities,
        Extension::None,
    )?))
}

#[cfg(test)]
mod tests;
