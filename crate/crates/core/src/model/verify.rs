use std::fmt;

use super::{energy_phi, Model};
use crate::{Scalar, Vector};

/// Sampling grid for the assumption checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    /// Kernel checked on `[0, t_max]`.
    pub t_max: T,
    pub t_points: usize,
    /// Force and potential checked on `[-x_max, x_max]`.
    pub x_max: T,
    pub x_points: usize,
    /// Half-width of the square `(x, v)` grid of the lambda search.
    pub phase_max: T,
    /// Points per axis of that grid.
    pub phase_points: usize,
}

impl<T: Scalar> Default for GridSpec<T> {
    fn default() -> Self {
        Self {
            t_max: T::lit(50.0),
            t_points: 512,
            x_max: T::lit(20.0),
            x_points: 2048,
            phase_max: T::lit(10.0),
            phase_points: 201,
        }
    }
}

/// Outcome of one grid-sampled inequality `lhs <= rhs`, with the smallest
/// observed `rhs - lhs` and where it occurred.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Check<T> {
    pub ok: bool,
    pub worst_margin: T,
    pub worst_at: T,
}

impl<T: Scalar> Check<T> {
    fn over(points: impl Iterator<Item = T>, tolerance: T, margin: impl Fn(T) -> T) -> Self {
        let mut worst = T::infinity();
        let mut at = T::nan();
        for p in points {
            let m = margin(p);
            if m < worst || m.is_nan() {
                worst = m;
                at = p;
            }
        }
        Self {
            ok: worst >= -tolerance,
            worst_margin: worst,
            worst_at: at,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport<T> {
    /// `K' <= -delta K` and `K(t) <= K(0) exp(-delta t)`.
    pub kernel_ok: Check<T>,
    /// `max(|H'|, |H|) <= a_H (|x|^p1 + 1)`.
    pub h_growth_ok: Check<T>,
    /// `|U'| <= a0 (U^n0 + 1)`.
    pub u_growth_ok: Check<T>,
    /// `x U' >= a1 U - a2`.
    pub u_coercive_ok: Check<T>,
    /// `U >= a3 |x|^(2 max(1, p1 + eps1))` and `U >= 1`.
    pub u_dominates_ok: Check<T>,
    /// `(lambda, lambda_1)` with `Phi + lambda x v >= lambda_1 Phi` on the grid.
    pub lambda_found: Option<(T, T)>,
    pub notes: Vec<String>,
}

impl<T: Scalar> AssumptionReport<T> {
    pub fn all_ok(&self) -> bool {
        self.kernel_ok.ok
            && self.h_growth_ok.ok
            && self.u_growth_ok.ok
            && self.u_coercive_ok.ok
            && self.u_dominates_ok.ok
            && self.lambda_found.is_some()
    }
}

impl<T: Scalar> fmt::Display for AssumptionReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = [
            ("kernel decay", &self.kernel_ok),
            ("wave-force growth", &self.h_growth_ok),
            ("potential gradient growth", &self.u_growth_ok),
            ("potential coercivity", &self.u_coercive_ok),
            ("potential dominance", &self.u_dominates_ok),
        ];
        for (name, c) in rows {
            writeln!(
                f,
                "{:<4} {name}: worst margin {} at {}",
                if c.ok { "ok" } else { "FAIL" },
                c.worst_margin,
                c.worst_at
            )?;
        }
        match self.lambda_found {
            Some((l, l1)) => writeln!(f, "ok   perturbed energy: lambda = {l}, lambda_1 = {l1}")?,
            None => writeln!(f, "FAIL perturbed energy: no lambda in 2^-1 .. 2^-20")?,
        }
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        Ok(())
    }
}

fn linspace<T: Scalar>(lo: T, hi: T, n: usize) -> impl Iterator<Item = T> {
    let step = if n > 1 { (hi - lo) / T::of_usize(n - 1) } else { T::zero() };
    (0..n).map(move |i| lo + step * T::of_usize(i))
}

/// Samples every structural inequality on `grid`. Failures are reported,
/// never raised.
pub fn verify_assumptions<T: Scalar>(model: &Model<T>, grid: &GridSpec<T>) -> AssumptionReport<T> {
    let kernel = &model.kernel;
    let delta = kernel.decay_rate();
    let k0 = kernel.amplitude();
    let rel = T::lit(1e-12);
    let mut notes = Vec::new();

    let kernel_ok = Check::over(linspace(T::zero(), grid.t_max, grid.t_points), rel * k0 * delta.max(T::one()), |t| {
        let k = kernel.value(t);
        let differential = -delta * k - kernel.derivative(t);
        let envelope = k0 * (-delta * t).exp() * (T::one() + rel) - k;
        differential.min(envelope)
    });

    let force = &model.force;
    let xs = || linspace(-grid.x_max, grid.x_max, grid.x_points);
    let h_growth_ok = Check::over(xs(), T::zero(), |x| {
        let bound = force.growth_a_h * (x.abs().powf(force.growth_p1) + T::one());
        bound - force.profile(x).abs().max(force.profile_derivative(x).abs())
    });

    let u = &model.potential;
    let c = u.verifier_constants;
    let shifted = |x: T| u.value(Vector::scalar(x)) + c.shift;
    let slope = |x: T| u.grad(Vector::scalar(x)).x;
    if c.shift != T::zero() {
        notes.push(format!(
            "potential conditions checked against U + {}; the dynamics uses U unshifted (a constant does not change U')",
            c.shift
        ));
    }

    let u_growth_ok = Check::over(xs(), T::zero(), |x| {
        c.a0 * (shifted(x).powf(c.n0) + T::one()) - slope(x).abs()
    });
    let u_coercive_ok = Check::over(xs(), rel, |x| x * slope(x) - (c.a1 * shifted(x) - c.a2));
    let exponent = T::lit(2.0) * T::one().max(force.growth_p1 + c.eps1);
    let u_dominates_ok = Check::over(xs(), T::zero(), |x| {
        let dominance = shifted(x) - c.a3 * x.abs().powf(exponent);
        let range = shifted(x) - T::one();
        dominance.min(range)
    });
    if !u_dominates_ok.ok && c.shift < T::one() {
        notes.push(format!(
            "U takes values below 1 (U({}) = {}); the conditions require U >= 1, which holds for U + 1",
            u_dominates_ok.worst_at,
            shifted(u_dominates_ok.worst_at)
        ));
    }

    let phase = || linspace(-grid.phase_max, grid.phase_max, grid.phase_points);
    let mut lambda_found = None;
    for k in 1..=20 {
        let lambda = T::lit(0.5f64.powi(k));
        let mut ratio = T::infinity();
        for x in phase() {
            for v in phase() {
                let (xv, vv) = (Vector::scalar(x), Vector::scalar(v));
                let phi = energy_phi(u, xv, vv) + c.shift;
                if phi > T::zero() {
                    ratio = ratio.min((phi + lambda * x * v) / phi);
                }
            }
        }
        if ratio > T::zero() && ratio < T::one() {
            lambda_found = Some((lambda, ratio));
            break;
        }
    }

    AssumptionReport {
        kernel_ok,
        h_growth_ok,
        u_growth_ok,
        u_coercive_ok,
        u_dominates_ok,
        lambda_found,
        notes,
    }
}
