use super::{Kernel, Potential};
use crate::integrator::{Extension, InitialPast, Trajectory};
use crate::{Error, Result, Scalar, Vector};

/// `Phi(x, v) = U(x) + |v|^2 / 2`.
#[inline]
pub fn energy_phi<T: Scalar>(potential: &Potential<T>, x: Vector<T>, v: Vector<T>) -> T {
    potential.value(x) + T::lit(0.5) * v.norm_sq()
}

/// `Phi(x, v) + lambda x . v` for `lambda` in `(0, 1)`.
pub fn perturbed_energy<T: Scalar>(
    potential: &Potential<T>,
    x: Vector<T>,
    v: Vector<T>,
    lambda: T,
) -> Result<T> {
    if !(lambda > T::zero() && lambda < T::one()) {
        return Err(Error::Domain(format!("lambda = {lambda} outside (0, 1)")));
    }
    Ok(energy_phi(potential, x, v) + lambda * x.dot(v))
}

/// `int_{-inf}^0 |x(s)|^q K(-s) ds` over a past path.
///
/// Tabulated pasts are integrated by the trapezoid rule on their own grid;
/// the part before the first sample comes from the declared extension in
/// closed form.
pub fn weighted_path_norm<T: Scalar>(past: &InitialPast<T>, q: T, kernel: &Kernel<T>) -> Result<T> {
    if !(q >= T::zero()) {
        return Err(Error::Domain(format!("path norm exponent q = {q} < 0")));
    }
    let pow = |x: Vector<T>| x.norm().powf(q);
    match past {
        InitialPast::Zero => Ok(pow(Vector::zero()) * kernel.total_mass()),
        InitialPast::Constant(c) => Ok(pow(*c) * kernel.total_mass()),
        InitialPast::Orbital { r0, .. } => Ok(r0.abs().powf(q) * kernel.total_mass()),
        InitialPast::Tabulated(tab) => {
            let ts = tab.times();
            let xs = tab.positions();
            let integrand = |i: usize| pow(xs[i]) * kernel.value(-ts[i]);
            let mut sum = T::zero();
            for i in 1..ts.len() {
                sum += (ts[i] - ts[i - 1]) * (integrand(i - 1) + integrand(i)) * T::lit(0.5);
            }
            let tail = match tab.extension() {
                Extension::None => {
                    return Err(Error::Domain(
                        "tabulated past has no declared continuation before its first sample".into(),
                    ))
                }
                Extension::Zero => pow(Vector::zero()) * kernel.tail_mass(-tab.earliest()),
                Extension::Constant => pow(xs[0]) * kernel.tail_mass(-tab.earliest()),
            };
            Ok(sum + tail)
        }
    }
}

/// `max_n (|x_n| + |v_n|) / (1 + |t_n|^rho)`.
pub fn growth_seminorm<T: Scalar>(path: &Trajectory<T>, rho: T) -> Result<T> {
    if !(rho > T::zero()) {
        return Err(Error::Domain(format!("growth exponent rho = {rho} <= 0")));
    }
    if path.is_empty() {
        return Err(Error::Domain("growth seminorm of an empty trajectory".into()));
    }
    Ok(path
        .times
        .iter()
        .zip(&path.positions)
        .zip(&path.velocities)
        .map(|((t, x), v)| (x.norm() + v.norm()) / (T::one() + t.abs().powf(rho)))
        .fold(T::zero(), T::max))
}
