//! Estimators for the stationary law and the ergodicity diagnostics.

mod fit;
mod measure;
mod moments;
mod pdf;
mod structure;

pub use fit::{linear_fit, linear_fit_hac, newey_west_lag, LinearFit};
pub use measure::{ks_statistic, time_averaged_measure, EmpiricalMeasure, Observable};
pub use moments::{energy_moments, ensemble_energy_moments, seed_ensemble, MomentSeries, EXP_MOMENT_BETA};
pub use pdf::{pdf_l1_distance, peak_location, radial_pdf, radius_std, RadialPdf};
pub use structure::{structure_function, StructureFunction};

use crate::integrator::Trajectory;
use crate::{Error, Result, Scalar};

/// Default fraction of a run discarded as transient.
pub const DEFAULT_BURN_IN: f64 = 0.1;

/// Index of the first sample at or after `t0 + fraction * span`, and that
/// time. Errors when nothing is left.
pub fn burn_in_start<T: Scalar>(traj: &Trajectory<T>, fraction: T) -> Result<(usize, T)> {
    if !(fraction >= T::zero() && fraction < T::one()) {
        return Err(Error::config("stats.burn_in", "must lie in [0, 1)"));
    }
    let Some(&t0) = traj.times.first() else {
        return Err(Error::Precondition("empty trajectory".into()));
    };
    let cut = t0 + fraction * traj.span();
    let start = traj.times.partition_point(|&t| t < cut);
    if start >= traj.len() {
        return Err(Error::Precondition(format!("no samples after the burn-in time {cut}")));
    }
    Ok((start, cut))
}

/// Compensated sum of `values` taken in ascending order, so the result
/// does not depend on the order they were supplied in.
pub(crate) fn order_free_sum<T: Scalar>(values: &mut [T]) -> T {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let (mut sum, mut carry) = (T::zero(), T::zero());
    for &v in values.iter() {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}
