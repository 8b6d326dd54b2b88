use crate::integrator::Trajectory;
use crate::{Error, Result, Scalar};

/// Scalar read off the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// Position coordinate (`0` = x, `1` = y).
    Position(usize),
    /// Velocity coordinate.
    Velocity(usize),
    /// `|x|`.
    Radius,
}

/// Samples of an observable along one path; their empirical law
/// approximates the time-averaged measure's marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure<T> {
    pub samples: Vec<T>,
}

impl<T: Scalar> EmpiricalMeasure<T> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> T {
        self.samples.iter().copied().sum::<T>() / T::of_usize(self.samples.len())
    }

    /// Population variance.
    pub fn variance(&self) -> T {
        let m = self.mean();
        self.samples.iter().map(|&s| (s - m) * (s - m)).sum::<T>() / T::of_usize(self.samples.len())
    }

    /// Fraction of samples `<= x`.
    pub fn cdf(&self, x: T) -> T {
        T::of_usize(self.samples.iter().filter(|&&s| s <= x).count()) / T::of_usize(self.samples.len())
    }
}

/// The observable at each time of `t_grid`, interpolated linearly between
/// output samples.
pub fn time_averaged_measure<T: Scalar>(
    traj: &Trajectory<T>,
    observable: Observable,
    t_grid: &[T],
) -> Result<EmpiricalMeasure<T>> {
    let axis_ok = |a: usize| a < traj.dim.count() as usize;
    match observable {
        Observable::Position(a) | Observable::Velocity(a) if !axis_ok(a) => {
            return Err(Error::Precondition(format!("axis {a} does not exist in {:?}", traj.dim)));
        }
        _ => {}
    }
    let read = |i: usize| -> T {
        let pick = |v: crate::Vector<T>, a: usize| if a == 0 { v.x } else { v.y };
        match observable {
            Observable::Position(a) => pick(traj.positions[i], a),
            Observable::Velocity(a) => pick(traj.velocities[i], a),
            Observable::Radius => traj.positions[i].norm(),
        }
    };
    let times = &traj.times;
    let (Some(&first), Some(&last)) = (times.first(), times.last()) else {
        return Err(Error::Precondition("empty trajectory".into()));
    };
    let mut samples = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if !(t >= first && t <= last) {
            return Err(Error::Precondition(format!("t = {t} lies outside the run [{first}, {last}]")));
        }
        let hi = times.partition_point(|&s| s < t);
        if times[hi] == t || hi == 0 {
            samples.push(read(hi));
        } else {
            let lo = hi - 1;
            let w = (t - times[lo]) / (times[hi] - times[lo]);
            samples.push(read(lo) + w * (read(hi) - read(lo)));
        }
    }
    Ok(EmpiricalMeasure { samples })
}

/// Kolmogorov–Smirnov distance `sup |F_n - F|` between the samples and a
/// continuous CDF.
pub fn ks_statistic<T: Scalar>(samples: &[T], cdf: impl Fn(T) -> T) -> Result<T> {
    if samples.is_empty() {
        return Err(Error::Precondition("no samples".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = T::of_usize(sorted.len());
    let mut d = T::zero();
    for (i, &s) in sorted.iter().enumerate() {
        let f = cdf(s);
        let above = T::of_usize(i + 1) / n - f;
        let below = f - T::of_usize(i) / n;
        d = d.max(above).max(below);
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::TrajectoryMeta;
    use crate::model::Dim;
    use crate::Vector;

    fn ramp() -> Trajectory<f64> {
        let meta = TrajectoryMeta {
            seed: 0,
            stream: 0,
            dt: 1.0,
            params: None,
            truncation: None,
        };
        let mut t = Trajectory::with_capacity(Dim::Two, 5, meta);
        for i in 0..5 {
            let s = i as f64;
            t.push(s, Vector::new(s, 3.0), Vector::new(1.0, 0.0));
        }
        t
    }

    #[test]
    fn constant_observable_is_a_point_mass() {
        let m = time_averaged_measure(&ramp(), Observable::Position(1), &[0.0, 1.5, 4.0]).unwrap();
        assert_eq!(m.samples, vec![3.0; 3]);
        assert_eq!(m.variance(), 0.0);
        assert_eq!(m.cdf(2.9), 0.0);
        assert_eq!(m.cdf(3.0), 1.0);
    }

    #[test]
    fn interpolates_between_samples() {
        let m = time_averaged_measure(&ramp(), Observable::Position(0), &[0.5, 2.0, 3.25]).unwrap();
        assert_eq!(m.samples, vec![0.5, 2.0, 3.25]);
        let r = time_averaged_measure(&ramp(), Observable::Radius, &[4.0]).unwrap();
        assert_eq!(r.samples, vec![5.0]);
        assert!(time_averaged_measure(&ramp(), Observable::Velocity(0), &[4.5]).is_err());
        assert!(time_averaged_measure(&ramp(), Observable::Velocity(2), &[1.0]).is_err());
    }

    #[test]
    fn ks_of_uniform_grid() {
        let samples: Vec<f64> = (0..10).map(|i| (i as f64 + 0.5) / 10.0).collect();
        let d = ks_statistic(&samples, |x: f64| x.clamp(0.0, 1.0)).unwrap();
        assert!((d - 0.05).abs() < 1e-12);
        let shifted = ks_statistic(&samples, |x: f64| (x - 0.2).clamp(0.0, 1.0)).unwrap();
        assert!((shifted - 0.25).abs() < 1e-12);
    }
}
