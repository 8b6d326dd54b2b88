use std::io::Write;

use super::fit::linear_fit;
use crate::integrator::Trajectory;
use crate::{Error, Result, Scalar, Vector};

/// Time-averaged `|x(t+tau) - x(t)|^order` and the same for `v`, with the
/// log-log slopes against `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureFunction<T> {
    pub lags: Vec<T>,
    pub order: i32,
    pub sx: Vec<T>,
    pub sv: Vec<T>,
    /// `None` when some value is zero and the logarithm is undefined.
    pub slope_x: Option<T>,
    pub slope_v: Option<T>,
}

impl<T: Scalar> StructureFunction<T> {
    /// `lag,sx4,sv4` rows after a `# slope_x=..., slope_v=...` line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let show = |s: Option<T>| s.map_or_else(|| "nan".to_string(), |v| v.to_string());
        writeln!(out, "# slope_x={}, slope_v={}", show(self.slope_x), show(self.slope_v))?;
        writeln!(out, "lag,sx4,sv4")?;
        for i in 0..self.lags.len() {
            writeln!(out, "{},{},{}", self.lags[i], self.sx[i], self.sv[i])?;
        }
        Ok(())
    }
}

fn mean_increment<T: Scalar>(series: &[Vector<T>], lag: usize, order: i32) -> T {
    let n = series.len() - lag;
    let total: T = (0..n).map(|i| (series[i + lag] - series[i]).norm().powi(order)).sum();
    total / T::of_usize(n)
}

fn log_slope<T: Scalar>(lags: &[T], values: &[T]) -> Result<Option<T>> {
    if values.iter().any(|&v| !(v > T::zero())) {
        return Ok(None);
    }
    let lx: Vec<T> = lags.iter().map(|l| l.ln()).collect();
    let ly: Vec<T> = values.iter().map(|v| v.ln()).collect();
    Ok(Some(linear_fit(&lx, &ly)?.slope))
}

/// Structure functions of the given `order` at each lag. Lags are times;
/// each must be a positive multiple of the output spacing and at most a
/// tenth of the run.
pub fn structure_function<T: Scalar>(traj: &Trajectory<T>, lags: &[T], order: i32) -> Result<StructureFunction<T>> {
    if lags.len() < 3 {
        return Err(Error::Precondition("a slope needs at least 3 lags".into()));
    }
    if order < 1 {
        return Err(Error::Precondition("order must be >= 1".into()));
    }
    let spacing = traj
        .sample_spacing()
        .ok_or_else(|| Error::Precondition("trajectory has fewer than 2 samples".into()))?;
    let longest = traj.span() / T::lit(10.0);
    let mut steps = Vec::with_capacity(lags.len());
    for &lag in lags {
        let m = (lag / spacing).round();
        if !(lag > T::zero()) || (m * spacing - lag).abs() > T::lit(1e-9) * lag || m < T::one() {
            return Err(Error::Precondition(format!(
                "lag {lag} is not a positive multiple of the output spacing {spacing}"
            )));
        }
        if lag > longest * (T::one() + T::lit(1e-12)) {
            return Err(Error::Precondition(format!("lag {lag} exceeds a tenth of the run ({longest})")));
        }
        steps.push(m.to_usize().expect("lag fits the trajectory"));
    }
    let sx: Vec<T> = steps.iter().map(|&m| mean_increment(&traj.positions, m, order)).collect();
    let sv: Vec<T> = steps.iter().map(|&m| mean_increment(&traj.velocities, m, order)).collect();
    Ok(StructureFunction {
        slope_x: log_slope(lags, &sx)?,
        slope_v: log_slope(lags, &sv)?,
        lags: lags.to_vec(),
        order,
        sx,
        sv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::TrajectoryMeta;
    use crate::model::Dim;

    fn path(n: usize, dt: f64, offset: f64, f: impl Fn(f64) -> (f64, f64)) -> Trajectory<f64> {
        let meta = TrajectoryMeta {
            seed: 0,
            stream: 0,
            dt,
            params: None,
            truncation: None,
        };
        let mut t = Trajectory::with_capacity(Dim::One, n, meta);
        for i in 0..n {
            let s = i as f64 * dt;
            let (x, v) = f(s);
            t.push(s + offset, Vector::scalar(x), Vector::scalar(v));
        }
        t
    }

    #[test]
    fn uniform_motion() {
        let traj = path(1000, 0.5, 0.0, |t| (t, 1.0));
        let lags = [0.5, 1.0, 2.0, 4.0, 8.0];
        let s = structure_function(&traj, &lags, 4).unwrap();
        for (l, x) in lags.iter().zip(&s.sx) {
            assert!((x - l.powi(4)).abs() < 1e-9 * l.powi(4));
        }
        assert!(s.sv.iter().all(|&v| v == 0.0));
        assert!((s.slope_x.unwrap() - 4.0).abs() < 1e-10);
        assert_eq!(s.slope_v, None);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# slope_x=4"));
        assert!(text.contains("slope_v=nan\nlag,sx4,sv4\n0.5,0.0625,0\n"));
    }

    #[test]
    fn invariant_under_time_shift() {
        let f = |t: f64| ((0.3 * t).sin(), (1.7 * t).cos());
        let a = structure_function(&path(4000, 0.25, 0.0, f), &[0.25, 0.5, 1.0, 2.0], 4).unwrap();
        let b = structure_function(&path(4000, 0.25, 1000.0, f), &[0.25, 0.5, 1.0, 2.0], 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lag_preconditions() {
        let traj = path(100, 0.5, 0.0, |t| (t, 1.0));
        assert!(structure_function(&traj, &[0.5, 1.0], 4).is_err());
        assert!(structure_function(&traj, &[0.5, 0.75, 1.0], 4).is_err());
        assert!(structure_function(&traj, &[0.5, 1.0, 6.0], 4).is_err());
        assert!(structure_function(&traj, &[0.5, 1.0, 4.5], 4).is_ok());
    }
}
