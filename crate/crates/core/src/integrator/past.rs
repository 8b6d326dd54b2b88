use crate::{Error, Result, Scalar, Vector};

/// Step-grid positions, oldest first, and the value before the oldest one.
pub(crate) type GridSamples<T> = (Vec<Vector<T>>, Option<Vector<T>>);

/// How a tabulated past continues before its first sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    /// No continuation: the samples must cover the whole memory window.
    None,
    /// At rest at the origin.
    Zero,
    /// Frozen at the earliest sample.
    Constant,
}

/// A past path sampled at increasing non-positive times ending at `s = 0`,
/// read by linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPast<T> {
    times: Vec<T>,
    positions: Vec<Vector<T>>,
    velocities: Vec<Vector<T>>,
    extension: Extension,
}

impl<T: Scalar> TabulatedPast<T> {
    pub fn new(
        times: Vec<T>,
        positions: Vec<Vector<T>>,
        velocities: Vec<Vector<T>>,
        extension: Extension,
    ) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::config("past", "tabulated past has no samples"));
        }
        if times.len() != positions.len() || times.len() != velocities.len() {
            return Err(Error::config("past", "sample columns differ in length"));
        }
        if *times.last().unwrap() != T::zero() {
            return Err(Error::config("past", "last sample must be at s = 0"));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::config("past", "sample times must be strictly increasing"));
        }
        let finite = times.iter().all(|t| t.is_finite())
            && positions.iter().chain(&velocities).all(|p| p.is_finite());
        if !finite {
            return Err(Error::config("past", "samples must be finite"));
        }
        Ok(Self {
            times,
            positions,
            velocities,
            extension,
        })
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn positions(&self) -> &[Vector<T>] {
        &self.positions
    }

    pub fn velocities(&self) -> &[Vector<T>] {
        &self.velocities
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    /// Earliest tabulated time (`<= 0`).
    pub fn earliest(&self) -> T {
        self.times[0]
    }

    /// Value the extension takes before the support, if any.
    pub fn extension_value(&self) -> Option<(Vector<T>, Vector<T>)> {
        match self.extension {
            Extension::None => None,
            Extension::Zero => Some((Vector::zero(), Vector::zero())),
            Extension::Constant => Some((self.positions[0], self.velocities[0])),
        }
    }

    fn interpolate(&self, s: T) -> Option<(Vector<T>, Vector<T>)> {
        if s < self.earliest() {
            return self.extension_value();
        }
        let hi = self.times.partition_point(|&t| t < s);
        if self.times[hi] == s || hi == 0 {
            return Some((self.positions[hi], self.velocities[hi]));
        }
        let lo = hi - 1;
        let w = (s - self.times[lo]) / (self.times[hi] - self.times[lo]);
        let lerp = |a: Vector<T>, b: Vector<T>| a + (b - a) * w;
        Some((
            lerp(self.positions[lo], self.positions[hi]),
            lerp(self.velocities[lo], self.velocities[hi]),
        ))
    }
}

/// The initial past `(x(s), v(s))`, `s <= 0`, seeding the memory integral.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialPast<T> {
    /// Bouncing at rest at the origin.
    Zero,
    /// At rest at a fixed point.
    Constant(Vector<T>),
    Tabulated(TabulatedPast<T>),
    /// Counter-clockwise circle `x(s) = r0 (cos ws, sin ws)`; planar only.
    Orbital { r0: T, omega: T },
}

impl<T: Scalar> InitialPast<T> {
    /// `(x(s), v(s))`; `s` must be `<= 0`.
    pub fn value_at(&self, s: T) -> Result<(Vector<T>, Vector<T>)> {
        if !(s <= T::zero()) {
            return Err(Error::Domain(format!("past evaluated at s = {s} > 0")));
        }
        match self {
            InitialPast::Zero => Ok((Vector::zero(), Vector::zero())),
            InitialPast::Constant(c) => Ok((*c, Vector::zero())),
            InitialPast::Tabulated(tab) => tab.interpolate(s).ok_or_else(|| {
                Error::Domain(format!(
                    "s = {s} precedes the tabulated support starting at {} and no extension is declared",
                    tab.earliest()
                ))
            }),
            InitialPast::Orbital { r0, omega } => {
                let (sin, cos) = (*omega * s).sin_cos();
                Ok((
                    Vector::new(*r0 * cos, *r0 * sin),
                    Vector::new(-*r0 * *omega * sin, *r0 * *omega * cos),
                ))
            }
        }
    }

    /// State at `s = 0`, where the simulation starts.
    pub fn anchor(&self) -> (Vector<T>, Vector<T>) {
        self.value_at(T::zero()).expect("every past is defined at s = 0")
    }

    /// At rest at the origin until `-ramp`, then linearly joined to the
    /// given anchor state at `s = 0`.
    pub fn anchored_zero(position: Vector<T>, velocity: Vector<T>, ramp: T) -> Result<Self> {
        if !(ramp > T::zero()) {
            return Err(Error::config("past.ramp", "must be > 0"));
        }
        Ok(InitialPast::Tabulated(TabulatedPast::new(
            vec![-ramp, T::zero()],
            vec![Vector::zero(), position],
            vec![Vector::zero(), velocity],
            Extension::Zero,
        )?))
    }

    /// Positions on the step grid `s = -m dt`, oldest first, covering at
    /// most `window_steps` steps, plus the constant the path takes before
    /// the oldest sample when the samples do not span the whole window.
    pub(crate) fn grid_samples(
        &self,
        dt: T,
        window_steps: usize,
    ) -> Result<GridSamples<T>> {
        match self {
            InitialPast::Zero => Ok((vec![Vector::zero()], Some(Vector::zero()))),
            InitialPast::Constant(c) => Ok((vec![*c], Some(*c))),
            InitialPast::Orbital { .. } => {
                let samples = (0..=window_steps)
                    .rev()
                    .map(|m| self.value_at(-T::of_usize(m) * dt).map(|(x, _)| x))
                    .collect::<Result<_>>()?;
                Ok((samples, None))
            }
            InitialPast::Tabulated(tab) => {
                let slack = dt * T::lit(1e-9);
                let reachable = ((-tab.earliest() + slack) / dt).floor().to_usize().unwrap_or(0);
                let covered = reachable.min(window_steps);
                let samples = (0..=covered)
                    .rev()
                    .map(|m| tab.interpolate(-T::of_usize(m) * dt).map(|(x, _)| x))
                    .collect::<Option<Vec<_>>>()
                    .expect("grid points inside the support");
                if covered == window_steps {
                    return Ok((samples, None));
                }
                match tab.extension_value() {
                    Some((x, _)) => Ok((samples, Some(x))),
                    None => Err(Error::Precondition(format!(
                        "tabulated past reaches back to {} but the memory window needs {} and no extension is declared",
                        tab.earliest(),
                        -T::of_usize(window_steps) * dt
                    ))),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_past_is_zero_everywhere() {
        let p = InitialPast::<f64>::Zero;
        for s in [0.0, -1.0, -1e6] {
            assert_eq!(p.value_at(s).unwrap(), (Vector::zero(), Vector::zero()));
        }
        assert!(p.value_at(0.5).is_err());
    }

    #[test]
    fn tabulated_interpolates_and_extends() {
        let tab = TabulatedPast::new(
            vec![-2.0, -1.0, 0.0],
            vec![Vector::scalar(4.0), Vector::scalar(2.0), Vector::scalar(1.0)],
            vec![Vector::scalar(0.0); 3],
            Extension::Constant,
        )
        .unwrap();
        let p = InitialPast::Tabulated(tab.clone());
        assert_eq!(p.value_at(-0.5).unwrap().0.x, 1.5);
        assert_eq!(p.value_at(-10.0).unwrap().0.x, 4.0);
        assert_eq!(p.anchor().0.x, 1.0);

        let bare = TabulatedPast { extension: Extension::None, ..tab };
        assert!(InitialPast::Tabulated(bare).value_at(-3.0).is_err());
    }

    #[test]
    fn tabulated_rejects_bad_layout() {
        let v = vec![Vector::<f64>::zero(); 2];
        assert!(TabulatedPast::new(vec![-1.0, -0.5], v.clone(), v.clone(), Extension::Zero).is_err());
        assert!(TabulatedPast::new(vec![0.0, 0.0], v.clone(), v.clone(), Extension::Zero).is_err());
        assert!(TabulatedPast::new(vec![-1.0, 0.0], v.clone(), v[..1].to_vec(), Extension::Zero).is_err());
    }

    #[test]
    fn orbital_anchor() {
        let p = InitialPast::Orbital { r0: 0.9f64, omega: 0.8 };
        let (x, v) = p.anchor();
        assert_eq!(x, Vector::new(0.9, 0.0));
        assert!((v.y - 0.72).abs() < 1e-15 && v.x == 0.0);
    }

    #[test]
    fn grid_samples_cover_window_or_extend() {
        let dt = 0.25;
        let orbital = InitialPast::Orbital { r0: 1.0, omega: 1.0 };
        let (s, tail) = orbital.grid_samples(dt, 8).unwrap();
        assert_eq!(s.len(), 9);
        assert!(tail.is_none());
        assert_eq!(*s.last().unwrap(), Vector::new(1.0, 0.0));

        let ramp = InitialPast::anchored_zero(Vector::new(1.0, 0.0), Vector::zero(), dt).unwrap();
        let (s, tail) = ramp.grid_samples(dt, 8).unwrap();
        assert_eq!(s, vec![Vector::zero(), Vector::new(1.0, 0.0)]);
        assert_eq!(tail, Some(Vector::zero()));

        let short = TabulatedPast::new(
            vec![-0.5, 0.0],
            vec![Vector::zero(); 2],
            vec![Vector::zero(); 2],
            Extension::None,
        )
        .unwrap();
        assert!(matches!(
            InitialPast::Tabulated(short).grid_samples(dt, 8),
            Err(Error::Precondition(_))
        ));
    }
}
