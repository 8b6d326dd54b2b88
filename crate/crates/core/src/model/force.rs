use super::bessel::{j1, jn, J1_ABS_MAX};
use super::Dim;
use crate::{Error, Result, Scalar, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForceFamily {
    /// One-dimensional `H(d) = J1(d)`.
    BesselJ1,
    /// Planar `H(d) = J1(2 pi |d|) d / |d|`, zero at `d = 0`.
    BesselJ1Radial,
}

impl ForceFamily {
    pub fn name(self) -> &'static str {
        match self {
            ForceFamily::BesselJ1 => "bessel_j1",
            ForceFamily::BesselJ1Radial => "bessel_j1_radial",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bessel_j1" => Some(ForceFamily::BesselJ1),
            "bessel_j1_radial" => Some(ForceFamily::BesselJ1Radial),
            _ => None,
        }
    }
}

/// Pilot-wave force `H` together with the polynomial growth constants
/// `max(|H'|, |H|) <= a_H (|x|^p1 + 1)` it is claimed to satisfy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveForce<T> {
    pub family: ForceFamily,
    pub growth_a_h: T,
    pub growth_p1: T,
}

impl<T: Scalar> WaveForce<T> {
    pub fn bessel(dim: Dim) -> Self {
        match dim {
            Dim::One => Self {
                family: ForceFamily::BesselJ1,
                growth_a_h: T::one(),
                growth_p1: T::zero(),
            },
            // |d/dr J1(2 pi r)| peaks at pi when r = 0.
            Dim::Two => Self {
                family: ForceFamily::BesselJ1Radial,
                growth_a_h: T::lit(4.0),
                growth_p1: T::zero(),
            },
        }
    }

    pub fn dim(&self) -> Dim {
        match self.family {
            ForceFamily::BesselJ1 => Dim::One,
            ForceFamily::BesselJ1Radial => Dim::Two,
        }
    }

    /// Writes `H(d) = d * c * f(s |d|^2)` with `f(w) = J1(sqrt w) / sqrt w`;
    /// returns `(c, s)`.
    pub(crate) fn scales(&self) -> (T, T) {
        match self.family {
            ForceFamily::BesselJ1 => (T::one(), T::one()),
            ForceFamily::BesselJ1Radial => {
                let two_pi = T::lit(2.0) * T::PI();
                (two_pi, two_pi * two_pi)
            }
        }
    }

    pub fn eval(&self, displacement: Vector<T>) -> Result<Vector<T>> {
        if !displacement.is_finite() {
            return Err(Error::Domain("wave force of non-finite displacement".into()));
        }
        Ok(self.value(displacement))
    }

    #[inline]
    pub fn value(&self, d: Vector<T>) -> Vector<T> {
        match self.family {
            ForceFamily::BesselJ1 => Vector::scalar(j1(d.x)),
            ForceFamily::BesselJ1Radial => {
                let r = d.norm();
                if r == T::zero() {
                    return Vector::zero();
                }
                d * (j1(T::lit(2.0) * T::PI() * r) / r)
            }
        }
    }

    /// Scalar profile along a ray: `J1(x)` in 1D, `J1(2 pi x)` in 2D.
    pub fn profile(&self, x: T) -> T {
        match self.family {
            ForceFamily::BesselJ1 => j1(x),
            ForceFamily::BesselJ1Radial => j1(T::lit(2.0) * T::PI() * x),
        }
    }

    pub fn profile_derivative(&self, x: T) -> T {
        let half = T::lit(0.5);
        match self.family {
            ForceFamily::BesselJ1 => (jn(0, x) - jn(2, x)) * half,
            ForceFamily::BesselJ1Radial => {
                let two_pi = T::lit(2.0) * T::PI();
                let z = two_pi * x;
                two_pi * (jn(0, z) - jn(2, z)) * half
            }
        }
    }

    /// `sup |H|` over all displacements.
    pub fn sup_norm(&self) -> T {
        T::lit(J1_ABS_MAX)
    }
}

/// Tabulated `f(w) = J1(sqrt w)/sqrt w` on a uniform grid in `w`, read with
/// four-point Lagrange interpolation.
///
/// `f` is entire in `w`, so working in the squared distance removes the
/// square root and the division from the memory-force inner loop. With
/// `h = 1/64` the interpolation error of `f` is below `1e-13`.
#[derive(Debug, Clone)]
pub struct ForceTable<T> {
    scale: T,
    arg_scale: T,
    /// maps a squared distance to a fractional cell index
    q_to_cell: T,
    /// largest squared distance served from the table
    q_max: T,
    /// Cubic in the offset `t` within cell `i`, through the nodes at
    /// `w = (i - 1) h .. (i + 2) h`, premultiplied by `scale`; lowest
    /// degree first.
    cells: Vec<[T; 4]>,
    force: WaveForce<T>,
}

impl<T: Scalar> ForceTable<T> {
    pub const SPACING: f64 = 1.0 / 64.0;

    /// Table serving displacements with `|d| <= reach`; larger displacements
    /// fall back to direct evaluation.
    pub fn new(force: WaveForce<T>, reach: T) -> Self {
        let (scale, arg_scale) = force.scales();
        let h = T::lit(Self::SPACING);
        let w_max = arg_scale * reach * reach;
        let count = (w_max / h).ceil().to_usize().unwrap_or(0).max(1);
        let nodes: Vec<f64> = (0..count + 3)
            .map(|i| sinc_j1((i as f64 - 1.0) * Self::SPACING))
            .collect();
        let sc = scale.as_f64();
        let cells = nodes
            .windows(4)
            .map(|p| {
                let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
                [
                    b,
                    -a / 3.0 - b / 2.0 + c - d / 6.0,
                    a / 2.0 - b + c / 2.0,
                    (d - a) / 6.0 + (b - c) / 2.0,
                ]
                .map(|k| T::lit(k * sc))
            })
            .collect();
        Self {
            scale,
            arg_scale,
            q_to_cell: arg_scale / h,
            q_max: T::of_usize(count) * h / arg_scale,
            cells,
            force,
        }
    }

    /// Coefficient `c f(s q)` such that `H(d) = d * coefficient(|d|^2)`.
    #[inline(always)]
    pub fn coefficient(&self, q: T) -> T {
        if q >= self.q_max {
            return self.scale * sinc_j1(self.arg_scale * q);
        }
        let u = q * self.q_to_cell;
        let i = u.to_usize().unwrap_or(0);
        let t = u - T::of_usize(i);
        let [c0, c1, c2, c3] = self.cells[i];
        ((c3 * t + c2) * t + c1) * t + c0
    }

    pub fn reach(&self) -> T {
        self.q_max.sqrt()
    }

    #[inline]
    pub fn eval(&self, d: Vector<T>) -> Vector<T> {
        d * self.coefficient(d.norm_sq())
    }

    pub fn force(&self) -> &WaveForce<T> {
        &self.force
    }
}

/// `J1(sqrt w)/sqrt w`, analytic continuation to `w < 0` included.
fn sinc_j1<T: Scalar>(w: T) -> T {
    if w <= T::lit(64.0) {
        // sum_m (-w/4)^m / (m! (m+1)!)
        let q = -w * T::lit(0.25);
        let mut term = T::lit(0.5);
        let mut sum = term;
        for m in 1..60u32 {
            term = term * q / T::lit((m * (m + 1)) as f64);
            sum += term;
            if term.abs() <= T::epsilon() * T::lit(1e-3) * sum.abs() {
                break;
            }
        }
        sum
    } else {
        let r = w.sqrt();
        j1(r) / r
    }
}
