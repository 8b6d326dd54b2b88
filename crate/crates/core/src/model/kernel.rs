use crate::{Error, Result, Scalar};

/// Memory kernel `K(t)`, `t >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel<T> {
    /// `K(t) = amplitude * exp(-decay * t)`.
    Exponential { decay: T, amplitude: T },
}

impl<T: Scalar> Kernel<T> {
    pub fn exponential(decay: T, amplitude: T) -> Result<Self> {
        if !(decay > T::zero()) || !decay.is_finite() {
            return Err(Error::config("model.kernel.delta", "must be finite and > 0"));
        }
        if !(amplitude > T::zero()) || !amplitude.is_finite() {
            return Err(Error::config("model.kernel.amplitude", "must be finite and > 0"));
        }
        Ok(Kernel::Exponential { decay, amplitude })
    }

    /// Checked evaluation; negative times are outside the kernel's domain.
    pub fn eval(&self, t: T) -> Result<T> {
        if !(t >= T::zero()) {
            return Err(Error::Domain(format!("kernel evaluated at t = {t}")));
        }
        Ok(self.value(t))
    }

    #[inline]
    pub fn value(&self, t: T) -> T {
        match *self {
            Kernel::Exponential { decay, amplitude } => amplitude * (-decay * t).exp(),
        }
    }

    pub fn derivative(&self, t: T) -> T {
        match *self {
            Kernel::Exponential { decay, .. } => -decay * self.value(t),
        }
    }

    /// Rate `delta` with `K' <= -delta K`.
    pub fn decay_rate(&self) -> T {
        match *self {
            Kernel::Exponential { decay, .. } => decay,
        }
    }

    pub fn amplitude(&self) -> T {
        match *self {
            Kernel::Exponential { amplitude, .. } => amplitude,
        }
    }

    /// `int_from^inf K(s) ds`.
    pub fn tail_mass(&self, from: T) -> T {
        match *self {
            Kernel::Exponential { decay, amplitude } => {
                amplitude * (-decay * from.max(T::zero())).exp() / decay
            }
        }
    }

    pub fn total_mass(&self) -> T {
        self.tail_mass(T::zero())
    }

    /// Smallest horizon whose tail mass does not exceed `tol`.
    pub fn horizon_for_tail(&self, tol: T) -> T {
        match *self {
            Kernel::Exponential { decay, amplitude } => {
                ((amplitude / (decay * tol)).ln() / decay).max(T::zero())
            }
        }
    }
}
