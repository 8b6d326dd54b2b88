use crate::{Scalar, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialFamily {
    /// `U(x) = k |x|^2 / 2`.
    Harmonic,
}

impl PotentialFamily {
    pub fn name(self) -> &'static str {
        match self {
            PotentialFamily::Harmonic => "harmonic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "harmonic" => Some(PotentialFamily::Harmonic),
            _ => None,
        }
    }
}

/// Constants of the growth, coercivity and dominance conditions on `U`.
/// They play no role in the dynamics; only the assumption checker reads them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifierConstants<T> {
    /// `|U'| <= a0 (U^n0 + 1)`
    pub a0: T,
    pub n0: T,
    /// `x U' >= a1 U - a2`
    pub a1: T,
    pub a2: T,
    /// `U >= a3 |x|^(2 max(1, p1 + eps1))`
    pub a3: T,
    pub eps1: T,
    /// Constant added to `U` before checking; the conditions ask for `U >= 1`.
    pub shift: T,
}

impl<T: Scalar> Default for VerifierConstants<T> {
    fn default() -> Self {
        Self {
            a0: T::one(),
            n0: T::one(),
            a1: T::one(),
            a2: T::one(),
            a3: T::lit(0.1),
            eps1: T::lit(0.5),
            shift: T::one(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential<T> {
    pub family: PotentialFamily,
    pub spring_k: T,
    pub verifier_constants: VerifierConstants<T>,
}

impl<T: Scalar> Potential<T> {
    pub fn harmonic(spring_k: T) -> Self {
        Self {
            family: PotentialFamily::Harmonic,
            spring_k,
            verifier_constants: VerifierConstants::default(),
        }
    }

    #[inline]
    pub fn value(&self, x: Vector<T>) -> T {
        match self.family {
            PotentialFamily::Harmonic => T::lit(0.5) * self.spring_k * x.norm_sq(),
        }
    }

    #[inline]
    pub fn grad(&self, x: Vector<T>) -> Vector<T> {
        match self.family {
            PotentialFamily::Harmonic => x * self.spring_k,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn harmonic_value() {
        let u = Potential::harmonic(0.35f64);
        assert_eq!(u.value(Vector::zero()), 0.0);
        assert!((u.value(Vector::new(1.0, 2.0)) - 0.875).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn gradient_matches_centered_difference(x in -20.0f64..20.0, y in -20.0f64..20.0, k in 0.0f64..5.0) {
            let u = Potential::harmonic(k);
            let p = Vector::new(x, y);
            let h = 1e-5;
            let g = u.grad(p);
            let fx = (u.value(p + Vector::new(h, 0.0)) - u.value(p - Vector::new(h, 0.0))) / (2.0 * h);
            let fy = (u.value(p + Vector::new(0.0, h)) - u.value(p - Vector::new(0.0, h))) / (2.0 * h);
            prop_assert!((g.x - fx).abs() <= 1e-6 * (1.0 + g.x.abs()));
            prop_assert!((g.y - fy).abs() <= 1e-6 * (1.0 + g.y.abs()));
        }
    }
}
