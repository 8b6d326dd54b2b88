//! Model ingredients: memory kernel, pilot-wave force, confining potential,
//! the energy functionals built from them, and a numerical checker for the
//! structural hypotheses they are expected to satisfy.

pub mod bessel;
mod energy;
mod force;
mod kernel;
mod potential;
mod verify;

pub use bessel::{bessel_j0, bessel_j1, bessel_j1_prime};
pub use energy::{energy_phi, growth_seminorm, perturbed_energy, weighted_path_norm};
pub use force::{ForceFamily, ForceTable, WaveForce};
pub use kernel::Kernel;
pub use potential::{Potential, PotentialFamily, VerifierConstants};
pub use verify::{verify_assumptions, AssumptionReport, Check, GridSpec};

use crate::{Error, Result, Scalar};

/// Spatial dimension of the walker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn from_count(n: u32) -> Result<Self> {
        match n {
            1 => Ok(Dim::One),
            2 => Ok(Dim::Two),
            _ => Err(Error::config("model.dim", format!("must be 1 or 2, got {n}"))),
        }
    }

    pub fn count(self) -> u32 {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }
}

/// Physical constants of the trajectory equation
/// `kappa dv = (-v - U'(x) + alpha * memory) dt + sigma dW`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    /// Dimensionless droplet mass.
    pub kappa: T,
    /// Pilot-wave force coefficient.
    pub alpha: T,
    /// Noise strength.
    pub sigma: T,
    /// Harmonic spring constant.
    pub spring_k: T,
    pub dim: Dim,
}

impl<T: Scalar> ModelParams<T> {
    /// Parameters of the reference two-dimensional experiment.
    pub fn reference() -> Self {
        Self {
            kappa: T::lit(0.42),
            alpha: T::lit(4.47),
            sigma: T::lit(0.08),
            spring_k: T::lit(0.35),
            dim: Dim::Two,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > T::zero()) || !self.kappa.is_finite() {
            return Err(Error::config("model.kappa", "must be finite and > 0"));
        }
        if !(self.alpha >= T::zero()) || !self.alpha.is_finite() {
            return Err(Error::config("model.alpha", "must be finite and >= 0"));
        }
        if !(self.sigma >= T::zero()) || !self.sigma.is_finite() {
            return Err(Error::config("model.sigma", "must be finite and >= 0"));
        }
        if !(self.spring_k >= T::zero()) || !self.spring_k.is_finite() {
            return Err(Error::config("model.spring_k", "must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Everything the integrator needs to evaluate the drift.
#[derive(Debug, Clone, PartialEq)]
pub struct Model<T> {
    pub params: ModelParams<T>,
    pub kernel: Kernel<T>,
    pub force: WaveForce<T>,
    pub potential: Potential<T>,
}

impl<T: Scalar> Model<T> {
    /// Unit exponential kernel, Bessel wave force of the matching dimension
    /// and a harmonic potential with `params.spring_k`.
    pub fn new(params: ModelParams<T>) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            kernel: Kernel::exponential(T::one(), T::one())?,
            force: WaveForce::bessel(params.dim),
            potential: Potential::harmonic(params.spring_k),
        })
    }

    pub fn reference() -> Self {
        Self::new(ModelParams::reference()).expect("reference parameters are valid")
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.force.dim() != self.params.dim {
            return Err(Error::config(
                "model.force.family",
                format!("{:?} does not act in dimension {}", self.force.family, self.params.dim.count()),
            ));
        }
        if self.potential.spring_k != self.params.spring_k {
            return Err(Error::config("model.spring_k", "potential and parameters disagree"));
        }
        Ok(())
    }

    pub fn with_sigma(mut self, sigma: T) -> Self {
        self.params.sigma = sigma;
        self
    }

    pub fn with_alpha(mut self, alpha: T) -> Self {
        self.params.alpha = alpha;
        self
    }
}
