//! Simulation and analysis of a walking droplet driven by its own pilot
//! wave: a stochastic equation whose force integrates the whole past path
//! against an exponentially decaying kernel.
//!
//! Numerical code is generic over [`Scalar`] (`f32`, `f64`); the aliases at
//! the crate root fix the usual double-precision instances.

// `!(x > 0)` is how invalid input, NaN included, is rejected throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod integrator;
pub mod model;
pub mod orbit;
mod scalar;
pub mod stats;
mod vector;

pub use error::{Error, Result};
pub use integrator::{
    couple_simulate, em_step, simulate, window_error_bound, InitialPast, SimConfig, State, Trajectory,
};
pub use model::{Dim, Kernel, Model, ModelParams, Potential, WaveForce};
pub use orbit::{orbit_residual, orbital_past, solve_orbit, OrbitScan, OrbitSolution};
pub use scalar::Scalar;
pub use stats::{MomentSeries, RadialPdf};
pub use vector::Vector;

pub type Model64 = Model<f64>;
pub type ModelParams64 = ModelParams<f64>;
pub type SimConfig64 = SimConfig<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type InitialPast64 = InitialPast<f64>;
pub type OrbitSolution64 = OrbitSolution<f64>;
pub type RadialPdf64 = RadialPdf<f64>;
pub type MomentSeries64 = MomentSeries<f64>;

pub type Model32 = Model<f32>;
pub type SimConfig32 = SimConfig<f32>;
pub type Trajectory32 = Trajectory<f32>;
