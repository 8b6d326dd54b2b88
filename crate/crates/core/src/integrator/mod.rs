//! Euler–Maruyama integration of the walker equation with a trapezoidal,
//! exponentially truncated memory force.
//!
//! At step `n` (time `t = n dt`) the memory force is
//!
//! ```text
//! T_n = sum_j w_j H(x_n - x_j) K(t - t_j)          (trapezoid on the step grid,
//!                                                  window [t - T_w, t])
//!     + H(x_n - c) int_{-inf}^{t_old} K(t - s) ds  (while the window still
//!                                                  reaches a constant past c)
//! ```
//!
//! and the update is
//!
//! ```text
//! x_{n+1} = x_n + v_n dt
//! v_{n+1} = v_n + (dt/kappa) (-v_n - U'(x_n) + alpha T_n) + (sigma/kappa) sqrt(dt) Z_n
//! ```
//!
//! with independent standard normal `Z_n` per coordinate, drawn x then y.

mod history;
mod past;
mod rng;
mod trajectory;

pub use history::HistoryBuffer;
pub use past::{Extension, InitialPast, TabulatedPast};
pub use rng::{BrownianNoise, NoiseStream};
pub use trajectory::{Trajectory, TrajectoryMeta, TruncationReport};

use crate::model::{Dim, ForceTable, Kernel, Model};
use crate::{Error, Result, Scalar, Vector};

/// Kernel tail mass targeted by the default memory window.
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;

/// Position and velocity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State<T> {
    pub x: Vector<T>,
    pub v: Vector<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<T> {
    pub model: Model<T>,
    pub dt: T,
    pub t_max: T,
    pub seed: u64,
    /// Noise stream of this trajectory within the seed's family.
    pub stream: u64,
    /// Memory window `T_w`.
    pub horizon: T,
    pub past: InitialPast<T>,
    /// Output every `stride` steps.
    pub stride: usize,
    /// Drive the run with the Brownian path of the run with step
    /// `dt 2^noise_refinement`, refined by bridges (see [`BrownianNoise`]).
    pub noise_refinement: u32,
}

impl<T: Scalar> SimConfig<T> {
    /// Zero past, seed 0, unit stride and the memory window whose kernel tail
    /// is below [`DEFAULT_TAIL_TOL`], rounded up to a whole time unit.
    pub fn new(model: Model<T>, dt: T, t_max: T) -> Self {
        let horizon = default_horizon(&model.kernel, T::lit(DEFAULT_TAIL_TOL));
        Self {
            model,
            dt,
            t_max,
            seed: 0,
            stream: 0,
            horizon,
            past: InitialPast::Zero,
            stride: 1,
            noise_refinement: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn with_horizon(mut self, horizon: T) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_past(mut self, past: InitialPast<T>) -> Self {
        self.past = past;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn with_noise_refinement(mut self, levels: u32) -> Self {
        self.noise_refinement = levels;
        self
    }

    /// Number of integration steps.
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::config("sim.dt", "must be finite and > 0"));
        }
        if !(self.t_max > T::zero()) || !self.t_max.is_finite() {
            return Err(Error::config("sim.t_max", "must be finite and > 0"));
        }
        let ratio = self.t_max / self.dt;
        let steps = ratio.round();
        if (ratio - steps).abs() > T::lit(1e-6) {
            return Err(Error::config("sim.t_max", "must be a whole number of steps"));
        }
        steps
            .to_usize()
            .ok_or_else(|| Error::config("sim.t_max", "too many steps"))
    }

    /// Steps spanned by the memory window, `ceil(T_w / dt)`.
    pub fn window_steps(&self) -> usize {
        let exact = self.horizon / self.dt;
        let w = (exact - T::lit(1e-9)).ceil();
        w.to_usize().unwrap_or(1).max(1)
    }

    pub fn validate(&self) -> Result<usize> {
        self.model.validate()?;
        let steps = self.steps()?;
        if self.stride == 0 || steps % self.stride != 0 {
            return Err(Error::config("sim.stride", "must divide the number of steps"));
        }
        if self.noise_refinement > 16 {
            return Err(Error::config("sim.noise_refinement", "at most 16 bridge levels"));
        }
        let min_horizon = T::lit(10.0) / self.model.kernel.decay_rate();
        if !(self.horizon >= min_horizon * (T::one() - T::lit(1e-12))) || !self.horizon.is_finite() {
            return Err(Error::config(
                "sim.truncation_horizon",
                format!("must be at least 10/delta = {min_horizon}"),
            ));
        }
        let planar = self.model.params.dim == Dim::Two;
        match &self.past {
            InitialPast::Orbital { r0, omega } => {
                if !planar {
                    return Err(Error::config("past.variant", "orbital past needs dim = 2"));
                }
                if !(*r0 >= T::zero()) || !omega.is_finite() {
                    return Err(Error::config("past.r0", "orbit must have r0 >= 0 and finite omega"));
                }
            }
            InitialPast::Constant(c) => {
                if !c.is_finite() || (!planar && c.y != T::zero()) {
                    return Err(Error::config("past.y", "constant past must be finite and lie on the line"));
                }
            }
            InitialPast::Tabulated(tab) => {
                let off_line = tab
                    .positions()
                    .iter()
                    .chain(tab.velocities())
                    .any(|p| p.y != T::zero());
                if !planar && off_line {
                    return Err(Error::config("past", "one-dimensional past has y components"));
                }
            }
            InitialPast::Zero => {}
        }
        Ok(steps)
    }
}

/// `ceil` of the horizon at which `int_T^inf K <= tol`.
pub fn default_horizon<T: Scalar>(kernel: &Kernel<T>, tail_tol: T) -> T {
    kernel.horizon_for_tail(tail_tol).ceil()
}

/// Upper bound `h_sup * int_{T_w}^inf K(s) ds` on the neglected memory force.
pub fn window_error_bound<T: Scalar>(horizon: T, h_sup: T, kernel: &Kernel<T>) -> T {
    h_sup * kernel.tail_mass(horizon)
}

/// Evaluates the memory integral over a [`HistoryBuffer`].
#[derive(Debug, Clone)]
pub struct MemoryForce<T> {
    table: ForceTable<T>,
    /// `weights[j] = dt K((W - j) dt)`, aligned with a full window, oldest first
    weights: Vec<T>,
    kernel: Kernel<T>,
    dt: T,
    tail: Option<Vector<T>>,
    planar: bool,
}

impl<T: Scalar> MemoryForce<T> {
    /// `tail` is the constant value of the past beyond the oldest sample
    /// pushed into the history, if the window can reach there.
    pub fn new(model: &Model<T>, dt: T, window_steps: usize, tail: Option<Vector<T>>) -> Self {
        let planar = model.params.dim == Dim::Two;
        let reach = if planar { T::lit(8.0) } else { T::lit(40.0) };
        let weights = (0..=window_steps)
            .map(|j| dt * model.kernel.value(T::of_usize(window_steps - j) * dt))
            .collect();
        Self {
            table: ForceTable::new(model.force, reach),
            weights,
            kernel: model.kernel,
            dt,
            tail,
            planar,
        }
    }

    /// Full memory force at the newest history entry.
    pub fn evaluate(&self, history: &HistoryBuffer<T>) -> Result<Vector<T>> {
        let current = history
            .newest()
            .ok_or_else(|| Error::Precondition("memory force of an empty history".into()))?;
        let mut total = self.window_sum(history, current);
        if !history.is_full() {
            let elapsed = T::of_usize(history.len() - 1) * self.dt;
            total += self.past_contribution(current, elapsed);
        }
        Ok(total)
    }

    /// Trapezoid rule over the live window.
    #[inline]
    pub fn window_sum(&self, history: &HistoryBuffer<T>, current: Vector<T>) -> Vector<T> {
        let (xs, ys) = history.window();
        let n = xs.len();
        if n < 2 {
            return Vector::zero();
        }
        let w = &self.weights[self.weights.len() - n..];
        let table = &self.table;
        let (mut fx, mut fy) = (T::zero(), T::zero());
        if self.planar {
            for ((&x, &y), &wk) in xs.iter().zip(ys).zip(w) {
                let dx = current.x - x;
                let dy = current.y - y;
                let c = table.coefficient(dx * dx + dy * dy) * wk;
                fx += c * dx;
                fy += c * dy;
            }
        } else {
            for (&x, &wk) in xs.iter().zip(w) {
                let dx = current.x - x;
                fx += table.coefficient(dx * dx) * wk * dx;
            }
        }
        // trapezoid end weights: the oldest point counts half; the newest
        // contributes H(0) = 0 either way
        let oldest = Vector::new(xs[0], ys[0]);
        let end = table.eval(current - oldest) * (w[0] * T::lit(0.5));
        Vector::new(fx, fy) - end
    }

    /// `H(x - c) int_{-inf}^{t - elapsed} K(t - s) ds` for a constant tail `c`
    /// lying `elapsed` time units behind the present.
    pub fn past_contribution(&self, current: Vector<T>, elapsed: T) -> Vector<T> {
        match self.tail {
            Some(c) => self.table.force().value(current - c) * self.kernel.tail_mass(elapsed),
            None => Vector::zero(),
        }
    }

    pub fn table(&self) -> &ForceTable<T> {
        &self.table
    }
}

/// One Euler–Maruyama step given the memory force and the normal draws.
pub fn em_step<T: Scalar>(
    model: &Model<T>,
    dt: T,
    state: State<T>,
    memory: Vector<T>,
    noise: Vector<T>,
    step: u64,
) -> Result<State<T>> {
    let p = &model.params;
    let drift = -state.v - model.potential.grad(state.x) + memory * p.alpha;
    let x = state.x + state.v * dt;
    let v = state.v + drift * (dt / p.kappa) + noise * (p.sigma / p.kappa * dt.sqrt());
    if !(x.is_finite() && v.is_finite()) {
        return Err(Error::BlowUp { step });
    }
    Ok(State { x, v })
}

/// Step-by-step driver owning the history window and noise stream of one
/// trajectory.
#[derive(Debug, Clone)]
pub struct Integrator<T> {
    model: Model<T>,
    dt: T,
    history: HistoryBuffer<T>,
    memory: MemoryForce<T>,
    noise: BrownianNoise,
    state: State<T>,
    step: u64,
    h_sup_observed: T,
}

impl<T: Scalar> Integrator<T> {
    pub fn new(config: &SimConfig<T>) -> Result<Self> {
        config.validate()?;
        let window = config.window_steps();
        let (samples, tail) = config.past.grid_samples(config.dt, window)?;
        let mut history = HistoryBuffer::new(window, config.dt);
        for p in samples {
            history.push(p);
        }
        let (x, v) = config.past.anchor();
        Ok(Self {
            memory: MemoryForce::new(&config.model, config.dt, window, tail),
            model: config.model.clone(),
            dt: config.dt,
            history,
            noise: BrownianNoise::new(
                config.seed,
                config.stream,
                config.model.params.dim.count() as usize,
                config.noise_refinement,
            ),
            state: State { x, v },
            step: 0,
            h_sup_observed: T::zero(),
        })
    }

    pub fn state(&self) -> State<T> {
        self.state
    }

    pub fn time(&self) -> T {
        T::of_usize(self.step as usize) * self.dt
    }

    pub fn history(&self) -> &HistoryBuffer<T> {
        &self.history
    }

    /// Memory force at the current step (without the `alpha` factor).
    pub fn memory_force(&self) -> Result<Vector<T>> {
        self.memory.evaluate(&self.history)
    }

    pub fn advance(&mut self) -> Result<State<T>> {
        let memory = if self.model.params.alpha != T::zero() {
            if self.history.is_full() {
                let far = self.history.oldest().expect("full window");
                let h = self.memory.table().eval(self.state.x - far).norm();
                if h > self.h_sup_observed {
                    self.h_sup_observed = h;
                }
            }
            self.memory.evaluate(&self.history)?
        } else {
            Vector::zero()
        };
        let [zx, zy] = self.noise.step();
        let noise = match self.model.params.dim {
            Dim::One => Vector::scalar(T::lit(zx)),
            Dim::Two => Vector::new(T::lit(zx), T::lit(zy)),
        };
        self.step += 1;
        self.state = em_step(&self.model, self.dt, self.state, memory, noise, self.step)?;
        self.history.push(self.state.x);
        Ok(self.state)
    }

    pub fn truncation_report(&self) -> TruncationReport<T> {
        let horizon = self.history.span();
        let kernel = &self.model.kernel;
        TruncationReport {
            horizon,
            h_sup_observed: self.h_sup_observed,
            bound: window_error_bound(horizon, self.h_sup_observed, kernel),
            certified_bound: window_error_bound(horizon, self.model.force.sup_norm(), kernel),
        }
    }
}

/// Runs one trajectory. Deterministic in `config`, seed and stream included.
pub fn simulate<T: Scalar>(config: &SimConfig<T>) -> Result<Trajectory<T>> {
    let steps = config.validate()?;
    let mut integrator = Integrator::new(config)?;
    let meta = TrajectoryMeta {
        seed: config.seed,
        stream: config.stream,
        dt: config.dt,
        params: Some(config.model.params),
        truncation: None,
    };
    let mut traj = Trajectory::with_capacity(config.model.params.dim, steps / config.stride + 1, meta);
    let s0 = integrator.state();
    traj.push(T::zero(), s0.x, s0.v);
    for n in 1..=steps {
        let s = integrator.advance()?;
        if n % config.stride == 0 {
            traj.push(T::of_usize(n) * config.dt, s.x, s.v);
        }
    }
    traj.meta.truncation = Some(integrator.truncation_report());
    Ok(traj)
}

/// Two runs sharing one noise sequence, differing only in their pasts,
/// which must agree at `s = 0`.
pub fn couple_simulate<T: Scalar>(
    config: &SimConfig<T>,
    past_a: InitialPast<T>,
    past_b: InitialPast<T>,
) -> Result<(Trajectory<T>, Trajectory<T>)> {
    let (xa, va) = past_a.anchor();
    let (xb, vb) = past_b.anchor();
    if xa != xb || va != vb {
        return Err(Error::Precondition(format!(
            "coupled pasts must agree at s = 0: ({xa:?}, {va:?}) vs ({xb:?}, {vb:?})"
        )));
    }
    let a = simulate(&config.clone().with_past(past_a))?;
    let b = simulate(&config.clone().with_past(past_b))?;
    Ok((a, b))
}
