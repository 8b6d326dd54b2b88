use std::io::Write;

use rayon::prelude::*;

use super::order_free_sum;
use crate::integrator::{simulate, SimConfig, Trajectory};
use crate::model::{energy_phi, Potential};
use crate::{Error, Result, Scalar};

/// `beta` of the exponential moment `E exp(beta Phi)` that is tracked.
pub const EXP_MOMENT_BETA: f64 = 0.01;

/// Ensemble means of the energy `Phi = U(x) + |v|^2/2` on the output grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSeries<T> {
    pub times: Vec<T>,
    pub mean_phi: Vec<T>,
    pub mean_phi_p: Vec<T>,
    /// Mean of `exp(EXP_MOMENT_BETA * Phi)`.
    pub mean_exp_phi: Vec<T>,
    pub p: T,
    pub ensemble_size: usize,
}

impl<T: Scalar> MomentSeries<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `t,mean_phi,mean_phi_p` rows under a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,mean_phi,mean_phi_p")?;
        for i in 0..self.len() {
            writeln!(out, "{},{},{}", self.times[i], self.mean_phi[i], self.mean_phi_p[i])?;
        }
        Ok(())
    }
}

/// `n` copies of `base` with seeds `base.seed, base.seed + 1, ...`.
pub fn seed_ensemble<T: Scalar>(base: &SimConfig<T>, n: usize) -> Vec<SimConfig<T>> {
    (0..n)
        .map(|i| base.clone().with_seed(base.seed.wrapping_add(i as u64)))
        .collect()
}

/// Runs every member (in parallel) and averages `Phi`, `Phi^p` and
/// `exp(beta Phi)` across them at each output time. The result does not
/// depend on the order of `configs`.
pub fn ensemble_energy_moments<T: Scalar>(configs: &[SimConfig<T>], p: T) -> Result<MomentSeries<T>> {
    if configs.len() < 2 {
        return Err(Error::config("stats.ensemble", "need at least 2 members"));
    }
    if !(p > T::zero() && p.is_finite()) {
        return Err(Error::config("stats.p", "must be finite and > 0"));
    }
    let first = &configs[0];
    if configs
        .iter()
        .any(|c| c.dt != first.dt || c.t_max != first.t_max || c.stride != first.stride)
    {
        return Err(Error::Precondition("ensemble members must share dt, t_max and stride".into()));
    }
    let members: Vec<Member<T>> = configs
        .par_iter()
        .enumerate()
        .map(|(member, cfg)| {
            let traj = simulate(cfg).map_err(|e| Error::EnsembleMember {
                member,
                source: Box::new(e),
            })?;
            Ok(energy_values(&traj, &cfg.model.potential, p))
        })
        .collect::<Result<_>>()?;
    Ok(aggregate(members, p))
}

/// The same statistics over trajectories that already exist. They must share
/// their output times; a single trajectory gives the time series of `Phi`.
pub fn energy_moments<T: Scalar>(trajs: &[Trajectory<T>], potential: &Potential<T>, p: T) -> Result<MomentSeries<T>> {
    let Some(first) = trajs.first() else {
        return Err(Error::Precondition("no trajectories".into()));
    };
    if !(p > T::zero() && p.is_finite()) {
        return Err(Error::config("stats.p", "must be finite and > 0"));
    }
    if trajs.iter().any(|t| t.times != first.times) {
        return Err(Error::Precondition("trajectories must share their output times".into()));
    }
    let members = trajs.iter().map(|t| energy_values(t, potential, p)).collect();
    Ok(aggregate(members, p))
}

type Member<T> = (Vec<T>, Vec<[T; 3]>);

fn energy_values<T: Scalar>(traj: &Trajectory<T>, u: &Potential<T>, p: T) -> Member<T> {
    let beta = T::lit(EXP_MOMENT_BETA);
    let values = traj
        .positions
        .iter()
        .zip(&traj.velocities)
        .map(|(&x, &v)| {
            let phi = energy_phi(u, x, v);
            [phi, phi.powf(p), (beta * phi).exp()]
        })
        .collect();
    (traj.times.clone(), values)
}

fn aggregate<T: Scalar>(members: Vec<Member<T>>, p: T) -> MomentSeries<T> {
    let times = members[0].0.clone();
    let n = T::of_usize(members.len());
    let mut means = [Vec::new(), Vec::new(), Vec::new()];
    let mut column = Vec::with_capacity(members.len());
    for i in 0..times.len() {
        for (k, mean) in means.iter_mut().enumerate() {
            column.clear();
            column.extend(members.iter().map(|m| m.1[i][k]));
            mean.push(order_free_sum(&mut column) / n);
        }
    }
    let [mean_phi, mean_phi_p, mean_exp_phi] = means;
    MomentSeries {
        times,
        mean_phi,
        mean_phi_p,
        mean_exp_phi,
        p,
        ensemble_size: members.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Dim, Model, ModelParams};

    fn line_model(alpha: f64, sigma: f64) -> Model<f64> {
        Model::new(ModelParams {
            alpha,
            sigma,
            dim: Dim::One,
            ..ModelParams::reference()
        })
        .unwrap()
    }

    #[test]
    fn quiet_memoryless_ensemble_stays_at_rest() {
        let base = SimConfig::new(line_model(0.0, 0.0), 1.0 / 64.0, 2.0).with_stride(8);
        let m = ensemble_energy_moments(&seed_ensemble(&base, 4), 2.0).unwrap();
        assert_eq!(m.len(), 17);
        assert!(m.mean_phi.iter().chain(&m.mean_phi_p).all(|&v| v == 0.0));
        assert!(m.mean_exp_phi.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn member_order_does_not_matter() {
        let base = SimConfig::new(Model::<f64>::reference(), 1.0 / 64.0, 4.0).with_stride(4).with_seed(11);
        let forward = seed_ensemble(&base, 5);
        let mut backward = forward.clone();
        backward.reverse();
        backward.swap(1, 3);
        let a = ensemble_energy_moments(&forward, 2.0).unwrap();
        let b = ensemble_energy_moments(&backward, 2.0).unwrap();
        assert_eq!(a, b);
        assert!(a.mean_phi.iter().all(|v| v.is_finite() && *v >= 0.0));
    }

    #[test]
    fn stored_trajectories_give_the_ensemble_statistics() {
        let base = SimConfig::new(Model::<f64>::reference(), 1.0 / 64.0, 2.0).with_stride(8).with_seed(3);
        let configs = seed_ensemble(&base, 3);
        let trajs: Vec<_> = configs.iter().map(|c| simulate(c).unwrap()).collect();
        let stored = energy_moments(&trajs, &base.model.potential, 1.5).unwrap();
        assert_eq!(stored, ensemble_energy_moments(&configs, 1.5).unwrap());

        let single = energy_moments(&trajs[..1], &base.model.potential, 1.5).unwrap();
        let (x, v) = (trajs[0].positions[5], trajs[0].velocities[5]);
        assert_eq!(single.mean_phi[5], energy_phi(&base.model.potential, x, v));
        assert!(energy_moments(&trajs[..0], &base.model.potential, 1.5).is_err());
    }

    #[test]
    fn gibbs_energy_is_reached() {
        // Stationary density exp(-(2/s^2)(U + kappa v^2/2)):
        // E[Phi] = (k/2) s^2/(2k) + (1/2) s^2/(2 kappa) = s^2 (1 + 1/kappa) / 4.
        let sigma = 0.08;
        let want = sigma * sigma * (1.0 + 1.0 / 0.42) / 4.0;
        let base = SimConfig::new(line_model(0.0, sigma), 1.0 / 64.0, 60.0).with_stride(64);
        let m = ensemble_energy_moments(&seed_ensemble(&base, 200), 1.0).unwrap();
        let tail = &m.mean_phi[30..];
        let got = tail.iter().sum::<f64>() / tail.len() as f64;
        assert!((got - want).abs() < 0.06 * want, "{got} vs {want}");
        assert_eq!(m.mean_phi, m.mean_phi_p);
    }

    #[test]
    fn failures_name_the_member() {
        let base = SimConfig::new(line_model(0.0, 0.0), 1.0 / 64.0, 1.0);
        let mut configs = seed_ensemble(&base, 3);
        configs[2] = configs[2].clone().with_stride(3);
        assert!(matches!(ensemble_energy_moments(&configs, 1.0), Err(Error::Precondition(_))));
        let mut configs = seed_ensemble(&base, 3);
        configs[1].model.params.kappa = 1e-30;
        configs[1].model.params.sigma = 1e30;
        let err = ensemble_energy_moments(&configs, 1.0).unwrap_err();
        assert!(matches!(err, Error::EnsembleMember { member: 1, .. }), "{err}");
        assert!(ensemble_energy_moments(&configs[..1], 1.0).is_err());
    }
}
