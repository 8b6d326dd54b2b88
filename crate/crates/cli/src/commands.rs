use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use pilotwave::integrator::TabulatedPast;
use pilotwave::model::{verify_assumptions, GridSpec};
use pilotwave::stats::{
    burn_in_start, energy_moments, ensemble_energy_moments, linear_fit_hac, newey_west_lag, pdf_l1_distance,
    peak_location, radial_pdf, seed_ensemble, structure_function, RadialPdf,
};
use pilotwave::{
    couple_simulate, simulate, solve_orbit, Dim, InitialPast64, Model64, SimConfig64, Trajectory64, Vector,
};

use crate::config::{PastSpec, PastVariant, RunConfig};
use crate::failure::Failure;

type Outcome = Result<(), Failure>;

struct Outputs {
    dir: PathBuf,
    prefix: String,
}

impl Outputs {
    /// Creates the output directory and records the resolved configuration
    /// next to the data as `<prefix>_config.toml`.
    fn new(cfg: &RunConfig) -> Result<Self, Failure> {
        fs::create_dir_all(&cfg.output_dir).map_err(|e| Failure::io(&cfg.output_dir, e))?;
        let path = cfg.output_dir.join(format!("{}_config.toml", cfg.output_prefix));
        fs::write(&path, cfg.to_toml()).map_err(|e| Failure::io(&path, e))?;
        Ok(Self {
            dir: cfg.output_dir.clone(),
            prefix: cfg.output_prefix.clone(),
        })
    }

    /// Writes `<dir>/<prefix>_<name>.csv` in one go and reports the path.
    fn write(&self, name: &str, body: impl FnOnce(&mut BufWriter<File>) -> pilotwave::Result<()>) -> Outcome {
        let path = self.dir.join(format!("{}_{name}.csv", self.prefix));
        let file = File::create(&path).map_err(|e| Failure::io(&path, e))?;
        let mut w = BufWriter::new(file);
        body(&mut w).map_err(|e| Failure::io(&path, e))?;
        w.flush().map_err(|e| Failure::io(&path, e))?;
        eprintln!("wrote {}", path.display());
        Ok(())
    }
}

fn read_trajectory(path: &Path) -> Result<Trajectory64, Failure> {
    let file = File::open(path).map_err(|e| Failure::io(path, e))?;
    Trajectory64::read_csv(io::BufReader::new(file)).map_err(|e| Failure::io(path, e))
}

/// The memory-window bound and timing of a finished run, on stderr.
fn report_run(label: &str, traj: &Trajectory64, elapsed: Duration) {
    if let Some(t) = &traj.meta.truncation {
        eprintln!(
            "{label}: memory window {} truncation bound {:.3e} (observed sup|H| {:.4}; worst case {:.3e})",
            t.horizon, t.bound, t.h_sup_observed, t.certified_bound
        );
    }
    eprintln!("{label}: {} samples to t = {} in {:.2} s", traj.len(), traj.span(), elapsed.as_secs_f64());
}

fn run_simulation(label: &str, sim: &SimConfig64) -> Result<Trajectory64, Failure> {
    let start = Instant::now();
    let traj = simulate(sim)?;
    report_run(label, &traj, start.elapsed());
    Ok(traj)
}

fn build_past(spec: &PastSpec, cfg: &RunConfig, sim: &SimConfig64, anchor: Option<&InitialPast64>) -> Result<InitialPast64, Failure> {
    let planar = sim.model.params.dim == Dim::Two;
    Ok(match spec.variant {
        PastVariant::Zero => InitialPast64::Zero,
        PastVariant::Constant => {
            let x = spec.x.unwrap_or(0.0);
            let y = spec.y.unwrap_or(0.0);
            InitialPast64::Constant(if planar { Vector::new(x, y) } else { Vector::scalar(x) })
        }
        PastVariant::Tabulated => {
            let path = spec.file.as_deref().expect("validated: tabulated past has a file");
            let table = read_trajectory(path)?;
            if table.dim != sim.model.params.dim {
                return Err(Failure::Config(format!(
                    "{}: past is {}-dimensional but model.dim = {}",
                    path.display(),
                    table.dim.count(),
                    sim.model.params.dim.count()
                )));
            }
            InitialPast64::Tabulated(TabulatedPast::new(
                table.times,
                table.positions,
                table.velocities,
                spec.extension,
            )?)
        }
        PastVariant::Orbital => match (spec.r0, spec.omega) {
            (Some(r0), Some(omega)) => InitialPast64::Orbital { r0, omega },
            _ => {
                let found = solve_orbit(&sim.model, &cfg.orbit)?;
                let orbit = found.first().ok_or_else(|| {
                    Failure::Config("orbital past requested but the model has no circular orbit in the scan".into())
                })?;
                eprintln!("orbit: r0 = {}, omega = {}", orbit.r0, orbit.omega);
                orbit.past()
            }
        },
        PastVariant::AnchoredZero => {
            let (x, v) = anchor.map_or((Vector::zero(), Vector::zero()), |a| a.anchor());
            InitialPast64::anchored_zero(x, v, sim.dt)?
        }
    })
}

fn sim_with_past(cfg: &RunConfig) -> Result<SimConfig64, Failure> {
    let sim = cfg.sim_config()?;
    let past = build_past(&cfg.past, cfg, &sim, None)?;
    Ok(sim.with_past(past))
}

/// Histogram range: the configured one, else twice the orbit radius, else
/// a little beyond the largest radius in the run.
fn histogram_range(cfg: &RunConfig, model: &Model64, trajs: &[&Trajectory64]) -> Result<f64, Failure> {
    if let Some(r) = cfg.stats.r_max {
        return Ok(r);
    }
    if model.params.dim == Dim::Two && model.params.alpha > 0.0 {
        if let Some(orbit) = solve_orbit(model, &cfg.orbit)?.first() {
            eprintln!("orbit: r0 = {}, omega = {}", orbit.r0, orbit.omega);
            return Ok(2.0 * orbit.r0);
        }
    }
    let largest = trajs
        .iter()
        .flat_map(|t| t.positions.iter().map(|x| x.norm()))
        .fold(0.0, f64::max);
    Ok(if largest > 0.0 { 1.05 * largest } else { 1.0 })
}

fn describe_pdf(label: &str, pdf: &RadialPdf<f64>) {
    let (mean, std) = pdf.mean_std();
    let peak = peak_location(pdf).map_or_else(|e| e.to_string(), |p| p.to_string());
    eprintln!(
        "{label}: peak r = {peak}, {} prominent mode(s), mean {mean:.5}, std {std:.5}, {} of {} samples beyond the last edge",
        pdf.prominent_modes(2, 0.1),
        pdf.outside_count,
        pdf.sample_count
    );
}

pub fn simulate_cmd(cfg: &RunConfig) -> Outcome {
    let sim = sim_with_past(cfg)?;
    let traj = run_simulation("simulate", &sim)?;
    Outputs::new(cfg)?.write("trajectory", |w| traj.write_csv(w))
}

pub fn orbit(cfg: &RunConfig) -> Outcome {
    let model = cfg.model()?;
    let start = Instant::now();
    let found = solve_orbit(&model, &cfg.orbit)?;
    eprintln!("orbit: {} solution(s) in {:.2} s", found.len(), start.elapsed().as_secs_f64());
    let mut text = String::from("r0,omega,residual\n");
    for s in &found {
        text.push_str(&format!("{},{},{}\n", s.r0, s.omega, s.residual_norm));
    }
    print!("{text}");
    Outputs::new(cfg)?.write("orbit", |w| Ok(w.write_all(text.as_bytes())?))
}

pub fn pdf(cfg: &RunConfig, input: Option<&Path>) -> Outcome {
    let model = cfg.model()?;
    let traj = match input {
        Some(path) => read_trajectory(path)?,
        None => run_simulation("simulate", &sim_with_past(cfg)?)?,
    };
    let r_max = histogram_range(cfg, &model, &[&traj])?;
    let pdf = radial_pdf(&traj, cfg.stats.burn_in, cfg.stats.bins as usize, r_max)?;
    describe_pdf("pdf", &pdf);
    Outputs::new(cfg)?.write("pdf", |w| pdf.write_csv(w))
}

pub fn moments(cfg: &RunConfig, input: Option<&Path>) -> Outcome {
    let model = cfg.model()?;
    let p = cfg.stats.p;
    let (series, traj) = match input {
        Some(path) => {
            let traj = read_trajectory(path)?;
            (energy_moments(std::slice::from_ref(&traj), &model.potential, p)?, traj)
        }
        None => {
            let base = sim_with_past(cfg)?;
            let start = Instant::now();
            let members = seed_ensemble(&base, cfg.stats.ensemble as usize);
            let series = ensemble_energy_moments(&members, p)?;
            eprintln!(
                "moments: {} members to t = {} in {:.2} s",
                series.ensemble_size,
                base.t_max,
                start.elapsed().as_secs_f64()
            );
            // the structure function is measured on the first member
            (series, run_simulation("member 0", &base)?)
        }
    };

    let first = series.times.partition_point(|&t| t < cfg.stats.burn_in * traj.span());
    let (t, phi) = (&series.times[first..], &series.mean_phi[first..]);
    if let Ok(fit) = linear_fit_hac(t, phi, newey_west_lag(t.len())) {
        let (lo, hi) = fit.slope_ci95();
        eprintln!("moments: trend of E[Phi] after burn-in {:.3e} (95% CI {lo:.3e} .. {hi:.3e})", fit.slope);
    }
    let sup_p = series.mean_phi_p.iter().copied().fold(0.0, f64::max);
    let exp_finite = series.mean_exp_phi.iter().all(|v| v.is_finite());
    eprintln!("moments: max E[Phi^{p}] = {sup_p:.5}, exponential moment finite: {exp_finite}");

    let spacing = traj
        .sample_spacing()
        .ok_or_else(|| Failure::Config("trajectory has fewer than two samples".into()))?;
    let lags = cfg
        .stats
        .lags
        .clone()
        .unwrap_or_else(|| [1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|m| m * spacing).collect());
    let (skip, _) = burn_in_start(&traj, cfg.stats.burn_in)?;
    let mut settled = traj.clone();
    settled.times.drain(..skip);
    settled.positions.drain(..skip);
    settled.velocities.drain(..skip);
    let sf = structure_function(&settled, &lags, 4)?;
    let slope = |s: Option<f64>| s.map_or_else(|| "undefined".to_string(), |v| format!("{v:.4}"));
    eprintln!("structure: slope_x = {}, slope_v = {}", slope(sf.slope_x), slope(sf.slope_v));

    let out = Outputs::new(cfg)?;
    out.write("moments", |w| series.write_csv(w))?;
    out.write("structure", |w| sf.write_csv(w))
}

pub fn couple(cfg: &RunConfig) -> Outcome {
    let sim = cfg.sim_config()?;
    let past_a = build_past(&cfg.past, cfg, &sim, None)?;
    let past_b = build_past(&cfg.couple_past_b, cfg, &sim, Some(&past_a))?;
    let start = Instant::now();
    let (a, b) = couple_simulate(&sim, past_a, past_b)?;
    let elapsed = start.elapsed();
    report_run("couple a", &a, elapsed);
    report_run("couple b", &b, elapsed);

    let gap = |i: usize| (a.positions[i] - b.positions[i]).norm();
    let last = a.len() - 1;
    let late = (a.len() / 2..a.len()).map(gap).fold(0.0, f64::max);
    eprintln!("couple: |x_a - x_b| = {:.3e} at the end, at most {late:.3e} over the second half", gap(last));
    let model = &sim.model;
    let r_max = histogram_range(cfg, model, &[&a, &b])?;
    let bins = cfg.stats.bins as usize;
    let pa = radial_pdf(&a, cfg.stats.burn_in, bins, r_max)?;
    let pb = radial_pdf(&b, cfg.stats.burn_in, bins, r_max)?;
    eprintln!("couple: L1 distance between radial densities {:.4}", pdf_l1_distance(&pa, &pb)?);

    let out = Outputs::new(cfg)?;
    out.write("couple_a", |w| a.write_csv(w))?;
    out.write("couple_b", |w| b.write_csv(w))
}

pub fn verify(cfg: &RunConfig) -> Outcome {
    let model = cfg.model()?;
    let report = verify_assumptions(&model, &GridSpec::default());
    print!("{report}");
    if report.all_ok() {
        Ok(())
    } else {
        Err(Failure::Assumption)
    }
}
