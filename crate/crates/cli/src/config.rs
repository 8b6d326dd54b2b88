//! Run configuration: a flat set of dotted keys such as `model.kappa = 0.42`.
//!
//! Any TOML spelling of the same keys is accepted (`[model]` sections,
//! dotted keys, or a mix). Keys missing from a file fall back to the
//! embedded default; unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use pilotwave::integrator::{default_horizon, Extension};
use pilotwave::model::{ForceFamily, Kernel, PotentialFamily};
use pilotwave::{Dim, Model64, ModelParams64, OrbitScan, SimConfig64};
use toml::Value;

use crate::failure::Failure;

pub const DEFAULT_TOML: &str = include_str!("../../../configs/default.toml");

/// `sim.t_max` selected by `--full`.
pub const FULL_T_MAX: f64 = 1e5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PastVariant {
    Zero,
    Constant,
    Tabulated,
    Orbital,
    /// Only for the second coupled run: at rest at the origin, joined over
    /// one step to the first run's state at `s = 0`.
    AnchoredZero,
}

impl PastVariant {
    fn name(self) -> &'static str {
        match self {
            PastVariant::Zero => "zero",
            PastVariant::Constant => "constant",
            PastVariant::Tabulated => "tabulated",
            PastVariant::Orbital => "orbital",
            PastVariant::AnchoredZero => "anchored_zero",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Self::Zero, Self::Constant, Self::Tabulated, Self::Orbital, Self::AnchoredZero]
            .into_iter()
            .find(|v| v.name() == s)
    }
}

fn extension_name(e: Extension) -> &'static str {
    match e {
        Extension::None => "none",
        Extension::Zero => "zero",
        Extension::Constant => "constant",
    }
}

fn parse_extension(s: &str) -> Option<Extension> {
    [Extension::None, Extension::Zero, Extension::Constant]
        .into_iter()
        .find(|&e| extension_name(e) == s)
}

/// An initial past as written in the config. Orbital pasts without `r0`
/// and `omega` use the solver's orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct PastSpec {
    pub variant: PastVariant,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub r0: Option<f64>,
    pub omega: Option<f64>,
    pub file: Option<PathBuf>,
    pub extension: Extension,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSection {
    pub kappa: f64,
    pub alpha: f64,
    pub sigma: f64,
    pub spring_k: f64,
    pub dim: u64,
    pub kernel_delta: f64,
    pub kernel_amplitude: f64,
    pub force_family: String,
    pub potential_family: String,
    pub potential_shift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSection {
    pub dt: f64,
    pub t_max: f64,
    pub seed: u64,
    pub stream: u64,
    pub stride: u64,
    pub tail_tol: f64,
    /// Memory window; derived from `tail_tol` when absent.
    pub truncation_horizon: Option<f64>,
    pub noise_refinement: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsSection {
    pub burn_in: f64,
    pub bins: u64,
    /// Upper edge of the radial histogram; twice the orbit radius when absent.
    pub r_max: Option<f64>,
    pub ensemble: u64,
    pub p: f64,
    /// Structure-function lags; 1, 2, 4, 8, 16 output spacings when absent.
    pub lags: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelSection,
    pub sim: SimSection,
    pub past: PastSpec,
    pub couple_past_b: PastSpec,
    pub output_dir: PathBuf,
    pub output_prefix: String,
    pub stats: StatsSection,
    pub orbit: OrbitScan<f64>,
}

type Flat = BTreeMap<String, Value>;

fn flatten(prefix: &str, table: toml::Table, out: &mut Flat) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k } else { format!("{prefix}.{k}") };
        match v {
            Value::Table(t) => flatten(&key, t, out),
            other => {
                out.insert(key, other);
            }
        }
    }
}

fn parse_flat(text: &str, origin: &str) -> Result<Flat, Failure> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Failure::Config(format!("{origin}: {}", e.message())))?;
    let mut flat = Flat::new();
    flatten("", table, &mut flat);
    Ok(flat)
}

/// Reads `value` of a `--set key=value` override as a TOML value, falling
/// back to a bare string so that `--set past.variant=orbital` works.
pub fn parse_override(arg: &str) -> Result<(String, Value), Failure> {
    let (key, raw) = arg
        .split_once('=')
        .ok_or_else(|| Failure::Config(format!("--set expects key=value, got `{arg}`")))?;
    let key = key.trim().to_string();
    if key.is_empty() {
        return Err(Failure::Config(format!("--set expects key=value, got `{arg}`")));
    }
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));
    Ok((key, value))
}

/// Typed extraction from the flat map; every read removes the key so that
/// leftovers can be reported as unknown.
struct Reader(Flat);

impl Reader {
    fn take(&mut self, key: &str) -> Option<Value> {
        self.0.remove(key)
    }

    fn opt_float(&mut self, key: &str) -> Result<Option<f64>, Failure> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Float(f)) => Ok(Some(f)),
            Some(Value::Integer(i)) => Ok(Some(i as f64)),
            Some(other) => Err(Failure::key(key, format!("expected a number, got {other}"))),
        }
    }

    fn float(&mut self, key: &str) -> Result<f64, Failure> {
        self.opt_float(key)?.ok_or_else(|| Failure::key(key, "missing"))
    }

    fn uint(&mut self, key: &str) -> Result<u64, Failure> {
        match self.take(key) {
            None => Err(Failure::key(key, "missing")),
            Some(Value::Integer(i)) if i >= 0 => Ok(i as u64),
            Some(other) => Err(Failure::key(key, format!("expected a non-negative integer, got {other}"))),
        }
    }

    fn opt_string(&mut self, key: &str) -> Result<Option<String>, Failure> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(Failure::key(key, format!("expected a string, got {other}"))),
        }
    }

    fn string(&mut self, key: &str) -> Result<String, Failure> {
        self.opt_string(key)?.ok_or_else(|| Failure::key(key, "missing"))
    }

    fn opt_floats(&mut self, key: &str) -> Result<Option<Vec<f64>>, Failure> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .into_iter()
                .map(|v| match v {
                    Value::Float(f) => Ok(f),
                    Value::Integer(i) => Ok(i as f64),
                    other => Err(Failure::key(key, format!("expected numbers, got {other}"))),
                })
                .collect::<Result<_, _>>()
                .map(Some),
            Some(other) => Err(Failure::key(key, format!("expected an array of numbers, got {other}"))),
        }
    }

    fn past(&mut self, prefix: &str) -> Result<PastSpec, Failure> {
        let key = format!("{prefix}.variant");
        let name = self.string(&key)?;
        let variant = PastVariant::parse(&name).ok_or_else(|| {
            Failure::key(&key, format!("unknown variant `{name}` (zero, constant, tabulated, orbital, anchored_zero)"))
        })?;
        let key = format!("{prefix}.extension");
        let ext = self.opt_string(&key)?.unwrap_or_else(|| "none".into());
        let extension = parse_extension(&ext)
            .ok_or_else(|| Failure::key(&key, format!("unknown extension `{ext}` (none, zero, constant)")))?;
        Ok(PastSpec {
            variant,
            x: self.opt_float(&format!("{prefix}.x"))?,
            y: self.opt_float(&format!("{prefix}.y"))?,
            r0: self.opt_float(&format!("{prefix}.r0"))?,
            omega: self.opt_float(&format!("{prefix}.omega"))?,
            file: self.opt_string(&format!("{prefix}.file"))?.map(PathBuf::from),
            extension,
        })
    }
}

impl RunConfig {
    /// The embedded default configuration.
    #[cfg(test)]
    pub fn default_config() -> Self {
        Self::from_text(DEFAULT_TOML, "default config").expect("embedded default config is valid")
    }

    /// Parses `text` on top of the embedded defaults and validates the result.
    #[cfg(test)]
    pub fn from_text(text: &str, origin: &str) -> Result<Self, Failure> {
        Self::assemble(text, origin, &[])
    }

    /// Like [`RunConfig::from_text`], then applies overrides in order.
    pub fn assemble(text: &str, origin: &str, overrides: &[(String, Value)]) -> Result<Self, Failure> {
        let mut flat = parse_flat(DEFAULT_TOML, "default config")?;
        flat.extend(parse_flat(text, origin)?);
        for (k, v) in overrides {
            flat.insert(k.clone(), v.clone());
        }
        let cfg = Self::from_flat(flat)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn from_flat(flat: Flat) -> Result<Self, Failure> {
        let mut r = Reader(flat);
        let cfg = RunConfig {
            model: ModelSection {
                kappa: r.float("model.kappa")?,
                alpha: r.float("model.alpha")?,
                sigma: r.float("model.sigma")?,
                spring_k: r.float("model.spring_k")?,
                dim: r.uint("model.dim")?,
                kernel_delta: r.float("model.kernel.delta")?,
                kernel_amplitude: r.float("model.kernel.amplitude")?,
                force_family: r.string("model.force.family")?,
                potential_family: r.string("model.potential.family")?,
                potential_shift: r.float("model.potential.shift")?,
            },
            sim: SimSection {
                dt: r.float("sim.dt")?,
                t_max: r.float("sim.t_max")?,
                seed: r.uint("sim.seed")?,
                stream: r.uint("sim.stream")?,
                stride: r.uint("sim.stride")?,
                tail_tol: r.float("sim.tail_tol")?,
                truncation_horizon: r.opt_float("sim.truncation_horizon")?,
                noise_refinement: r.uint("sim.noise_refinement")?,
            },
            past: r.past("past")?,
            couple_past_b: r.past("couple.past_b")?,
            output_dir: PathBuf::from(r.string("output.dir")?),
            output_prefix: r.string("output.prefix")?,
            stats: StatsSection {
                burn_in: r.float("stats.burn_in")?,
                bins: r.uint("stats.bins")?,
                r_max: r.opt_float("stats.r_max")?,
                ensemble: r.uint("stats.ensemble")?,
                p: r.float("stats.p")?,
                lags: r.opt_floats("stats.lags")?,
            },
            orbit: OrbitScan {
                r_min: r.float("orbit.r_min")?,
                r_max: r.float("orbit.r_max")?,
                r_points: r.uint("orbit.r_points")? as usize,
                omega_min: r.float("orbit.omega_min")?,
                omega_max: r.float("orbit.omega_max")?,
                omega_points: r.uint("orbit.omega_points")? as usize,
            },
        };
        if let Some(key) = r.0.keys().next() {
            return Err(Failure::key(key, "unknown key"));
        }
        Ok(cfg)
    }

    /// Physical and numerical constraints that can be checked without
    /// touching the file system.
    pub fn validate(&self) -> Result<(), Failure> {
        let sim = self.sim_config()?;
        sim.validate()?;
        self.orbit.validate()?;
        for (prefix, spec) in [("past", &self.past), ("couple.past_b", &self.couple_past_b)] {
            check_past(prefix, spec, sim.model.params.dim)?;
        }
        if self.past.variant == PastVariant::AnchoredZero {
            return Err(Failure::key("past.variant", "anchored_zero is only meaningful for couple.past_b"));
        }
        if !(self.sim.tail_tol > 0.0 && self.sim.tail_tol < 1.0) {
            return Err(Failure::key("sim.tail_tol", "must lie in (0, 1)"));
        }
        let s = &self.stats;
        if !(0.0..1.0).contains(&s.burn_in) {
            return Err(Failure::key("stats.burn_in", "must lie in [0, 1)"));
        }
        if s.bins < 2 {
            return Err(Failure::key("stats.bins", "need at least 2 bins"));
        }
        if let Some(r) = s.r_max {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Failure::key("stats.r_max", "must be finite and > 0"));
            }
        }
        if s.ensemble < 2 {
            return Err(Failure::key("stats.ensemble", "need at least 2 members"));
        }
        if !(s.p > 0.0 && s.p.is_finite()) {
            return Err(Failure::key("stats.p", "must be finite and > 0"));
        }
        if let Some(lags) = &s.lags {
            if lags.len() < 3 || lags.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
                return Err(Failure::key("stats.lags", "need at least 3 positive lags"));
            }
        }
        if self.output_prefix.is_empty() || self.output_prefix.contains(['/', '\\']) {
            return Err(Failure::key("output.prefix", "must be a non-empty file name"));
        }
        Ok(())
    }

    pub fn model(&self) -> Result<Model64, Failure> {
        let m = &self.model;
        let dim = Dim::from_count(u32::try_from(m.dim).unwrap_or(u32::MAX))?;
        let mut model = Model64::new(ModelParams64 {
            kappa: m.kappa,
            alpha: m.alpha,
            sigma: m.sigma,
            spring_k: m.spring_k,
            dim,
        })?;
        model.kernel = Kernel::exponential(m.kernel_delta, m.kernel_amplitude)?;
        model.force.family = ForceFamily::parse(&m.force_family).ok_or_else(|| {
            Failure::key("model.force.family", format!("unknown family `{}`", m.force_family))
        })?;
        model.potential.family = PotentialFamily::parse(&m.potential_family).ok_or_else(|| {
            Failure::key("model.potential.family", format!("unknown family `{}`", m.potential_family))
        })?;
        if !m.potential_shift.is_finite() {
            return Err(Failure::key("model.potential.shift", "must be finite"));
        }
        model.potential.verifier_constants.shift = m.potential_shift;
        model.validate()?;
        Ok(model)
    }

    /// Simulation settings with a zero past; the commands attach the real one.
    pub fn sim_config(&self) -> Result<SimConfig64, Failure> {
        let model = self.model()?;
        let s = &self.sim;
        let horizon = match s.truncation_horizon {
            Some(h) => h,
            None => {
                if !(s.tail_tol > 0.0 && s.tail_tol < 1.0) {
                    return Err(Failure::key("sim.tail_tol", "must lie in (0, 1)"));
                }
                default_horizon(&model.kernel, s.tail_tol)
            }
        };
        let refinement = u32::try_from(s.noise_refinement).unwrap_or(u32::MAX);
        Ok(SimConfig64::new(model, s.dt, s.t_max)
            .with_seed(s.seed)
            .with_stream(s.stream)
            .with_stride(usize::try_from(s.stride).unwrap_or(usize::MAX))
            .with_horizon(horizon)
            .with_noise_refinement(refinement))
    }

    /// Every key, one `key = value` line each, in a fixed order.
    pub fn to_toml(&self) -> String {
        let mut lines: Vec<(String, Value)> = Vec::new();
        let mut put = |k: &str, v: Value| lines.push((k.to_string(), v));
        let m = &self.model;
        put("model.kappa", Value::Float(m.kappa));
        put("model.alpha", Value::Float(m.alpha));
        put("model.sigma", Value::Float(m.sigma));
        put("model.spring_k", Value::Float(m.spring_k));
        put("model.dim", int(m.dim));
        put("model.kernel.delta", Value::Float(m.kernel_delta));
        put("model.kernel.amplitude", Value::Float(m.kernel_amplitude));
        put("model.force.family", Value::String(m.force_family.clone()));
        put("model.potential.family", Value::String(m.potential_family.clone()));
        put("model.potential.shift", Value::Float(m.potential_shift));
        let s = &self.sim;
        put("sim.dt", Value::Float(s.dt));
        put("sim.t_max", Value::Float(s.t_max));
        put("sim.seed", int(s.seed));
        put("sim.stream", int(s.stream));
        put("sim.stride", int(s.stride));
        put("sim.tail_tol", Value::Float(s.tail_tol));
        if let Some(h) = s.truncation_horizon {
            put("sim.truncation_horizon", Value::Float(h));
        }
        put("sim.noise_refinement", int(s.noise_refinement));
        for (prefix, p) in [("past", &self.past), ("couple.past_b", &self.couple_past_b)] {
            put(&format!("{prefix}.variant"), Value::String(p.variant.name().into()));
            put(&format!("{prefix}.extension"), Value::String(extension_name(p.extension).into()));
            for (k, v) in [("x", p.x), ("y", p.y), ("r0", p.r0), ("omega", p.omega)] {
                if let Some(v) = v {
                    put(&format!("{prefix}.{k}"), Value::Float(v));
                }
            }
            if let Some(f) = &p.file {
                put(&format!("{prefix}.file"), Value::String(f.to_string_lossy().into_owned()));
            }
        }
        put("output.dir", Value::String(self.output_dir.to_string_lossy().into_owned()));
        put("output.prefix", Value::String(self.output_prefix.clone()));
        let st = &self.stats;
        put("stats.burn_in", Value::Float(st.burn_in));
        put("stats.bins", int(st.bins));
        if let Some(r) = st.r_max {
            put("stats.r_max", Value::Float(r));
        }
        put("stats.ensemble", int(st.ensemble));
        put("stats.p", Value::Float(st.p));
        if let Some(lags) = &st.lags {
            put("stats.lags", Value::Array(lags.iter().map(|&l| Value::Float(l)).collect()));
        }
        let o = &self.orbit;
        put("orbit.r_min", Value::Float(o.r_min));
        put("orbit.r_max", Value::Float(o.r_max));
        put("orbit.r_points", int(o.r_points as u64));
        put("orbit.omega_min", Value::Float(o.omega_min));
        put("orbit.omega_max", Value::Float(o.omega_max));
        put("orbit.omega_points", int(o.omega_points as u64));

        let mut out = String::new();
        for (k, v) in lines {
            writeln!(out, "{k} = {v}").expect("writing to a string");
        }
        out
    }
}

fn int(v: u64) -> Value {
    // every integer key is read from TOML, so it fits
    Value::Integer(i64::try_from(v).expect("integer keys come from TOML"))
}

fn check_past(prefix: &str, spec: &PastSpec, dim: Dim) -> Result<(), Failure> {
    let planar = dim == Dim::Two;
    match spec.variant {
        PastVariant::Constant => {
            if spec.x.is_none() {
                return Err(Failure::key(&format!("{prefix}.x"), "constant past needs a position"));
            }
            if !planar && spec.y.is_some_and(|y| y != 0.0) {
                return Err(Failure::key(&format!("{prefix}.y"), "must be 0 (or absent) when dim = 1"));
            }
        }
        PastVariant::Tabulated => {
            if spec.file.is_none() {
                return Err(Failure::key(&format!("{prefix}.file"), "tabulated past needs a CSV file"));
            }
        }
        PastVariant::Orbital => {
            if !planar {
                return Err(Failure::key(&format!("{prefix}.variant"), "orbital past needs dim = 2"));
            }
            if spec.r0.is_some() != spec.omega.is_some() {
                return Err(Failure::key(&format!("{prefix}.r0"), "give both r0 and omega, or neither"));
            }
            if spec.r0.is_some_and(|r| !(r >= 0.0 && r.is_finite())) {
                return Err(Failure::key(&format!("{prefix}.r0"), "must be finite and >= 0"));
            }
            if spec.omega.is_some_and(|w| !w.is_finite()) {
                return Err(Failure::key(&format!("{prefix}.omega"), "must be finite"));
            }
        }
        PastVariant::Zero | PastVariant::AnchoredZero => {}
    }
    Ok(())
}
