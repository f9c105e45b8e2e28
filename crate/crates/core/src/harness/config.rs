//! Flat `section.key = value` configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Unknown keys are an
//! error. [`ExperimentConfig::to_text`] writes every key in a fixed order; that
//! canonical text is what the manifest stores and hashes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::galerkin::{validate_nonlinear, SolverConfig};
use crate::linear::{point_variance, ModelParams};
use crate::spectral::Truncation;

/// A level given either absolutely or in units of the pointwise standard deviation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Level {
    Absolute(f64),
    Sigma(f64),
}

impl Level {
    pub fn resolve(self, sigma: f64) -> f64 {
        match self {
            Level::Absolute(y) => y,
            Level::Sigma(s) => s * sigma,
        }
    }

    pub fn label(self) -> String {
        match self {
            Level::Absolute(y) => format!("{y:?}"),
            Level::Sigma(s) => format!("{s:?}sigma"),
        }
    }
}

impl std::str::FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad level `{s}`")))
        };
        match s.strip_suffix("sigma") {
            Some(v) if v.trim().is_empty() => Ok(Level::Sigma(1.0)),
            Some(v) => Ok(Level::Sigma(parse(v)?)),
            None => Ok(Level::Absolute(parse(s)?)),
        }
    }
}

/// Settings of the analysis stage shared by all experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Structure-function lags in grid cells along each axis.
    pub lags: Vec<u32>,
    pub frostman_n: Vec<f64>,
    pub frostman_gamma: f64,
    pub frostman_grid: usize,
    pub frostman_replicas: usize,
    pub occupation_eps: Vec<f64>,
    pub det_pairs: usize,
    pub det_cutoff: u32,
    pub sin_cutoff: u32,
    pub mode_radius: u32,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            lags: vec![2, 4, 8, 16, 32],
            frostman_n: vec![10.0, 100.0, 1000.0, 10000.0],
            frostman_gamma: 1.1,
            frostman_grid: 1024,
            frostman_replicas: 50,
            occupation_eps: vec![0.2, 0.1, 0.05, 0.02],
            det_pairs: 1000,
            det_cutoff: 128,
            sin_cutoff: 2048,
            mode_radius: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    pub solver: SolverConfig,
    /// Observation time of the linear field.
    pub t: f64,
    /// Sample the stationary law instead of `z(t)` with `z(0) = 0`.
    pub stationary: bool,
    pub replicas: usize,
    pub levels: Vec<Level>,
    pub seed: u64,
    pub workers: usize,
    pub out_dir: PathBuf,
    pub analysis: AnalysisConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            params: ModelParams::default(),
            solver: SolverConfig::default(),
            t: 1.0,
            stationary: false,
            replicas: 200,
            levels: vec![Level::Absolute(0.0), Level::Sigma(0.5)],
            seed: 20240601,
            workers: 1,
            out_dir: PathBuf::from("out"),
            analysis: AnalysisConfig::default(),
        }
    }
}

fn join<T>(v: &[T], f: impl Fn(&T) -> String) -> String {
    v.iter().map(f).collect::<Vec<_>>().join(", ")
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| Error::Parse(format!("{key}: cannot parse `{}`", s.trim())))
        })
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse::<T>()
        .map_err(|_| Error::Parse(format!("{key}: cannot parse `{v}`")))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `section.key = value`", lineno + 1)))?;
            c.set(key.trim(), value.trim())?;
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        let a = &mut self.analysis;
        match key {
            "params.nu" => self.params.nu = parse_one(key, v)?,
            "params.alpha" => self.params.alpha = parse_one(key, v)?,
            "params.M" => self.params.m = parse_one(key, v)?,
            "noise.delta" => self.params.noise.delta = parse_one(key, v)?,
            "noise.amplitude" => self.params.noise.amplitude = parse_one(key, v)?,
            "solver.N" => self.solver.n = parse_one(key, v)?,
            "solver.grid" => self.solver.grid = parse_one(key, v)?,
            "solver.dt" => self.solver.dt = parse_one(key, v)?,
            "solver.T" => self.solver.t_end = parse_one(key, v)?,
            "solver.guard" => self.solver.guard = parse_one(key, v)?,
            "solver.record_every" => self.solver.record_every = parse_one(key, v)?,
            "solver.shape" => self.solver.shape = v.parse::<Truncation>()?,
            "solver.nonlinearity" => self.solver.nonlinearity = parse_one(key, v)?,
            "solver.noise" => self.solver.noise = parse_one(key, v)?,
            "solver.unsupported_regime" => self.solver.unsupported_regime = parse_one(key, v)?,
            "experiment.t" => self.t = parse_one(key, v)?,
            "experiment.stationary" => self.stationary = parse_one(key, v)?,
            "experiment.replicas" => self.replicas = parse_one(key, v)?,
            "experiment.levels" => self.levels = parse_list(key, v)?,
            "experiment.workers" => self.workers = parse_one(key, v)?,
            "seed.master" => self.seed = parse_one(key, v)?,
            "output.dir" => self.out_dir = PathBuf::from(v),
            "analysis.lags" => a.lags = parse_list(key, v)?,
            "analysis.frostman_n" => a.frostman_n = parse_list(key, v)?,
            "analysis.frostman_gamma" => a.frostman_gamma = parse_one(key, v)?,
            "analysis.frostman_grid" => a.frostman_grid = parse_one(key, v)?,
            "analysis.frostman_replicas" => a.frostman_replicas = parse_one(key, v)?,
            "analysis.occupation_eps" => a.occupation_eps = parse_list(key, v)?,
            "analysis.det_pairs" => a.det_pairs = parse_one(key, v)?,
            "analysis.det_cutoff" => a.det_cutoff = parse_one(key, v)?,
            "analysis.sin_cutoff" => a.sin_cutoff = parse_one(key, v)?,
            "analysis.mode_radius" => a.mode_radius = parse_one(key, v)?,
            _ => return Err(Error::Parse(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Canonical text: every key, fixed order, floats in round-trip form.
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let s = &self.solver;
        let a = &self.analysis;
        let mut o = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(o, "{k} = {v}");
        };
        kv("params.nu", format!("{:?}", p.nu));
        kv("params.alpha", format!("{:?}", p.alpha));
        kv("params.M", format!("{:?}", p.m));
        kv("noise.delta", format!("{:?}", p.noise.delta));
        kv("noise.amplitude", format!("{:?}", p.noise.amplitude));
        kv("solver.N", s.n.to_string());
        kv("solver.grid", s.grid.to_string());
        kv("solver.dt", format!("{:?}", s.dt));
        kv("solver.T", format!("{:?}", s.t_end));
        kv("solver.guard", format!("{:?}", s.guard));
        kv("solver.record_every", s.record_every.to_string());
        kv("solver.shape", s.shape.as_str().to_string());
        kv("solver.nonlinearity", s.nonlinearity.to_string());
        kv("solver.noise", s.noise.to_string());
        kv("solver.unsupported_regime", s.unsupported_regime.to_string());
        kv("experiment.t", format!("{:?}", self.t));
        kv("experiment.stationary", self.stationary.to_string());
        kv("experiment.replicas", self.replicas.to_string());
        kv("experiment.levels", join(&self.levels, |l| l.label()));
        kv("experiment.workers", self.workers.to_string());
        kv("seed.master", self.seed.to_string());
        kv("output.dir", self.out_dir.display().to_string());
        kv("analysis.lags", join(&a.lags, |v| v.to_string()));
        kv("analysis.frostman_n", join(&a.frostman_n, |v| format!("{v:?}")));
        kv("analysis.frostman_gamma", format!("{:?}", a.frostman_gamma));
        kv("analysis.frostman_grid", a.frostman_grid.to_string());
        kv("analysis.frostman_replicas", a.frostman_replicas.to_string());
        kv("analysis.occupation_eps", join(&a.occupation_eps, |v| format!("{v:?}")));
        kv("analysis.det_pairs", a.det_pairs.to_string());
        kv("analysis.det_cutoff", a.det_cutoff.to_string());
        kv("analysis.sin_cutoff", a.sin_cutoff.to_string());
        kv("analysis.mode_radius", a.mode_radius.to_string());
        o
    }

    /// SHA-256 of the canonical text, excluding the keys that cannot change
    /// results (`experiment.workers`, `output.dir`).
    pub fn hash(&self) -> String {
        let text: String = self
            .to_text()
            .lines()
            .filter(|l| !l.starts_with("experiment.workers") && !l.starts_with("output.dir"))
            .map(|l| format!("{l}\n"))
            .collect();
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// Observation time used for the linear sampler (`inf` for the stationary law).
    pub fn sample_time(&self) -> f64 {
        if self.stationary {
            f64::INFINITY
        } else {
            self.t
        }
    }

    /// Pointwise standard deviation of the truncated field at the sampling time.
    pub fn field_sigma(&self, t: f64) -> Result<f64> {
        Ok(point_variance(t, &self.params, self.solver.n)?.value.sqrt())
    }

    /// Checks the parameters of the linear problem and the analysis settings.
    pub fn validate_linear(&self) -> Result<()> {
        self.params.validate(self.solver.unsupported_regime)?;
        self.solver.validate()?;
        if !(self.t > 0.0) {
            return Err(Error::Validation(format!("t > 0 violated: t = {}", self.t)));
        }
        if self.replicas == 0 {
            return Err(Error::Validation("replicas ≥ 1 violated".into()));
        }
        if self.workers == 0 {
            return Err(Error::Validation("workers ≥ 1 violated".into()));
        }
        if self.levels.is_empty() {
            return Err(Error::Validation("at least one level is required".into()));
        }
        let a = &self.analysis;
        if a.lags.iter().any(|&l| l == 0 || l as usize >= self.solver.grid / 2) {
            return Err(Error::Validation(format!(
                "0 < lag < N_g/2 violated: lags = {:?}",
                a.lags
            )));
        }
        if !(a.frostman_gamma > 0.0 && a.frostman_gamma < 2.0) {
            return Err(Error::Validation(format!(
                "0 < γ < 2 violated: frostman_gamma = {}",
                a.frostman_gamma
            )));
        }
        if a.frostman_n.iter().any(|&n| !(n > 0.0)) {
            return Err(Error::Validation("frostman n > 0 violated".into()));
        }
        if !a.frostman_grid.is_power_of_two() || a.frostman_grid < (2 * self.solver.n as usize + 2) {
            return Err(Error::Validation(format!(
                "frostman_grid must be a power of two ≥ 2N + 2, got {}",
                a.frostman_grid
            )));
        }
        if a.occupation_eps.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::Validation("ε > 0 violated in occupation_eps".into()));
        }
        if a.mode_radius == 0 || a.mode_radius > self.solver.n {
            return Err(Error::Validation(format!(
                "1 ≤ mode_radius ≤ N violated: mode_radius = {}",
                a.mode_radius
            )));
        }
        Ok(())
    }

    /// Linear checks plus the nonlinear hypotheses `alpha > 1`, `M >= 1`.
    pub fn validate_nonlinear(&self) -> Result<()> {
        self.validate_linear()?;
        validate_nonlinear(&self.params, &self.solver)
    }
}
