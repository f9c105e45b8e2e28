//! The linear and nonlinear dimension experiments.
//!
//! Replicas run on a pool of `workers` threads. Each replica draws only from
//! its own counter-addressed streams and results are reduced in replica order,
//! so every output file is independent of the worker count.

use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::manifest::{unix_now, RunManifest};
use super::output::*;
use crate::error::{Error, Result};
use crate::fractal::{
    box_count, estimate_dimension, extract_level_set, mean_squared_increment, occupation_fraction, ols,
    scale_window, BoxCountCurve, DimensionEstimate, EnergyKernel, FrostmanEnergy,
};
use crate::galerkin::GalerkinSolver;
use crate::linear::{mode_variance, sample_exact, structure_function_analytic};
use crate::noise::SeedSpec;
use crate::spectral::{synthesize, ModeIndexSet, SpectralField, Truncation, WaveVector};

/// Allowed distance of a median slope from the target dimension.
pub const DIMENSION_TOLERANCE: f64 = 0.15;
/// Largest fraction of replicas allowed above `target + DIMENSION_TOLERANCE`.
pub const UPPER_FRACTION: f64 = 0.05;
/// Smallest fraction of nonempty replicas required within the tolerance.
pub const LOWER_FRACTION: f64 = 0.5;
pub const STRUCTURE_SLOPE_TOLERANCE: f64 = 0.1;
pub const STRUCTURE_MATCH_TOLERANCE: f64 = 0.05;
/// Largest ratio between Frostman statistics at different `n`.
pub const FROSTMAN_FACTOR: f64 = 2.0;
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

pub const CONFIG_FILE: &str = "config.txt";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: String,
    pub y: f64,
    pub replicas: usize,
    pub nonempty: usize,
    pub empty_fraction: f64,
    /// Over nonempty replicas; `NaN` (null in JSON) when all are empty.
    pub median_slope: f64,
    pub mean_slope: f64,
    /// Fraction of all replicas with slope above `target + DIMENSION_TOLERANCE`.
    pub fraction_above: f64,
    /// Fraction of nonempty replicas within `DIMENSION_TOLERANCE` of the target.
    pub fraction_within: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureSummary {
    pub target_slope: f64,
    pub empirical_slope: f64,
    pub empirical_stderr: f64,
    pub analytic_slope: f64,
    pub max_relative_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrostmanLevel {
    pub n: f64,
    pub mean_mass: f64,
    pub second_moment: f64,
    pub mean_energy: f64,
    pub mean_diagonal_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrostmanSummary {
    pub y: f64,
    pub gamma: f64,
    pub grid: usize,
    pub replicas: usize,
    pub by_n: Vec<FrostmanLevel>,
    pub mass_ratio: f64,
    pub second_moment_ratio: f64,
    pub energy_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccupationSummary {
    pub eps: f64,
    pub mean_fraction: f64,
    /// `mean_fraction / (2 eps)`, an estimate of the density of `z(x)` at 0.
    pub density: f64,
    /// Gaussian density at 0, `1 / (sqrt(2 pi) sigma)`.
    pub gaussian_density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub command: String,
    pub target_dimension: f64,
    pub time: f64,
    pub sigma: f64,
    pub replicas_completed: usize,
    pub levels: Vec<LevelSummary>,
    pub structure: StructureSummary,
    pub mode_variance_max_relative_error: f64,
    pub frostman: Option<FrostmanSummary>,
    pub occupation: Vec<OccupationSummary>,
    pub max_residual: Option<f64>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub dir: PathBuf,
    pub summary: ExperimentSummary,
    pub manifest: RunManifest,
}

struct LevelResult {
    curve: BoxCountCurve,
    estimate: Option<DimensionEstimate>,
}

struct ReplicaResult {
    replica: u64,
    levels: Vec<LevelResult>,
    increments: Vec<f64>,
    occupation: Vec<f64>,
    low_modes: Vec<f64>,
    frostman: Vec<FrostmanEnergy>,
    trajectory: Option<crate::galerkin::TrajectoryRecord>,
}

/// Per-field analysis shared by both experiments.
struct Pipeline<'a> {
    cfg: &'a ExperimentConfig,
    t: f64,
    sigma: f64,
    ys: Vec<f64>,
    window: RangeInclusive<u32>,
    low_modes: Vec<WaveVector>,
    kernel: EnergyKernel,
}

impl<'a> Pipeline<'a> {
    fn new(cfg: &'a ExperimentConfig, t: f64) -> Result<Self> {
        let sigma = cfg.field_sigma(t)?;
        let low = ModeIndexSet::new(cfg.analysis.mode_radius, Truncation::Ball)?;
        Ok(Self {
            cfg,
            t,
            sigma,
            ys: cfg.levels.iter().map(|l| l.resolve(sigma)).collect(),
            window: scale_window(cfg.solver.grid),
            low_modes: low.modes().to_vec(),
            kernel: EnergyKernel::new(cfg.analysis.frostman_grid, cfg.analysis.frostman_gamma)?,
        })
    }

    fn analyze(&self, replica: u64, field: &SpectralField) -> Result<ReplicaResult> {
        let a = &self.cfg.analysis;
        let g = synthesize(field, self.cfg.solver.grid)?;
        let levels = self
            .ys
            .iter()
            .map(|&y| {
                let ls = extract_level_set(&g, y);
                let curve = box_count(&ls, self.window.clone())?;
                let estimate = if ls.is_empty() {
                    None
                } else {
                    Some(estimate_dimension(&curve)?)
                };
                Ok(LevelResult { curve, estimate })
            })
            .collect::<Result<_>>()?;
        let increments = a
            .lags
            .iter()
            .map(|&l| 0.5 * (mean_squared_increment(&g, l as i32, 0) + mean_squared_increment(&g, 0, l as i32)))
            .collect();
        let occupation = a.occupation_eps.iter().map(|&e| occupation_fraction(&g, e)).collect();
        let low_modes = self.low_modes.iter().map(|&k| field.coeff(k)).collect();
        let frostman = if (replica as usize) < a.frostman_replicas {
            let fine = synthesize(field, a.frostman_grid)?;
            a.frostman_n
                .iter()
                .map(|&n| self.kernel.frostman_energy(&fine, self.ys[0], n))
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        Ok(ReplicaResult {
            replica,
            levels,
            increments,
            occupation,
            low_modes,
            frostman,
            trajectory: None,
        })
    }
}

fn worker_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Validation(format!("cannot start {workers} workers: {e}")))
}

/// Runs `f` for every replica and returns the results in replica order.
pub(crate) fn for_each_replica<T: Send>(
    cfg: &ExperimentConfig,
    count: usize,
    f: impl Fn(u64) -> Result<T> + Sync + Send,
) -> Result<Vec<Result<T>>> {
    let pool = worker_pool(cfg.workers)?;
    Ok(pool.install(|| (0..count as u64).into_par_iter().map(&f).collect()))
}

/// Samples the linear field `z(t)` exactly for every replica and analyses its level sets.
pub fn run_linear_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate_linear()?;
    let started = unix_now();
    let t = cfg.sample_time();
    let pipeline = Pipeline::new(cfg, t)?;
    let modes = cfg.solver.modes()?;
    let results = for_each_replica(cfg, cfg.replicas, |r| {
        let z = sample_exact(t, &modes, &cfg.params, SeedSpec::new(cfg.seed, r))?;
        pipeline.analyze(r, &z)
    })?;
    finish_experiment("sample-linear", cfg, &pipeline, results, started)
}

/// Integrates the Galerkin system from `theta0 = 0` to the horizon for every
/// replica and runs the same analysis on the final fields.
pub fn run_nonlinear_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate_nonlinear()?;
    let started = unix_now();
    let pipeline = Pipeline::new(cfg, cfg.solver.t_end)?;
    let results = for_each_replica(cfg, cfg.replicas, |r| {
        let mut solver = GalerkinSolver::new(&cfg.params, &cfg.solver)?;
        let theta0 = SpectralField::zeros(solver.modes());
        let mut rec = solver.solve(&theta0, SeedSpec::new(cfg.seed, r))?;
        let theta = rec.final_field.take().expect("solve stores the final field");
        let mut out = pipeline.analyze(r, &theta)?;
        out.trajectory = Some(rec);
        Ok(out)
    })?;
    finish_experiment("solve-nonlinear", cfg, &pipeline, results, started)
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

fn spread(v: &[f64]) -> f64 {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

pub(crate) fn level_summary(label: String, y: f64, slopes: &[Option<f64>], target: f64) -> LevelSummary {
    let mut nonempty: Vec<f64> = slopes.iter().flatten().copied().collect();
    let replicas = slopes.len();
    let above = nonempty.iter().filter(|&&s| s > target + DIMENSION_TOLERANCE).count();
    let within = nonempty
        .iter()
        .filter(|&&s| (s - target).abs() <= DIMENSION_TOLERANCE)
        .count();
    let n = nonempty.len();
    LevelSummary {
        level: label,
        y,
        replicas,
        nonempty: n,
        empty_fraction: (replicas - n) as f64 / replicas.max(1) as f64,
        mean_slope: mean(&nonempty),
        median_slope: median(&mut nonempty),
        fraction_above: above as f64 / replicas.max(1) as f64,
        fraction_within: if n == 0 { 0.0 } else { within as f64 / n as f64 },
    }
}

pub(crate) fn level_checks(s: &LevelSummary, target: f64) -> Vec<Check> {
    vec![
        Check::new(
            format!("median slope at y = {}", s.level),
            (s.median_slope - target).abs() <= DIMENSION_TOLERANCE,
            format!("median {:.4} vs target {target:.4} ± {DIMENSION_TOLERANCE}", s.median_slope),
        ),
        Check::new(
            format!("upper bound at y = {}", s.level),
            s.fraction_above <= UPPER_FRACTION,
            format!(
                "{:.3} of replicas above {:.2} (limit {UPPER_FRACTION})",
                s.fraction_above,
                target + DIMENSION_TOLERANCE
            ),
        ),
        Check::new(
            format!("lower bound at y = {}", s.level),
            s.nonempty > 0 && s.fraction_within >= LOWER_FRACTION,
            format!(
                "{:.3} of {} nonempty replicas within ± {DIMENSION_TOLERANCE} (need {LOWER_FRACTION})",
                s.fraction_within, s.nonempty
            ),
        ),
    ]
}

fn finish_experiment(
    command: &str,
    cfg: &ExperimentConfig,
    pipeline: &Pipeline,
    results: Vec<Result<ReplicaResult>>,
    started: u64,
) -> Result<ExperimentReport> {
    let mut done = Vec::with_capacity(results.len());
    let mut failure = None;
    for r in results {
        match r {
            Ok(v) => done.push(v),
            Err(e) if failure.is_none() => failure = Some(e),
            Err(_) => {}
        }
    }
    let status = match &failure {
        None => "complete".to_string(),
        Some(e) => format!("failed: {e} ({} of {} replicas completed)", done.len(), cfg.replicas),
    };
    let (summary, manifest) = write_outputs(command, cfg, pipeline, &done, started, &status)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(ExperimentReport {
            dir: cfg.out_dir.clone(),
            summary,
            manifest,
        }),
    }
}

fn write_outputs(
    command: &str,
    cfg: &ExperimentConfig,
    pipe: &Pipeline,
    done: &[ReplicaResult],
    started: u64,
    status: &str,
) -> Result<(ExperimentSummary, RunManifest)> {
    let dir: &Path = &cfg.out_dir;
    std::fs::create_dir_all(dir)?;
    let a = &cfg.analysis;
    let p = &cfg.params;
    let target = p.target_dimension();
    let window = format!("{}-{}", pipe.window.start(), pipe.window.end());
    let mut files = Vec::new();
    let emit = |name: &str, files: &mut Vec<String>| {
        files.push(name.to_string());
        dir.join(name)
    };

    std::fs::write(emit(CONFIG_FILE, &mut files), cfg.to_text())?;

    let mut boxcount = Vec::new();
    let mut dimension = Vec::new();
    for r in done {
        for (lr, &y) in r.levels.iter().zip(&pipe.ys) {
            boxcount.extend(lr.curve.iter().map(|(k, n_k)| BoxCountRow {
                replica: r.replica,
                y,
                k,
                n_k,
            }));
            let (slope, stderr) = lr.estimate.as_ref().map_or((f64::NAN, f64::NAN), |e| (e.slope, e.stderr));
            dimension.push(DimensionRow {
                replica: r.replica,
                y,
                slope,
                stderr,
                window: window.clone(),
            });
        }
    }
    write_csv(&emit("boxcount.csv", &mut files), &boxcount)?;
    write_csv(&emit("dimension.csv", &mut files), &dimension)?;

    let h = 2.0 * std::f64::consts::PI / cfg.solver.grid as f64;
    let mut structure = Vec::new();
    for (i, &lag) in a.lags.iter().enumerate() {
        let r = lag as f64 * h;
        let analytic = structure_function_analytic([r, 0.0], pipe.t, p, cfg.solver.n)?;
        let inc: Vec<f64> = done.iter().map(|d| d.increments[i]).collect();
        structure.push(StructureRow {
            r,
            g_analytic: analytic.value,
            g_empirical: mean(&inc),
            n_samples: done.len(),
            lag_cells: lag,
            tail_bound: analytic.tail_bound,
        });
    }
    write_csv(&emit("structure_function.csv", &mut files), &structure)?;

    let mut modes = Vec::new();
    for (i, &k) in pipe.low_modes.iter().enumerate() {
        let sq: Vec<f64> = done.iter().map(|d| d.low_modes[i] * d.low_modes[i]).collect();
        modes.push(ModeVarianceRow {
            k1: k.k1,
            k2: k.k2,
            analytic: mode_variance(k, pipe.t, p),
            empirical: mean(&sq),
            n: done.len(),
        });
    }
    write_csv(&emit("mode_variance.csv", &mut files), &modes)?;

    let mut frostman = Vec::new();
    for r in done {
        for (e, &n) in r.frostman.iter().zip(&a.frostman_n) {
            frostman.push(FrostmanRow {
                replica: r.replica,
                n,
                mass: e.mass,
                energy_gamma: e.energy,
                gamma: a.frostman_gamma,
                diagonal_bound: e.diagonal_bound,
            });
        }
    }
    write_csv(&emit("frostman.csv", &mut files), &frostman)?;

    let mut occupation = Vec::new();
    for r in done {
        for (&fraction, &eps) in r.occupation.iter().zip(&a.occupation_eps) {
            occupation.push(OccupationRow {
                replica: r.replica,
                eps,
                fraction,
            });
        }
    }
    write_csv(&emit("occupation.csv", &mut files), &occupation)?;

    let mut max_residual = None;
    if done.iter().any(|d| d.trajectory.is_some()) {
        let mut rows = Vec::new();
        let mut worst: f64 = 0.0;
        for r in done {
            if let Some(t) = &r.trajectory {
                worst = worst.max(t.max_residual());
                for i in 0..t.times.len() {
                    rows.push(TrajectoryRow {
                        replica: r.replica,
                        t: t.times[i],
                        l2_norm: t.l2_norm[i],
                        hneg_norm: t.hneg_norm[i],
                        residual_1: t.residual_1[i],
                        residual_2: t.residual_2[i],
                    });
                }
            }
        }
        write_csv(&emit("trajectory.csv", &mut files), &rows)?;
        max_residual = Some(worst);
    }

    let mut checks = Vec::new();
    let mut levels = Vec::new();
    for (li, (level, &y)) in cfg.levels.iter().zip(&pipe.ys).enumerate() {
        let slopes: Vec<Option<f64>> = done
            .iter()
            .map(|d| d.levels[li].estimate.as_ref().map(|e| e.slope))
            .collect();
        let s = level_summary(level.label(), y, &slopes, target);
        checks.extend(level_checks(&s, target));
        levels.push(s);
    }

    let target_slope = 2.0 * p.holder_exponent();
    let (xs, ys): (Vec<f64>, Vec<f64>) = structure.iter().map(|s| (s.r.ln(), s.g_empirical.ln())).unzip();
    let (xa, ya): (Vec<f64>, Vec<f64>) = structure.iter().map(|s| (s.r.ln(), s.g_analytic.ln())).unzip();
    let (emp, ana) = if structure.len() >= 2 && !done.is_empty() {
        (ols(&xs, &ys), ols(&xa, &ya))
    } else {
        let nan = crate::fractal::Fit {
            slope: f64::NAN,
            intercept: f64::NAN,
            stderr: f64::NAN,
            residual: f64::NAN,
        };
        (nan, nan)
    };
    let max_rel = structure
        .iter()
        .map(|s| (s.g_empirical / s.g_analytic - 1.0).abs())
        .fold(0.0, f64::max);
    let structure_summary = StructureSummary {
        target_slope,
        empirical_slope: emp.slope,
        empirical_stderr: emp.stderr,
        analytic_slope: ana.slope,
        max_relative_error: max_rel,
    };
    checks.push(Check::new(
        "structure-function slope",
        (emp.slope - target_slope).abs() <= STRUCTURE_SLOPE_TOLERANCE,
        format!(
            "empirical {:.4} (analytic series {:.4}) vs {target_slope:.4} ± {STRUCTURE_SLOPE_TOLERANCE}",
            emp.slope, ana.slope
        ),
    ));
    checks.push(Check::new(
        "structure-function values",
        max_rel <= STRUCTURE_MATCH_TOLERANCE,
        format!("max relative deviation {max_rel:.4} (limit {STRUCTURE_MATCH_TOLERANCE})"),
    ));

    let mode_err = modes
        .iter()
        .map(|m| (m.empirical / m.analytic - 1.0).abs())
        .fold(0.0, f64::max);

    let frostman_summary = summarize_frostman(cfg, pipe.ys[0], &frostman);
    if let Some(f) = &frostman_summary {
        checks.push(frostman_check(f));
    }

    let gaussian_density = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * pipe.sigma);
    let occupation_summary = a
        .occupation_eps
        .iter()
        .enumerate()
        .map(|(i, &eps)| {
            let f: Vec<f64> = done.iter().map(|d| d.occupation[i]).collect();
            let m = mean(&f);
            OccupationSummary {
                eps,
                mean_fraction: m,
                density: m / (2.0 * eps),
                gaussian_density,
            }
        })
        .collect();

    if let Some(res) = max_residual {
        checks.push(Check::new(
            "conservation residuals",
            res <= RESIDUAL_TOLERANCE,
            format!("max residual {res:.3e} (limit {RESIDUAL_TOLERANCE:e})"),
        ));
    }
    if status != "complete" {
        checks.push(Check::new("ensemble completed", false, status));
    }

    let summary = ExperimentSummary {
        command: command.to_string(),
        target_dimension: target,
        time: pipe.t,
        sigma: pipe.sigma,
        replicas_completed: done.len(),
        levels,
        structure: structure_summary,
        mode_variance_max_relative_error: mode_err,
        frostman: frostman_summary,
        occupation: occupation_summary,
        max_residual,
        passed: checks.iter().all(|c| c.passed),
        checks,
    };
    write_json(&emit(SUMMARY_FILE, &mut files), &summary)?;

    let curves: Vec<(String, Vec<(f64, f64)>)> = cfg
        .levels
        .iter()
        .enumerate()
        .map(|(li, level)| {
            let pts = pipe
                .window
                .clone()
                .enumerate()
                .map(|(ki, k)| {
                    let counts: Vec<f64> = done
                        .iter()
                        .filter(|d| d.levels[li].estimate.is_some())
                        .map(|d| d.levels[li].curve.counts[ki] as f64)
                        .collect();
                    (2f64.powi(k as i32), mean(&counts))
                })
                .collect();
            (format!("y = {}", level.label()), pts)
        })
        .collect();
    let named: Vec<(&str, Vec<(f64, f64)>)> = curves.iter().map(|(n, v)| (n.as_str(), v.clone())).collect();
    loglog_plot(
        &emit("boxcount.svg", &mut files),
        "mean box count vs boxes per side",
        &named,
        Some(target),
    )?;
    loglog_plot(
        &emit("structure_function.svg", &mut files),
        "mean squared increment vs lag",
        &[
            ("empirical", structure.iter().map(|s| (s.r, s.g_empirical)).collect()),
            ("analytic", structure.iter().map(|s| (s.r, s.g_analytic)).collect()),
        ],
        Some(target_slope),
    )?;
    // an empty ensemble produces no plot
    files.retain(|f| dir.join(f).exists());

    let manifest = RunManifest::new(command, cfg, cfg.replicas as u64, started).finish(dir, &files, status)?;
    Ok((summary, manifest))
}

pub(crate) fn summarize_frostman(cfg: &ExperimentConfig, y: f64, rows: &[FrostmanRow]) -> Option<FrostmanSummary> {
    if rows.is_empty() {
        return None;
    }
    let a = &cfg.analysis;
    let by_n: Vec<FrostmanLevel> = a
        .frostman_n
        .iter()
        .map(|&n| {
            let sel: Vec<&FrostmanRow> = rows.iter().filter(|r| r.n == n).collect();
            let m: Vec<f64> = sel.iter().map(|r| r.mass).collect();
            let m2: Vec<f64> = sel.iter().map(|r| r.mass * r.mass).collect();
            let e: Vec<f64> = sel.iter().map(|r| r.energy_gamma).collect();
            let d: Vec<f64> = sel.iter().map(|r| r.diagonal_bound).collect();
            FrostmanLevel {
                n,
                mean_mass: mean(&m),
                second_moment: mean(&m2),
                mean_energy: mean(&e),
                mean_diagonal_bound: mean(&d),
            }
        })
        .collect();
    let col = |f: fn(&FrostmanLevel) -> f64| by_n.iter().map(f).collect::<Vec<f64>>();
    Some(FrostmanSummary {
        y,
        gamma: a.frostman_gamma,
        grid: a.frostman_grid,
        replicas: rows.len() / a.frostman_n.len().max(1),
        mass_ratio: spread(&col(|l| l.mean_mass)),
        second_moment_ratio: spread(&col(|l| l.second_moment)),
        energy_ratio: spread(&col(|l| l.mean_energy)),
        by_n,
    })
}

pub(crate) fn frostman_check(f: &FrostmanSummary) -> Check {
    let finite = f
        .by_n
        .iter()
        .all(|l| l.mean_mass.is_finite() && l.second_moment.is_finite() && l.mean_energy.is_finite());
    let ok = finite
        && f.mass_ratio <= FROSTMAN_FACTOR
        && f.second_moment_ratio <= FROSTMAN_FACTOR
        && f.energy_ratio <= FROSTMAN_FACTOR;
    Check::new(
        "frostman bounds",
        ok,
        format!(
            "max/min over n: mass {:.3}, second moment {:.3}, energy(gamma = {}) {:.3} (limit {FROSTMAN_FACTOR})",
            f.mass_ratio, f.second_moment_ratio, f.gamma, f.energy_ratio
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Level;

    pub(crate) fn small_config(dir: &Path) -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        c.solver.n = 10;
        c.solver.grid = 64;
        c.solver.dt = 0.01;
        c.solver.record_every = 20;
        c.replicas = 6;
        c.analysis.lags = vec![1, 2, 4];
        c.analysis.frostman_grid = 64;
        c.analysis.frostman_replicas = 2;
        c.analysis.frostman_n = vec![1.0, 10.0];
        c.analysis.mode_radius = 2;
        c.out_dir = dir.to_path_buf();
        c
    }

    #[test]
    fn median_and_level_summary() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&mut []).is_nan());
        let s = level_summary("0.0".into(), 0.0, &[Some(1.2), None, Some(1.5), Some(1.25)], 1.25);
        assert_eq!(s.nonempty, 3);
        assert_eq!(s.empty_fraction, 0.25);
        assert_eq!(s.median_slope, 1.25);
        assert_eq!(s.fraction_above, 0.25);
        assert!((s.fraction_within - 2.0 / 3.0).abs() < 1e-15);
        let c = level_checks(&s, 1.25);
        assert!(c[0].passed && !c[1].passed && c[2].passed);
    }

    #[test]
    fn single_replica_is_deterministic() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let mut c = small_config(a.path());
        c.replicas = 1;
        c.analysis.frostman_replicas = 1;
        let ra = run_linear_experiment(&c).unwrap();
        c.out_dir = b.path().to_path_buf();
        run_linear_experiment(&c).unwrap();
        let da = std::fs::read_to_string(a.path().join("dimension.csv")).unwrap();
        let db = std::fs::read_to_string(b.path().join("dimension.csv")).unwrap();
        assert_eq!(da, db);
        // header plus one row per level
        assert_eq!(da.lines().count(), 1 + c.levels.len());
        assert_eq!(ra.summary.replicas_completed, 1);
        assert!(ra.manifest.verify(a.path()).unwrap().is_empty());
    }

    #[test]
    fn outputs_do_not_depend_on_worker_count() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let mut c = small_config(a.path());
        c.workers = 1;
        let ra = run_nonlinear_experiment(&c).unwrap();
        c.workers = 3;
        c.out_dir = b.path().to_path_buf();
        let rb = run_nonlinear_experiment(&c).unwrap();
        assert_eq!(ra.manifest.config_hash, rb.manifest.config_hash);
        // config.txt records the worker count itself
        for (fa, fb) in ra.manifest.files.iter().zip(&rb.manifest.files).skip(1) {
            assert_eq!(fa, fb);
        }
        assert!(ra.summary.max_residual.unwrap() <= RESIDUAL_TOLERANCE);
    }

    #[test]
    fn empty_levels_are_reported_not_fitted() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small_config(dir.path());
        c.levels = vec![Level::Absolute(0.0), Level::Sigma(50.0)];
        let r = run_linear_experiment(&c).unwrap();
        assert_eq!(r.summary.levels[1].nonempty, 0);
        assert_eq!(r.summary.levels[1].empty_fraction, 1.0);
        assert!(r.summary.levels[1].median_slope.is_nan());
        let rows: Vec<DimensionRow> = read_csv(&dir.path().join("dimension.csv")).unwrap();
        assert!(rows.iter().filter(|r| r.y > 1.0).all(|r| r.slope.is_nan()));
        assert!(!r.summary.passed);
    }

    #[test]
    fn failure_flushes_partial_results() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small_config(dir.path());
        c.solver.guard = 1e-6;
        let err = run_nonlinear_experiment(&c).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let m = RunManifest::load(&dir.path().join(super::super::manifest::MANIFEST_FILE)).unwrap();
        assert!(m.status.starts_with("failed:"), "{}", m.status);
        assert!(dir.path().join("dimension.csv").exists());
    }

    #[test]
    fn invalid_config_is_refused_before_compute() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small_config(dir.path());
        c.params.alpha = 0.9;
        c.params.noise.delta = 0.5;
        let e = run_nonlinear_experiment(&c).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        assert!(!dir.path().join("manifest.json").exists());
    }
}
