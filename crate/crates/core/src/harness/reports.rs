//! Comparison of the two experiments, the lemma checks, estimator
//! calibration and the dimension of a single stored field.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::experiments::{
    for_each_replica, frostman_check, level_checks, level_summary, summarize_frostman, Check, LevelSummary,
    STRUCTURE_MATCH_TOLERANCE,
};
use super::manifest::{unix_now, RunManifest};
use super::output::*;
use crate::error::{Error, Result};
use crate::fractal::lemmas::MIN_STRUCTURE_SAMPLES;
use crate::fractal::synthetic::SyntheticSet;
use crate::fractal::{
    box_count, box_count_cells, covariance_det_check, estimate_dimension, extract_level_set, h_gamma,
    mean_squared_increment, ols, scale_window, sin_sum_profile, EnergyKernel,
};
use crate::linear::{sample_exact, structure_function_analytic};
use crate::noise::SeedSpec;
use crate::spectral::io::{load_grid, load_spectral};
use crate::spectral::{synthesize, GridField};

/// Largest allowed `|median_linear - median_nonlinear|`.
pub const COMPARISON_TOLERANCE: f64 = 0.1;
/// Largest allowed `c_high / c_low` in the sin-sum bands.
pub const SIN_BAND_LIMIT: f64 = 10.0;
/// Largest relative change of the minimum determinant ratio under cutoff doubling.
pub const DET_STABILITY: f64 = 0.1;
pub const ANALYTIC_SLOPE_TOLERANCE: f64 = 0.05;
pub const CALIBRATION_TOLERANCE: f64 = 0.05;

pub const COMPARISON_FILE: &str = "comparison.json";
pub const LEMMAS_FILE: &str = "lemmas.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelComparison {
    pub level: usize,
    pub y_linear: f64,
    pub y_nonlinear: f64,
    pub n_linear: usize,
    pub n_nonlinear: usize,
    pub median_linear: f64,
    pub median_nonlinear: f64,
    pub median_difference: f64,
    pub mean_linear: f64,
    pub mean_nonlinear: f64,
    /// Two-sample Kolmogorov-Smirnov statistic of the nonempty slopes.
    pub ks_statistic: f64,
    /// Histogram overlap `sum_i min(p_i, q_i)` with bins of width 0.02.
    pub overlap: f64,
    pub empty_fraction_linear: f64,
    pub empty_fraction_nonlinear: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub linear_dir: String,
    pub nonlinear_dir: String,
    pub levels: Vec<LevelComparison>,
    pub passed: bool,
}

/// Slopes per level, levels in order of first appearance; `None` for empty sets.
fn slopes_by_level(rows: &[DimensionRow]) -> Vec<(f64, Vec<Option<f64>>)> {
    let mut out: Vec<(f64, Vec<Option<f64>>)> = Vec::new();
    for r in rows {
        let s = (!r.slope.is_nan()).then_some(r.slope);
        match out.iter_mut().find(|(y, _)| y.to_bits() == r.y.to_bits()) {
            Some((_, v)) => v.push(s),
            None => out.push((r.y, vec![s])),
        }
    }
    out
}

pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::NAN;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

pub fn histogram_overlap(a: &[f64], b: &[f64], width: f64) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::NAN;
    }
    let hist = |v: &[f64]| {
        let mut h: BTreeMap<i64, f64> = BTreeMap::new();
        for x in v {
            *h.entry((x / width).floor() as i64).or_default() += 1.0 / v.len() as f64;
        }
        h
    };
    let (ha, hb) = (hist(a), hist(b));
    ha.iter().map(|(k, p)| p.min(hb.get(k).copied().unwrap_or(0.0))).sum()
}

fn compare_level(level: usize, lin: &(f64, Vec<Option<f64>>), nl: &(f64, Vec<Option<f64>>)) -> LevelComparison {
    let sl = level_summary(String::new(), lin.0, &lin.1, 0.0);
    let sn = level_summary(String::new(), nl.0, &nl.1, 0.0);
    let a: Vec<f64> = lin.1.iter().flatten().copied().collect();
    let b: Vec<f64> = nl.1.iter().flatten().copied().collect();
    let diff = sl.median_slope - sn.median_slope;
    LevelComparison {
        level,
        y_linear: lin.0,
        y_nonlinear: nl.0,
        n_linear: sl.replicas,
        n_nonlinear: sn.replicas,
        median_linear: sl.median_slope,
        median_nonlinear: sn.median_slope,
        median_difference: diff,
        mean_linear: sl.mean_slope,
        mean_nonlinear: sn.mean_slope,
        ks_statistic: ks_statistic(&a, &b),
        overlap: histogram_overlap(&a, &b, 0.02),
        empty_fraction_linear: sl.empty_fraction,
        empty_fraction_nonlinear: sn.empty_fraction,
        passed: diff.abs() <= COMPARISON_TOLERANCE,
    }
}

/// Compares the dimension estimates stored in two experiment directories and
/// writes `comparison.json` and `comparison.csv` to `cfg.out_dir`.
pub fn run_comparison(cfg: &ExperimentConfig, linear_dir: &Path, nonlinear_dir: &Path) -> Result<ComparisonReport> {
    let lin: Vec<DimensionRow> = read_csv(&linear_dir.join("dimension.csv"))?;
    let nl: Vec<DimensionRow> = read_csv(&nonlinear_dir.join("dimension.csv"))?;
    let (lin, nl) = (slopes_by_level(&lin), slopes_by_level(&nl));
    if lin.len() != nl.len() || lin.is_empty() {
        return Err(Error::MissingInput(format!(
            "dimension.csv level sets differ: {} linear vs {} nonlinear levels",
            lin.len(),
            nl.len()
        )));
    }
    let levels: Vec<LevelComparison> = lin
        .iter()
        .zip(&nl)
        .enumerate()
        .map(|(i, (a, b))| compare_level(i, a, b))
        .collect();
    let report = ComparisonReport {
        linear_dir: linear_dir.display().to_string(),
        nonlinear_dir: nonlinear_dir.display().to_string(),
        passed: levels.iter().all(|l| l.passed),
        levels,
    };
    let dir = &cfg.out_dir;
    std::fs::create_dir_all(dir)?;
    let started = unix_now();
    write_json(&dir.join(COMPARISON_FILE), &report)?;
    write_csv(&dir.join("comparison.csv"), &report.levels)?;
    let files = [COMPARISON_FILE.to_string(), "comparison.csv".to_string()];
    let status = if report.passed { "complete" } else { "complete: comparison outside tolerance" };
    RunManifest::new("compare", cfg, 0, started).finish(dir, &files, status)?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub lemma: String,
    pub check: String,
    pub passed: bool,
    pub values: BTreeMap<String, f64>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub checks: Vec<LemmaCheck>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct LemmaRow {
    lemma: String,
    check: String,
    quantity: String,
    value: f64,
    passed: bool,
}

fn lemma(lemma: &str, check: &str, passed: bool, values: &[(&str, f64)], note: impl Into<String>) -> LemmaCheck {
    LemmaCheck {
        lemma: lemma.into(),
        check: check.into(),
        passed,
        values: values.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        note: note.into(),
    }
}

/// Radii of the sin-sum band check: 16 log-spaced values in `[1e-2, 0.5]`.
pub fn sin_sum_radii() -> Vec<f64> {
    let (lo, hi) = (1e-2f64.ln(), 0.5f64.ln());
    (0..16).map(|i| (lo + (hi - lo) * i as f64 / 15.0).exp()).collect()
}

/// Points `r (cos 0.3, sin 0.3)`, off the lattice axes.
fn sin_sum_points(radii: &[f64]) -> Vec<Vec<f64>> {
    let (s, c) = 0.3f64.sin_cos();
    radii.iter().map(|r| vec![r * c, r * s]).collect()
}

fn band(ratios: &[f64]) -> f64 {
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    hi / lo
}

fn log_slope(r: &[f64], v: &[f64]) -> f64 {
    let xs: Vec<f64> = r.iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = v.iter().map(|x| x.ln()).collect();
    ols(&xs, &ys).slope
}

/// Sin-sum bands in `d = 2` for `gamma` in {0.5, 1, 3} and the `gamma = 2` logarithmic branch.
pub fn sin_sum_checks(cutoff: u32) -> Vec<LemmaCheck> {
    let radii = sin_sum_radii();
    let pts = sin_sum_points(&radii);
    let mut out = Vec::new();
    for gamma in [0.5, 1.0, 3.0] {
        let s = sin_sum_profile(&pts, gamma, cutoff);
        let ratios: Vec<f64> = s.iter().zip(&radii).map(|(v, &r)| v / h_gamma(r, gamma)).collect();
        let b = band(&ratios);
        out.push(lemma(
            "sin_sum",
            &format!("band gamma = {gamma}"),
            b <= SIN_BAND_LIMIT && ratios.iter().all(|r| *r > 0.0),
            &[
                ("c_low", ratios.iter().copied().fold(f64::INFINITY, f64::min)),
                ("c_high", ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
                ("band", b),
                ("cutoff", cutoff as f64),
            ],
            format!("sum / |x|^{} over |x| in [1e-2, 0.5]", gamma.min(2.0)),
        ));
    }
    let s = sin_sum_profile(&pts, 2.0, cutoff);
    let with_log: Vec<f64> = s.iter().zip(&radii).map(|(v, &r)| v / h_gamma(r, 2.0)).collect();
    let plain: Vec<f64> = s.iter().zip(&radii).map(|(v, &r)| v / (r * r)).collect();
    let (bl, bp) = (band(&with_log), band(&plain));
    let (sl, sp) = (log_slope(&radii, &with_log), log_slope(&radii, &plain));
    out.push(lemma(
        "sin_sum",
        "logarithmic branch gamma = 2",
        bl < bp && sl.abs() < sp.abs(),
        &[
            ("band_log", bl),
            ("band_square", bp),
            ("drift_log", sl),
            ("drift_square", sp),
            ("cutoff", cutoff as f64),
        ],
        "logarithmic correction: -|x|^2 log|x| flattens the ratio, |x|^2 alone drifts",
    ));
    out
}

/// Runs the lemma checks and writes `lemmas.json` and `lemmas.csv` to `cfg.out_dir`.
pub fn verify_lemmas(cfg: &ExperimentConfig) -> Result<LemmaReport> {
    cfg.validate_linear()?;
    if cfg.replicas < MIN_STRUCTURE_SAMPLES {
        return Err(Error::TooFewSamples {
            required: MIN_STRUCTURE_SAMPLES,
            found: cfg.replicas,
        });
    }
    let started = unix_now();
    let p = &cfg.params;
    let a = &cfg.analysis;
    let t = cfg.sample_time();
    let seed = SeedSpec::new(cfg.seed, 0);
    let mut checks = sin_sum_checks(a.sin_cutoff);

    let det1 = covariance_det_check(p, t, a.det_pairs, a.det_cutoff, seed)?;
    let det2 = covariance_det_check(p, t, a.det_pairs, 2 * a.det_cutoff, seed)?;
    let change = (det2.min_ratio / det1.min_ratio - 1.0).abs();
    checks.push(lemma(
        "covariance_det",
        "positive and stable minimum",
        det1.min_ratio > 0.0 && det2.min_ratio > 0.0 && change <= DET_STABILITY,
        &[
            ("min_ratio", det1.min_ratio),
            ("median_ratio", det1.median_ratio),
            ("min_ratio_doubled_cutoff", det2.min_ratio),
            ("relative_change", change),
            ("pairs", a.det_pairs as f64),
            ("cutoff", a.det_cutoff as f64),
        ],
        format!("det(q) / |x - x'|^{:.3}", 2.0 * p.holder_exponent()),
    ));

    let target_slope = 2.0 * p.holder_exponent();
    let (lo, hi) = (1e-2f64.ln(), 1e-1f64.ln());
    let radii: Vec<f64> = (0..8).map(|i| (lo + (hi - lo) * i as f64 / 7.0).exp()).collect();
    let series: Vec<f64> = radii
        .iter()
        .map(|&r| structure_function_analytic([r, 0.0], t, p, 1024).map(|s| s.value))
        .collect::<Result<_>>()?;
    let slope = log_slope(&radii, &series);
    checks.push(lemma(
        "structure_function",
        "analytic exponent",
        (slope - target_slope).abs() <= ANALYTIC_SLOPE_TOLERANCE,
        &[("slope", slope), ("target", target_slope), ("cutoff", 1024.0)],
        "log-log slope of the series over |r| in [1e-2, 1e-1]",
    ));

    let modes = cfg.solver.modes()?;
    let kernel = EnergyKernel::new(a.frostman_grid, a.frostman_gamma)?;
    let y0 = cfg.levels[0].resolve(cfg.field_sigma(t)?);
    let per_replica = for_each_replica(cfg, cfg.replicas, |r| {
        let z = sample_exact(t, &modes, p, SeedSpec::new(cfg.seed, r))?;
        let g = synthesize(&z, cfg.solver.grid)?;
        let inc: Vec<f64> = a.lags.iter().map(|&l| mean_squared_increment(&g, l as i32, 0)).collect();
        let frost = if (r as usize) < a.frostman_replicas {
            let fine = synthesize(&z, a.frostman_grid)?;
            a.frostman_n
                .iter()
                .map(|&n| {
                    kernel.frostman_energy(&fine, y0, n).map(|e| FrostmanRow {
                        replica: r,
                        n,
                        mass: e.mass,
                        energy_gamma: e.energy,
                        gamma: a.frostman_gamma,
                        diagonal_bound: e.diagonal_bound,
                    })
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        Ok((inc, frost))
    })?
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let h = 2.0 * PI / cfg.solver.grid as f64;
    let mut worst: f64 = 0.0;
    let mut values = Vec::new();
    for (i, &l) in a.lags.iter().enumerate() {
        let emp = per_replica.iter().map(|(inc, _)| inc[i]).sum::<f64>() / per_replica.len() as f64;
        let ana = structure_function_analytic([l as f64 * h, 0.0], t, p, cfg.solver.n)?.value;
        let rel = (emp / ana - 1.0).abs();
        worst = worst.max(rel);
        values.push((format!("relative_error_lag_{l}"), rel));
    }
    values.push(("max_relative_error".into(), worst));
    values.push(("samples".into(), per_replica.len() as f64));
    checks.push(LemmaCheck {
        lemma: "structure_function".into(),
        check: "empirical matches analytic".into(),
        passed: worst <= STRUCTURE_MATCH_TOLERANCE,
        values: values.into_iter().collect(),
        note: format!("along x1 at N = {}, limit {STRUCTURE_MATCH_TOLERANCE}", cfg.solver.n),
    });

    let rows: Vec<FrostmanRow> = per_replica.into_iter().flat_map(|(_, f)| f).collect();
    if let Some(f) = summarize_frostman(cfg, y0, &rows) {
        let c = frostman_check(&f);
        let mut vals = vec![
            ("mass_ratio".to_string(), f.mass_ratio),
            ("second_moment_ratio".to_string(), f.second_moment_ratio),
            ("energy_ratio".to_string(), f.energy_ratio),
            ("gamma".to_string(), f.gamma),
        ];
        for l in &f.by_n {
            vals.push((format!("mean_mass_n_{}", l.n), l.mean_mass));
            vals.push((format!("second_moment_n_{}", l.n), l.second_moment));
            vals.push((format!("mean_energy_n_{}", l.n), l.mean_energy));
        }
        checks.push(LemmaCheck {
            lemma: "frostman".into(),
            check: "uniform bounds over n".into(),
            passed: c.passed,
            values: vals.into_iter().collect(),
            note: c.detail,
        });
    }

    let report = LemmaReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    };
    let dir = &cfg.out_dir;
    std::fs::create_dir_all(dir)?;
    write_json(&dir.join(LEMMAS_FILE), &report)?;
    let rows: Vec<LemmaRow> = report
        .checks
        .iter()
        .flat_map(|c| {
            c.values.iter().map(|(k, v)| LemmaRow {
                lemma: c.lemma.clone(),
                check: c.check.clone(),
                quantity: k.clone(),
                value: *v,
                passed: c.passed,
            })
        })
        .collect();
    write_csv(&dir.join("lemmas.csv"), &rows)?;
    let files = [LEMMAS_FILE.to_string(), "lemmas.csv".to_string()];
    let status = if report.passed { "complete" } else { "complete: lemma checks failed" };
    RunManifest::new("verify-lemmas", cfg, cfg.replicas as u64, started).finish(dir, &files, status)?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub set: String,
    pub theoretical: f64,
    pub slope: f64,
    pub stderr: f64,
    pub k_min: u32,
    pub k_max: u32,
    pub passed: bool,
}

/// Box-counting slopes of the synthetic sets on the solver grid; writes `calibration.csv`.
pub fn calibrate_estimator(cfg: &ExperimentConfig) -> Result<Vec<CalibrationRow>> {
    let n_g = cfg.solver.grid;
    let sets = [
        SyntheticSet::Line,
        SyntheticSet::FilledSquare,
        SyntheticSet::KOCH_5,
        SyntheticSet::CANTOR_1_5,
    ];
    let rows: Vec<CalibrationRow> = sets
        .iter()
        .map(|set| {
            let cells = set.rasterize(n_g, SeedSpec::new(cfg.seed, 0));
            let e = estimate_dimension(&box_count_cells(&cells, scale_window(n_g))?)?;
            Ok(CalibrationRow {
                set: set.name(),
                theoretical: set.dimension(),
                slope: e.slope,
                stderr: e.stderr,
                k_min: e.k_min,
                k_max: e.k_max,
                passed: (e.slope - set.dimension()).abs() <= CALIBRATION_TOLERANCE,
            })
        })
        .collect::<Result<_>>()?;
    let dir = &cfg.out_dir;
    std::fs::create_dir_all(dir)?;
    let started = unix_now();
    write_csv(&dir.join("calibration.csv"), &rows)?;
    let status = if rows.iter().all(|r| r.passed) { "complete" } else { "complete: calibration failed" };
    RunManifest::new("calibrate-estimator", cfg, 0, started).finish(dir, &["calibration.csv".to_string()], status)?;
    Ok(rows)
}

/// Level-set dimension of a stored field (grid or spectral file). Levels in
/// `sigma` units refer to the field's own root-mean-square value.
pub fn field_dimension(cfg: &ExperimentConfig, path: &Path) -> Result<(Vec<LevelSummary>, Vec<Check>)> {
    let g = load_field(path, cfg.solver.grid)?;
    let n_g = g.resolution();
    let rms = (g.values().iter().map(|v| v * v).sum::<f64>() / g.values().len() as f64).sqrt();
    let window = scale_window(n_g);
    let target = cfg.params.target_dimension();
    let mut boxcount = Vec::new();
    let mut dimension = Vec::new();
    let mut levels = Vec::new();
    let mut checks = Vec::new();
    for level in &cfg.levels {
        let y = level.resolve(rms);
        let ls = extract_level_set(&g, y);
        let curve = box_count(&ls, window.clone())?;
        let est = if ls.is_empty() { None } else { Some(estimate_dimension(&curve)?) };
        boxcount.extend(curve.iter().map(|(k, n_k)| BoxCountRow { replica: 0, y, k, n_k }));
        dimension.push(DimensionRow {
            replica: 0,
            y,
            slope: est.as_ref().map_or(f64::NAN, |e| e.slope),
            stderr: est.as_ref().map_or(f64::NAN, |e| e.stderr),
            window: format!("{}-{}", window.start(), window.end()),
        });
        let s = level_summary(level.label(), y, &[est.map(|e| e.slope)], target);
        checks.push(level_checks(&s, target).remove(0));
        levels.push(s);
    }
    let dir = &cfg.out_dir;
    std::fs::create_dir_all(dir)?;
    let started = unix_now();
    write_csv(&dir.join("boxcount.csv"), &boxcount)?;
    write_csv(&dir.join("dimension.csv"), &dimension)?;
    RunManifest::new("dimension", cfg, 0, started).finish(
        dir,
        &["boxcount.csv".to_string(), "dimension.csv".to_string()],
        "complete",
    )?;
    Ok((levels, checks))
}

/// Loads a grid file, or a spectral file synthesized on an `n_g` grid.
pub fn load_field(path: &Path, n_g: usize) -> Result<GridField> {
    if !path.exists() {
        return Err(Error::MissingInput(path.display().to_string()));
    }
    let head = std::fs::read(path)?;
    if head.starts_with(b"levelset-lab grid") {
        load_grid(path)
    } else {
        synthesize(&load_spectral(path)?, n_g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_and_overlap() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(ks_statistic(&a, &a), 0.0);
        assert_eq!(ks_statistic(&a, &[10.0, 11.0]), 1.0);
        assert!((ks_statistic(&a, &[2.5, 3.5]) - 0.5).abs() < 1e-15);
        assert!((histogram_overlap(&a, &a, 0.02) - 1.0).abs() < 1e-12);
        assert_eq!(histogram_overlap(&a, &[10.0], 0.02), 0.0);
    }

    #[test]
    fn comparing_a_run_with_itself_gives_zero() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            DimensionRow { replica: 0, y: 0.0, slope: 1.2, stderr: 0.01, window: "2-7".into() },
            DimensionRow { replica: 0, y: 0.5, slope: f64::NAN, stderr: f64::NAN, window: "2-7".into() },
            DimensionRow { replica: 1, y: 0.0, slope: 1.3, stderr: 0.01, window: "2-7".into() },
            DimensionRow { replica: 1, y: 0.5, slope: 1.1, stderr: 0.01, window: "2-7".into() },
        ];
        write_csv(&dir.path().join("dimension.csv"), &rows).unwrap();
        let mut cfg = ExperimentConfig::default();
        cfg.out_dir = dir.path().join("cmp");
        let r = run_comparison(&cfg, dir.path(), dir.path()).unwrap();
        assert_eq!(r.levels.len(), 2);
        for l in &r.levels {
            assert_eq!(l.median_difference, 0.0);
            assert_eq!(l.ks_statistic, 0.0);
        }
        assert_eq!(r.levels[1].empty_fraction_linear, 0.5);
        assert_eq!(r.levels[1].empty_fraction_nonlinear, 0.5);
        assert!(r.passed);
        let missing = run_comparison(&cfg, dir.path(), &dir.path().join("nope")).unwrap_err();
        assert!(matches!(missing, Error::MissingInput(_)));
    }

    #[test]
    fn sin_sum_checks_pass_at_moderate_cutoff() {
        for c in sin_sum_checks(512) {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn calibration_recovers_known_dimensions() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::default();
        cfg.out_dir = dir.path().to_path_buf();
        let rows = calibrate_estimator(&cfg).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.passed), "{rows:?}");
    }

    #[test]
    fn field_dimension_of_a_stored_field() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridField::from_fn(64, |x| x[0].sin() + 0.5 * x[1].cos()).unwrap();
        let path = dir.path().join("f.grid");
        crate::spectral::io::save_grid(&g, &path).unwrap();
        let mut cfg = ExperimentConfig::default();
        cfg.out_dir = dir.path().join("out");
        let (levels, _) = field_dimension(&cfg, &path).unwrap();
        // smooth curves have dimension one
        assert!((levels[0].median_slope - 1.0).abs() < 0.1, "{levels:?}");
        assert!(matches!(load_field(&dir.path().join("x"), 64), Err(Error::MissingInput(_))));
    }
}
