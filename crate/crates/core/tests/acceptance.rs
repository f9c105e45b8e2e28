//! Full-size acceptance runs, one test per criterion, plus CLI contract checks.
//!
//! Each criterion writes a `criterion N PASS|FAIL` line straight to stderr so
//! the verdicts show up even when the harness captures output.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use levelset_lab::fractal::covariance_det_check;
use levelset_lab::fractal::synthetic::SyntheticSet;
use levelset_lab::galerkin::{conservation_residuals, nonlinear_term};
use levelset_lab::harness::experiments::{DIMENSION_TOLERANCE, RESIDUAL_TOLERANCE};
use levelset_lab::harness::manifest::{RunManifest, MANIFEST_FILE};
use levelset_lab::harness::reports::{sin_sum_checks, COMPARISON_TOLERANCE, DET_STABILITY};
use levelset_lab::harness::{
    calibrate_estimator, run_comparison, run_linear_experiment, run_nonlinear_experiment, ExperimentConfig,
    ExperimentReport,
};
use levelset_lab::linear::{mode_variance, sample_exact};
use levelset_lab::{ModeIndexSet, SeedSpec, Truncation};

fn verdict(n: u32, title: &str, pass: bool, detail: &str) {
    let line = format!(
        "criterion {n:>2} {}: {title}: {detail}\n",
        if pass { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn note(n: u32, detail: &str) {
    let _ = std::io::stderr().write_all(format!("criterion {n:>2} note: {detail}\n").as_bytes());
}

fn work_dir(name: &str) -> PathBuf {
    let d = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance").join(name);
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn default_config(dir: PathBuf) -> ExperimentConfig {
    let mut c = ExperimentConfig::default();
    c.workers = workers();
    c.out_dir = dir;
    c
}

struct Run {
    report: ExperimentReport,
    seconds: f64,
}

fn timed(f: impl FnOnce() -> ExperimentReport) -> Run {
    let start = Instant::now();
    let report = f();
    Run {
        report,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn linear() -> &'static Run {
    static RUN: OnceLock<Run> = OnceLock::new();
    RUN.get_or_init(|| timed(|| run_linear_experiment(&default_config(work_dir("linear"))).unwrap()))
}

fn nonlinear() -> &'static Run {
    static RUN: OnceLock<Run> = OnceLock::new();
    RUN.get_or_init(|| timed(|| run_nonlinear_experiment(&default_config(work_dir("nonlinear"))).unwrap()))
}

fn calibration_gate() -> bool {
    static GATE: OnceLock<bool> = OnceLock::new();
    *GATE.get_or_init(|| {
        let cfg = default_config(work_dir("gate"));
        calibrate_estimator(&cfg).unwrap().iter().filter(|r| r.set != "cantor_product_1.5").all(|r| r.passed)
    })
}

fn level_lines(run: &Run, n: u32, full: bool) -> bool {
    let s = &run.report.summary;
    let target = s.target_dimension;
    let mut all = true;
    for l in &s.levels {
        let median_ok = (l.median_slope - target).abs() <= DIMENSION_TOLERANCE;
        let upper_ok = l.fraction_above <= 0.05;
        let lower_ok = l.fraction_within >= 0.5;
        let pass = median_ok && (!full || (upper_ok && lower_ok));
        all &= pass;
        verdict(
            n,
            &format!("y = {} ({:.4})", l.level, l.y),
            pass,
            &format!(
                "median {:.4} (target {target} ± {DIMENSION_TOLERANCE}), {:.1}% above {:.2}, {:.1}% of {} nonempty within tolerance, {} replicas in {:.0} s",
                l.median_slope,
                100.0 * l.fraction_above,
                target + DIMENSION_TOLERANCE,
                100.0 * l.fraction_within,
                l.nonempty,
                l.replicas,
                run.seconds
            ),
        );
    }
    all
}

#[test]
fn criterion_01_linear_dimension() {
    assert!(calibration_gate(), "estimator calibration gate failed");
    let run = linear();
    let pass = level_lines(run, 1, true);
    note(1, &format!("runtime {:.0} s (target < 600 s)", run.seconds));
    assert!(pass);
}

#[test]
fn criterion_02_nonlinear_dimension() {
    assert!(calibration_gate(), "estimator calibration gate failed");
    let run = nonlinear();
    let pass = level_lines(run, 2, false);
    note(2, &format!("runtime {:.0} s (target < 3600 s)", run.seconds));
    assert!(pass);
}

#[test]
fn criterion_03_law_equivalence() {
    assert!(calibration_gate(), "estimator calibration gate failed");
    let (lin, nl) = (linear(), nonlinear());
    let cfg = default_config(work_dir("comparison"));
    let r = run_comparison(&cfg, &lin.report.dir, &nl.report.dir).unwrap();
    for l in &r.levels {
        verdict(
            3,
            &format!("level {} median difference", l.level),
            l.passed,
            &format!(
                "|{:.4} - {:.4}| = {:.4} (limit {COMPARISON_TOLERANCE}), KS {:.3}, overlap {:.3}, empty fractions {:.3} / {:.3}",
                l.median_linear,
                l.median_nonlinear,
                l.median_difference.abs(),
                l.ks_statistic,
                l.overlap,
                l.empty_fraction_linear,
                l.empty_fraction_nonlinear
            ),
        );
    }
    assert!(r.passed);
}

#[test]
fn criterion_04_structure_function() {
    let s = &linear().report.summary.structure;
    let slope_ok = (s.empirical_slope - s.target_slope).abs() <= 0.1;
    let values_ok = s.max_relative_error <= 0.05;
    verdict(
        4,
        "log-log slope over |r| in [2pi/128, 2pi/8]",
        slope_ok,
        &format!(
            "empirical {:.4} ± {:.4} vs {:.2} ± 0.1",
            s.empirical_slope, s.empirical_stderr, s.target_slope
        ),
    );
    verdict(
        4,
        "empirical vs analytic series per lag",
        values_ok,
        &format!("max relative deviation {:.4} (limit 0.05)", s.max_relative_error),
    );
    if !slope_ok {
        note(
            4,
            &format!(
                "the exact series itself has slope {:.4} over these lags: the power law is only reached for |r| well below 2pi/N",
                s.analytic_slope
            ),
        );
    }
    assert!(slope_ok && values_ok);
}

#[test]
fn criterion_05_mode_variance() {
    let cfg = ExperimentConfig::default();
    let modes = ModeIndexSet::new(4, Truncation::Ball).unwrap();
    let n = 10_000u64;
    let mut acc = vec![0.0; modes.len()];
    for r in 0..n {
        let z = sample_exact(cfg.t, &modes, &cfg.params, SeedSpec::new(cfg.seed, r)).unwrap();
        for (a, c) in acc.iter_mut().zip(z.coeffs()) {
            *a += c * c;
        }
    }
    let worst = modes
        .iter()
        .zip(&acc)
        .map(|(k, a)| (a / n as f64 / mode_variance(k, cfg.t, &cfg.params) - 1.0).abs())
        .fold(0.0, f64::max);
    let pass = worst <= 0.05;
    verdict(
        5,
        "per-mode variance at 10^4 replicas, |k| <= 4",
        pass,
        &format!("{} modes, max relative error {worst:.4} (limit 0.05)", modes.len()),
    );
    assert!(pass);
}

#[test]
fn criterion_06_conservation() {
    let cfg = ExperimentConfig::default();
    let modes = cfg.solver.modes().unwrap();
    let mut worst: f64 = 0.0;
    for r in 0..100 {
        let theta = sample_exact(1.0, &modes, &cfg.params, SeedSpec::new(7, r)).unwrap();
        let b = nonlinear_term(&theta, &cfg.params, &cfg.solver).unwrap();
        let (r1, r2) = conservation_residuals(&theta, &b, cfg.params.m).unwrap();
        worst = worst.max(r1).max(r2);
    }
    let fields_ok = worst <= RESIDUAL_TOLERANCE;
    verdict(6, "100 random fields", fields_ok, &format!("max residual {worst:.3e}"));
    let traj = nonlinear().report.summary.max_residual.unwrap();
    let traj_ok = traj <= RESIDUAL_TOLERANCE;
    verdict(6, "every recorded solver step", traj_ok, &format!("max residual {traj:.3e}"));
    assert!(fields_ok && traj_ok);
}

#[test]
fn criterion_07_sin_sum() {
    let checks = sin_sum_checks(2048);
    for c in &checks {
        let vals: Vec<String> = c.values.iter().map(|(k, v)| format!("{k} {v:.4}")).collect();
        verdict(7, &c.check, c.passed, &vals.join(", "));
    }
    assert!(checks.iter().all(|c| c.passed));
}

#[test]
fn criterion_08_covariance_det() {
    let cfg = ExperimentConfig::default();
    let seed = SeedSpec::new(cfg.seed, 0);
    let a = covariance_det_check(&cfg.params, cfg.t, 1000, 128, seed).unwrap();
    let b = covariance_det_check(&cfg.params, cfg.t, 1000, 256, seed).unwrap();
    let change = (b.min_ratio / a.min_ratio - 1.0).abs();
    let pass = a.min_ratio > 0.0 && b.min_ratio > 0.0 && change <= DET_STABILITY;
    verdict(
        8,
        "min det(q) / |x - x'|^1.5 over 1000 pairs",
        pass,
        &format!(
            "{:.4e} at cutoff 128, {:.4e} at 256, change {:.2}% (limit 10%)",
            a.min_ratio,
            b.min_ratio,
            100.0 * change
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_09_frostman() {
    let f = linear().report.summary.frostman.clone().unwrap();
    for l in &f.by_n {
        note(
            9,
            &format!(
                "n = {:>5}: E mu_n(T) {:.2}, E mu_n(T)^2 {:.1}, E energy {:.1}, diagonal bound {:.1}",
                l.n, l.mean_mass, l.second_moment, l.mean_energy, l.mean_diagonal_bound
            ),
        );
    }
    let mass_ok = f.mass_ratio <= 2.0;
    let m2_ok = f.second_moment_ratio <= 2.0;
    let finite = f.by_n.iter().all(|l| l.mean_energy.is_finite());
    let energy_ok = finite && f.energy_ratio <= 2.0;
    verdict(9, "mean mass uniform in n", mass_ok, &format!("max/min {:.3} (limit 2)", f.mass_ratio));
    verdict(
        9,
        "second moment uniform in n",
        m2_ok,
        &format!("max/min {:.3} (limit 2)", f.second_moment_ratio),
    );
    verdict(
        9,
        &format!("mean energy finite and stable, gamma = {}", f.gamma),
        energy_ok,
        &format!("max/min {:.3} (limit 2)", f.energy_ratio),
    );
    if !(mass_ok && m2_ok && energy_ok) {
        note(
            9,
            "E mu_n(T) = 4 pi^2 sqrt(2 pi n / (1 + n sigma^2)); n = 10 has n sigma^2 < 1, so the smallest kernel parameter is pre-asymptotic",
        );
    }
    assert!(mass_ok && m2_ok && energy_ok);
}

#[test]
fn criterion_10_calibration() {
    let cfg = default_config(work_dir("calibration"));
    let rows = calibrate_estimator(&cfg).unwrap();
    let mut pass = true;
    for r in &rows {
        let required = [SyntheticSet::Line, SyntheticSet::FilledSquare, SyntheticSet::KOCH_5]
            .iter()
            .any(|s| s.name() == r.set);
        if required {
            pass &= r.passed;
        }
        verdict(
            10,
            &r.set,
            r.passed,
            &format!(
                "slope {:.4} vs {:.4} (limit ± 0.05){}",
                r.slope,
                r.theoretical,
                if required { "" } else { ", extra set" }
            ),
        );
    }
    assert!(pass);
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_levelset-lab")
}

fn csv_entries(m: &RunManifest) -> Vec<(String, String)> {
    m.files
        .iter()
        .filter(|f| f.name.ends_with(".csv"))
        .map(|f| (f.name.clone(), f.sha256.clone()))
        .collect()
}

fn rerun_from_manifest(dir: &Path, out: &Path, workers: usize) -> RunManifest {
    let m = RunManifest::load(&dir.join(MANIFEST_FILE)).unwrap();
    let st = Command::new(bin())
        .arg(&m.command)
        .arg("--config")
        .arg(dir.join(MANIFEST_FILE))
        .args(["--workers", &workers.to_string(), "--out"])
        .arg(out)
        .output()
        .unwrap();
    assert!(matches!(st.status.code(), Some(0) | Some(3)), "{}", String::from_utf8_lossy(&st.stderr));
    RunManifest::load(&out.join(MANIFEST_FILE)).unwrap()
}

#[test]
fn criterion_11_reproducibility() {
    let lin = linear();
    let again = rerun_from_manifest(&lin.report.dir, &work_dir("linear-rerun"), 3);
    let a = csv_entries(&lin.report.manifest);
    let lin_ok = a == csv_entries(&again) && !a.is_empty();
    verdict(
        11,
        "linear ensemble rerun from manifest with 3 workers",
        lin_ok,
        &format!("{} CSV files, config hash {}", a.len(), &again.config_hash[..12]),
    );

    let mut cfg = default_config(work_dir("nonlinear-small"));
    cfg.replicas = 6;
    cfg.workers = 1;
    cfg.analysis.frostman_replicas = 2;
    let small = run_nonlinear_experiment(&cfg).unwrap();
    let again = rerun_from_manifest(&cfg.out_dir, &work_dir("nonlinear-small-rerun"), 3);
    let b = csv_entries(&small.manifest);
    let nl_ok = b == csv_entries(&again) && !b.is_empty();
    verdict(
        11,
        "nonlinear ensemble (6 replicas) rerun from manifest, 1 vs 3 workers",
        nl_ok,
        &format!("{} CSV files", b.len()),
    );
    assert!(lin_ok && nl_ok);
}

// CLI contract

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(bin()).args(args).output().unwrap()
}

const SMALL: [&str; 14] = [
    "--set",
    "solver.N=10",
    "--set",
    "solver.grid=64",
    "--set",
    "analysis.lags=1,2,4",
    "--set",
    "analysis.frostman_grid=64",
    "--set",
    "analysis.frostman_n=1,10",
    "--set",
    "analysis.mode_radius=2",
    "--replicas",
    "4",
];

#[test]
fn cli_validation_failure_exits_1_and_names_the_inequality() {
    let out = work_dir("cli-validation");
    let o = cli(&["sample-linear", "--set", "noise.delta=0.9", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("δ ∉ (1−α, 2−α)"));
    let o = cli(&["solve-nonlinear", "--set", "params.alpha=1.0", "--set", "noise.delta=0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("α > 1 violated"));
    let o = cli(&["sample-linear", "--set", "bogus.key=1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn cli_numerical_failure_exits_2_with_partial_outputs() {
    let out = work_dir("cli-numerical");
    let mut args = vec!["solve-nonlinear", "--set", "solver.guard=1e-9", "--out", out.to_str().unwrap()];
    args.extend(SMALL);
    let o = cli(&args);
    assert_eq!(o.status.code(), Some(2));
    let m = RunManifest::load(&out.join(MANIFEST_FILE)).unwrap();
    assert!(m.status.starts_with("failed:"));
}

#[test]
fn cli_failed_check_exits_3() {
    let out = work_dir("cli-check");
    let mut args = vec!["sample-linear", "--set", "experiment.levels=0,100sigma", "--out", out.to_str().unwrap()];
    args.extend(SMALL);
    let o = cli(&args);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn cli_calibrate_and_dimension() {
    let out = work_dir("cli-calibrate");
    let o = cli(&["calibrate-estimator", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(out.join("calibration.csv").exists());

    let g = levelset_lab::GridField::from_fn(64, |x| x[0].sin()).unwrap();
    let path = out.join("field.grid");
    levelset_lab::spectral::io::save_grid(&g, &path).unwrap();
    let o = cli(&[
        "dimension",
        "--input",
        path.to_str().unwrap(),
        "--set",
        "experiment.levels=0",
        "--out",
        out.join("dim").to_str().unwrap(),
    ]);
    // a smooth curve has dimension 1, far from the target
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stdout).contains("slope 1.0000"));
    let o = cli(&["dimension", "--input", "/no/such/file"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn cli_compare_runs_both_experiments_and_self_comparison_is_zero() {
    let out = work_dir("cli-compare");
    let mut args = vec!["compare", "--out", out.to_str().unwrap(), "--set", "solver.dt=0.01"];
    args.extend(SMALL);
    let o = cli(&args);
    assert!(matches!(o.status.code(), Some(0) | Some(3)), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("comparison.json").exists());
    let lin = out.join("linear");
    let o = cli(&[
        "compare",
        "--linear",
        lin.to_str().unwrap(),
        "--nonlinear",
        lin.to_str().unwrap(),
        "--out",
        out.join("self").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("= 0.0000"));
}

#[test]
fn cli_verify_lemmas_is_byte_stable() {
    let a = work_dir("cli-lemmas-a");
    let b = work_dir("cli-lemmas-b");
    let small = [
        "--set",
        "solver.N=16",
        "--set",
        "solver.grid=64",
        "--set",
        "analysis.lags=1,2",
        "--set",
        "analysis.frostman_grid=128",
        "--set",
        "analysis.frostman_replicas=4",
        "--set",
        "analysis.frostman_n=1,10",
        "--set",
        "analysis.sin_cutoff=128",
        "--set",
        "analysis.det_pairs=50",
        "--set",
        "analysis.det_cutoff=32",
        "--replicas",
        "50",
    ];
    for (dir, w) in [(&a, "1"), (&b, "3")] {
        let mut args = vec!["verify-lemmas", "--workers", w, "--out", dir.to_str().unwrap()];
        args.extend(small);
        let o = cli(&args);
        assert!(matches!(o.status.code(), Some(0) | Some(3)), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["lemmas.json", "lemmas.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}
