use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use levelset_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(lsl_last_error()) }.to_string_lossy().into_owned()
}

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

#[test]
fn config_errors_map_to_status_codes() {
    unsafe {
        let cfg = lsl_config_new_default();
        assert_eq!(lsl_config_set(cfg, c("noise.delta").as_ptr(), c("0.3").as_ptr()), LslStatus::Ok);
        assert_eq!(lsl_config_set(cfg, c("noise.gamma").as_ptr(), c("1").as_ptr()), LslStatus::Validation);
        assert!(last_error().contains("noise.gamma"), "{}", last_error());
        assert_eq!(lsl_config_set(cfg, ptr::null(), c("1").as_ptr()), LslStatus::NullPointer);
        let mut text = ptr::null_mut();
        assert_eq!(lsl_config_to_text(cfg, &mut text), LslStatus::Ok);
        assert!(CStr::from_ptr(text).to_str().unwrap().contains("noise.delta = 0.3"));
        lsl_string_free(text);

        let mut loaded = ptr::null_mut();
        assert_eq!(lsl_config_load(c("/no/such/file").as_ptr(), &mut loaded), LslStatus::Io);
        assert!(loaded.is_null());
        lsl_config_free(cfg);
        lsl_config_free(ptr::null_mut());
    }
}

#[test]
fn invalid_parameters_are_validation_failures() {
    unsafe {
        let cfg = lsl_config_new_default();
        lsl_config_set(cfg, c("noise.delta").as_ptr(), c("0.9").as_ptr());
        let mut g = ptr::null_mut();
        assert_eq!(lsl_sample_linear_field(cfg, 0, &mut g), LslStatus::Validation);
        assert!(last_error().contains("δ ∉ (1−α, 2−α)"), "{}", last_error());
        assert!(g.is_null());
        lsl_config_free(cfg);
    }
}

#[test]
fn grid_handles_and_dimension() {
    unsafe {
        let n = 64usize;
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let values: Vec<f64> = (0..n * n)
            .map(|idx| (-std::f64::consts::PI + h * (idx / n) as f64).sin())
            .collect();
        let mut g = ptr::null_mut();
        assert_eq!(lsl_grid_new(n, values.as_ptr(), &mut g), LslStatus::Ok);
        assert_eq!(lsl_grid_resolution(g), n);
        assert_eq!(*lsl_grid_values(g).add(5 * n), values[5 * n]);
        let mut slope = 0.0;
        assert_eq!(lsl_grid_level_dimension(g, 0.0, &mut slope), LslStatus::Ok);
        assert!((slope - 1.0).abs() < 1e-12);
        assert_eq!(lsl_grid_level_dimension(g, 5.0, &mut slope), LslStatus::Numerical);
        lsl_grid_free(g);
        assert_eq!(lsl_grid_new(6, values.as_ptr(), &mut g), LslStatus::Validation);
        assert_eq!(lsl_grid_resolution(ptr::null()), 0);
        assert!(lsl_grid_values(ptr::null()).is_null());
    }
}

#[test]
fn small_linear_run_through_the_abi() {
    let dir = tempfile::tempdir().unwrap();
    unsafe {
        let cfg = lsl_config_new_default();
        for (k, v) in [
            ("solver.N", "10"),
            ("solver.grid", "64"),
            ("experiment.replicas", "4"),
            ("analysis.lags", "1, 2, 4"),
            ("analysis.frostman_grid", "64"),
            ("analysis.frostman_n", "1, 10"),
            ("analysis.mode_radius", "2"),
            ("output.dir", dir.path().to_str().unwrap()),
        ] {
            assert_eq!(lsl_config_set(cfg, c(k).as_ptr(), c(v).as_ptr()), LslStatus::Ok, "{k}");
        }
        let mut s = ptr::null_mut();
        assert_eq!(lsl_run_linear(cfg, &mut s), LslStatus::Ok, "{}", last_error());
        assert_eq!(lsl_summary_level_count(s), 2);
        let (mut y, mut m, mut e) = (0.0, 0.0, 0.0);
        assert_eq!(lsl_summary_level(s, 0, &mut y, &mut m, &mut e), LslStatus::Ok);
        assert_eq!(y, 0.0);
        assert!(m > 0.5 && m < 2.0);
        assert_eq!(lsl_summary_level(s, 9, &mut y, &mut m, &mut e), LslStatus::InvalidArgument);
        let mut json = ptr::null_mut();
        assert_eq!(lsl_summary_json(s, &mut json), LslStatus::Ok);
        assert!(CStr::from_ptr(json).to_str().unwrap().contains("\"command\":\"sample-linear\""));
        lsl_string_free(json);
        lsl_summary_free(s);
        lsl_config_free(cfg);
    }
    assert!(dir.path().join("manifest.json").exists());
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_the_abi_and_compiles_as_c() {
    let header = manifest_dir().join("include/levelset_lab.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["lsl_config_new_default", "lsl_run_nonlinear", "lsl_grid_level_dimension", "LSL_STATUS_PANIC"] {
        assert!(text.contains(sym), "{sym}");
    }
    if Command::new("cc").arg("--version").output().is_err() {
        return;
    }
    let st = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
        .unwrap();
    assert!(st.success());
}

#[test]
fn c_client_links_against_the_static_library() {
    // target/<profile>/deps/abi-<hash> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().and_then(|p| p.parent()).unwrap();
    let lib = lib_dir.join("liblevelset_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no static library or C compiler");
        return;
    }
    let out = tempfile::tempdir().unwrap();
    let bin = out.path().join("smoke");
    let st = Command::new("cc")
        .arg(manifest_dir().join("examples/smoke.c"))
        .arg("-I")
        .arg(manifest_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(st.success());
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).contains("slope"));
}
