use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use levelset_lab::harness::experiments::Check;
use levelset_lab::harness::{
    calibrate_estimator, field_dimension, load_config_or_manifest, run_comparison, run_linear_experiment,
    run_nonlinear_experiment, verify_lemmas, ExperimentConfig, ExperimentReport,
};
use levelset_lab::Result;

/// Level-set dimension experiments for the stochastic 2-D Navier-Stokes alpha-model.
#[derive(Parser)]
#[command(name = "levelset-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Config file or run manifest to start from.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    replicas: Option<usize>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Allow parameters outside the supported regime.
    #[arg(long, global = true)]
    unsupported_regime: bool,
    /// Override a config key, e.g. `--set noise.delta=0.3`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact samples of the linear field and their level-set statistics.
    SampleLinear,
    /// Galerkin integration of the nonlinear equation and the same statistics.
    SolveNonlinear,
    /// Box-counting dimension of the level sets of one stored field.
    Dimension {
        /// Grid or spectral field file.
        #[arg(long)]
        input: PathBuf,
    },
    /// Checks of the regularity lemmas and Frostman bounds.
    VerifyLemmas,
    /// Linear vs nonlinear dimension statistics. Runs both experiments under
    /// `<out>/linear` and `<out>/nonlinear` unless directories are given.
    Compare {
        #[arg(long, requires = "nonlinear")]
        linear: Option<PathBuf>,
        #[arg(long, requires = "linear")]
        nonlinear: Option<PathBuf>,
    },
    /// Box counting on synthetic sets of known dimension.
    CalibrateEstimator,
}

fn build_config(c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &c.config {
        Some(p) => load_config_or_manifest(p)?,
        None => ExperimentConfig::default(),
    };
    for o in &c.overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| levelset_lab::Error::Parse(format!("expected KEY=VALUE, got `{o}`")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(r) = c.replicas {
        cfg.replicas = r;
    }
    if let Some(w) = c.workers {
        cfg.workers = w;
    }
    if let Some(o) = &c.out {
        cfg.out_dir = o.clone();
    }
    if c.unsupported_regime {
        cfg.solver.unsupported_regime = true;
    }
    Ok(cfg)
}

fn print_checks(checks: &[Check]) -> bool {
    for c in checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    checks.iter().all(|c| c.passed)
}

fn report_experiment(r: &ExperimentReport) -> bool {
    let s = &r.summary;
    println!(
        "{}: {} replicas, target dimension {:.4}, outputs in {}",
        s.command,
        s.replicas_completed,
        s.target_dimension,
        r.dir.display()
    );
    for l in &s.levels {
        println!(
            "  y = {} ({:.4}): median slope {:.4}, mean {:.4}, empty {:.3}",
            l.level, l.y, l.median_slope, l.mean_slope, l.empty_fraction
        );
    }
    print_checks(&s.checks)
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = build_config(&cli.common)?;
    match cli.command {
        Command::SampleLinear => Ok(report_experiment(&run_linear_experiment(&cfg)?)),
        Command::SolveNonlinear => Ok(report_experiment(&run_nonlinear_experiment(&cfg)?)),
        Command::Dimension { input } => {
            let (levels, checks) = field_dimension(&cfg, &input)?;
            for l in &levels {
                println!("y = {} ({:.4}): slope {:.4}", l.level, l.y, l.median_slope);
            }
            Ok(print_checks(&checks))
        }
        Command::VerifyLemmas => {
            let r = verify_lemmas(&cfg)?;
            let checks: Vec<Check> = r
                .checks
                .iter()
                .map(|c| {
                    let vals: Vec<String> = c.values.iter().map(|(k, v)| format!("{k}={v:.4e}")).collect();
                    Check::new(format!("{} / {}", c.lemma, c.check), c.passed, vals.join(", "))
                })
                .collect();
            Ok(print_checks(&checks))
        }
        Command::Compare { linear, nonlinear } => {
            let (lin, nl) = match (linear, nonlinear) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    let mut c = cfg.clone();
                    c.out_dir = cfg.out_dir.join("linear");
                    report_experiment(&run_linear_experiment(&c)?);
                    c.out_dir = cfg.out_dir.join("nonlinear");
                    report_experiment(&run_nonlinear_experiment(&c)?);
                    (cfg.out_dir.join("linear"), cfg.out_dir.join("nonlinear"))
                }
            };
            let r = run_comparison(&cfg, &lin, &nl)?;
            let checks: Vec<Check> = r
                .levels
                .iter()
                .map(|l| {
                    Check::new(
                        format!("median difference at level {}", l.level),
                        l.passed,
                        format!(
                            "{:.4} - {:.4} = {:.4}, KS {:.3}, overlap {:.3}, empty {:.3} / {:.3}",
                            l.median_linear,
                            l.median_nonlinear,
                            l.median_difference,
                            l.ks_statistic,
                            l.overlap,
                            l.empty_fraction_linear,
                            l.empty_fraction_nonlinear
                        ),
                    )
                })
                .collect();
            Ok(print_checks(&checks))
        }
        Command::CalibrateEstimator => {
            let rows = calibrate_estimator(&cfg)?;
            let checks: Vec<Check> = rows
                .iter()
                .map(|r| {
                    Check::new(
                        &r.set,
                        r.passed,
                        format!("slope {:.4} vs {:.4} (k {}..{})", r.slope, r.theoretical, r.k_min, r.k_max),
                    )
                })
                .collect();
            Ok(print_checks(&checks))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
