//! Level-set geometry and the statistics used to estimate its dimension.

pub mod boxcount;
pub mod frostman;
pub mod levelset;
pub mod lemmas;
pub mod synthetic;

use serde::{Deserialize, Serialize};

pub use boxcount::{box_count, box_count_cells, estimate_dimension, scale_window, BoxCountCurve, DimensionEstimate};
pub use frostman::{frostman_energy, frostman_mass, kernel_limit, EnergyKernel, FrostmanEnergy};
pub use levelset::{extract_level_set, CellSet, EdgePoint, LevelSet, Segment};
pub use lemmas::{
    covariance_det_check, h_gamma, mean_squared_increment, sin_sum, sin_sum_profile, structure_function_empirical, DetSummary,
    EmpiricalStructure,
};

use crate::spectral::GridField;

/// Ordinary least-squares fit `y = intercept + slope x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; zero with two points.
    pub stderr: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

pub fn ols(xs: &[f64], ys: &[f64]) -> Fit {
    assert_eq!(xs.len(), ys.len(), "ols needs paired samples");
    assert!(xs.len() >= 2, "ols needs at least two points");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = if xs.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Fit {
        slope,
        intercept,
        stderr,
        residual: (sse / n).sqrt(),
    }
}

/// Fraction of grid points with `|g| <= eps`.
pub fn occupation_fraction(g: &GridField, eps: f64) -> f64 {
    let hits = g.values().iter().filter(|v| v.abs() <= eps).count();
    hits as f64 / g.values().len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ols_recovers_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 - 2.0 * x).collect();
        let f = ols(&xs, &ys);
        assert!((f.slope + 2.0).abs() < 1e-14);
        assert!((f.intercept - 0.5).abs() < 1e-14);
        assert!(f.stderr < 1e-14 && f.residual < 1e-14);
    }

    #[test]
    fn ols_stderr_matches_textbook_formula() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let ys = [1.1, 1.9, 3.2, 3.8, 5.1];
        let f = ols(&xs, &ys);
        // sqrt(SSE / (n - 2) / Sxx) = sqrt(0.107 / 30)
        assert!((f.slope - 0.99).abs() < 1e-12);
        assert!((f.stderr - 0.059_721_576_223_896_45).abs() < 1e-12);
    }

    #[test]
    fn occupation_of_sine() {
        let g = GridField::from_fn(1024, |x| x[0].sin()).unwrap();
        assert_eq!(occupation_fraction(&g, 1.0), 1.0);
        assert_eq!(occupation_fraction(&GridField::zeros(8).unwrap(), 1e-9), 1.0);
        for eps in [0.2, 0.1, 0.05] {
            let exact = 2.0 / std::f64::consts::PI * f64::asin(eps);
            assert!((occupation_fraction(&g, eps) - exact).abs() < 2.0 / 1024.0);
        }
    }
}
