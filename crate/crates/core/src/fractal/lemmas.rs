//! Measurable counterparts of the regularity lemmas: empirical structure
//! functions, lattice sin-sums and the two-point covariance determinant.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ols, Fit};
use crate::error::{Error, Result};
use crate::linear::{mode_variance, two_point_covariance_with, ModelParams};
use crate::noise::{SeedSpec, StreamKind};
use crate::spectral::{torus_distance, wrap_angle, GridField, ModeIndexSet, Truncation};

pub const MIN_STRUCTURE_SAMPLES: usize = 50;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalStructure {
    /// Grid displacements `(di, dj)`.
    pub lags: Vec<(i32, i32)>,
    /// Torus length of each displacement.
    pub r: Vec<f64>,
    /// Ensemble and space average of the squared increment.
    pub values: Vec<f64>,
    pub n_samples: usize,
    /// Log-log fit over the nonzero lags, when there are at least two.
    pub fit: Option<Fit>,
}

/// Space average of `|g(x + r) - g(x)|^2` for the grid displacement `(di, dj)`.
pub fn mean_squared_increment(g: &GridField, di: i32, dj: i32) -> f64 {
    let n = g.resolution();
    let di = di.rem_euclid(n as i32) as usize;
    let dj = dj.rem_euclid(n as i32) as usize;
    let v = g.values();
    let mut acc = 0.0;
    for i in 0..n {
        let row = i * n;
        let row2 = ((i + di) % n) * n;
        for j in 0..n {
            let d = v[row2 + (j + dj) % n] - v[row + j];
            acc += d * d;
        }
    }
    acc / (n * n) as f64
}

/// Mean of `|g(x + r) - g(x)|^2` over all grid points and samples, per lag.
pub fn structure_function_empirical(samples: &[GridField], lags: &[(i32, i32)]) -> Result<EmpiricalStructure> {
    if samples.len() < MIN_STRUCTURE_SAMPLES {
        return Err(Error::TooFewSamples {
            required: MIN_STRUCTURE_SAMPLES,
            found: samples.len(),
        });
    }
    let n = samples[0].resolution();
    if let Some(bad) = samples.iter().find(|s| s.resolution() != n) {
        return Err(Error::ResolutionMismatch {
            expected: n,
            found: bad.resolution(),
        });
    }
    let h = 2.0 * PI / n as f64;
    let r: Vec<f64> = lags
        .iter()
        .map(|&(a, b)| wrap_angle(a as f64 * h).hypot(wrap_angle(b as f64 * h)))
        .collect();
    let values: Vec<f64> = lags
        .iter()
        .map(|&(di, dj)| {
            let per_sample: Vec<f64> = samples
                .par_iter()
                .map(|g| mean_squared_increment(g, di, dj))
                .collect();
            per_sample.iter().sum::<f64>() / samples.len() as f64
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = r
        .iter()
        .zip(&values)
        .filter(|(r, v)| **r > 0.0 && **v > 0.0)
        .map(|(r, v)| (r.ln(), v.ln()))
        .unzip();
    let fit = (xs.len() >= 2).then(|| ols(&xs, &ys));
    Ok(EmpiricalStructure {
        lags: lags.to_vec(),
        r,
        values,
        n_samples: samples.len(),
        fit,
    })
}

/// `h_gamma(r) = -r^2 log r` for `gamma = 2`, otherwise `r^{min(gamma, 2)}`.
pub fn h_gamma(r: f64, gamma: f64) -> f64 {
    if gamma == 2.0 {
        -r * r * r.ln()
    } else {
        r.powf(gamma.min(2.0))
    }
}

/// `sum_{k in Z^d, 0 < |k| <= cutoff} |k|^{-(d + gamma)} sin^2(k.x)` for `d = x.len()` in 1..=3.
pub fn sin_sum(x: &[f64], gamma: f64, cutoff: u32) -> f64 {
    sin_sum_profile(&[x.to_vec()], gamma, cutoff)[0]
}

/// [`sin_sum`] at several points of the same dimension, sharing the lattice walk.
///
/// The sum runs over one representative of each pair `{k, -k}` and doubles it.
/// Rows of the first coordinate are summed in parallel and then added in order,
/// so the result does not depend on the thread count.
pub fn sin_sum_profile(points: &[Vec<f64>], gamma: f64, cutoff: u32) -> Vec<f64> {
    assert!(!points.is_empty());
    let d = points[0].len();
    assert!((1..=3).contains(&d), "sin_sum supports dimensions 1 to 3");
    assert!(points.iter().all(|p| p.len() == d), "points must share a dimension");
    let c = cutoff as i64;
    let ext = |a: usize| if a < d { c } else { 0 };
    let (c2, c3) = (ext(1), ext(2));
    // tables[p][axis][k] = (sin(k x_axis), cos(k x_axis)) for k in 0..=cutoff
    let tables: Vec<[Vec<(f64, f64)>; 3]> = points
        .iter()
        .map(|p| {
            std::array::from_fn(|a| {
                let xa = if a < d { p[a] } else { 0.0 };
                (0..=c).map(|k| (k as f64 * xa).sin_cos()).collect()
            })
        })
        .collect();
    let trig = |t: &[(f64, f64)], k: i64| {
        let (s, co) = t[k.unsigned_abs() as usize];
        (if k < 0 { -s } else { s }, co)
    };
    let expo = -0.5 * (d as f64 + gamma);
    let rows: Vec<Vec<f64>> = (0..=c)
        .into_par_iter()
        .map(|k1| {
            let mut acc = vec![0.0; points.len()];
            let k2_lo = if k1 == 0 { 0 } else { -c2 };
            for k2 in k2_lo..=c2 {
                let k3_lo = if k1 == 0 && k2 == 0 { 1 } else { -c3 };
                for k3 in k3_lo..=c3 {
                    let n2 = k1 * k1 + k2 * k2 + k3 * k3;
                    if n2 == 0 || n2 > c * c {
                        continue;
                    }
                    let w = (n2 as f64).powf(expo);
                    for (a, t) in acc.iter_mut().zip(&tables) {
                        let (s1, o1) = trig(&t[0], k1);
                        let (s2, o2) = trig(&t[1], k2);
                        let (s3, o3) = trig(&t[2], k3);
                        let s12 = s1 * o2 + o1 * s2;
                        let o12 = o1 * o2 - s1 * s2;
                        let s = s12 * o3 + o12 * s3;
                        *a += w * s * s;
                    }
                }
            }
            acc
        })
        .collect();
    let mut out = vec![0.0; points.len()];
    for row in rows {
        for (o, v) in out.iter_mut().zip(row) {
            *o += v;
        }
    }
    out.iter().map(|v| 2.0 * v).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetSummary {
    pub n_pairs: usize,
    pub cutoff: u32,
    /// `det(q_{xx'}) / |x - x'|_T^{2(alpha + delta - 1)}` per pair, in draw order.
    pub ratios: Vec<f64>,
    pub min_ratio: f64,
    pub median_ratio: f64,
    pub max_ratio: f64,
}

/// Samples `n_pairs` uniform point pairs from the `Points` stream and reports
/// the determinant ratio of their covariance at time `t`.
pub fn covariance_det_check(
    p: &ModelParams,
    t: f64,
    n_pairs: usize,
    cutoff: u32,
    seed: SeedSpec,
) -> Result<DetSummary> {
    if n_pairs == 0 {
        return Err(Error::Validation("n_pairs ≥ 1 violated".into()));
    }
    if !(t > 0.0) {
        return Err(Error::Validation(format!("t = {t} violates t > 0")));
    }
    let mut rng = seed.rng(StreamKind::Points, 0);
    let mut pairs = Vec::with_capacity(n_pairs);
    while pairs.len() < n_pairs {
        let mut u = || rng.random_range(-PI..PI);
        let (x, y) = ([u(), u()], [u(), u()]);
        if torus_distance(x, y) > 0.0 {
            pairs.push((x, y));
        }
    }
    let modes = ModeIndexSet::new(cutoff, Truncation::Ball)?;
    let weights: Vec<f64> = modes.iter().map(|k| mode_variance(k, t, p)).collect();
    let expo = 2.0 * p.holder_exponent();
    let ratios: Vec<f64> = pairs
        .par_iter()
        .map(|&(x, y)| two_point_covariance_with(x, y, &modes, &weights).det() / torus_distance(x, y).powf(expo))
        .collect();
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    Ok(DetSummary {
        n_pairs,
        cutoff,
        min_ratio: sorted[0],
        median_ratio: sorted[sorted.len() / 2],
        max_ratio: sorted[sorted.len() - 1],
        ratios,
    })
}
