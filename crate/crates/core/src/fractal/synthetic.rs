//! Sets of known dimension for calibrating the box-counting estimator.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::levelset::CellSet;
use crate::noise::{SeedSpec, StreamKind};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticSet {
    /// The circle `x2 = 0.3`.
    Line,
    /// The square `[-pi/2, pi/2)^2`.
    FilledSquare,
    /// Triadic Koch curve over `[-2.9, 2.9] x {-1}`.
    Koch { iterations: u32 },
    /// Product of two random dyadic Cantor sets of dimension `d / 2` each.
    CantorProduct { dimension: f64 },
}

impl SyntheticSet {
    pub const KOCH_5: Self = Self::Koch { iterations: 5 };
    pub const CANTOR_1_5: Self = Self::CantorProduct { dimension: 1.5 };

    pub fn name(&self) -> String {
        match self {
            Self::Line => "line".into(),
            Self::FilledSquare => "filled_square".into(),
            Self::Koch { iterations } => format!("koch_{iterations}"),
            Self::CantorProduct { dimension } => format!("cantor_product_{dimension}"),
        }
    }

    pub fn dimension(&self) -> f64 {
        match self {
            Self::Line => 1.0,
            Self::FilledSquare => 2.0,
            Self::Koch { .. } => 4f64.ln() / 3f64.ln(),
            Self::CantorProduct { dimension } => *dimension,
        }
    }

    /// Cells of an `n_g x n_g` grid met by the set. Only the Cantor product uses `seed`.
    pub fn rasterize(&self, n_g: usize, seed: SeedSpec) -> CellSet {
        let h = 2.0 * PI / n_g as f64;
        let cell = |x: f64| (((x + PI) / h).floor() as i64).rem_euclid(n_g as i64) as usize;
        match *self {
            Self::Line => CellSet::from_cells(n_g, (0..n_g).map(|i| (i, cell(0.3)))),
            Self::FilledSquare => {
                let lo = cell(-PI / 2.0);
                let hi = cell(PI / 2.0);
                CellSet::from_cells(n_g, (lo..hi).flat_map(|i| (lo..hi).map(move |j| (i, j))))
            }
            Self::Koch { iterations } => {
                let pts = koch([-2.9, -1.0], [2.9, -1.0], iterations);
                let mut cells = Vec::new();
                for w in pts.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    let len = (b[0] - a[0]).hypot(b[1] - a[1]);
                    let m = (len / h * 16.0).ceil() as usize + 1;
                    for s in 0..=m {
                        let t = s as f64 / m as f64;
                        cells.push((cell(a[0] + t * (b[0] - a[0])), cell(a[1] + t * (b[1] - a[1]))));
                    }
                }
                CellSet::from_cells(n_g, cells)
            }
            Self::CantorProduct { dimension } => {
                let levels = n_g.trailing_zeros();
                let mut rng = seed.rng(StreamKind::Synthetic, 0);
                let a = cantor_cells(levels, dimension / 2.0, &mut rng);
                let b = cantor_cells(levels, dimension / 2.0, &mut rng);
                CellSet::from_cells(n_g, a.iter().flat_map(|&i| b.iter().map(move |&j| (i, j))))
            }
        }
    }
}

fn koch(p0: [f64; 2], p1: [f64; 2], iterations: u32) -> Vec<[f64; 2]> {
    let (s, c) = (PI / 3.0).sin_cos();
    let mut pts = vec![p0, p1];
    for _ in 0..iterations {
        let mut next = Vec::with_capacity(4 * pts.len());
        next.push(pts[0]);
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let d = [(b[0] - a[0]) / 3.0, (b[1] - a[1]) / 3.0];
            let p = [a[0] + d[0], a[1] + d[1]];
            let q = [a[0] + 2.0 * d[0], a[1] + 2.0 * d[1]];
            let m = [p[0] + c * d[0] - s * d[1], p[1] + s * d[0] + c * d[1]];
            next.extend([p, m, q, b]);
        }
        pts = next;
    }
    pts
}

/// Dyadic Cantor set in `[0, 2^levels)` with `round(2^{d l})` intervals at level
/// `l`: randomly chosen intervals keep both halves, the rest one random half.
fn cantor_cells(levels: u32, d: f64, rng: &mut impl Rng) -> Vec<usize> {
    let mut intervals = vec![0usize];
    for l in 1..=levels {
        let target = 2f64.powf(d * l as f64).round() as usize;
        let split = target.saturating_sub(intervals.len()).min(intervals.len());
        intervals.shuffle(rng);
        let mut next = Vec::with_capacity(intervals.len() + split);
        for (n, &iv) in intervals.iter().enumerate() {
            if n < split {
                next.extend([2 * iv, 2 * iv + 1]);
            } else {
                next.push(2 * iv + rng.random_range(0..2usize));
            }
        }
        next.sort_unstable();
        intervals = next;
    }
    intervals
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractal::boxcount::{box_count_cells, estimate_dimension, scale_window};

    fn estimate(set: SyntheticSet, n_g: usize, seed: u64) -> f64 {
        let cells = set.rasterize(n_g, SeedSpec::new(seed, 0));
        estimate_dimension(&box_count_cells(&cells, scale_window(n_g)).unwrap())
            .unwrap()
            .slope
    }

    #[test]
    fn line_and_square_are_exact() {
        assert!((estimate(SyntheticSet::Line, 256, 0) - 1.0).abs() < 1e-12);
        assert!((estimate(SyntheticSet::FilledSquare, 256, 0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn koch_curve_recovers_log4_over_log3() {
        let d = SyntheticSet::KOCH_5.dimension();
        assert!((d - 1.261_859_507_142_914_8).abs() < 1e-15);
        assert!((estimate(SyntheticSet::KOCH_5, 256, 0) - d).abs() < 0.05);
    }

    #[test]
    fn cantor_product_has_controlled_counts() {
        for seed in 0..5 {
            let e = estimate(SyntheticSet::CANTOR_1_5, 256, seed);
            assert!((e - 1.5).abs() < 0.05, "seed {seed}: {e}");
        }
        let a = SyntheticSet::CANTOR_1_5.rasterize(64, SeedSpec::new(1, 0));
        let b = SyntheticSet::CANTOR_1_5.rasterize(64, SeedSpec::new(1, 0));
        assert_eq!(a, b);
    }
}
