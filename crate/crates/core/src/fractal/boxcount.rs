//! Dyadic box counting on the crossing-cell rasterization.
//!
//! At scale `k` the torus is tiled by `2^k x 2^k` boxes of side `2 pi 2^{-k}`;
//! on an `N_g = 2^L` grid each box is a block of `2^{L-k}` cells per side, so
//! `N_k` is the number of distinct `(i >> (L-k), j >> (L-k))` over crossing cells.
//!
//! The regression window is fixed: `k >= 2` (box side at most a quarter of the
//! domain) and at least 4 grid cells per box, i.e. blocks of at least 2 x 2
//! cells, giving `k <= L - 1`.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::levelset::{CellSet, LevelSet};
use super::{ols, Fit};
use crate::error::{Error, Result};

/// Minimum number of scales for a slope estimate.
pub const MIN_SCALES: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxCountCurve {
    pub n_g: usize,
    pub ks: Vec<u32>,
    pub counts: Vec<u64>,
}

impl BoxCountCurve {
    pub fn iter(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.ks.iter().copied().zip(self.counts.iter().copied())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub slope: f64,
    pub stderr: f64,
    pub k_min: u32,
    pub k_max: u32,
    /// RMS residual of `log N_k` about the fitted line.
    pub residual: f64,
    pub intercept: f64,
}

fn log2_resolution(n_g: usize) -> u32 {
    debug_assert!(n_g.is_power_of_two());
    n_g.trailing_zeros()
}

/// The fixed regression window `[2, log2(N_g) - 1]`.
pub fn scale_window(n_g: usize) -> RangeInclusive<u32> {
    2..=log2_resolution(n_g).saturating_sub(1)
}

pub fn box_count(ls: &LevelSet, k_range: RangeInclusive<u32>) -> Result<BoxCountCurve> {
    box_count_cells(&ls.crossing_cells, k_range)
}

/// Box counts of an arbitrary cell set.
pub fn box_count_cells(cells: &CellSet, k_range: RangeInclusive<u32>) -> Result<BoxCountCurve> {
    let n_g = cells.resolution();
    let l = log2_resolution(n_g);
    let limit = l.saturating_sub(1);
    if *k_range.end() > limit {
        return Err(Error::ScaleWindow {
            k_max: *k_range.end(),
            n_g,
            limit,
        });
    }
    let mut ks = Vec::new();
    let mut counts = Vec::new();
    let mut boxes: Vec<u64> = Vec::with_capacity(cells.len());
    for k in k_range {
        let s = l - k;
        boxes.clear();
        boxes.extend(cells.iter().map(|(i, j)| (((i >> s) as u64) << 32) | (j >> s) as u64));
        boxes.sort_unstable();
        boxes.dedup();
        ks.push(k);
        counts.push(boxes.len() as u64);
    }
    Ok(BoxCountCurve { n_g, ks, counts })
}

/// OLS slope of `log N_k` against `k log 2` over the whole curve.
pub fn estimate_dimension(curve: &BoxCountCurve) -> Result<DimensionEstimate> {
    let usable: Vec<(u32, u64)> = curve.iter().filter(|&(_, c)| c > 0).collect();
    if usable.len() < MIN_SCALES || usable.len() < curve.ks.len() {
        return Err(Error::InsufficientScales {
            required: MIN_SCALES.max(curve.ks.len()),
            found: usable.len(),
        });
    }
    let xs: Vec<f64> = usable.iter().map(|&(k, _)| k as f64 * std::f64::consts::LN_2).collect();
    let ys: Vec<f64> = usable.iter().map(|&(_, c)| (c as f64).ln()).collect();
    let Fit {
        slope,
        intercept,
        stderr,
        residual,
    } = ols(&xs, &ys);
    Ok(DimensionEstimate {
        slope,
        stderr,
        k_min: usable[0].0,
        k_max: usable[usable.len() - 1].0,
        residual,
        intercept,
    })
}

/// Box counts over the fixed window followed by the slope estimate.
pub fn dimension_of(ls: &LevelSet) -> Result<(BoxCountCurve, DimensionEstimate)> {
    let curve = box_count(ls, scale_window(ls.n_g))?;
    let est = estimate_dimension(&curve)?;
    Ok((curve, est))
}
