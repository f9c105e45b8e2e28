//! CSV rows, JSON reports and SVG plots written by the experiments.

use std::path::Path;

use plotters::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxCountRow {
    pub replica: u64,
    pub y: f64,
    pub k: u32,
    pub n_k: u64,
}

/// `slope` and `stderr` are `NaN` when the level set is empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionRow {
    pub replica: u64,
    pub y: f64,
    pub slope: f64,
    pub stderr: f64,
    pub window: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureRow {
    pub r: f64,
    pub g_analytic: f64,
    pub g_empirical: f64,
    pub n_samples: usize,
    pub lag_cells: u32,
    pub tail_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeVarianceRow {
    pub k1: i32,
    pub k2: i32,
    pub analytic: f64,
    pub empirical: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrostmanRow {
    pub replica: u64,
    pub n: f64,
    pub mass: f64,
    pub energy_gamma: f64,
    pub gamma: f64,
    pub diagonal_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccupationRow {
    pub replica: u64,
    pub eps: f64,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub replica: u64,
    pub t: f64,
    pub l2_norm: f64,
    pub hneg_norm: f64,
    pub residual_1: f64,
    pub residual_2: f64,
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    if !path.exists() {
        return Err(Error::MissingInput(path.display().to_string()));
    }
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn plot_err<E: std::fmt::Display>(e: E) -> Error {
    Error::Io(std::io::Error::other(format!("plot: {e}")))
}

/// Log-log scatter of named series with an optional reference slope through
/// the first point of the first series.
pub fn loglog_plot(
    path: &Path,
    title: &str,
    series: &[(&str, Vec<(f64, f64)>)],
    reference_slope: Option<f64>,
) -> Result<()> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, s)| s.iter().copied())
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    if pts.is_empty() {
        return Ok(());
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for (x, y) in &pts {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    let pad = |a: f64, b: f64| (b - a).max(1e-3) * 0.05;
    let (px, py) = (pad(x0, x1), pad(y0, y1));
    let root = SVGBackend::new(path, (640, 480)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 18))
        .margin(10)
        .x_label_area_size(40)
        .y_label_area_size(50)
        .build_cartesian_2d((x0 - px)..(x1 + px), (y0 - py)..(y1 + py))
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .x_desc("log10 x")
        .y_desc("log10 y")
        .draw()
        .map_err(plot_err)?;
    let colors = [BLUE, RED, GREEN, MAGENTA, CYAN, BLACK];
    for (n, (name, s)) in series.iter().enumerate() {
        let color = colors[n % colors.len()];
        let data: Vec<(f64, f64)> = s
            .iter()
            .filter(|(x, y)| *x > 0.0 && *y > 0.0)
            .map(|(x, y)| (x.log10(), y.log10()))
            .collect();
        chart
            .draw_series(LineSeries::new(data.clone(), color))
            .map_err(plot_err)?
            .label(*name)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
        chart
            .draw_series(data.into_iter().map(|p| Circle::new(p, 3, color.filled())))
            .map_err(plot_err)?;
    }
    if let (Some(slope), Some((_, first))) = (reference_slope, series.first()) {
        if let Some(&(x, y)) = first.iter().find(|(x, y)| *x > 0.0 && *y > 0.0) {
            let (lx, ly) = (x.log10(), y.log10());
            let line = vec![(x0, ly + slope * (x0 - lx)), (x1, ly + slope * (x1 - lx))];
            chart
                .draw_series(LineSeries::new(line, BLACK.mix(0.4)))
                .map_err(plot_err)?
                .label(format!("slope {slope:.3}"))
                .legend(|(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], BLACK.mix(0.4)));
        }
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(plot_err)?;
    root.present().map_err(plot_err)?;
    Ok(())
}
