//! Marching squares on the periodic grid.
//!
//! Cell `(i, j)` has corners `c0 = (i, j)`, `c1 = (i+1, j)`, `c2 = (i+1, j+1)`,
//! `c3 = (i, j+1)` with indices wrapped modulo `N_g`, so the last row and column
//! of cells close the torus. A corner is "above" when its value is `>= y`; an
//! edge is crossed when its corners disagree. Saddle cells (diagonal corners
//! agree, neighbours disagree) are split by the cell-center rule: the center
//! value is the mean of the four corners, and the two corners whose class
//! differs from the center's are cut off by their own segments.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::spectral::GridField;

/// A sorted set of cell indices `i * N_g + j`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSet {
    n_g: usize,
    cells: Vec<u32>,
}

impl CellSet {
    /// Builds the set from arbitrary `(i, j)` pairs (duplicates allowed).
    pub fn from_cells(n_g: usize, cells: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut v: Vec<u32> = cells
            .into_iter()
            .map(|(i, j)| ((i % n_g) * n_g + j % n_g) as u32)
            .collect();
        v.sort_unstable();
        v.dedup();
        Self { n_g, cells: v }
    }

    pub fn resolution(&self) -> usize {
        self.n_g
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.cells.binary_search(&((i * self.n_g + j) as u32)).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cells
            .iter()
            .map(move |&c| (c as usize / self.n_g, c as usize % self.n_g))
    }
}

/// A point on the grid edge from corner `from` to corner `to`, at fraction `t`.
///
/// `pos` is in torus coordinates within the cell's unwrapped frame, so it may
/// exceed `pi` by at most one cell for cells on the wrap-around.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgePoint {
    pub pos: [f64; 2],
    pub from: (usize, usize),
    pub to: (usize, usize),
    pub t: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub cell: (usize, usize),
    pub a: EdgePoint,
    pub b: EdgePoint,
}

impl Segment {
    pub fn length(&self) -> f64 {
        let d = [self.a.pos[0] - self.b.pos[0], self.a.pos[1] - self.b.pos[1]];
        d[0].hypot(d[1])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSet {
    pub level: f64,
    pub n_g: usize,
    pub crossing_cells: CellSet,
    pub segments: Vec<Segment>,
}

impl LevelSet {
    pub fn is_empty(&self) -> bool {
        self.crossing_cells.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }
}

// Corner offsets and edges as corner pairs.
const CORNERS: [(usize, usize); 4] = [(0, 0), (1, 0), (1, 1), (0, 1)];
const EDGES: [(usize, usize); 4] = [(0, 1), (1, 2), (2, 3), (3, 0)];

pub fn extract_level_set(g: &GridField, y: f64) -> LevelSet {
    let n = g.resolution();
    let h = 2.0 * PI / n as f64;
    let vals = g.values();
    let mut segments = Vec::new();
    let mut cells = Vec::new();
    for i in 0..n {
        let i1 = (i + 1) % n;
        for j in 0..n {
            let j1 = (j + 1) % n;
            let v = [vals[i * n + j], vals[i1 * n + j], vals[i1 * n + j1], vals[i * n + j1]];
            let above = v.map(|x| x >= y);
            let mask = above.iter().enumerate().fold(0u8, |m, (c, &a)| m | (a as u8) << c);
            if mask == 0 || mask == 15 {
                continue;
            }
            let point = |e: usize| {
                let (a, b) = EDGES[e];
                let t = (y - v[a]) / (v[b] - v[a]);
                let (ca, cb) = (CORNERS[a], CORNERS[b]);
                let pa = [(i + ca.0) as f64, (j + ca.1) as f64];
                let pb = [(i + cb.0) as f64, (j + cb.1) as f64];
                EdgePoint {
                    pos: [
                        -PI + h * (pa[0] + t * (pb[0] - pa[0])),
                        -PI + h * (pa[1] + t * (pb[1] - pa[1])),
                    ],
                    from: ((i + ca.0) % n, (j + ca.1) % n),
                    to: ((i + cb.0) % n, (j + cb.1) % n),
                    t,
                }
            };
            let crossed: Vec<usize> = (0..4).filter(|&e| above[EDGES[e].0] != above[EDGES[e].1]).collect();
            let cell = (i, j);
            cells.push(cell);
            if crossed.len() == 2 {
                segments.push(Segment {
                    cell,
                    a: point(crossed[0]),
                    b: point(crossed[1]),
                });
            } else {
                // saddle: corner c sits between edges (c - 1) mod 4 and c
                let center = 0.25 * (v[0] + v[1] + v[2] + v[3]) >= y;
                for c in (0..4).filter(|&c| above[c] != center) {
                    segments.push(Segment {
                        cell,
                        a: point((c + 3) % 4),
                        b: point(c),
                    });
                }
            }
        }
    }
    LevelSet {
        level: y,
        n_g: n,
        crossing_cells: CellSet::from_cells(n, cells),
        segments,
    }
}
