//! Fourier lattice bookkeeping on the torus `[-pi, pi]^2`.
//!
//! Fields are stored as real coefficients over the orthonormal basis
//! `e_k = c sin(k.x)` for `k` in the upper half lattice and `e_k = c cos(k.x)`
//! for `k` in the lower half, with `c = sqrt(2) / (2 pi)`. The complex
//! conjugate-symmetric representation only appears inside [`transform`].

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod io;
pub mod transform;

pub use transform::{analyze, synthesize, Transform};

/// Normalisation of the real basis functions, `sqrt(2) / (2 pi)`.
pub const BASIS_NORM: f64 = std::f64::consts::SQRT_2 / (2.0 * PI);

/// Area of the torus, `(2 pi)^2`.
pub const TORUS_AREA: f64 = 4.0 * PI * PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WaveVector {
    pub k1: i32,
    pub k2: i32,
}

impl WaveVector {
    pub fn new(k1: i32, k2: i32) -> Result<Self> {
        if k1 == 0 && k2 == 0 {
            return Err(Error::ZeroMode);
        }
        Ok(Self { k1, k2 })
    }

    pub(crate) const fn raw(k1: i32, k2: i32) -> Self {
        Self { k1, k2 }
    }

    #[inline]
    pub fn norm_sq(self) -> i64 {
        let (a, b) = (self.k1 as i64, self.k2 as i64);
        a * a + b * b
    }

    #[inline]
    pub fn norm(self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    #[inline]
    pub fn sup_norm(self) -> u32 {
        self.k1.unsigned_abs().max(self.k2.unsigned_abs())
    }

    /// Membership in the upper half lattice `{k2 > 0} U {k1 > 0, k2 = 0}`,
    /// where the basis function is a sine.
    #[inline]
    pub fn is_upper(self) -> bool {
        self.k2 > 0 || (self.k2 == 0 && self.k1 > 0)
    }

    #[inline]
    pub fn neg(self) -> Self {
        Self::raw(-self.k1, -self.k2)
    }

    /// `k^perp = (-k2, k1)`.
    #[inline]
    pub fn perp(self) -> (i32, i32) {
        (-self.k2, self.k1)
    }

    #[inline]
    pub fn dot(self, x: [f64; 2]) -> f64 {
        self.k1 as f64 * x[0] + self.k2 as f64 * x[1]
    }

    /// Value of the basis function `e_k` at `x`.
    pub fn basis_at(self, x: [f64; 2]) -> f64 {
        let phase = self.dot(x);
        if self.is_upper() {
            BASIS_NORM * phase.sin()
        } else {
            BASIS_NORM * phase.cos()
        }
    }
}

impl fmt::Display for WaveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.k1, self.k2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// `|k| <= N`
    #[default]
    Ball,
    /// `|k|_inf <= N`
    Square,
}

impl Truncation {
    pub fn contains(self, k: WaveVector, radius: u32) -> bool {
        match self {
            Truncation::Ball => k.norm_sq() <= (radius as i64) * (radius as i64),
            Truncation::Square => k.sup_norm() <= radius,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Truncation::Ball => "ball",
            Truncation::Square => "square",
        }
    }
}

impl std::str::FromStr for Truncation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ball" | "euclidean_ball" => Ok(Truncation::Ball),
            "square" => Ok(Truncation::Square),
            other => Err(Error::Parse(format!("unknown truncation shape `{other}`"))),
        }
    }
}

/// The finite set of wave vectors a field is expanded over, sorted
/// lexicographically by `(k1, k2)`.
#[derive(Debug, PartialEq)]
pub struct ModeIndexSet {
    radius: u32,
    shape: Truncation,
    modes: Vec<WaveVector>,
    // dense (2R+1)^2 table, u32::MAX marks absent entries
    lookup: Vec<u32>,
    negated: Vec<u32>,
}

impl ModeIndexSet {
    pub fn new(radius: u32, shape: Truncation) -> Result<Arc<Self>> {
        if radius == 0 {
            return Err(Error::Validation("truncation radius N >= 1 required".into()));
        }
        let r = radius as i32;
        let modes: Vec<WaveVector> = (-r..=r)
            .flat_map(|k1| (-r..=r).map(move |k2| WaveVector::raw(k1, k2)))
            .filter(|&k| (k.k1, k.k2) != (0, 0) && shape.contains(k, radius))
            .collect();
        let side = 2 * radius as usize + 1;
        let mut lookup = vec![u32::MAX; side * side];
        for (i, k) in modes.iter().enumerate() {
            lookup[Self::slot(radius, *k)] = i as u32;
        }
        let negated = modes
            .iter()
            .map(|k| lookup[Self::slot(radius, k.neg())])
            .collect();
        Ok(Arc::new(Self {
            radius,
            shape,
            modes,
            lookup,
            negated,
        }))
    }

    #[inline]
    fn slot(radius: u32, k: WaveVector) -> usize {
        let side = 2 * radius as i64 + 1;
        ((k.k1 as i64 + radius as i64) * side + (k.k2 as i64 + radius as i64)) as usize
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn shape(&self) -> Truncation {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[WaveVector] {
        &self.modes
    }

    pub fn iter(&self) -> impl Iterator<Item = WaveVector> + '_ {
        self.modes.iter().copied()
    }

    pub fn index_of(&self, k: WaveVector) -> Option<usize> {
        if k.sup_norm() > self.radius {
            return None;
        }
        match self.lookup[Self::slot(self.radius, k)] {
            u32::MAX => None,
            i => Some(i as usize),
        }
    }

    pub fn contains(&self, k: WaveVector) -> bool {
        self.index_of(k).is_some()
    }

    /// Index of `-k` for the mode at index `i`; the set is closed under negation.
    #[inline]
    pub fn negated_index(&self, i: usize) -> usize {
        self.negated[i] as usize
    }

    /// Smallest grid resolution that represents every mode without aliasing.
    pub fn min_resolution(&self) -> usize {
        2 * self.radius as usize + 2
    }
}

/// Real coefficients over the basis `e_k`, one per mode of a [`ModeIndexSet`].
#[derive(Clone, Debug)]
pub struct SpectralField {
    modes: Arc<ModeIndexSet>,
    coeffs: Vec<f64>,
}

impl PartialEq for SpectralField {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.modes, &other.modes) || self.modes == other.modes)
            && self.coeffs == other.coeffs
    }
}

impl SpectralField {
    pub fn zeros(modes: &Arc<ModeIndexSet>) -> Self {
        Self {
            coeffs: vec![0.0; modes.len()],
            modes: Arc::clone(modes),
        }
    }

    pub fn from_coeffs(modes: &Arc<ModeIndexSet>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != modes.len() {
            return Err(Error::ModeSetMismatch);
        }
        Ok(Self {
            modes: Arc::clone(modes),
            coeffs,
        })
    }

    pub fn from_fn(modes: &Arc<ModeIndexSet>, mut f: impl FnMut(WaveVector) -> f64) -> Self {
        Self {
            coeffs: modes.iter().map(&mut f).collect(),
            modes: Arc::clone(modes),
        }
    }

    /// Unit-free single mode `value * e_k`.
    pub fn single_mode(modes: &Arc<ModeIndexSet>, k: WaveVector, value: f64) -> Result<Self> {
        let mut f = Self::zeros(modes);
        let i = modes.index_of(k).ok_or_else(|| {
            Error::Validation(format!("mode {k} outside the truncation set"))
        })?;
        f.coeffs[i] = value;
        Ok(f)
    }

    pub fn modes(&self) -> &Arc<ModeIndexSet> {
        &self.modes
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn coeff(&self, k: WaveVector) -> f64 {
        self.modes.index_of(k).map_or(0.0, |i| self.coeffs[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (WaveVector, f64)> + '_ {
        self.modes.iter().zip(self.coeffs.iter().copied())
    }

    pub fn same_modes(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.modes, &other.modes) || self.modes == other.modes
    }

    /// `||f||_gamma^2 = sum |k|^{2 gamma} f_k^2`.
    pub fn norm_sq(&self, gamma: f64) -> f64 {
        if gamma == 0.0 {
            return self.coeffs.iter().map(|c| c * c).sum();
        }
        self.iter()
            .map(|(k, c)| (k.norm_sq() as f64).powf(gamma) * c * c)
            .sum()
    }

    pub fn norm(&self, gamma: f64) -> f64 {
        self.norm_sq(gamma).sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.norm(0.0)
    }

    /// L2 inner product. Both fields must share the mode set.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        if !self.same_modes(other) {
            return Err(Error::ModeSetMismatch);
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum())
    }

    /// Re-expand over another mode set, dropping modes it does not contain.
    pub fn restrict_to(&self, modes: &Arc<ModeIndexSet>) -> Self {
        Self::from_fn(modes, |k| self.coeff(k))
    }

    pub fn scale(&mut self, s: f64) {
        self.coeffs.iter_mut().for_each(|c| *c *= s);
    }

    pub fn axpy(&mut self, a: f64, x: &Self) -> Result<()> {
        if !self.same_modes(x) {
            return Err(Error::ModeSetMismatch);
        }
        for (y, xv) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *y += a * xv;
        }
        Ok(())
    }

    /// Pointwise evaluation of the basis expansion; O(modes).
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        self.iter().map(|(k, c)| c * k.basis_at(x)).sum()
    }
}

/// `A^gamma f`: multiplies each coefficient by `|k|^{2 gamma}`.
pub fn apply_fractional_laplacian(f: &SpectralField, gamma: f64) -> SpectralField {
    let mut out = f.clone();
    if gamma != 0.0 {
        for (c, k) in out.coeffs.iter_mut().zip(f.modes.iter()) {
            *c *= (k.norm_sq() as f64).powf(gamma);
        }
    }
    out
}

/// Zeroes every coefficient outside `{|k| <= radius}` (or the square), keeping the mode set.
pub fn project(f: &SpectralField, radius: u32, shape: Truncation) -> SpectralField {
    let mut out = f.clone();
    for (c, k) in out.coeffs.iter_mut().zip(f.modes.iter()) {
        if !shape.contains(k, radius) {
            *c = 0.0;
        }
    }
    out
}

/// Divergence-free velocity `u = grad^perp psi` with `grad^perp = (-d2, d1)`,
/// stored through its scalar potential `psi`.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityField {
    potential: SpectralField,
}

impl VelocityField {
    pub fn from_potential(potential: SpectralField) -> Self {
        Self { potential }
    }

    pub fn potential(&self) -> &SpectralField {
        &self.potential
    }

    /// Real-basis coefficients of `(u1, u2)`.
    ///
    /// `d_j sin(k.x) = k_j cos(k.x)` and `d_j cos(k.x) = k_j sin(-k.x)`, so a
    /// coefficient on `k` lands on `-k` in both cases, scaled by `k^perp`.
    pub fn components(&self) -> (SpectralField, SpectralField) {
        let modes = self.potential.modes();
        let mut u1 = SpectralField::zeros(modes);
        let mut u2 = SpectralField::zeros(modes);
        for (i, (k, psi)) in self.potential.iter().enumerate() {
            let j = modes.negated_index(i);
            let (p1, p2) = k.perp();
            u1.coeffs[j] = p1 as f64 * psi;
            u2.coeffs[j] = p2 as f64 * psi;
        }
        (u1, u2)
    }

    /// Per-mode `k . u_k` in the complex Fourier picture, `i (k . k^perp) psi_k`.
    pub fn spectral_divergence(&self) -> Vec<f64> {
        self.potential
            .iter()
            .map(|(k, psi)| {
                let (p1, p2) = k.perp();
                let dot = k.k1 as i64 * p1 as i64 + k.k2 as i64 * p2 as i64;
                dot as f64 * psi
            })
            .collect()
    }

    pub fn to_grid(&self, n_g: usize) -> Result<(GridField, GridField)> {
        let (u1, u2) = self.components();
        Ok((synthesize(&u1, n_g)?, synthesize(&u2, n_g)?))
    }
}

/// `u = grad^perp A^{-M} theta`.
pub fn perp_gradient_inverse(theta: &SpectralField, m: f64) -> VelocityField {
    VelocityField::from_potential(apply_fractional_laplacian(theta, -m))
}

/// Real values on the uniform grid `x_ij = (-pi + 2 pi i / N_g, -pi + 2 pi j / N_g)`,
/// row-major in `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    n_g: usize,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(n_g: usize, values: Vec<f64>) -> Result<Self> {
        check_resolution(n_g)?;
        if values.len() != n_g * n_g {
            return Err(Error::ResolutionMismatch {
                expected: n_g * n_g,
                found: values.len(),
            });
        }
        Ok(Self { n_g, values })
    }

    pub fn zeros(n_g: usize) -> Result<Self> {
        Self::new(n_g, vec![0.0; n_g * n_g])
    }

    pub fn from_fn(n_g: usize, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        check_resolution(n_g)?;
        let values = (0..n_g)
            .flat_map(|i| (0..n_g).map(move |j| (i, j)))
            .map(|(i, j)| f(grid_point(n_g, i, j)))
            .collect();
        Ok(Self { n_g, values })
    }

    pub fn resolution(&self) -> usize {
        self.n_g
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_g + j]
    }

    /// Value at indices taken modulo the resolution.
    #[inline]
    pub fn at_wrapped(&self, i: usize, j: usize) -> f64 {
        let n = self.n_g;
        self.values[(i % n) * n + (j % n)]
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n_g as f64
    }

    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        grid_point(self.n_g, i, j)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn grid_point(n_g: usize, i: usize, j: usize) -> [f64; 2] {
    let h = 2.0 * PI / n_g as f64;
    [-PI + h * i as f64, -PI + h * j as f64]
}

pub(crate) fn check_resolution(n_g: usize) -> Result<()> {
    if n_g < 4 || !n_g.is_power_of_two() {
        return Err(Error::BadResolution(n_g));
    }
    Ok(())
}

/// Distance on the torus: Euclidean norm of the displacement reduced to `[-pi, pi)^2`.
pub fn torus_distance(x: [f64; 2], y: [f64; 2]) -> f64 {
    let d0 = wrap_angle(x[0] - y[0]);
    let d1 = wrap_angle(x[1] - y[1]);
    d0.hypot(d1)
}

pub fn wrap_angle(d: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let r = (d + PI).rem_euclid(two_pi) - PI;
    if r < -PI {
        r + two_pi
    } else {
        r
    }
}
