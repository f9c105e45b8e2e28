//! The linear problem `dz + nu A^alpha z dt = C^{1/2} dW`, `z(0) = 0`.
//!
//! Each Fourier coefficient is an independent Ornstein-Uhlenbeck process,
//! so both sampling and the second-order statistics are exact.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{sigma, NoiseSpec, SeedSpec, StreamKind};
use crate::spectral::{ModeIndexSet, SpectralField, Truncation, WaveVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub nu: f64,
    pub alpha: f64,
    /// Exponent of the velocity map `u = grad^perp A^{-M} theta`.
    pub m: f64,
    pub noise: NoiseSpec,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            nu: 1.0,
            alpha: 1.5,
            m: 1.0,
            noise: NoiseSpec::default(),
        }
    }
}

impl ModelParams {
    /// Domain checks shared by the linear and nonlinear problems.
    /// `allow_unsupported` lifts `alpha >= 1` and `M >= 1`.
    pub fn validate(&self, allow_unsupported: bool) -> Result<()> {
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            return Err(Error::Validation(format!("ν > 0 violated: nu = {}", self.nu)));
        }
        if !self.alpha.is_finite() || !self.m.is_finite() {
            return Err(Error::Validation("alpha and M must be finite".into()));
        }
        if !allow_unsupported {
            if self.alpha < 1.0 {
                return Err(Error::Validation(format!(
                    "α ≥ 1 violated: alpha = {}",
                    self.alpha
                )));
            }
            if self.m < 1.0 {
                return Err(Error::Validation(format!("M ≥ 1 violated: M = {}", self.m)));
            }
        }
        self.noise.validate(self.alpha)
    }

    /// Hoelder exponent `alpha + delta - 1` of the solution.
    pub fn holder_exponent(&self) -> f64 {
        self.alpha + self.noise.delta - 1.0
    }

    /// Level-set dimension `3 - alpha - delta`.
    pub fn target_dimension(&self) -> f64 {
        3.0 - self.alpha - self.noise.delta
    }

    /// Damping rate `nu |k|^{2 alpha}` of mode `k`.
    #[inline]
    pub fn decay_rate(&self, k: WaveVector) -> f64 {
        self.nu * (k.norm_sq() as f64).powf(self.alpha)
    }
}

/// `a_k(t)^2 = sigma_k^2 (1 - e^{-2 nu |k|^{2 alpha} t}) / (2 nu |k|^{2 alpha})`.
/// `t = f64::INFINITY` gives the stationary variance.
#[inline]
pub fn mode_variance(k: WaveVector, t: f64, p: &ModelParams) -> f64 {
    let rate = p.decay_rate(k);
    let s = sigma(k, &p.noise);
    s * s * -(-2.0 * rate * t).exp_m1() / (2.0 * rate)
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::Validation(format!("t = {t} violates t > 0")));
    }
    Ok(())
}

/// Exact draw of `z(t)` restricted to `modes`: coefficient `k` is `a_k(t) N(0, 1)`.
pub fn sample_exact(
    t: f64,
    modes: &Arc<ModeIndexSet>,
    p: &ModelParams,
    seed: SeedSpec,
) -> Result<SpectralField> {
    check_time(t)?;
    let z = seed.normals(StreamKind::ExactSample, 0, modes.len());
    let coeffs = modes
        .iter()
        .zip(z)
        .map(|(k, n)| mode_variance(k, t, p).sqrt() * n)
        .collect();
    SpectralField::from_coeffs(modes, coeffs)
}

/// Exact OU transition over `dt` using the step-`step` increment stream:
/// `z_k <- e^{-nu |k|^{2 alpha} dt} z_k + a_k(dt) N(0, 1)`.
pub fn evolve_exact(
    z: &SpectralField,
    dt: f64,
    p: &ModelParams,
    seed: SeedSpec,
    step: u64,
) -> Result<SpectralField> {
    check_time(dt)?;
    let modes = z.modes();
    let noise = seed.normals(StreamKind::Increment, step, modes.len());
    let coeffs = z
        .iter()
        .zip(noise)
        .map(|((k, c), n)| {
            let decay = (-p.decay_rate(k) * dt).exp();
            decay * c + mode_variance(k, dt, p).sqrt() * n
        })
        .collect();
    SpectralField::from_coeffs(modes, coeffs)
}

/// A truncated lattice series together with a rigorous bound on the omitted tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
}

/// Upper bound on `sum_{|k| > cutoff} |k|^{-power}` over `Z^2`, `power > 2`.
///
/// Every unit cell centred at such a `k` lies in `|x| >= cutoff - s` with
/// `s = sqrt(2)/2`, and `|k|^{-p} <= (|x| - s)^{-p}` on that cell, so the tail is
/// at most `2 pi [ (K - 2s)^{2-p} / (p - 2) + s (K - 2s)^{1-p} / (p - 1) ]`.
pub fn lattice_tail_bound(power: f64, cutoff: u32) -> f64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let base = cutoff as f64 - 2.0 * s;
    if power <= 2.0 || base <= 0.0 {
        return f64::INFINITY;
    }
    2.0 * PI * (base.powf(2.0 - power) / (power - 2.0) + s * base.powf(1.0 - power) / (power - 1.0))
}

fn check_summable(p: &ModelParams, cutoff: u32) -> Result<()> {
    if cutoff == 0 {
        return Err(Error::Validation("series cutoff >= 1 required".into()));
    }
    if 2.0 * (p.alpha + p.noise.delta) <= 2.0 {
        return Err(Error::Validation(format!(
            "series diverges: 2(α+δ) = {} ≤ 2",
            2.0 * (p.alpha + p.noise.delta)
        )));
    }
    Ok(())
}

/// Sum over the upper half of the ball `|k| <= cutoff`; terms must be even in `k`.
fn upper_ball_sum(cutoff: u32, mut term: impl FnMut(WaveVector) -> f64) -> f64 {
    let r = cutoff as i32;
    let r2 = (cutoff as i64).pow(2);
    let mut acc = 0.0;
    for k2 in 0..=r {
        let k1_min = if k2 == 0 { 1 } else { -r };
        for k1 in k1_min..=r {
            let k = WaveVector::raw(k1, k2);
            if k.norm_sq() <= r2 {
                acc += term(k);
            }
        }
    }
    acc
}

/// `sigma_t^2 = sum_k sigma_k^2 (1 - e^{-2 nu |k|^{2 alpha} t}) / (4 nu |k|^{2 alpha})`,
/// equal to `sum_k (1 - e^{...}) / (4 nu |k|^{2(alpha + delta)})` for the exact power law.
///
/// The pointwise variance `E|z(t, x)|^2` is `sigma_t^2 / (2 pi^2)`; see [`point_variance`].
pub fn sigma_t_squared(t: f64, p: &ModelParams, cutoff: u32) -> Result<SeriesValue> {
    check_time(t)?;
    check_summable(p, cutoff)?;
    let value = upper_ball_sum(cutoff, |k| mode_variance(k, t, p));
    let tail = p.noise.amplitude.powi(2) / (4.0 * p.nu)
        * lattice_tail_bound(2.0 * (p.alpha + p.noise.delta), cutoff);
    Ok(SeriesValue {
        value,
        tail_bound: tail,
    })
}

/// `E|z(t, x)|^2 = sum_k a_k(t)^2 e_k(x)^2 = sum_k a_k(t)^2 / (4 pi^2)`, independent of `x`.
pub fn point_variance(t: f64, p: &ModelParams, cutoff: u32) -> Result<SeriesValue> {
    let s = sigma_t_squared(t, p, cutoff)?;
    let scale = 1.0 / (2.0 * PI * PI);
    Ok(SeriesValue {
        value: s.value * scale,
        tail_bound: s.tail_bound * scale,
    })
}

/// `g_t(r) = E|z(t, x + r) - z(t, x)|^2 = pi^{-2} sum_k a_k(t)^2 sin^2(k.r / 2)`.
///
/// Summing `a_k^2 (e_k(x + r) - e_k(x))^2` over the pair `{k, -k}` gives
/// `4 c^2 a_k^2 sin^2(k.r/2)`, hence the `1 / pi^2` in front.
pub fn structure_function_analytic(
    r: [f64; 2],
    t: f64,
    p: &ModelParams,
    cutoff: u32,
) -> Result<SeriesValue> {
    check_time(t)?;
    check_summable(p, cutoff)?;
    if r == [0.0, 0.0] {
        return Ok(SeriesValue {
            value: 0.0,
            tail_bound: 0.0,
        });
    }
    let value = upper_ball_sum(cutoff, |k| {
        let s = (0.5 * k.dot(r)).sin();
        mode_variance(k, t, p) * s * s
    }) * 2.0
        / (PI * PI);
    let tail = p.noise.amplitude.powi(2) / (2.0 * p.nu * PI * PI)
        * lattice_tail_bound(2.0 * (p.alpha + p.noise.delta), cutoff);
    Ok(SeriesValue {
        value,
        tail_bound: tail,
    })
}

/// Covariance matrix of `(z_t(x), z_t(x'))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoPointCovariance {
    pub q: [[f64; 2]; 2],
}

impl TwoPointCovariance {
    pub fn det(&self) -> f64 {
        self.q[0][0] * self.q[1][1] - self.q[0][1] * self.q[1][0]
    }
}

/// `q = sum_k a_k(t)^2 [e_k(x), e_k(x')]^T [e_k(x), e_k(x')]` over `|k| <= cutoff`.
pub fn two_point_covariance(
    x: [f64; 2],
    x2: [f64; 2],
    t: f64,
    p: &ModelParams,
    cutoff: u32,
) -> Result<TwoPointCovariance> {
    check_time(t)?;
    let modes = ModeIndexSet::new(cutoff, Truncation::Ball)?;
    let weights: Vec<f64> = modes.iter().map(|k| mode_variance(k, t, p)).collect();
    Ok(two_point_covariance_with(x, x2, &modes, &weights))
}

pub(crate) fn two_point_covariance_with(
    x: [f64; 2],
    x2: [f64; 2],
    modes: &ModeIndexSet,
    weights: &[f64],
) -> TwoPointCovariance {
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for (k, w) in modes.iter().zip(weights) {
        let ex = k.basis_at(x);
        let ey = k.basis_at(x2);
        a += w * ex * ex;
        b += w * ex * ey;
        c += w * ey * ey;
    }
    TwoPointCovariance {
        q: [[a, b], [b, c]],
    }
}

/// Stationary `E ||z||_{L2}^2 = sum_k sigma_k^2 / (2 nu |k|^{2 alpha})` over `modes`.
pub fn stationary_energy(modes: &ModeIndexSet, p: &ModelParams) -> f64 {
    modes.iter().map(|k| mode_variance(k, f64::INFINITY, p)).sum()
}
