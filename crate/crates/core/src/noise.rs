//! Homogeneous noise covariance `C e_k = sigma_k^2 e_k` and reproducible
//! Gaussian draws.
//!
//! Every random draw is addressed by `(master seed, stream kind, replica, step)`:
//! the ChaCha key is derived from the master seed and stream kind, the ChaCha
//! stream id is the replica and the word position is fixed by the step. Within
//! a step, modes consume normals in the lexicographic order of their mode set.
//! Draws therefore never depend on how replicas are scheduled over workers.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{ModeIndexSet, SpectralField, WaveVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Spectral decay exponent `delta`.
    pub delta: f64,
    /// `sigma_k = amplitude * |k|^{-delta}`.
    pub amplitude: f64,
    /// Optional per-mode override of `sigma_k`; modes not listed use the power law.
    #[serde(skip)]
    pub table: Option<Arc<BTreeMap<WaveVector, f64>>>,
}

impl NoiseSpec {
    pub fn power_law(delta: f64, amplitude: f64) -> Self {
        Self {
            delta,
            amplitude,
            table: None,
        }
    }

    /// Installs a user table of `sigma_k`. Entries must be positive and
    /// symmetric under `k -> -k`.
    pub fn with_table(mut self, table: BTreeMap<WaveVector, f64>) -> Result<Self> {
        for (k, s) in &table {
            if !(*s > 0.0) {
                return Err(Error::Validation(format!("sigma_{k} = {s} must be > 0")));
            }
            match table.get(&k.neg()) {
                Some(t) if t == s => {}
                _ => {
                    return Err(Error::Validation(format!(
                        "sigma table not symmetric at {k}: sigma_k = sigma_-k required"
                    )))
                }
            }
        }
        self.table = Some(Arc::new(table));
        Ok(self)
    }

    /// Checks `delta in (1 - alpha, 2 - alpha)` and a positive amplitude.
    pub fn validate(&self, alpha: f64) -> Result<()> {
        if !(self.amplitude > 0.0) || !self.amplitude.is_finite() {
            return Err(Error::Validation(format!(
                "noise amplitude {} violates amplitude > 0",
                self.amplitude
            )));
        }
        let (lo, hi) = (1.0 - alpha, 2.0 - alpha);
        if !(self.delta > lo && self.delta < hi) {
            return Err(Error::Validation(format!(
                "δ ∉ (1−α, 2−α): delta = {} with alpha = {alpha} requires {lo} < delta < {hi}",
                self.delta
            )));
        }
        Ok(())
    }
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self::power_law(0.25, 1.0)
    }
}

/// `sigma_k` for a nonzero wave vector.
#[inline]
pub fn sigma(k: WaveVector, spec: &NoiseSpec) -> f64 {
    if let Some(t) = &spec.table {
        if let Some(&s) = t.get(&k) {
            return s;
        }
    }
    if spec.delta == 0.0 {
        return spec.amplitude;
    }
    spec.amplitude * (k.norm_sq() as f64).powf(-0.5 * spec.delta)
}

/// Independent random streams drawn from one seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u64)]
pub enum StreamKind {
    /// Per-step noise shared by the Wiener increment, the exact OU transition
    /// and the Galerkin step.
    Increment = 1,
    /// One-shot draw of the stochastic convolution at a fixed time.
    ExactSample = 2,
    InitialData = 3,
    /// Random evaluation points for covariance and homogeneity checks.
    Points = 4,
    Synthetic = 5,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master: u64,
    pub replica: u64,
}

impl SeedSpec {
    pub fn new(master: u64, replica: u64) -> Self {
        Self { master, replica }
    }

    pub fn with_replica(self, replica: u64) -> Self {
        Self { replica, ..self }
    }

    /// The generator addressed by `(master, kind, replica, step)`.
    pub fn rng(&self, kind: StreamKind, step: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        let mut state = self.master ^ (kind as u64).wrapping_mul(0xA076_1D64_78BD_642F);
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.replica);
        // 2^36 words per step; ChaCha positions reach 2^68 words.
        rng.set_word_pos((step as u128) << 36);
        rng
    }

    /// `n` standard normals for the given stream and step.
    pub fn normals(&self, kind: StreamKind, step: u64, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        self.fill_normals(kind, step, &mut out);
        out
    }

    pub fn fill_normals(&self, kind: StreamKind, step: u64, out: &mut [f64]) {
        let mut rng = self.rng(kind, step);
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Increment `C^{1/2} (W(t + dt) - W(t))` over `modes`: coefficient `k` is
/// `N(0, sigma_k^2 dt)`.
pub fn sample_increment(
    modes: &Arc<ModeIndexSet>,
    dt: f64,
    spec: &NoiseSpec,
    seed: SeedSpec,
    step: u64,
) -> Result<SpectralField> {
    if !(dt > 0.0) {
        return Err(Error::Validation(format!("dt = {dt} violates dt > 0")));
    }
    let z = seed.normals(StreamKind::Increment, step, modes.len());
    let sdt = dt.sqrt();
    let coeffs = modes
        .iter()
        .zip(z)
        .map(|(k, n)| sigma(k, spec) * sdt * n)
        .collect();
    SpectralField::from_coeffs(modes, coeffs)
}
