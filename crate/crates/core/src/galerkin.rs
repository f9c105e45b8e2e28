//! Pseudospectral integrator for the Galerkin truncation
//! `d theta_N + (nu A^alpha theta_N + pi_N B(u_N, theta_N)) dt = pi_N C^{1/2} dW`
//! with `u = grad^perp A^{-M} theta`.
//!
//! The transport term is evaluated as `div(u theta)` on a zero-padded grid of
//! at least `3N + 1` points per side, so the quadratic product is alias-free and
//! `<theta, B> = <A^{-M} theta, B> = 0` hold to roundoff. Time stepping is the
//! exponential Euler-Maruyama scheme with the exact OU increment per mode.

use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::{mode_variance, ModelParams};
use crate::noise::{SeedSpec, StreamKind};
use crate::spectral::transform::Spectrum;
use crate::spectral::{check_resolution, ModeIndexSet, SpectralField, Transform, Truncation, BASIS_NORM};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DealiasRule {
    /// Keep `|k| <= N` with `N_g >= 3N`: products of the retained modes are exact.
    #[default]
    TwoThirds,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    ExponentialEulerMaruyama,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Truncation radius.
    pub n: u32,
    /// Dealiasing grid resolution.
    pub grid: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Blow-up guard on the L2 norm.
    pub guard: f64,
    /// Diagnostics are recorded every this many steps (and at the end).
    pub record_every: u64,
    pub shape: Truncation,
    pub dealias: DealiasRule,
    pub scheme: Scheme,
    pub nonlinearity: bool,
    pub noise: bool,
    /// Admits `alpha <= 1` or `M < 1`, which the dimension theory does not cover.
    pub unsupported_regime: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n: 85,
            grid: 256,
            dt: 1e-3,
            t_end: 1.0,
            guard: 1e6,
            record_every: 10,
            shape: Truncation::Ball,
            dealias: DealiasRule::TwoThirds,
            scheme: Scheme::ExponentialEulerMaruyama,
            nonlinearity: true,
            noise: true,
            unsupported_regime: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        check_resolution(self.grid)?;
        if self.n == 0 {
            return Err(Error::Validation("N ≥ 1 violated".into()));
        }
        if self.grid < 3 * self.n as usize {
            return Err(Error::Validation(format!(
                "N_g ≥ 3N violated: N_g = {}, N = {}",
                self.grid, self.n
            )));
        }
        if !(self.dt > 0.0) {
            return Err(Error::Validation(format!("dt > 0 violated: dt = {}", self.dt)));
        }
        if !(self.t_end >= self.dt) {
            return Err(Error::Validation(format!(
                "T ≥ dt violated: T = {}, dt = {}",
                self.t_end, self.dt
            )));
        }
        if !(self.guard > 0.0) {
            return Err(Error::Validation("guard > 0 violated".into()));
        }
        if self.record_every == 0 {
            return Err(Error::Validation("record_every ≥ 1 violated".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> u64 {
        (self.t_end / self.dt).round() as u64
    }

    pub fn modes(&self) -> Result<Arc<ModeIndexSet>> {
        ModeIndexSet::new(self.n, self.shape)
    }
}

/// Checks the nonlinear theory's hypotheses `alpha > 1`, `M >= 1` unless the
/// unsupported regime is requested.
pub fn validate_nonlinear(p: &ModelParams, cfg: &SolverConfig) -> Result<()> {
    p.validate(cfg.unsupported_regime)?;
    if !cfg.unsupported_regime && !(p.alpha > 1.0) {
        return Err(Error::Validation(format!(
            "α > 1 violated: alpha = {} (nonlinear problem)",
            p.alpha
        )));
    }
    cfg.validate()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub l2_norm: Vec<f64>,
    /// `||theta||_{-M}`
    pub hneg_norm: Vec<f64>,
    /// `|<theta, B_M(theta)>| / (||theta|| ||B_M(theta)||)`
    pub residual_1: Vec<f64>,
    /// `|<A^{-M} theta, B_M(theta)>| / (||A^{-M} theta|| ||B_M(theta)||)`
    pub residual_2: Vec<f64>,
    #[serde(skip)]
    pub final_field: Option<SpectralField>,
}

impl TrajectoryRecord {
    fn new() -> Self {
        Self {
            times: Vec::new(),
            l2_norm: Vec::new(),
            hneg_norm: Vec::new(),
            residual_1: Vec::new(),
            residual_2: Vec::new(),
            final_field: None,
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.residual_1
            .iter()
            .chain(&self.residual_2)
            .fold(0.0, |m, &r| m.max(r))
    }

    pub fn final_field(&self) -> &SpectralField {
        self.final_field.as_ref().expect("solve always stores the final field")
    }
}

/// Normalised conservation residuals `(r1, r2)` of a nonlinear term `b` at `theta`.
pub fn conservation_residuals(theta: &SpectralField, b: &SpectralField, m: f64) -> Result<(f64, f64)> {
    let bn = b.l2_norm();
    let tn = theta.l2_norm();
    let r1 = if bn * tn > 0.0 {
        theta.inner(b)?.abs() / (bn * tn)
    } else {
        0.0
    };
    let inv = crate::spectral::apply_fractional_laplacian(theta, -m);
    let inn = inv.l2_norm();
    let r2 = if bn * inn > 0.0 {
        inv.inner(b)?.abs() / (bn * inn)
    } else {
        0.0
    };
    Ok((r1, r2))
}

#[derive(Clone, Copy)]
struct UpperMode {
    idx: usize,
    neg: usize,
    k1: f64,
    k2: f64,
    /// `|k|^{-2M}`
    inv: f64,
    wave: crate::spectral::WaveVector,
}

/// Stateful integrator: FFT plans, per-mode factors and scratch space for one
/// trajectory at a time. Create one per worker.
pub struct GalerkinSolver {
    params: ModelParams,
    cfg: SolverConfig,
    modes: Arc<ModeIndexSet>,
    upper: Vec<UpperMode>,
    decay: Vec<f64>,
    noise_sd: Vec<f64>,
    transform: Transform,
    spec_theta: Spectrum,
    spec_u1: Spectrum,
    spec_u2: Spectrum,
    spec_p1: Spectrum,
    spec_p2: Spectrum,
    grid_theta: Vec<f64>,
    grid_u1: Vec<f64>,
    grid_u2: Vec<f64>,
    normals: Vec<f64>,
    nonlinear: SpectralField,
}

impl GalerkinSolver {
    pub fn new(params: &ModelParams, cfg: &SolverConfig) -> Result<Self> {
        validate_nonlinear(params, cfg)?;
        let modes = cfg.modes()?;
        let upper = modes
            .iter()
            .enumerate()
            .filter(|(_, k)| k.is_upper())
            .map(|(i, k)| UpperMode {
                idx: i,
                neg: modes.negated_index(i),
                k1: k.k1 as f64,
                k2: k.k2 as f64,
                inv: (k.norm_sq() as f64).powf(-params.m),
                wave: k,
            })
            .collect();
        let decay = modes
            .iter()
            .map(|k| (-params.decay_rate(k) * cfg.dt).exp())
            .collect();
        let noise_sd = modes
            .iter()
            .map(|k| mode_variance(k, cfg.dt, params).sqrt())
            .collect();
        let n = cfg.grid;
        Ok(Self {
            params: params.clone(),
            cfg: cfg.clone(),
            upper,
            decay,
            noise_sd,
            transform: Transform::new(n)?,
            spec_theta: Spectrum::zeros(n),
            spec_u1: Spectrum::zeros(n),
            spec_u2: Spectrum::zeros(n),
            spec_p1: Spectrum::zeros(n),
            spec_p2: Spectrum::zeros(n),
            grid_theta: vec![0.0; n * n],
            grid_u1: vec![0.0; n * n],
            grid_u2: vec![0.0; n * n],
            normals: vec![0.0; modes.len()],
            nonlinear: SpectralField::zeros(&modes),
            modes,
        })
    }

    pub fn modes(&self) -> &Arc<ModeIndexSet> {
        &self.modes
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    fn conform(&self, theta: &SpectralField) -> SpectralField {
        if theta.same_modes(&SpectralField::zeros(&self.modes)) {
            theta.clone()
        } else {
            theta.restrict_to(&self.modes)
        }
    }

    /// `pi_N B_M(theta) = pi_N div(u theta)`, `u = grad^perp A^{-M} theta`.
    pub fn nonlinear_term(&mut self, theta: &SpectralField) -> SpectralField {
        let theta = self.conform(theta);
        self.compute_nonlinear(&theta);
        self.nonlinear.clone()
    }

    fn compute_nonlinear(&mut self, theta: &SpectralField) {
        let c = theta.coeffs();
        let half_c = 0.5 * BASIS_NORM;
        for m in &self.upper {
            let f = Complex64::new(half_c * c[m.neg], -half_c * c[m.idx]);
            let g = f * m.inv;
            // grad^perp = (-d2, d1): multiply by (-i k2, i k1)
            let u1 = Complex64::new(m.k2 * g.im, -m.k2 * g.re);
            let u2 = Complex64::new(-m.k1 * g.im, m.k1 * g.re);
            self.spec_theta.put_hermitian(m.wave, f);
            self.spec_u1.put_hermitian(m.wave, u1);
            self.spec_u2.put_hermitian(m.wave, u2);
        }
        self.transform.inverse(&self.spec_theta, &mut self.grid_theta);
        self.transform.inverse(&self.spec_u1, &mut self.grid_u1);
        self.transform.inverse(&self.spec_u2, &mut self.grid_u2);
        for ((a, b), t) in self
            .grid_u1
            .iter_mut()
            .zip(self.grid_u2.iter_mut())
            .zip(&self.grid_theta)
        {
            *a *= t;
            *b *= t;
        }
        self.transform.forward(&self.grid_u1, &mut self.spec_p1);
        self.transform.forward(&self.grid_u2, &mut self.spec_p2);

        let scale = 2.0 / BASIS_NORM;
        let out = self.nonlinear.coeffs_mut();
        for m in &self.upper {
            let p1 = self.spec_p1.get(m.wave.k1, m.wave.k2);
            let p2 = self.spec_p2.get(m.wave.k1, m.wave.k2);
            // B_k = i (k1 P1_k + k2 P2_k)
            let s = p1 * m.k1 + p2 * m.k2;
            let b = Complex64::new(-s.im, s.re);
            out[m.idx] = -scale * b.im;
            out[m.neg] = scale * b.re;
        }
    }

    /// One exponential Euler-Maruyama step using the increment stream at `step`:
    /// `theta_k <- e^{-nu |k|^{2 alpha} dt} (theta_k - dt B_k) + a_k(dt) xi_k`.
    pub fn step(&mut self, theta: &SpectralField, seed: SeedSpec, step: u64) -> Result<SpectralField> {
        let mut out = self.conform(theta);
        if self.cfg.nonlinearity {
            self.compute_nonlinear(&out);
        }
        self.advance(&mut out, seed, step)?;
        Ok(out)
    }

    /// Applies one step with the nonlinear term already held in `self.nonlinear`.
    fn advance(&mut self, theta: &mut SpectralField, seed: SeedSpec, step: u64) -> Result<()> {
        if self.cfg.noise {
            seed.fill_normals(StreamKind::Increment, step, &mut self.normals);
        }
        let dt = self.cfg.dt;
        let b = self.nonlinear.coeffs();
        let coeffs = theta.coeffs_mut();
        for i in 0..coeffs.len() {
            let mut v = coeffs[i];
            if self.cfg.nonlinearity {
                v -= dt * b[i];
            }
            v *= self.decay[i];
            if self.cfg.noise {
                v += self.noise_sd[i] * self.normals[i];
            }
            coeffs[i] = v;
        }
        let norm = theta.l2_norm();
        if !(norm <= self.cfg.guard) {
            return Err(Error::Instability {
                t: (step + 1) as f64 * dt,
                dt,
                norm,
                guard: self.cfg.guard,
            });
        }
        Ok(())
    }

    /// Appends diagnostics for `theta`, whose nonlinear term is in `self.nonlinear`.
    fn record(&self, rec: &mut TrajectoryRecord, t: f64, theta: &SpectralField) -> Result<()> {
        let (r1, r2) = conservation_residuals(theta, &self.nonlinear, self.params.m)?;
        rec.times.push(t);
        rec.l2_norm.push(theta.l2_norm());
        rec.hneg_norm.push(theta.norm(-self.params.m));
        rec.residual_1.push(r1);
        rec.residual_2.push(r2);
        Ok(())
    }

    /// Integrates from `theta0` to the configured horizon.
    pub fn solve(&mut self, theta0: &SpectralField, seed: SeedSpec) -> Result<TrajectoryRecord> {
        let mut theta = self.conform(theta0);
        let steps = self.cfg.steps();
        let every = self.cfg.record_every;
        let dt = self.cfg.dt;
        let mut rec = TrajectoryRecord::new();
        for s in 0..steps {
            let recording = s % every == 0;
            if self.cfg.nonlinearity || recording {
                self.compute_nonlinear(&theta);
            }
            if recording {
                self.record(&mut rec, s as f64 * dt, &theta)?;
            }
            self.advance(&mut theta, seed, s)?;
        }
        self.compute_nonlinear(&theta);
        self.record(&mut rec, steps as f64 * dt, &theta)?;
        rec.final_field = Some(theta);
        Ok(rec)
    }
}

/// `pi_N B_M(theta)` for a one-off evaluation.
pub fn nonlinear_term(theta: &SpectralField, p: &ModelParams, cfg: &SolverConfig) -> Result<SpectralField> {
    Ok(GalerkinSolver::new(p, cfg)?.nonlinear_term(theta))
}

pub fn step(
    theta: &SpectralField,
    p: &ModelParams,
    cfg: &SolverConfig,
    seed: SeedSpec,
    step_index: u64,
) -> Result<SpectralField> {
    GalerkinSolver::new(p, cfg)?.step(theta, seed, step_index)
}

pub fn solve(theta0: &SpectralField, p: &ModelParams, cfg: &SolverConfig, seed: SeedSpec) -> Result<TrajectoryRecord> {
    GalerkinSolver::new(p, cfg)?.solve(theta0, seed)
}

/// Smooth random initial condition with `||theta0||_{L2} = l2_norm`:
/// Gaussian coefficients damped by `|k|^{-2}`.
pub fn smooth_initial(modes: &Arc<ModeIndexSet>, l2_norm: f64, seed: SeedSpec) -> SpectralField {
    let mut rng: ChaCha8Rng = seed.rng(StreamKind::InitialData, 0);
    let mut f = SpectralField::from_fn(modes, |k| {
        let z: f64 = StandardNormal.sample(&mut rng);
        z / k.norm_sq() as f64
    });
    let n = f.l2_norm();
    if n > 0.0 {
        f.scale(l2_norm / n);
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::evolve_exact;
    use crate::spectral::WaveVector;
    use std::collections::BTreeMap;

    fn small() -> SolverConfig {
        SolverConfig {
            n: 8,
            grid: 32,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn single_mode_is_a_steady_state_of_transport() {
        let cfg = small();
        let p = ModelParams::default();
        let mut solver = GalerkinSolver::new(&p, &cfg).unwrap();
        for k in [WaveVector::raw(1, 0), WaveVector::raw(2, -3), WaveVector::raw(-1, -1)] {
            let theta = SpectralField::single_mode(solver.modes(), k, 1.3).unwrap();
            let b = solver.nonlinear_term(&theta);
            assert!(b.l2_norm() < 1e-12, "{k}: {}", b.l2_norm());
            assert!(theta.inner(&b).unwrap().abs() <= 1e-12 * theta.l2_norm());
        }
    }

    #[test]
    fn conservation_residuals_on_random_fields() {
        let p = ModelParams::default();
        let cfg = SolverConfig::default();
        let mut solver = GalerkinSolver::new(&p, &cfg).unwrap();
        for r in 0..5 {
            let theta = smooth_initial(solver.modes(), 3.0, SeedSpec::new(11, r));
            let b = solver.nonlinear_term(&theta);
            assert!(b.l2_norm() > 1e-3);
            let (r1, r2) = conservation_residuals(&theta, &b, p.m).unwrap();
            assert!(r1 <= 1e-10 && r2 <= 1e-10, "{r1} {r2}");
        }
    }

    /// `B = u . grad theta` by direct convolution of complex coefficients:
    /// `B^(m) = -sum_{p + q = m} (p_perp . q) psi^(p) theta^(q)` with `psi = A^{-M} theta`.
    fn convolution_oracle(theta: &SpectralField, m_exp: f64) -> SpectralField {
        let c = BASIS_NORM;
        let mut hat: BTreeMap<(i32, i32), Complex64> = BTreeMap::new();
        for (k, _) in theta.iter().filter(|(k, _)| k.is_upper()) {
            let f = Complex64::new(0.5 * c * theta.coeff(k.neg()), -0.5 * c * theta.coeff(k));
            hat.insert((k.k1, k.k2), f);
            hat.insert((-k.k1, -k.k2), f.conj());
        }
        let modes = theta.modes();
        let mut b_hat: BTreeMap<(i32, i32), Complex64> = BTreeMap::new();
        for (&p, &fp) in &hat {
            let psi = fp * ((p.0 * p.0 + p.1 * p.1) as f64).powf(-m_exp);
            for (&q, &fq) in &hat {
                let perp_dot = (-p.1 * q.0 + p.0 * q.1) as f64;
                *b_hat.entry((p.0 + q.0, p.1 + q.1)).or_default() -= psi * fq * perp_dot;
            }
        }
        SpectralField::from_fn(modes, |k| {
            let up = if k.is_upper() { k } else { k.neg() };
            let b = b_hat.get(&(up.k1, up.k2)).copied().unwrap_or_default();
            if k.is_upper() {
                -2.0 * b.im / c
            } else {
                2.0 * b.re / c
            }
        })
    }

    #[test]
    fn nonlinear_term_matches_hand_convolution() {
        let cfg = SolverConfig {
            n: 4,
            grid: 16,
            ..SolverConfig::default()
        };
        for m_exp in [1.0, 1.5] {
            let p = ModelParams {
                m: m_exp,
                ..ModelParams::default()
            };
            let mut solver = GalerkinSolver::new(&p, &cfg).unwrap();
            let modes = solver.modes().clone();
            // Taylor-Green-type pair plus two more modes: 8 coefficients in total
            let mut theta = SpectralField::zeros(&modes);
            for (k, v) in [
                ((1, 1), 0.7),
                ((-1, -1), -0.2),
                ((1, -1), 0.5),
                ((-1, 1), 0.9),
                ((2, 0), -0.4),
                ((-2, 0), 0.3),
                ((0, 1), 1.1),
                ((0, -1), 0.6),
            ] {
                let i = modes.index_of(WaveVector::raw(k.0, k.1)).unwrap();
                theta.coeffs_mut()[i] = v;
            }
            let b = solver.nonlinear_term(&theta);
            let oracle = convolution_oracle(&theta, m_exp);
            let scale = oracle.l2_norm();
            assert!(scale > 0.1);
            for ((k, x), y) in b.iter().zip(oracle.coeffs()) {
                assert!((x - y).abs() < 1e-12 * scale, "{k}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn without_transport_a_step_is_the_exact_ou_transition() {
        let cfg = SolverConfig {
            nonlinearity: false,
            ..small()
        };
        let p = ModelParams::default();
        let mut solver = GalerkinSolver::new(&p, &cfg).unwrap();
        let theta = smooth_initial(solver.modes(), 1.0, SeedSpec::new(1, 0));
        let seed = SeedSpec::new(5, 2);
        let mut a = theta.clone();
        let mut b = theta;
        for s in 0..20 {
            a = solver.step(&a, seed, s).unwrap();
            b = evolve_exact(&b, cfg.dt, &p, seed, s).unwrap();
            assert_eq!(a.coeffs(), b.coeffs());
        }
    }

    #[test]
    fn noiseless_energy_does_not_grow() {
        let cfg = SolverConfig {
            noise: false,
            t_end: 0.2,
            record_every: 1,
            ..small()
        };
        let p = ModelParams::default();
        let theta = smooth_initial(&cfg.modes().unwrap(), 2.0, SeedSpec::new(2, 0));
        let rec = solve(&theta, &p, &cfg, SeedSpec::new(0, 0)).unwrap();
        assert_eq!(rec.times.len(), 201);
        for w in rec.l2_norm.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert!(rec.max_residual() <= 1e-10);
    }

    #[test]
    fn first_order_convergence_in_dt() {
        let p = ModelParams::default();
        let base = SolverConfig {
            noise: false,
            t_end: 0.1,
            ..small()
        };
        let theta = smooth_initial(&base.modes().unwrap(), 3.0, SeedSpec::new(4, 0));
        let run = |dt: f64| {
            let cfg = SolverConfig { dt, ..base.clone() };
            solve(&theta, &p, &cfg, SeedSpec::new(0, 0)).unwrap().final_field().clone()
        };
        let reference = run(1.25e-5);
        let err = |dt: f64| {
            let mut d = run(dt);
            d.axpy(-1.0, &reference).unwrap();
            d.l2_norm()
        };
        let (e1, e2, e3) = (err(1e-3), err(5e-4), err(2.5e-4));
        for ratio in [e1 / e2, e2 / e3] {
            assert!((1.6..2.4).contains(&ratio), "{e1} {e2} {e3}");
        }
    }

    #[test]
    fn solve_is_deterministic_and_records_diagnostics() {
        let cfg = SolverConfig {
            t_end: 0.05,
            ..small()
        };
        let p = ModelParams::default();
        let modes = cfg.modes().unwrap();
        let theta = smooth_initial(&modes, 1.0, SeedSpec::new(8, 0));
        let a = solve(&theta, &p, &cfg, SeedSpec::new(9, 1)).unwrap();
        let b = solve(&theta, &p, &cfg, SeedSpec::new(9, 1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.final_field(), b.final_field());
        assert_eq!(a.times, vec![0.0, 0.01, 0.02, 0.03, 0.04, 0.05]);
        assert!(a.max_residual() <= 1e-10);
        let c = solve(&theta, &p, &cfg, SeedSpec::new(9, 2)).unwrap();
        assert_ne!(a.final_field(), c.final_field());
    }

    #[test]
    fn hypotheses_and_resolution_are_validated() {
        let p = ModelParams {
            alpha: 1.0,
            ..ModelParams::default()
        };
        let err = GalerkinSolver::new(&p, &small()).err().unwrap();
        assert!(err.to_string().contains("α > 1 violated"));
        let p = ModelParams {
            alpha: 1.0,
            noise: crate::noise::NoiseSpec::power_law(0.5, 1.0),
            ..ModelParams::default()
        };
        let cfg = SolverConfig {
            unsupported_regime: true,
            ..small()
        };
        assert!(GalerkinSolver::new(&p, &cfg).is_ok());
        let cfg = SolverConfig {
            n: 12,
            grid: 32,
            ..SolverConfig::default()
        };
        let err = GalerkinSolver::new(&ModelParams::default(), &cfg).err().unwrap();
        assert!(err.to_string().contains("N_g ≥ 3N violated"));
    }

    #[test]
    fn blow_up_guard_stops_the_run() {
        let cfg = SolverConfig {
            guard: 0.5,
            ..small()
        };
        let theta = smooth_initial(&cfg.modes().unwrap(), 0.499, SeedSpec::new(1, 0));
        let err = solve(&theta, &ModelParams::default(), &cfg, SeedSpec::new(1, 0)).unwrap_err();
        assert!(matches!(err, Error::Instability { .. }));
        assert_eq!(err.exit_code(), 2);
    }
}
