//! Grid quadrature of the approximate occupation measures
//! `mu_n(dx) = sqrt(2 pi n) exp(-n |g(x) - y|^2 / 2) dx` and their energies.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{wrap_angle, GridField};

/// Largest admissible `n`: the kernel width `n^{-1/2}` must exceed the RMS
/// change of `g` between neighbouring grid points.
pub fn kernel_limit(g: &GridField) -> f64 {
    let n = g.resolution();
    let v = g.values();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = v[i * n + j];
            s += (v[((i + 1) % n) * n + j] - x).powi(2) + (v[i * n + (j + 1) % n] - x).powi(2);
        }
    }
    let rms2 = s / (2 * n * n) as f64;
    if rms2 == 0.0 {
        f64::INFINITY
    } else {
        1.0 / rms2
    }
}

fn check_kernel(g: &GridField, n: f64) -> Result<()> {
    let n_max = kernel_limit(g);
    if !(n > 0.0) || n > n_max {
        return Err(Error::KernelTooNarrow { n, n_max });
    }
    Ok(())
}

fn density(g: &GridField, y: f64, n: f64) -> Vec<f64> {
    let c = (2.0 * PI * n).sqrt();
    g.values()
        .iter()
        .map(|v| c * (-0.5 * n * (v - y).powi(2)).exp())
        .collect()
}

/// `mu_n(T)` by the midpoint rule.
pub fn frostman_mass(g: &GridField, y: f64, n: f64) -> Result<f64> {
    check_kernel(g, n)?;
    let h = g.spacing();
    Ok(density(g, y, n).iter().sum::<f64>() * h * h)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrostmanEnergy {
    pub mass: f64,
    /// Off-diagonal double sum `sum_{x != x'} m_x m_x' |x - x'|_T^{-gamma}`.
    pub energy: f64,
    /// Upper bound on the omitted same-cell contribution.
    pub diagonal_bound: f64,
}

/// `||mu_n||_gamma` with torus distance, `0 < gamma < 2`.
///
/// The off-diagonal sum is a periodic convolution evaluated by FFT. The
/// same-cell term `rho_x^2 iint_{cell^2} |x - x'|^{-gamma}` is bounded by
/// `rho_x^2 h^2 2 pi (sqrt(2) h)^{2 - gamma} / (2 - gamma)` and reported.
pub fn frostman_energy(g: &GridField, y: f64, n: f64, gamma: f64) -> Result<FrostmanEnergy> {
    EnergyKernel::new(g.resolution(), gamma)?.frostman_energy(g, y, n)
}

/// The kernel `|d|_T^{-gamma}` (zero at `d = 0`) in Fourier space, reusable
/// across fields of one resolution.
pub struct EnergyKernel {
    n: usize,
    gamma: f64,
    spectrum: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl EnergyKernel {
    pub fn new(n: usize, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 2.0) {
            return Err(Error::EnergyExponent(gamma));
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let h = 2.0 * PI / n as f64;
        let mut spectrum: Vec<Complex64> = (0..n * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                if i == 0 && j == 0 {
                    Complex64::default()
                } else {
                    let d = wrap_angle(i as f64 * h).hypot(wrap_angle(j as f64 * h));
                    Complex64::new(d.powf(-gamma), 0.0)
                }
            })
            .collect();
        fft2(&mut spectrum, n, &*forward);
        Ok(Self {
            n,
            gamma,
            spectrum,
            forward,
            inverse,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `sum_{x != x'} m_x m_x' |x - x'|_T^{-gamma}` for cell masses `m`.
    pub fn offdiagonal_energy(&self, mass: &[f64]) -> f64 {
        let n = self.n;
        assert_eq!(mass.len(), n * n);
        let mut f: Vec<Complex64> = mass.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft2(&mut f, n, &*self.forward);
        for (x, k) in f.iter_mut().zip(&self.spectrum) {
            *x *= k;
        }
        fft2(&mut f, n, &*self.inverse);
        let scale = 1.0 / (n * n) as f64;
        mass.iter().zip(&f).map(|(m, c)| m * c.re * scale).sum()
    }

    pub fn frostman_energy(&self, g: &GridField, y: f64, n: f64) -> Result<FrostmanEnergy> {
        if g.resolution() != self.n {
            return Err(Error::ResolutionMismatch {
                expected: self.n,
                found: g.resolution(),
            });
        }
        check_kernel(g, n)?;
        let h = g.spacing();
        let rho = density(g, y, n);
        let mass: Vec<f64> = rho.iter().map(|r| r * h * h).collect();
        let energy = self.offdiagonal_energy(&mass);
        let gamma = self.gamma;
        let self_cell = h * h * 2.0 * PI * (2f64.sqrt() * h).powf(2.0 - gamma) / (2.0 - gamma);
        let diagonal_bound = rho.iter().map(|r| r * r).sum::<f64>() * self_cell;
        Ok(FrostmanEnergy {
            mass: mass.iter().sum(),
            energy,
            diagonal_bound,
        })
    }
}

fn fft2(data: &mut [Complex64], n: usize, fft: &dyn Fft<f64>) {
    fft.process(data);
    let mut col = vec![Complex64::default(); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = data[i * n + j];
        }
        fft.process(&mut col);
        for i in 0..n {
            data[i * n + j] = col[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::torus_distance;

    #[test]
    fn constant_field_at_level_has_closed_form_mass() {
        let g = GridField::new(16, vec![0.4; 256]).unwrap();
        assert_eq!(kernel_limit(&g), f64::INFINITY);
        for n in [10.0, 1e4] {
            let m = frostman_mass(&g, 0.4, n).unwrap();
            let exact = (2.0 * PI * n).sqrt() * (2.0 * PI).powi(2);
            assert!((m / exact - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn kernel_limit_is_enforced() {
        let g = GridField::from_fn(32, |x| x[0].sin()).unwrap();
        let lim = kernel_limit(&g);
        // mean squared neighbour difference is about h^2 / 4, so n_max is near 100
        assert!(lim > 10.0 && lim < 1e3, "{lim}");
        assert!(frostman_mass(&g, 0.0, lim * 0.9).is_ok());
        assert!(matches!(
            frostman_mass(&g, 0.0, lim * 1.1),
            Err(Error::KernelTooNarrow { .. })
        ));
    }

    #[test]
    fn energy_matches_brute_force_double_sum() {
        let g = GridField::from_fn(16, |x| 0.3 * x[0].sin() + 0.2 * (x[1] - 0.5).cos()).unwrap();
        let (y, n, gamma) = (0.1, 10.0, 0.5);
        let e = frostman_energy(&g, y, n, gamma).unwrap();
        let h = g.spacing();
        let c = (2.0 * PI * n).sqrt();
        let m = |i: usize, j: usize| c * (-0.5 * n * (g.at(i, j) - y).powi(2)).exp() * h * h;
        let mut brute = 0.0;
        for a in 0..256 {
            for b in 0..256 {
                if a != b {
                    let (i, j, k, l) = (a / 16, a % 16, b / 16, b % 16);
                    let d = torus_distance(g.point(i, j), g.point(k, l));
                    brute += m(i, j) * m(k, l) * d.powf(-gamma);
                }
            }
        }
        assert!((e.energy / brute - 1.0).abs() < 1e-12, "{} vs {brute}", e.energy);
        assert!(e.diagonal_bound > 0.0 && e.diagonal_bound < 0.1 * e.energy);
    }

    #[test]
    fn uniform_measure_energy() {
        let g = GridField::new(16, vec![0.0; 256]).unwrap();
        let e = frostman_energy(&g, 0.0, 1.0, 0.5).unwrap();
        let h = g.spacing();
        let m = (2.0 * PI).sqrt() * h * h;
        let mut brute = 0.0;
        for k in 0..16 {
            for l in 0..16 {
                if (k, l) != (0, 0) {
                    brute += 256.0 * m * m * torus_distance(g.point(0, 0), g.point(k, l)).powf(-0.5);
                }
            }
        }
        assert!((e.energy / brute - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_outside_zero_two_is_refused() {
        let g = GridField::zeros(8).unwrap();
        assert!(matches!(frostman_energy(&g, 0.0, 1.0, 2.0), Err(Error::EnergyExponent(_))));
        assert!(frostman_energy(&g, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn energy_grows_with_gamma_for_small_support() {
        // support within a ball of radius 0.4, so every pairwise distance is < 1
        let g = GridField::from_fn(64, |x| (x[0].hypot(x[1]) < 0.4) as u8 as f64).unwrap();
        let mut prev = 0.0;
        for gamma in [0.2, 0.5, 1.0, 1.5, 1.9] {
            let e = EnergyKernel::new(64, gamma).unwrap().offdiagonal_energy(g.values());
            assert!(e > prev);
            prev = e;
        }
    }
}
