//! Grid synthesis and analysis through real 2-D FFTs.
//!
//! A field `f(x) = sum_k F_k exp(i k.x)` sampled at `x_ij = -pi + h (i, j)`
//! picks up the phase `(-1)^{k1 + k2}` relative to the standard DFT, which is
//! applied when moving between [`Spectrum`] and the FFT buffers.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{check_resolution, GridField, ModeIndexSet, SpectralField, WaveVector, BASIS_NORM};
use crate::error::{Error, Result};

/// Complex Fourier coefficients `F_k` on the half plane `k2 >= 0`, stored
/// `[k2][k1 mod n]`. Entries with `k2 < 0` are implied by conjugate symmetry.
#[derive(Clone, Debug)]
pub struct Spectrum {
    n: usize,
    half: usize,
    data: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(n: usize) -> Self {
        let half = n / 2 + 1;
        Self {
            n,
            half,
            data: vec![Complex64::new(0.0, 0.0); half * n],
        }
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, k1: i32, k2: i32) -> usize {
        debug_assert!(k2 >= 0 && (k2 as usize) < self.half);
        let col = k1.rem_euclid(self.n as i32) as usize;
        k2 as usize * self.n + col
    }

    /// `F_k` for any `k`, using `F_{-k} = conj(F_k)`.
    pub fn get(&self, k1: i32, k2: i32) -> Complex64 {
        if k2 >= 0 {
            self.data[self.slot(k1, k2)]
        } else {
            self.data[self.slot(-k1, -k2)].conj()
        }
    }

    /// Converts real basis coefficients to `F_k`. For `k` in the upper half,
    /// `s sin(k.x) + q cos(k.x) = (c/2)(q - i s) e^{ik.x} + c.c.` with `q` the
    /// coefficient stored on `-k`.
    pub fn from_field(field: &SpectralField, n: usize) -> Result<Self> {
        check_fits(field.modes(), n)?;
        let mut spec = Self::zeros(n);
        let modes = field.modes();
        let coeffs = field.coeffs();
        for (i, k) in modes.iter().enumerate() {
            if !k.is_upper() {
                continue;
            }
            let s = coeffs[i];
            let q = coeffs[modes.negated_index(i)];
            let v = Complex64::new(0.5 * BASIS_NORM * q, -0.5 * BASIS_NORM * s);
            spec.put_hermitian(k, v);
        }
        Ok(spec)
    }

    /// Writes `F_k` (upper `k`) and, on the `k2 = 0` axis, its mirror `F_{-k}`.
    #[inline]
    pub(crate) fn put_hermitian(&mut self, k: WaveVector, v: Complex64) {
        let s = self.slot(k.k1, k.k2);
        self.data[s] = v;
        if k.k2 == 0 {
            let m = self.slot(-k.k1, 0);
            self.data[m] = v.conj();
        }
    }

    /// Reads off real basis coefficients for every mode in `modes`.
    pub fn to_field(&self, modes: &Arc<ModeIndexSet>) -> Result<SpectralField> {
        check_fits(modes, self.n)?;
        let mut out = SpectralField::zeros(modes);
        self.write_field(&mut out);
        Ok(out)
    }

    pub(crate) fn write_field(&self, out: &mut SpectralField) {
        let modes = Arc::clone(out.modes());
        let coeffs = out.coeffs_mut();
        let scale = 2.0 / BASIS_NORM;
        for (i, k) in modes.iter().enumerate() {
            if !k.is_upper() {
                continue;
            }
            let f = self.data[self.slot(k.k1, k.k2)];
            coeffs[i] = -scale * f.im;
            coeffs[modes.negated_index(i)] = scale * f.re;
        }
    }

    /// Applies `F_k <- m(k) F_k` over the stored half plane.
    pub fn map_modes(&mut self, mut m: impl FnMut(i32, i32, Complex64) -> Complex64) {
        let n = self.n as i32;
        for k2 in 0..self.half {
            for col in 0..self.n {
                let k1 = if col as i32 > n / 2 { col as i32 - n } else { col as i32 };
                let idx = k2 * self.n + col;
                self.data[idx] = m(k1, k2 as i32, self.data[idx]);
            }
        }
    }
}

fn check_fits(modes: &ModeIndexSet, n: usize) -> Result<()> {
    check_resolution(n)?;
    let required = modes.min_resolution();
    if n < required {
        return Err(Error::ResolutionTooSmall {
            n_g: n,
            radius: modes.radius(),
            required,
        });
    }
    Ok(())
}

#[inline]
fn parity_sign(col: usize, k2: usize) -> f64 {
    if (col + k2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// FFT plans and work buffers for one resolution. Not shared across threads.
pub struct Transform {
    n: usize,
    half: usize,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    cols: Vec<Complex64>,
    rows: Vec<Complex64>,
    real_row: Vec<f64>,
    scratch: Vec<Complex64>,
}

impl Transform {
    pub fn new(n: usize) -> Result<Self> {
        check_resolution(n)?;
        let mut real = RealFftPlanner::<f64>::new();
        let mut cplx = FftPlanner::<f64>::new();
        let r2c = real.plan_fft_forward(n);
        let c2r = real.plan_fft_inverse(n);
        let fwd = cplx.plan_fft_forward(n);
        let inv = cplx.plan_fft_inverse(n);
        let scratch_len = [
            r2c.get_scratch_len(),
            c2r.get_scratch_len(),
            fwd.get_inplace_scratch_len(),
            inv.get_inplace_scratch_len(),
        ]
        .into_iter()
        .max()
        .unwrap_or(0);
        let half = n / 2 + 1;
        Ok(Self {
            n,
            half,
            r2c,
            c2r,
            fwd,
            inv,
            cols: vec![Complex64::new(0.0, 0.0); half * n],
            rows: vec![Complex64::new(0.0, 0.0); n * half],
            real_row: vec![0.0; n],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        })
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    /// Grid values `f(x_ij) = sum_k F_k e^{i k.x_ij}` into `out` (row-major, length `n^2`).
    pub fn inverse(&mut self, spec: &Spectrum, out: &mut [f64]) {
        let (n, half) = (self.n, self.half);
        assert_eq!(spec.n, n);
        assert_eq!(out.len(), n * n);
        for k2 in 0..half {
            let src = &spec.data[k2 * n..(k2 + 1) * n];
            let dst = &mut self.cols[k2 * n..(k2 + 1) * n];
            for (col, (d, s)) in dst.iter_mut().zip(src).enumerate() {
                *d = s * parity_sign(col, k2);
            }
            self.inv.process_with_scratch(dst, &mut self.scratch);
        }
        for i in 0..n {
            for k2 in 0..half {
                self.rows[i * half + k2] = self.cols[k2 * n + i];
            }
            let row = &mut self.rows[i * half..(i + 1) * half];
            row[0].im = 0.0;
            row[half - 1].im = 0.0;
            self.c2r
                .process_with_scratch(row, &mut out[i * n..(i + 1) * n], &mut self.scratch)
                .expect("c2r buffer sizes are fixed by the plan");
        }
    }

    /// Fourier coefficients of grid values, normalised so that `inverse` undoes it.
    pub fn forward(&mut self, values: &[f64], spec: &mut Spectrum) {
        let (n, half) = (self.n, self.half);
        assert_eq!(spec.n, n);
        assert_eq!(values.len(), n * n);
        for i in 0..n {
            self.real_row.copy_from_slice(&values[i * n..(i + 1) * n]);
            self.r2c
                .process_with_scratch(
                    &mut self.real_row,
                    &mut self.rows[i * half..(i + 1) * half],
                    &mut self.scratch,
                )
                .expect("r2c buffer sizes are fixed by the plan");
        }
        let norm = 1.0 / (n * n) as f64;
        for k2 in 0..half {
            let col = &mut self.cols[k2 * n..(k2 + 1) * n];
            for (i, c) in col.iter_mut().enumerate() {
                *c = self.rows[i * half + k2];
            }
            self.fwd.process_with_scratch(col, &mut self.scratch);
            let dst = &mut spec.data[k2 * n..(k2 + 1) * n];
            for (c1, (d, s)) in dst.iter_mut().zip(col.iter()).enumerate() {
                *d = s * (norm * parity_sign(c1, k2));
            }
        }
    }
}

thread_local! {
    static PLANS: RefCell<HashMap<usize, Transform>> = RefCell::new(HashMap::new());
}

/// Runs `f` with this thread's cached [`Transform`] for resolution `n`.
pub fn with_transform<R>(n: usize, f: impl FnOnce(&mut Transform) -> R) -> Result<R> {
    PLANS.with(|cell| {
        let mut plans = cell.borrow_mut();
        if !plans.contains_key(&n) {
            plans.insert(n, Transform::new(n)?);
        }
        Ok(f(plans.get_mut(&n).expect("inserted above")))
    })
}

/// Evaluates the basis expansion of `f` on the `n_g x n_g` grid.
pub fn synthesize(f: &SpectralField, n_g: usize) -> Result<GridField> {
    let spec = Spectrum::from_field(f, n_g)?;
    let mut values = vec![0.0; n_g * n_g];
    with_transform(n_g, |t| t.inverse(&spec, &mut values))?;
    GridField::new(n_g, values)
}

/// Discrete projection of grid values onto `modes`; the exact inverse of
/// [`synthesize`] for band-limited input.
pub fn analyze(g: &GridField, modes: &Arc<ModeIndexSet>) -> Result<SpectralField> {
    let n = g.resolution();
    check_fits(modes, n)?;
    let mut spec = Spectrum::zeros(n);
    with_transform(n, |t| t.forward(g.values(), &mut spec))?;
    spec.to_field(modes)
}
