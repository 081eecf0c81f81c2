//! Discrete Fourier transform on the periodic box and spectral
//! differentiation.
//!
//! Normalization: the forward transform is the plain sum
//! `F(xi_k) = sum_j f(x_j) exp(-i xi_k (x_j + L/2))`, the inverse divides by
//! `n^d`. With this convention Parseval reads
//! `h^d sum_j |f_j|^2 = (h^d / n^d) sum_k |F_k|^2`.
//!
//! Odd-order derivatives zero the Nyquist coefficient along the
//! differentiated axis so that real fields stay real.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use super::field::{Field, SpectralField};
use super::grid::Grid;
use crate::error::{Error, Result};

pub fn forward_transform(f: &Field) -> SpectralField {
    let grid = *f.grid();
    let mut data: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_in_place(&grid, &mut data, FftDirection::Forward);
    SpectralField::new(grid, data).expect("length preserved")
}

/// Inverse transform; the imaginary residue is discarded.
pub fn inverse_transform(spec: &SpectralField) -> Result<Field> {
    let grid = *spec.grid();
    let mut data = spec.coeffs().to_vec();
    fft_in_place(&grid, &mut data, FftDirection::Inverse);
    let scale = 1.0 / grid.len() as f64;
    Field::new(grid, data.iter().map(|c| c.re * scale).collect())
}

fn fft_in_place(grid: &Grid, data: &mut [Complex64], direction: FftDirection) {
    let n = grid.points_per_axis();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(n, direction);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..grid.dim() {
        let stride = grid.stride(axis);
        if stride == 1 {
            for chunk in data.chunks_exact_mut(n) {
                fft.process_with_scratch(chunk, &mut scratch);
            }
            continue;
        }
        let block = stride * n;
        for base in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, slot) in line.iter().enumerate() {
                    data[start + j * stride] = *slot;
                }
            }
        }
    }
}

/// Symbol of `d^order / dx_axis^order` at per-axis slot `j`.
fn derivative_symbol(grid: &Grid, j: usize, order: usize) -> Complex64 {
    if order == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if order % 2 == 1 && grid.is_nyquist(j) {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new(0.0, grid.wavenumber(j)).powu(order as u32)
}

/// Applies `prod_a (i xi_a)^alpha_a` to a spectrum.
pub fn partial_spectral(spec: &SpectralField, alpha: &[usize]) -> Result<SpectralField> {
    let grid = *spec.grid();
    if alpha.len() != grid.dim() {
        return Err(Error::Contract(format!(
            "multi-index has {} entries for a {}-dimensional grid",
            alpha.len(),
            grid.dim()
        )));
    }
    Ok(spec.multiplied(|p| {
        alpha
            .iter()
            .enumerate()
            .fold(Complex64::new(1.0, 0.0), |acc, (a, &k)| {
                acc * derivative_symbol(&grid, grid.axis_index(p, a), k)
            })
    }))
}

/// Mixed partial `d^alpha f` computed spectrally.
pub fn partial(f: &Field, alpha: &[usize]) -> Result<Field> {
    if alpha.iter().all(|&k| k == 0) {
        if alpha.len() != f.grid().dim() {
            return Err(Error::Contract("multi-index length mismatch".into()));
        }
        return Ok(f.clone());
    }
    inverse_transform(&partial_spectral(&forward_transform(f), alpha)?)
}

/// `d f / d x^axis` via multiplication by `i xi_axis`.
pub fn spatial_derivative(f: &Field, axis: usize) -> Result<Field> {
    let dim = f.grid().dim();
    if axis >= dim {
        return Err(Error::AxisOutOfRange { axis, dim });
    }
    let mut alpha = vec![0; dim];
    alpha[axis] = 1;
    partial(f, &alpha)
}

/// Spectral Laplacian (multiplier `-|xi|^2`).
pub fn laplacian(f: &Field) -> Result<Field> {
    let g = *f.grid();
    let spec = forward_transform(f);
    inverse_transform(&spec.multiplied(|p| Complex64::new(-g.xi_squared(p), 0.0)))
}
