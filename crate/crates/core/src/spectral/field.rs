use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Real samples of a scalar function on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Contract(format!(
                "field has {} values but the grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(p) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Invariant(format!(
                "non-finite field value {} at sample {p}",
                values[p]
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    /// Samples `f(x)` at every lattice point.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let mut x = vec![0.0; grid.dim()];
        let values = (0..grid.len())
            .map(|p| {
                grid.position(p, &mut x);
                f(&x)
            })
            .collect();
        Self::new(grid, values)
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Applies `f(x, value)` pointwise.
    pub fn map_with_position(&self, f: impl Fn(&[f64], f64) -> f64) -> Self {
        let mut x = vec![0.0; self.grid.dim()];
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(p, &v)| {
                self.grid.position(p, &mut x);
                f(&x, v)
            })
            .collect();
        Self {
            grid: self.grid,
            values,
        }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Field, b: f64) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&u, &v)| a * u + b * v)
                .collect(),
        })
    }

    pub fn add(&self, other: &Field) -> Result<Self> {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Field) -> Result<Self> {
        self.combine(1.0, other, -1.0)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Field) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&u, &v)| u * v)
                .collect(),
        })
    }

    /// Multiplication by the centered coordinate `x^axis`.
    pub fn times_coordinate(&self, axis: usize) -> Result<Self> {
        if axis >= self.grid.dim() {
            return Err(Error::AxisOutOfRange {
                axis,
                dim: self.grid.dim(),
            });
        }
        Ok(self.map_with_position(|x, v| x[axis] * v))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Flat index of the largest `|value|` (first one on ties).
    pub fn argmax_abs(&self) -> usize {
        let mut best = 0;
        let mut best_v = f64::NEG_INFINITY;
        for (p, v) in self.values.iter().enumerate() {
            if v.abs() > best_v {
                best_v = v.abs();
                best = p;
            }
        }
        best
    }

    pub fn max_abs_diff(&self, other: &Field) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (u, v)| m.max((u - v).abs())))
    }

    fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Contract("fields live on different grids".into()));
        }
        Ok(())
    }
}

/// Unnormalized discrete Fourier coefficients of a real field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Contract(format!(
                "spectrum has {} coefficients but the grid has {} points",
                coeffs.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Multiplies each coefficient by `m(slot)`.
    pub fn multiplied(&self, m: impl Fn(usize) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(p, &c)| c * m(p))
                .collect(),
        }
    }

    /// Multiplies by a real radial symbol `m(|xi|)`.
    pub fn radial_multiplied(&self, m: impl Fn(f64) -> f64) -> Self {
        let g = self.grid;
        self.multiplied(|p| Complex64::new(m(g.xi_squared(p).sqrt()), 0.0))
    }

    /// Largest `|c(-xi) - conj(c(xi))|` relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        let worst = (0..self.coeffs.len()).fold(0.0f64, |m, p| {
            let q = self.grid.negated_slot(p);
            m.max((self.coeffs[q] - self.coeffs[p].conj()).norm())
        });
        worst / scale
    }

    /// `sum |c|^2 * w(|xi|^2)` in the physical normalization
    /// `h^d / n^d`, so that `w = 1` gives the squared L2 norm.
    pub fn weighted_energy(&self, w: impl Fn(f64) -> f64) -> f64 {
        let norm = self.grid.cell_volume() / self.grid.len() as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(p, c)| c.norm_sqr() * w(self.grid.xi_squared(p)))
            .sum::<f64>()
            * norm
    }
}
