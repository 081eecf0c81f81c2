use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of samples a grid may carry.
const MAX_POINTS: usize = 1 << 26;

/// Periodic sampling lattice on the box `[-L/2, L/2)^d`.
///
/// Every axis carries `n` points with spacing `h = L / n`; the dual lattice
/// is `xi_j = 2 pi j / L` with `j` in `[-n/2, n/2)`. Storage order is
/// row-major, last axis fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    n: usize,
    box_length: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, box_length: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("grid dimension must be at least 1".into()));
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::Config(format!(
                "points per axis must be a power of two >= 2, got {n}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::Config(format!(
                "box length must be positive and finite, got {box_length}"
            )));
        }
        let total = (0..dim).try_fold(1usize, |acc, _| acc.checked_mul(n));
        match total {
            Some(t) if t <= MAX_POINTS => {}
            _ => {
                return Err(Error::Config(format!(
                    "{n}^{dim} samples exceed the supported grid size"
                )))
            }
        }
        Ok(Self { dim, n, box_length })
    }

    /// Default desk-scale grid for a dimension: `d=1` uses 4096 points on a
    /// box of length 256, `d=2` uses 512 on 128, `d=3` 128 on 64.
    pub fn desk_default(dim: usize) -> Result<Self> {
        match dim {
            1 => Self::new(1, 4096, 256.0),
            2 => Self::new(2, 512, 128.0),
            3 => Self::new(3, 128, 64.0),
            _ => Err(Error::Config(format!("no default grid for d = {dim}"))),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    /// Volume element `h^d` of the trapezoidal rule.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Total number of samples `n^d`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Stride of `axis` in the flat storage.
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.dim - 1 - axis) as u32)
    }

    /// Index along `axis` of the flat sample `p`.
    #[inline]
    pub fn axis_index(&self, p: usize, axis: usize) -> usize {
        (p / self.stride(axis)) % self.n
    }

    /// Physical coordinate of lattice index `j` on one axis.
    #[inline]
    pub fn coordinate(&self, j: usize) -> f64 {
        -0.5 * self.box_length + j as f64 * self.spacing()
    }

    /// Fills `out` with the physical position of flat sample `p`.
    pub fn position(&self, p: usize, out: &mut [f64]) {
        for (axis, x) in out.iter_mut().enumerate().take(self.dim) {
            *x = self.coordinate(self.axis_index(p, axis));
        }
    }

    /// Signed frequency index of storage slot `j` (`n/2` maps to `-n/2`).
    #[inline]
    pub fn signed_index(&self, j: usize) -> i64 {
        if j < self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// Angular wavenumber of storage slot `j` on one axis.
    #[inline]
    pub fn wavenumber(&self, j: usize) -> f64 {
        2.0 * PI * self.signed_index(j) as f64 / self.box_length
    }

    #[inline]
    pub fn is_nyquist(&self, j: usize) -> bool {
        j == self.n / 2
    }

    /// Per-axis wavenumbers in storage order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.wavenumber(j)).collect()
    }

    /// Nyquist wavenumber `pi n / L`.
    #[inline]
    pub fn nyquist(&self) -> f64 {
        PI * self.n as f64 / self.box_length
    }

    /// Largest `|xi|` on the lattice (the corner of the frequency cube).
    pub fn max_frequency(&self) -> f64 {
        self.nyquist() * (self.dim as f64).sqrt()
    }

    /// `|xi|^2` at flat frequency slot `p`.
    pub fn xi_squared(&self, p: usize) -> f64 {
        (0..self.dim)
            .map(|a| {
                let k = self.wavenumber(self.axis_index(p, a));
                k * k
            })
            .sum()
    }

    /// Flat slot of the frequency with the given signed per-axis indices.
    pub fn slot_of(&self, signed: &[i64]) -> usize {
        let n = self.n as i64;
        signed
            .iter()
            .fold(0usize, |acc, &s| acc * self.n + s.rem_euclid(n) as usize)
    }

    /// Flat slot of `-xi` for the frequency at slot `p`.
    pub fn negated_slot(&self, p: usize) -> usize {
        (0..self.dim).fold(0usize, |acc, a| {
            let j = self.axis_index(p, a);
            acc * self.n + (self.n - j) % self.n
        })
    }

    /// Same spacing, box and point count scaled by `factor` per axis.
    pub fn dilated(&self, factor: usize) -> Result<Self> {
        if !factor.is_power_of_two() {
            return Err(Error::Config(format!(
                "dilation factor must be a power of two, got {factor}"
            )));
        }
        Self::new(self.dim, self.n * factor, self.box_length * factor as f64)
    }
}

/// The Sobolev order `s_d = floor(d/2) + 1` governing the global Sobolev
/// inequality and the number of boosts it needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SobolevOrder {
    dim: usize,
    order: usize,
}

impl SobolevOrder {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            order: dim / 2 + 1,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self) -> usize {
        self.order
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_times_points_is_box_length() {
        for &(n, l) in &[(4096usize, 256.0), (512, 128.0), (64, 10.0), (8, 3.3)] {
            let g = Grid::new(1, n, l).unwrap();
            assert_eq!(g.spacing() * n as f64, l);
        }
    }

    #[test]
    fn frequency_lattice_closed_under_negation() {
        let g = Grid::new(2, 16, 7.0).unwrap();
        for p in 0..g.len() {
            let q = g.negated_slot(p);
            assert_eq!(g.negated_slot(q), p);
            for a in 0..2 {
                let jp = g.axis_index(p, a);
                let jq = g.axis_index(q, a);
                if !g.is_nyquist(jp) {
                    assert_eq!(g.wavenumber(jp), -g.wavenumber(jq));
                }
            }
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(1, 100, 1.0).is_err());
        assert!(Grid::new(0, 16, 1.0).is_err());
        assert!(Grid::new(1, 16, -1.0).is_err());
        assert!(Grid::new(3, 1024, 1.0).is_err());
    }

    #[test]
    fn sobolev_order() {
        assert_eq!(SobolevOrder::new(1).get(), 1);
        assert_eq!(SobolevOrder::new(2).get(), 2);
        assert_eq!(SobolevOrder::new(3).get(), 2);
        assert_eq!(SobolevOrder::new(4).get(), 3);
    }

    #[test]
    fn positions_are_centered() {
        let g = Grid::new(2, 4, 4.0).unwrap();
        let mut x = [0.0; 2];
        g.position(0, &mut x);
        assert_eq!(x, [-2.0, -2.0]);
        g.position(g.len() - 1, &mut x);
        assert_eq!(x, [1.0, 1.0]);
        g.position(1, &mut x);
        assert_eq!(x, [-2.0, -1.0]);
    }
}
