use crate::error::{Error, Result};
use crate::profile::smooth_step;
use crate::spectral::{forward_transform, inverse_transform, Field, Grid, SpectralField};

/// Low-pass profile: 1 on `|xi| <= 1/2`, 0 on `|xi| >= 1`.
#[inline]
pub fn low_pass(rho: f64) -> f64 {
    1.0 - smooth_step(2.0 * rho - 1.0)
}

/// Annular profile `psi(xi) = low_pass(xi/2) - low_pass(xi)`, supported in
/// `1/2 <= |xi| <= 2` and equal to 1 at `|xi| = 1`.
#[inline]
pub fn mother_bump(rho: f64) -> f64 {
    low_pass(0.5 * rho) - low_pass(rho)
}

/// Dyadic Littlewood-Paley projectors `P_{-1}, P_0, ..., P_{k_max}` on a
/// periodic grid.
///
/// Band `k >= 0` has symbol `psi(2^-k xi)`; the bank telescopes, so the
/// symbols sum to `low_pass(2^-(k_max+1) |xi|)`, which is identically 1 on
/// the lattice because `2^k_max` is at least the largest lattice frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LPBank {
    grid: Grid,
    k_max: i32,
}

impl LPBank {
    pub fn new(grid: Grid) -> Self {
        let top = grid.max_frequency();
        let mut k = 0;
        while 2f64.powi(k) < top {
            k += 1;
        }
        Self { grid, k_max: k }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn k_max(&self) -> i32 {
        self.k_max
    }

    /// Bands `-1..=k_max`.
    pub fn bands(&self) -> impl Iterator<Item = i32> {
        -1..=self.k_max
    }

    /// Symbol of band `k` at radius `rho = |xi|`.
    pub fn symbol(&self, k: i32, rho: f64) -> f64 {
        if k < 0 {
            low_pass(rho)
        } else {
            mother_bump(rho / 2f64.powi(k))
        }
    }

    /// Support annulus `[lo, hi]` of band `k` in `|xi|`.
    pub fn support(k: i32) -> (f64, f64) {
        if k < 0 {
            (0.0, 1.0)
        } else {
            (2f64.powi(k - 1), 2f64.powi(k + 1))
        }
    }

    /// Whether the whole annulus of band `k` sits below the Nyquist
    /// frequency of every axis.
    pub fn is_resolved(&self, k: i32) -> bool {
        Self::support(k).1 <= self.grid.nyquist()
    }

    fn check_band(&self, k: i32) -> Result<()> {
        if k < -1 || k > self.k_max {
            return Err(Error::BandOutOfRange {
                band: k,
                k_max: self.k_max,
            });
        }
        Ok(())
    }

    pub fn project_spectral(&self, spec: &SpectralField, k: i32) -> Result<SpectralField> {
        self.check_band(k)?;
        if spec.grid() != &self.grid {
            return Err(Error::Contract(
                "spectrum and bank use different grids".into(),
            ));
        }
        Ok(spec.radial_multiplied(|rho| self.symbol(k, rho)))
    }

    /// `P_k f`.
    pub fn project(&self, f: &Field, k: i32) -> Result<Field> {
        inverse_transform(&self.project_spectral(&forward_transform(f), k)?)
    }

    /// `[P_{-1} f, P_0 f, ..., P_{k_max} f]`.
    pub fn decompose(&self, f: &Field) -> Result<Vec<Field>> {
        let spec = forward_transform(f);
        self.bands()
            .map(|k| inverse_transform(&self.project_spectral(&spec, k)?))
            .collect()
    }

    /// Largest `|sum_k symbol_k(xi) - 1|` over the frequency lattice.
    pub fn completeness_residual(&self) -> f64 {
        (0..self.grid.len()).fold(0.0f64, |worst, p| {
            let rho = self.grid.xi_squared(p).sqrt();
            let total: f64 = self.bands().map(|k| self.symbol(k, rho)).sum();
            worst.max((total - 1.0).abs())
        })
    }
}
