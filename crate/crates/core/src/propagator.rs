//! Exact Klein-Gordon evolution on the periodic box by Fourier multipliers.
//!
//! With `omega(xi) = sqrt(|xi|^2 + m^2)` and `dt = t - t0`:
//!
//! ```text
//! phi^    = cos(dt omega) f^ + sin(dt omega)/omega g^
//! dphi^/dt = -omega sin(dt omega) f^ + cos(dt omega) g^
//! ```
//!
//! `sin(dt omega)/omega` switches to its Taylor series when
//! `|dt omega| < 1e-4`, which covers the `omega = 0` mode of the massless
//! equation.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::LPBank;
use crate::spectral::{
    forward_transform, inverse_transform, laplacian, spatial_derivative, Field, Grid, SpectralField,
};

const SINC_SERIES_BELOW: f64 = 1e-4;

/// Prescription time used by the boost commutation formulas.
pub const BOOST_PRESCRIPTION_TIME: f64 = 2.0;

/// Position and velocity data prescribed at `t0` for `Box_m phi = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyData {
    pub f: Field,
    pub g: Field,
    pub t0: f64,
    pub mass: f64,
}

impl CauchyData {
    pub fn new(f: Field, g: Field, t0: f64, mass: f64) -> Result<Self> {
        if f.grid() != g.grid() {
            return Err(Error::Contract("f and g live on different grids".into()));
        }
        if !(mass >= 0.0 && mass.is_finite()) {
            return Err(Error::Contract(format!("mass must be >= 0, got {mass}")));
        }
        if !t0.is_finite() {
            return Err(Error::Contract("prescription time must be finite".into()));
        }
        Ok(Self { f, g, t0, mass })
    }

    pub fn zero(grid: Grid, t0: f64, mass: f64) -> Self {
        Self {
            f: Field::zeros(grid),
            g: Field::zeros(grid),
            t0,
            mass,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.f.grid()
    }

    /// `a * self + b * other`; both must share grid, time and mass.
    pub fn combine(&self, a: f64, other: &CauchyData, b: f64) -> Result<Self> {
        if self.t0 != other.t0 || self.mass != other.mass {
            return Err(Error::Contract(
                "combined data must share prescription time and mass".into(),
            ));
        }
        Ok(Self {
            f: self.f.combine(a, &other.f, b)?,
            g: self.g.combine(a, &other.g, b)?,
            t0: self.t0,
            mass: self.mass,
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            f: self.f.scaled(c),
            g: self.g.scaled(c),
            ..self.clone()
        }
    }

    /// Band-`k` projection of both components.
    pub fn projected(&self, bank: &LPBank, k: i32) -> Result<Self> {
        Ok(Self {
            f: bank.project(&self.f, k)?,
            g: bank.project(&self.g, k)?,
            ..self.clone()
        })
    }

    /// `int g^2 + |grad f|^2 + m^2 f^2 dx`.
    pub fn flat_energy(&self) -> Result<f64> {
        let grads = (0..self.grid().dim())
            .map(|a| spatial_derivative(&self.f, a))
            .collect::<Result<Vec<_>>>()?;
        Ok(energy_density_integral(&self.f, &self.g, &grads, self.mass))
    }
}

fn energy_density_integral(phi: &Field, dt: &Field, grads: &[Field], mass: f64) -> f64 {
    let m2 = mass * mass;
    let sum: f64 = (0..phi.values().len())
        .map(|p| {
            let grad2: f64 = grads.iter().map(|d| d.values()[p].powi(2)).sum();
            dt.values()[p].powi(2) + grad2 + m2 * phi.values()[p].powi(2)
        })
        .sum();
    sum * phi.grid().cell_volume()
}

/// Solution and first derivatives on the grid at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolvedState {
    pub t0: f64,
    pub mass: f64,
    pub t: f64,
    pub phi: Field,
    pub dphi_dt: Field,
    pub grad_phi: Vec<Field>,
}

impl EvolvedState {
    /// `int (d_t phi)^2 + |grad phi|^2 + m^2 phi^2 dx` at time `t`.
    pub fn flat_energy(&self) -> f64 {
        energy_density_integral(&self.phi, &self.dphi_dt, &self.grad_phi, self.mass)
    }

    /// `|d phi| = sqrt((d_t phi)^2 + |grad phi|^2)` on the grid.
    pub fn spacetime_gradient_norm(&self) -> Field {
        let values = (0..self.phi.values().len())
            .map(|p| {
                let g2: f64 = self.grad_phi.iter().map(|d| d.values()[p].powi(2)).sum();
                (self.dphi_dt.values()[p].powi(2) + g2).sqrt()
            })
            .collect();
        Field::new(*self.phi.grid(), values).expect("finite by construction")
    }
}

/// Solution and first derivatives at one space-time point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointValue {
    pub phi: f64,
    pub dphi_dt: f64,
    pub grad_phi: Vec<f64>,
}

impl PointValue {
    pub fn spacetime_gradient_norm(&self) -> f64 {
        (self.dphi_dt * self.dphi_dt + self.grad_phi.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }
}

/// Frequency-space view of a Cauchy problem, reusable across many times
/// and evaluation points.
#[derive(Debug, Clone)]
pub struct Propagator {
    grid: Grid,
    t0: f64,
    mass: f64,
    f_hat: SpectralField,
    g_hat: SpectralField,
    omega: Vec<f64>,
}

#[inline]
fn time_multipliers(dt: f64, omega: f64) -> (f64, f64, f64) {
    let arg = dt * omega;
    let (s, c) = arg.sin_cos();
    let sinc = if arg.abs() < SINC_SERIES_BELOW {
        dt * (1.0 - arg * arg / 6.0)
    } else {
        s / omega
    };
    (c, sinc, -omega * s)
}

impl Propagator {
    pub fn new(data: &CauchyData) -> Self {
        let grid = *data.grid();
        let m2 = data.mass * data.mass;
        let omega = (0..grid.len())
            .map(|p| (grid.xi_squared(p) + m2).sqrt())
            .collect();
        Self {
            grid,
            t0: data.t0,
            mass: data.mass,
            f_hat: forward_transform(&data.f),
            g_hat: forward_transform(&data.g),
            omega,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Spectra of `phi` and `d_t phi` at time `t`.
    pub fn spectra_at(&self, t: f64) -> Result<(SpectralField, SpectralField)> {
        let dt = t - self.t0;
        let n = self.grid.len();
        let mut phi = Vec::with_capacity(n);
        let mut dphi = Vec::with_capacity(n);
        for p in 0..n {
            let (c, sinc, dsin) = time_multipliers(dt, self.omega[p]);
            if !(c.is_finite() && sinc.is_finite() && dsin.is_finite()) {
                return Err(Error::Invariant(format!(
                    "non-finite multiplier at slot {p}, t = {t}"
                )));
            }
            let fh = self.f_hat.coeffs()[p];
            let gh = self.g_hat.coeffs()[p];
            phi.push(fh * c + gh * sinc);
            dphi.push(fh * dsin + gh * c);
        }
        Ok((
            SpectralField::new(self.grid, phi)?,
            SpectralField::new(self.grid, dphi)?,
        ))
    }

    pub fn evolve(&self, t: f64) -> Result<EvolvedState> {
        let (phi_hat, dphi_hat) = self.spectra_at(t)?;
        let grad_phi = (0..self.grid.dim())
            .map(|a| {
                inverse_transform(&phi_hat.multiplied(|p| {
                    let j = self.grid.axis_index(p, a);
                    if self.grid.is_nyquist(j) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        Complex64::new(0.0, self.grid.wavenumber(j))
                    }
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EvolvedState {
            t0: self.t0,
            mass: self.mass,
            t,
            phi: inverse_transform(&phi_hat)?,
            dphi_dt: inverse_transform(&dphi_hat)?,
            grad_phi,
        })
    }

    /// Direct Fourier summation of `phi`, `d_t phi` and `grad phi` at
    /// arbitrary `(t, x)` points, using the same multipliers as
    /// [`Propagator::evolve`]. The Nyquist mode of each axis is read as a
    /// cosine so that grid values are reproduced exactly.
    pub fn evaluate_at_points(&self, points: &[(f64, Vec<f64>)]) -> Result<Vec<PointValue>> {
        let d = self.grid.dim();
        if let Some((_, x)) = points.iter().find(|(_, x)| x.len() != d) {
            return Err(Error::Contract(format!(
                "point {x:?} has the wrong dimension for a {d}-dimensional grid"
            )));
        }
        let half = self.hermitian_half();
        points
            .par_iter()
            .map(|(t, x)| self.evaluate_one(&half, *t, x))
            .collect()
    }

    /// Slots with last-axis index in `[0, n/2]` and their Hermitian weights.
    fn hermitian_half(&self) -> Vec<(usize, f64)> {
        let n = self.grid.points_per_axis();
        let last = self.grid.dim() - 1;
        (0..self.grid.len())
            .filter_map(|p| {
                let j = self.grid.axis_index(p, last);
                if j == 0 || j == n / 2 {
                    Some((p, 1.0))
                } else if j < n / 2 {
                    Some((p, 2.0))
                } else {
                    None
                }
            })
            .collect()
    }

    fn evaluate_one(&self, half: &[(usize, f64)], t: f64, x: &[f64]) -> Result<PointValue> {
        let g = &self.grid;
        let n = g.points_per_axis();
        let d = g.dim();
        let shift = 0.5 * g.box_length();
        // phase[a][j], dphase[a][j]
        let mut phase = vec![vec![Complex64::new(0.0, 0.0); n]; d];
        let mut dphase = vec![vec![Complex64::new(0.0, 0.0); n]; d];
        for a in 0..d {
            let xs = x[a] + shift;
            for j in 0..n {
                let k = g.wavenumber(j);
                let (s, c) = (k * xs).sin_cos();
                if g.is_nyquist(j) {
                    phase[a][j] = Complex64::new(c, 0.0);
                    dphase[a][j] = Complex64::new(-k * s, 0.0);
                } else {
                    phase[a][j] = Complex64::new(c, s);
                    dphase[a][j] = Complex64::new(-k * s, k * c);
                }
            }
        }
        let dt = t - self.t0;
        let mut phi = 0.0;
        let mut dphi = 0.0;
        let mut grad = vec![0.0; d];
        let mut idx = vec![0usize; d];
        for &(p, w) in half {
            let (c, sinc, dsin) = time_multipliers(dt, self.omega[p]);
            let fh = self.f_hat.coeffs()[p];
            let gh = self.g_hat.coeffs()[p];
            let a_phi = fh * c + gh * sinc;
            let a_dt = fh * dsin + gh * c;
            let e = if d == 1 {
                idx[0] = p;
                phase[0][p]
            } else {
                let mut e = Complex64::new(1.0, 0.0);
                for (a, slot) in idx.iter_mut().enumerate().take(d) {
                    *slot = g.axis_index(p, a);
                    e *= phase[a][*slot];
                }
                e
            };
            phi += w * (a_phi * e).re;
            dphi += w * (a_dt * e).re;
            for (a, ga) in grad.iter_mut().enumerate() {
                let mut de = dphase[a][idx[a]];
                for b in 0..d {
                    if b != a {
                        de *= phase[b][idx[b]];
                    }
                }
                *ga += w * (a_phi * de).re;
            }
        }
        let scale = 1.0 / g.len() as f64;
        let out = PointValue {
            phi: phi * scale,
            dphi_dt: dphi * scale,
            grad_phi: grad.into_iter().map(|v| v * scale).collect(),
        };
        if !(out.phi.is_finite() && out.dphi_dt.is_finite()) {
            return Err(Error::Invariant(format!(
                "non-finite value at t = {t}, x = {x:?}"
            )));
        }
        Ok(out)
    }
}

pub fn evolve(data: &CauchyData, t: f64) -> Result<EvolvedState> {
    Propagator::new(data).evolve(t)
}

pub fn evaluate_at_points(
    data: &CauchyData,
    points: &[(f64, Vec<f64>)],
) -> Result<Vec<PointValue>> {
    if points.is_empty() {
        return Ok(Vec::new());
    }
    Propagator::new(data).evaluate_at_points(points)
}

/// Largest value of `f` within one unit of the box boundary, relative to
/// its global maximum.
fn edge_fraction(f: &Field) -> f64 {
    let grid = f.grid();
    let limit = 0.5 * grid.box_length() - 1.0;
    let max = f.max_abs();
    if max == 0.0 {
        return 0.0;
    }
    let mut x = vec![0.0; grid.dim()];
    let mut edge = 0.0f64;
    for (p, v) in f.values().iter().enumerate() {
        grid.position(p, &mut x);
        if x.iter().any(|c| c.abs() >= limit) {
            edge = edge.max(v.abs());
        }
    }
    edge / max
}

/// Tolerance on the relative size of data within one unit of the box edge
/// for the centered coordinate multiplication to be meaningful.
pub const EDGE_TOLERANCE: f64 = 1e-4;

fn check_interior(data: &CauchyData, what: &str) -> Result<()> {
    for (name, field) in [("f", &data.f), ("g", &data.g)] {
        let frac = edge_fraction(field);
        if frac > EDGE_TOLERANCE {
            return Err(Error::Support(format!(
                "{what}: {name} reaches within one unit of the box edge (relative size {frac:.3e})"
            )));
        }
    }
    Ok(())
}

/// Cauchy data at `t0 = 2` of `L^i phi = (x^i d_t + t d_i) phi`:
///
/// ```text
/// f' = 2 d_i f + x^i g
/// g' = d_i f + 2 d_i g + x^i (lap f - m^2 f)
/// ```
pub fn boost_commuted_data(data: &CauchyData, axis: usize) -> Result<CauchyData> {
    let dim = data.grid().dim();
    if axis >= dim {
        return Err(Error::AxisOutOfRange { axis, dim });
    }
    if data.t0 != BOOST_PRESCRIPTION_TIME {
        return Err(Error::Config(format!(
            "boost-commuted data uses the t0 = 2 coefficients, got t0 = {}",
            data.t0
        )));
    }
    check_interior(data, "boost input")?;
    let df = spatial_derivative(&data.f, axis)?;
    let dg = spatial_derivative(&data.g, axis)?;
    let xg = data.g.times_coordinate(axis)?;
    let f_new = df.combine(2.0, &xg, 1.0)?;

    let lap = laplacian(&data.f)?;
    let kg = if data.mass == 0.0 {
        lap
    } else {
        lap.combine(1.0, &data.f, -data.mass * data.mass)?
    };
    let g_new = df
        .combine(1.0, &dg, 2.0)?
        .add(&kg.times_coordinate(axis)?)?;
    let out = CauchyData::new(f_new, g_new, data.t0, data.mass)?;
    check_interior(&out, "boost output")?;
    Ok(out)
}

/// Data for `L^{i_1} ... L^{i_k} phi`; `axes = [i_1, ..., i_k]`, the
/// innermost boost `i_k` is applied first.
pub fn iterated_boost_data(data: &CauchyData, axes: &[usize]) -> Result<CauchyData> {
    axes.iter()
        .rev()
        .try_fold(data.clone(), |acc, &a| boost_commuted_data(&acc, a))
}

/// Relative spectral mass outside the annulus of band `k`.
fn out_of_band_fraction(f: &Field, k: i32) -> f64 {
    let spec = forward_transform(f);
    let (lo, hi) = LPBank::support(k);
    let grid = f.grid();
    let mut inside = 0.0f64;
    let mut outside = 0.0f64;
    for (p, c) in spec.coeffs().iter().enumerate() {
        let rho = grid.xi_squared(p).sqrt();
        if rho >= lo * (1.0 - 1e-12) && rho <= hi * (1.0 + 1e-12) {
            inside = inside.max(c.norm());
        } else {
            outside = outside.max(c.norm());
        }
    }
    if inside == 0.0 {
        0.0
    } else {
        outside / inside
    }
}

/// Dilates band-`k` data to unit frequency scale:
/// `f~(x) = f(2^-k x)`, `g~(x) = 2^-k g(2^-k x)`, mass `2^-k m`, on a box
/// `2^k` times longer with the same spacing. The solutions are related by
/// `phi~(t, x) = phi(t0 + (t - t0)/2^k, x/2^k)`.
pub fn rescale_high_frequency(data: &CauchyData, k: i32) -> Result<CauchyData> {
    if k < 0 {
        return Err(Error::Contract(format!(
            "rescaling applies to bands k >= 0, got {k}"
        )));
    }
    if k == 0 {
        return Ok(data.clone());
    }
    for (name, field) in [("f", &data.f), ("g", &data.g)] {
        let frac = out_of_band_fraction(field, k);
        if frac > 1e-10 {
            return Err(Error::Contract(format!(
                "{name} is not band-limited to band {k} (out-of-band fraction {frac:.3e})"
            )));
        }
        let edge = edge_fraction(field);
        if edge > EDGE_TOLERANCE {
            return Err(Error::Config(format!(
                "{name} is not localized inside the box; its dilation would not fit \
                 the target box (edge fraction {edge:.3e})"
            )));
        }
    }
    let factor = 1usize << k;
    let grid = *data.grid();
    let target = grid.dilated(factor)?;
    let scale = (factor as f64).powi(grid.dim() as i32);
    let dilate = |field: &Field, c: f64| -> Result<Field> {
        let spec = forward_transform(field);
        let mut out = SpectralField::zeros(target);
        let mut signed = vec![0i64; grid.dim()];
        for (p, coeff) in spec.coeffs().iter().enumerate() {
            for (a, s) in signed.iter_mut().enumerate() {
                *s = grid.signed_index(grid.axis_index(p, a));
            }
            out.coeffs_mut()[target.slot_of(&signed)] = coeff * (scale * c);
        }
        inverse_transform(&out)
    };
    let inv = 1.0 / factor as f64;
    CauchyData::new(
        dilate(&data.f, 1.0)?,
        dilate(&data.g, inv)?,
        data.t0,
        data.mass * inv,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(1, 256, 32.0).unwrap()
    }

    #[test]
    fn identity_at_prescription_time() {
        let g = grid();
        let f = Field::from_fn(g, |x| (-x[0] * x[0]).exp()).unwrap();
        let v = Field::from_fn(g, |x| x[0] * (-x[0] * x[0]).exp()).unwrap();
        let data = CauchyData::new(f.clone(), v.clone(), 2.0, 1.0).unwrap();
        let s = evolve(&data, 2.0).unwrap();
        assert!(s.phi.max_abs_diff(&f).unwrap() < 1e-12);
        assert!(s.dphi_dt.max_abs_diff(&v).unwrap() < 1e-12);
    }

    #[test]
    fn massless_zero_mode_grows_linearly() {
        let g = grid();
        let c = 0.75;
        let data =
            CauchyData::new(Field::zeros(g), Field::from_fn(g, |_| c).unwrap(), 0.0, 0.0).unwrap();
        let prop = Propagator::new(&data);
        for &t in &[0.0, 1e-6, 0.5, 3.0] {
            let (phi, _) = prop.spectra_at(t).unwrap();
            let expected = c * g.len() as f64 * t;
            assert!((phi.coeffs()[0].re - expected).abs() <= 1e-12 * expected.max(1.0));
        }
    }

    #[test]
    fn empty_point_list() {
        let data = CauchyData::zero(grid(), 2.0, 1.0);
        assert!(evaluate_at_points(&data, &[]).unwrap().is_empty());
    }

    #[test]
    fn boost_requires_t0_two() {
        let data = CauchyData::zero(grid(), 0.0, 1.0);
        assert!(matches!(
            boost_commuted_data(&data, 0),
            Err(Error::Config(_))
        ));
        let data = CauchyData::zero(grid(), 2.0, 1.0);
        assert!(matches!(
            boost_commuted_data(&data, 1),
            Err(Error::AxisOutOfRange { .. })
        ));
    }

    #[test]
    fn boost_rejects_data_near_edge() {
        let g = grid();
        let f = Field::from_fn(g, |x| (-(x[0] - 15.5).powi(2)).exp()).unwrap();
        let data = CauchyData::new(f, Field::zeros(g), 2.0, 1.0).unwrap();
        assert!(matches!(
            boost_commuted_data(&data, 0),
            Err(Error::Support(_))
        ));
    }

    #[test]
    fn rescale_band_zero_is_identity() {
        let g = grid();
        let f = Field::from_fn(g, |x| (-x[0] * x[0]).exp()).unwrap();
        let data = CauchyData::new(f, Field::zeros(g), 2.0, 0.5).unwrap();
        assert_eq!(rescale_high_frequency(&data, 0).unwrap(), data);
    }

    #[test]
    fn rescale_rejects_out_of_band_data() {
        let g = grid();
        let f = Field::from_fn(g, |x| (-x[0] * x[0]).exp()).unwrap();
        let data = CauchyData::new(f, Field::zeros(g), 2.0, 0.5).unwrap();
        assert!(matches!(
            rescale_high_frequency(&data, 2),
            Err(Error::Contract(_))
        ));
    }
}
