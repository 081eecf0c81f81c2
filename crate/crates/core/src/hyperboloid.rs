//! Hyperboloidal slices `Sigma_tau = { t = sqrt(tau^2 + |x|^2) }`, the boost
//! fields `L^i = x^i d_t + t d_i`, the weighted energy on a slice and the
//! weighted sup-norm functionals it controls.
//!
//! Slices are parametrized by `x`; the induced volume element is
//! `(tau / t) dx`, and integrals use the trapezoidal rule on the grid
//! lattice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagator::{iterated_boost_data, CauchyData, PointValue, Propagator};
use crate::spectral::{Field, Grid, SobolevOrder};

/// Relative threshold below which data values count as outside the support.
const SUPPORT_THRESHOLD: f64 = 1e-10;

/// Slice lattices are this many times finer than the data grid per axis.
/// Incoming waves are compressed by up to a factor two along `Sigma_tau`,
/// so quadratic integrands need twice the data bandwidth.
pub const SLICE_REFINEMENT: usize = 2;

/// Lattice sampling of `Sigma_tau` for data prescribed at `t = 2` and
/// supported in `B(0, r0)`, `r0 < 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperboloidSlice {
    tau: f64,
    grid: Grid,
    points: Vec<Vec<f64>>,
    times: Vec<f64>,
    weights: Vec<f64>,
    support_radius: f64,
    truncation_radius: f64,
}

impl HyperboloidSlice {
    /// Samples every lattice point with `|x| <= R`, where `R` exceeds the
    /// radius at which the slice leaves the solution's support
    /// `{|x| <= r0 + t - 2}` by two grid cells.
    pub fn build(tau: f64, grid: Grid, support_radius_at_t0: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Contract(format!("tau must be positive, got {tau}")));
        }
        let r0 = support_radius_at_t0;
        if !(0.0..2.0).contains(&r0) {
            return Err(Error::Config(format!(
                "slices need data supported in B(0, r0) with r0 < 2, got r0 = {r0}"
            )));
        }
        let a = 2.0 - r0;
        let support = ((tau * tau - a * a) / (2.0 * a)).max(0.0);
        let h = grid.spacing();
        let truncation = support + 2.0 * h;
        if truncation > 0.5 * grid.box_length() - h {
            return Err(Error::Config(format!(
                "slice tau = {tau} meets the solution support out to |x| = {support:.3}, \
                 beyond what a box of length {} can hold",
                grid.box_length()
            )));
        }
        let dv = grid.cell_volume();
        let mut x = vec![0.0; grid.dim()];
        let mut points = Vec::new();
        let mut times = Vec::new();
        let mut weights = Vec::new();
        for p in 0..grid.len() {
            grid.position(p, &mut x);
            let r2: f64 = x.iter().map(|v| v * v).sum();
            if r2 <= truncation * truncation {
                let t = (tau * tau + r2).sqrt();
                points.push(x.clone());
                times.push(t);
                weights.push(tau / t * dv);
            }
        }
        Ok(Self {
            tau,
            grid,
            points,
            times,
            weights,
            support_radius: support,
            truncation_radius: truncation,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// `t(x) = sqrt(tau^2 + |x|^2)` per sample.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// `(tau / t(x)) h^d` per sample.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn truncation_radius(&self) -> f64 {
        self.truncation_radius
    }

    /// Radius beyond which the slice lies outside the solution's support.
    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `int_{Sigma_tau} v dvol_tau` for per-sample values `v`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Largest `|tau^2 - (t^2 - |x|^2)| / tau^2` over the samples.
    pub fn foliation_defect(&self) -> f64 {
        let tau2 = self.tau * self.tau;
        self.points
            .iter()
            .zip(&self.times)
            .map(|(x, t)| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                ((t * t - r2) - tau2).abs() / tau2
            })
            .fold(0.0, f64::max)
    }

    /// Whether `tau^2 >= t` holds at every sample inside
    /// `D = { t >= 2, |x| <= t - 1 }`.
    pub fn region_bound_holds(&self) -> bool {
        let tau2 = self.tau * self.tau;
        self.points.iter().zip(&self.times).all(|(x, &t)| {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let in_d = t >= 2.0 && r <= t - 1.0;
            !in_d || tau2 >= t * (1.0 - 1e-14)
        })
    }

    /// Solution values at the slice samples.
    pub fn sample(&self, prop: &Propagator) -> Result<SliceSample> {
        let g = prop.grid();
        if g.dim() != self.grid.dim() || g.box_length() != self.grid.box_length() {
            return Err(Error::Contract(
                "slice and data live on different boxes".into(),
            ));
        }
        let pts: Vec<(f64, Vec<f64>)> = self
            .times
            .iter()
            .zip(&self.points)
            .map(|(&t, x)| (t, x.clone()))
            .collect();
        Ok(SliceSample {
            values: prop.evaluate_at_points(&pts)?,
        })
    }
}

/// Solution and first derivatives at each sample of a slice.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceSample {
    pub values: Vec<PointValue>,
}

impl SliceSample {
    pub fn phi(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.phi).collect()
    }
}

/// `L^i phi = x^i d_t phi + t d_i phi` at each slice sample.
pub fn boost_field(
    slice: &HyperboloidSlice,
    sample: &SliceSample,
    axis: usize,
) -> Result<Vec<f64>> {
    let dim = slice.grid.dim();
    if axis >= dim {
        return Err(Error::AxisOutOfRange { axis, dim });
    }
    Ok(sample
        .values
        .iter()
        .zip(&slice.points)
        .zip(&slice.times)
        .map(|((v, x), &t)| x[axis] * v.dphi_dt + t * v.grad_phi[axis])
        .collect())
}

/// Radius of the smallest origin-centered ball outside which `f` and `g`
/// are below `1e-10` of their maxima.
pub fn numerical_support_radius(data: &CauchyData) -> f64 {
    let grid = data.grid();
    let mut x = vec![0.0; grid.dim()];
    let mut r = 0.0f64;
    for field in [&data.f, &data.g] {
        let cut = field.max_abs() * SUPPORT_THRESHOLD;
        for (p, v) in field.values().iter().enumerate() {
            if v.abs() > cut {
                grid.position(p, &mut x);
                r = r.max(x.iter().map(|c| c * c).sum::<f64>().sqrt());
            }
        }
    }
    r
}

fn slice_for(data: &CauchyData, tau: f64) -> Result<HyperboloidSlice> {
    if data.t0 != 2.0 {
        return Err(Error::Config(format!(
            "slice functionals assume data prescribed at t = 2, got t0 = {}",
            data.t0
        )));
    }
    let grid = *data.grid();
    let r0 = numerical_support_radius(data);
    if r0 >= 2.0 {
        return Err(Error::Support(format!(
            "data must be supported in B(0, 2); numerical support radius is {r0:.3}"
        )));
    }
    let fine = Grid::new(
        grid.dim(),
        grid.points_per_axis() * SLICE_REFINEMENT,
        grid.box_length(),
    )?;
    HyperboloidSlice::build(tau, fine, r0)
}

/// The hyperboloidal energy and its flat-slice comparison value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub tau: f64,
    pub energy: f64,
    pub flat_energy: f64,
    /// `int (1/(t tau)) sum_i (L^i phi)^2 dvol_tau`
    pub boost_part: f64,
    /// `int (tau/t) (d_t phi)^2 dvol_tau`
    pub time_part: f64,
    /// `int (t/tau) m^2 phi^2 dvol_tau`
    pub mass_part: f64,
}

impl EnergyReport {
    pub fn relative_gap(&self) -> f64 {
        if self.flat_energy == 0.0 {
            self.energy.abs()
        } else {
            (self.energy - self.flat_energy).abs() / self.flat_energy
        }
    }
}

fn energy_on_slice(
    slice: &HyperboloidSlice,
    sample: &SliceSample,
    mass: f64,
) -> Result<(f64, f64, f64)> {
    let tau = slice.tau;
    let m2 = mass * mass;
    let d = slice.grid.dim();
    let boosts = (0..d)
        .map(|a| boost_field(slice, sample, a))
        .collect::<Result<Vec<_>>>()?;
    let mut boost_part = 0.0;
    let mut time_part = 0.0;
    let mut mass_part = 0.0;
    for (p, v) in sample.values.iter().enumerate() {
        let t = slice.times[p];
        let w = slice.weights[p];
        let l2: f64 = boosts.iter().map(|b| b[p] * b[p]).sum();
        boost_part += w * l2 / (t * tau);
        time_part += w * (tau / t) * v.dphi_dt * v.dphi_dt;
        mass_part += w * (t / tau) * m2 * v.phi * v.phi;
    }
    Ok((boost_part, time_part, mass_part))
}

/// Weighted energy `E_m(phi, tau)` of the solution with the given data.
pub fn energy(data: &CauchyData, tau: f64) -> Result<EnergyReport> {
    let slice = slice_for(data, tau)?;
    energy_with_slice(data, &slice)
}

pub fn energy_with_slice(data: &CauchyData, slice: &HyperboloidSlice) -> Result<EnergyReport> {
    let sample = slice.sample(&Propagator::new(data))?;
    let (boost_part, time_part, mass_part) = energy_on_slice(slice, &sample, data.mass)?;
    Ok(EnergyReport {
        tau: slice.tau,
        energy: boost_part + time_part + mass_part,
        flat_energy: data.flat_energy()?,
        boost_part,
        time_part,
        mass_part,
    })
}

/// All boost words `(i_1, ..., i_k)` with `k <= order`.
pub fn boost_words(dim: usize, order: usize) -> Vec<Vec<usize>> {
    let mut words = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..order {
        let mut next = Vec::new();
        for w in &frontier {
            for a in 0..dim {
                let mut v: Vec<usize> = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    words
}

/// Sides of the global Sobolev inequality on one slice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevCheck {
    pub tau: f64,
    pub ell: f64,
    pub order: usize,
    /// `max tau^(1-l) t^(d+l-1) psi^2`
    pub lhs: f64,
    /// `sum_words int (t/tau)^l |L^w psi|^2 dvol_tau`
    pub rhs: f64,
    pub ratio: f64,
}

fn safe_ratio(lhs: f64, rhs: f64, what: &str) -> Result<f64> {
    if rhs == 0.0 {
        if lhs == 0.0 {
            Ok(0.0)
        } else {
            Err(Error::Invariant(format!(
                "{what}: right-hand side vanished while the left-hand side is {lhs:.3e}"
            )))
        }
    } else {
        Ok(lhs / rhs)
    }
}

/// Evaluates both sides of the global Sobolev inequality for the solution
/// `psi` of `data`, using boosts up to `order` (normally `s_d`).
pub fn global_sobolev_check(
    data: &CauchyData,
    tau: f64,
    ell: f64,
    order: usize,
) -> Result<SobolevCheck> {
    let slice = slice_for(data, tau)?;
    let d = slice.grid.dim() as i32;
    let mut lhs = 0.0f64;
    let mut rhs = 0.0;
    for word in boost_words(slice.grid.dim(), order) {
        let boosted = iterated_boost_data(data, &word)?;
        let psi = slice.sample(&Propagator::new(&boosted))?.phi();
        if word.is_empty() {
            for (v, &t) in psi.iter().zip(&slice.times) {
                let w = tau.powf(1.0 - ell) * t.powf(d as f64 + ell - 1.0);
                lhs = lhs.max(w * v * v);
            }
        }
        let integrand: Vec<f64> = psi
            .iter()
            .zip(&slice.times)
            .map(|(v, &t)| (t / tau).powf(ell) * v * v)
            .collect();
        rhs += slice.integrate(&integrand);
    }
    Ok(SobolevCheck {
        tau,
        ell,
        order,
        lhs,
        rhs,
        ratio: safe_ratio(lhs, rhs, "global Sobolev check")?,
    })
}

/// Sides of the energy-to-sup-norm bound on one slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntoInftyCheck {
    pub tau: f64,
    /// `[m^2 max t^d phi^2, max tau^2 t^(d-2) (d_t phi)^2,
    ///   sum_i max t^(d-2) (L^i phi)^2]`
    pub lhs_terms: [f64; 3],
    /// `sum_{k <= s_d} sum_words E_m(L^w phi, tau)`
    pub rhs_energy_sum: f64,
    pub ratio: f64,
}

pub fn entoinfty_check(data: &CauchyData, tau: f64) -> Result<EntoInftyCheck> {
    let slice = slice_for(data, tau)?;
    let dim = slice.grid.dim();
    let d = dim as i32;
    let m2 = data.mass * data.mass;
    let sample = slice.sample(&Propagator::new(data))?;
    let mut terms = [0.0f64; 3];
    for (p, v) in sample.values.iter().enumerate() {
        let t = slice.times[p];
        terms[0] = terms[0].max(m2 * t.powi(d) * v.phi * v.phi);
        terms[1] = terms[1].max(tau * tau * t.powi(d - 2) * v.dphi_dt * v.dphi_dt);
    }
    for a in 0..dim {
        let l = boost_field(&slice, &sample, a)?;
        let sup = l
            .iter()
            .zip(&slice.times)
            .map(|(v, &t)| t.powi(d - 2) * v * v)
            .fold(0.0, f64::max);
        terms[2] += sup;
    }
    let mut rhs = 0.0;
    for word in boost_words(dim, SobolevOrder::new(dim).get()) {
        let boosted = iterated_boost_data(data, &word)?;
        rhs += energy_with_slice(&boosted, &slice)?.energy;
    }
    let lhs: f64 = terms.iter().sum();
    Ok(EntoInftyCheck {
        tau,
        lhs_terms: terms,
        rhs_energy_sum: rhs,
        ratio: safe_ratio(lhs, rhs, "energy-to-sup check")?,
    })
}

/// Largest `|phi(t, x)|` at grid points with `|x| > t - 2 + r0 + margin`,
/// relative to the global maximum at that time.
pub fn finite_speed_leakage(data: &CauchyData, t: f64, r0: f64, margin: f64) -> Result<f64> {
    let state = Propagator::new(data).evolve(t)?;
    let phi: &Field = &state.phi;
    let grid = phi.grid();
    let limit = t - data.t0 + r0 + margin;
    let mut x = vec![0.0; grid.dim()];
    let mut outside = 0.0f64;
    for (p, v) in phi.values().iter().enumerate() {
        grid.position(p, &mut x);
        if x.iter().map(|c| c * c).sum::<f64>().sqrt() > limit {
            outside = outside.max(v.abs());
        }
    }
    let max = phi.max_abs();
    Ok(if max == 0.0 { 0.0 } else { outside / max })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(1, 1024, 64.0).unwrap()
    }

    #[test]
    fn vertex_sample() {
        let g = grid();
        let s = HyperboloidSlice::build(2.0, g, 1.5).unwrap();
        let i = s.points().iter().position(|x| x[0] == 0.0).unwrap();
        assert_eq!(s.times()[i], 2.0);
        assert_eq!(s.weights()[i], g.spacing());
        let tmin = s.times().iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(tmin, 2.0);
        let j = s.points().iter().position(|x| x[0] == 2.0).unwrap();
        assert!((s.times()[j] - 8f64.sqrt()).abs() < 1e-15);
        assert!((s.weights()[j] / g.spacing() - 2.0 / 8f64.sqrt()).abs() < 1e-15);
        assert!(s.foliation_defect() < 1e-12);
        assert!(s.region_bound_holds());
    }

    #[test]
    fn rejects_bad_slices() {
        let g = grid();
        assert!(HyperboloidSlice::build(0.0, g, 1.0).is_err());
        assert!(HyperboloidSlice::build(-1.0, g, 1.0).is_err());
        assert!(matches!(
            HyperboloidSlice::build(12.0, g, 1.0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            HyperboloidSlice::build(2.0, g, 2.5),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn boost_words_count() {
        assert_eq!(boost_words(1, 1), vec![vec![], vec![0]]);
        assert_eq!(boost_words(2, 2).len(), 1 + 2 + 4);
        assert_eq!(boost_words(3, 2).len(), 1 + 3 + 9);
    }

    #[test]
    fn zero_data_functionals_vanish() {
        let data = CauchyData::zero(grid(), 2.0, 1.0);
        let e = energy(&data, 3.0).unwrap();
        assert_eq!((e.energy, e.flat_energy), (0.0, 0.0));
        let s = global_sobolev_check(&data, 3.0, 0.0, 1).unwrap();
        assert_eq!((s.lhs, s.rhs, s.ratio), (0.0, 0.0, 0.0));
        let c = entoinfty_check(&data, 3.0).unwrap();
        assert_eq!(c.ratio, 0.0);
    }

    #[test]
    fn theorem_mode_data_is_rejected() {
        let data = CauchyData::zero(grid(), 0.0, 1.0);
        assert!(matches!(energy(&data, 3.0), Err(Error::Config(_))));
    }
}
