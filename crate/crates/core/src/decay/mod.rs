//! Decay curves, empirical constants and the checks of the pointwise decay
//! estimates: the localized estimate for data at `t = 2`, and the
//! frequency-restricted dispersive estimates for data at `t = 0`.
//!
//! An empirical constant is the largest value over the time grid of
//! `weighted sup-norm / data norm`. Sup-norms are taken over the grid and
//! refined by direct Fourier evaluation on a 4x finer stencil around the
//! grid maximizer.

mod emit;
mod fit;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use emit::{write_curve_csv, write_curve_svg, write_json};
pub use fit::{fit_exponent, fit_power_law, linear_fit, ExponentFit, MIN_FIT_POINTS};

use crate::error::{Error, Result};
use crate::lp::LPBank;
use crate::propagator::{CauchyData, Propagator};
use crate::spectral::{l1_norm, sobolev_h, Field};

/// Data norms below this make an inequality vacuous; such runs are
/// reported as skipped.
pub const DEGENERATE_NORM: f64 = 1e-12;

/// Default fit window: `[8, 64]` for d = 1, `[8, 32]` for d = 2, `[4, 16]` above.
pub fn default_fit_window(dim: usize) -> (f64, f64) {
    match dim {
        1 => (8.0, 64.0),
        2 => (8.0, 32.0),
        _ => (4.0, 16.0),
    }
}

/// `count` geometrically spaced times from `start` to `stop` inclusive.
pub fn geometric_times(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    let ratio = (stop / start).ln() / (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i + 1 == count {
                stop
            } else {
                start * (ratio * i as f64).exp()
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InequalityId {
    Prop2,
    Lowfreq,
    Highfreq,
    Wavedecay,
    Interpolation { s: f64 },
}

/// Which derivative of the solution a curve measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    Phi,
    DtPhi,
    GradPhi,
    /// `sqrt((d_t phi)^2 + |grad phi|^2)`
    SpacetimeGradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SupSampling {
    GridOnly,
    Refined,
}

/// Sup-norms of the solution and its derivatives at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupSample {
    pub t: f64,
    pub phi: f64,
    pub dt_phi: f64,
    pub grad_phi: f64,
    pub spacetime_gradient: f64,
}

impl SupSample {
    pub fn get(&self, term: Term) -> f64 {
        match term {
            Term::Phi => self.phi,
            Term::DtPhi => self.dt_phi,
            Term::GradPhi => self.grad_phi,
            Term::SpacetimeGradient => self.spacetime_gradient,
        }
    }
}

fn validate_times(times: &[f64], t0: f64) -> Result<()> {
    if times.is_empty() {
        return Err(Error::Contract("time grid is empty".into()));
    }
    if times.iter().any(|t| !t.is_finite() || *t < t0) {
        return Err(Error::Contract(format!(
            "time grid must be finite and start at or after t0 = {t0}"
        )));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Contract(
            "time grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Sup-norms at each time of the grid.
pub fn sup_series(
    prop: &Propagator,
    times: &[f64],
    sampling: SupSampling,
) -> Result<Vec<SupSample>> {
    times
        .par_iter()
        .map(|&t| sup_at(prop, t, sampling))
        .collect()
}

fn sup_at(prop: &Propagator, t: f64, sampling: SupSampling) -> Result<SupSample> {
    let state = prop.evolve(t)?;
    let grid = *prop.grid();
    let grad_norm = {
        let values = (0..grid.len())
            .map(|p| {
                state
                    .grad_phi
                    .iter()
                    .map(|d| d.values()[p].powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        Field::new(grid, values)?
    };
    let st = state.spacetime_gradient_norm();
    let fields = [&state.phi, &state.dphi_dt, &grad_norm, &st];
    let mut sup = [0.0f64; 4];
    for (s, f) in sup.iter_mut().zip(fields) {
        *s = f.max_abs();
    }
    if sampling == SupSampling::Refined {
        let h = grid.spacing();
        let d = grid.dim();
        let mut points: Vec<(f64, Vec<f64>)> = Vec::new();
        let mut centre = vec![0.0; d];
        for f in fields {
            if f.max_abs() == 0.0 {
                continue;
            }
            grid.position(f.argmax_abs(), &mut centre);
            let stencil = 9usize.pow(d as u32);
            for code in 0..stencil {
                let mut c = code;
                let x: Vec<f64> = centre
                    .iter()
                    .map(|&ce| {
                        let o = (c % 9) as f64 - 4.0;
                        c /= 9;
                        ce + o * h / 4.0
                    })
                    .collect();
                points.push((t, x));
            }
        }
        for v in prop.evaluate_at_points(&points)? {
            let g = v.grad_phi.iter().map(|x| x * x).sum::<f64>().sqrt();
            sup[0] = sup[0].max(v.phi.abs());
            sup[1] = sup[1].max(v.dphi_dt.abs());
            sup[2] = sup[2].max(g);
            sup[3] = sup[3].max(v.spacetime_gradient_norm());
        }
    }
    Ok(SupSample {
        t,
        phi: sup[0],
        dt_phi: sup[1],
        grad_phi: sup[2],
        spacetime_gradient: sup[3],
    })
}

/// Time series of a weighted sup-norm and the data norm it is compared to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayCurve {
    pub times: Vec<f64>,
    pub weighted_sup: Vec<f64>,
    pub raw_sup: Vec<f64>,
    /// Right-hand side of the estimate (data norms with their prefactors).
    pub data_norm: f64,
}

impl DecayCurve {
    fn new(
        samples: &[SupSample],
        term: Term,
        prefactor: f64,
        weight: impl Fn(f64) -> f64,
        data_norm: f64,
    ) -> Self {
        let raw: Vec<f64> = samples.iter().map(|s| prefactor * s.get(term)).collect();
        Self {
            times: samples.iter().map(|s| s.t).collect(),
            weighted_sup: samples
                .iter()
                .zip(&raw)
                .map(|(s, r)| weight(s.t) * r)
                .collect(),
            raw_sup: raw,
            data_norm,
        }
    }

    /// `max_t weighted_sup / data_norm` (0 for a vanishing norm).
    pub fn empirical_constant(&self) -> f64 {
        if self.data_norm == 0.0 {
            return 0.0;
        }
        self.weighted_sup.iter().fold(0.0f64, |m, v| m.max(*v)) / self.data_norm
    }

    pub fn is_well_formed(&self) -> bool {
        self.times.windows(2).all(|w| w[1] > w[0])
            && self
                .weighted_sup
                .iter()
                .chain(&self.raw_sup)
                .all(|v| v.is_finite() && *v >= 0.0)
    }
}

/// Outcome of checking one inequality term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub inequality: InequalityId,
    pub term: Term,
    pub band: Option<i32>,
    pub mass: f64,
    pub dim: usize,
    pub t0: f64,
    /// Log-log slope of the raw sup-norm over the fit window.
    pub fitted_exponent: Option<f64>,
    pub fit: Option<ExponentFit>,
    /// `max_t weighted_sup / rhs`, with the estimate's frequency prefactors
    /// divided out.
    pub empirical_constant: f64,
    /// Same ratio against the bare data norm, without frequency prefactors.
    pub raw_constant: f64,
    pub f_norm: f64,
    pub g_norm: f64,
    pub skipped: bool,
    pub note: Option<String>,
    pub curve: DecayCurve,
}

impl DecayReport {
    #[allow(clippy::too_many_arguments)]
    fn build(
        inequality: InequalityId,
        term: Term,
        band: Option<i32>,
        data: &CauchyData,
        norms: (f64, f64),
        curve: DecayCurve,
        raw_norm: f64,
        window: (f64, f64),
    ) -> Self {
        let dim = data.grid().dim();
        let mut note = None;
        let mut skipped = false;
        if norms.0 + norms.1 < DEGENERATE_NORM {
            skipped = true;
            note = Some("data norm below degeneracy threshold; estimate is vacuous".into());
        }
        let fit = if skipped {
            None
        } else {
            match fit_exponent(&curve, window) {
                Ok(f) => Some(f),
                Err(e) => {
                    note = Some(format!("no exponent fit: {e}"));
                    None
                }
            }
        };
        let raw_constant = if raw_norm == 0.0 || skipped {
            0.0
        } else {
            curve.weighted_sup.iter().fold(0.0f64, |m, v| m.max(*v)) / raw_norm
        };
        Self {
            inequality,
            term,
            band,
            mass: data.mass,
            dim,
            t0: data.t0,
            fitted_exponent: fit.map(|f| f.slope),
            fit,
            empirical_constant: if skipped {
                0.0
            } else {
                curve.empirical_constant()
            },
            raw_constant,
            f_norm: norms.0,
            g_norm: norms.1,
            skipped,
            note,
            curve,
        }
    }

    fn mark_vacuous(mut self, why: &str) -> Self {
        self.skipped = true;
        self.note = Some(why.to_string());
        self
    }
}

/// Relative L1 mass of `f` and `g` outside `B(0, 1)`.
fn mass_outside_unit_ball(data: &CauchyData) -> f64 {
    let grid = data.grid();
    let mut x = vec![0.0; grid.dim()];
    let (mut inside, mut outside) = (0.0, 0.0);
    for field in [&data.f, &data.g] {
        for (p, v) in field.values().iter().enumerate() {
            grid.position(p, &mut x);
            if x.iter().map(|c| c * c).sum::<f64>() < 1.0 {
                inside += v.abs();
            } else {
                outside += v.abs();
            }
        }
    }
    if inside + outside == 0.0 {
        0.0
    } else {
        outside / (inside + outside)
    }
}

/// Localized decay estimate for data in `B(0, 1)` at `t = 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop2Report {
    pub mass: f64,
    pub dim: usize,
    /// `||f||^2_{H^{floor(d/2)+2}} + ||g||^2_{H^{floor(d/2)+1}}`
    pub sobolev_rhs: f64,
    /// `max_t (m^2 t^d |phi|^2 + t^(d-1) |d_t phi|^2 + t^(d-1) |grad phi|^2) / rhs`
    pub combined_constant: f64,
    /// `m t^(d/2) |phi|`, `t^((d-1)/2) |d_t phi|`, `t^((d-1)/2) |grad phi|`
    /// against `sqrt(rhs)`.
    pub terms: Vec<DecayReport>,
}

pub fn prop2_decay_check(
    data: &CauchyData,
    times: &[f64],
    window: (f64, f64),
) -> Result<Prop2Report> {
    if data.t0 != 2.0 {
        return Err(Error::Config(format!(
            "the localized estimate uses data at t = 2, got t0 = {}",
            data.t0
        )));
    }
    let outside = mass_outside_unit_ball(data);
    if outside > 1e-8 {
        return Err(Error::Support(format!(
            "data carries relative L1 mass {outside:.3e} outside B(0, 1)"
        )));
    }
    validate_times(times, data.t0)?;
    let dim = data.grid().dim();
    let d = dim as f64;
    let s = (dim / 2) as f64;
    let rhs = sobolev_h(&data.f, s + 2.0)?.powi(2) + sobolev_h(&data.g, s + 1.0)?.powi(2);
    let samples = sup_series(&Propagator::new(data), times, SupSampling::Refined)?;
    let m = data.mass;
    let combined = samples
        .iter()
        .map(|x| {
            m * m * x.t.powf(d) * x.phi * x.phi
                + x.t.powf(d - 1.0) * (x.dt_phi * x.dt_phi + x.grad_phi * x.grad_phi)
        })
        .fold(0.0f64, f64::max);
    let root = rhs.sqrt();
    let norms = (l1_norm(&data.f), l1_norm(&data.g));
    let half = |p: f64| move |t: f64| t.powf(p);
    let terms = vec![
        DecayReport::build(
            InequalityId::Prop2,
            Term::Phi,
            None,
            data,
            norms,
            DecayCurve::new(&samples, Term::Phi, m, half(d / 2.0), root),
            root,
            window,
        ),
        DecayReport::build(
            InequalityId::Prop2,
            Term::DtPhi,
            None,
            data,
            norms,
            DecayCurve::new(&samples, Term::DtPhi, 1.0, half((d - 1.0) / 2.0), root),
            root,
            window,
        ),
        DecayReport::build(
            InequalityId::Prop2,
            Term::GradPhi,
            None,
            data,
            norms,
            DecayCurve::new(&samples, Term::GradPhi, 1.0, half((d - 1.0) / 2.0), root),
            root,
            window,
        ),
    ];
    Ok(Prop2Report {
        mass: m,
        dim,
        sobolev_rhs: rhs,
        combined_constant: if rhs == 0.0 { 0.0 } else { combined / rhs },
        terms,
    })
}

/// Reports for the `phi` and `d phi` parts of one frequency-restricted
/// estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub phi: DecayReport,
    pub dphi: DecayReport,
}

fn theorem_data(f: &Field, g: &Field, mass: f64) -> Result<CauchyData> {
    CauchyData::new(f.clone(), g.clone(), 0.0, mass)
}

/// Low-frequency estimate with data at `t = 0`:
/// `m0 (1+t)^(d/2) |P_{-1} phi|` and `(1+t)^((d-1)/2) |d P_{-1} phi|`
/// against `||P_{-1} f||_1 + ||P_{-1} g||_1`.
pub fn lowfreq_check(
    f: &Field,
    g: &Field,
    m0: f64,
    times: &[f64],
    window: (f64, f64),
) -> Result<PairReport> {
    let data = theorem_data(f, g, m0)?;
    validate_times(times, 0.0)?;
    let bank = LPBank::new(*f.grid());
    let low = data.projected(&bank, -1)?;
    let norms = (l1_norm(&low.f), l1_norm(&low.g));
    let rhs = norms.0 + norms.1;
    let samples = sup_series(&Propagator::new(&low), times, SupSampling::Refined)?;
    let d = f.grid().dim() as f64;
    let phi = DecayReport::build(
        InequalityId::Lowfreq,
        Term::Phi,
        Some(-1),
        &low,
        norms,
        DecayCurve::new(&samples, Term::Phi, m0, |t| (1.0 + t).powf(d / 2.0), rhs),
        rhs,
        window,
    );
    let phi = if m0 == 0.0 && !phi.skipped {
        phi.mark_vacuous("m0 = 0: the mass-weighted estimate is vacuous")
    } else {
        phi
    };
    let dphi = DecayReport::build(
        InequalityId::Lowfreq,
        Term::SpacetimeGradient,
        Some(-1),
        &low,
        norms,
        DecayCurve::new(
            &samples,
            Term::SpacetimeGradient,
            1.0,
            |t| (1.0 + t).powf((d - 1.0) / 2.0),
            rhs,
        ),
        rhs,
        window,
    );
    Ok(PairReport { phi, dphi })
}

/// Band-`k` solution sampled over a time grid, shared by the high-frequency,
/// wave-decay and interpolation estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSeries {
    pub band: i32,
    pub data: CauchyData,
    pub f_norm: f64,
    pub g_norm: f64,
    pub samples: Vec<SupSample>,
}

impl BandSeries {
    /// Projects theorem-mode data (`t0 = 0`) to band `k >= 0` and samples
    /// the evolution.
    pub fn new(f: &Field, g: &Field, m0: f64, k: i32, times: &[f64]) -> Result<Self> {
        Self::with_sampling(f, g, m0, k, times, SupSampling::Refined)
    }

    pub fn with_sampling(
        f: &Field,
        g: &Field,
        m0: f64,
        k: i32,
        times: &[f64],
        sampling: SupSampling,
    ) -> Result<Self> {
        let bank = LPBank::new(*f.grid());
        if k < 0 || k > bank.k_max() {
            return Err(Error::BandOutOfRange {
                band: k,
                k_max: bank.k_max(),
            });
        }
        if !bank.is_resolved(k) {
            return Err(Error::Config(format!(
                "band {k} reaches |xi| = {} above the grid Nyquist frequency {:.3}",
                2f64.powi(k + 1),
                f.grid().nyquist()
            )));
        }
        validate_times(times, 0.0)?;
        if times[0] <= 0.0 {
            return Err(Error::Contract(
                "high-frequency estimates are weighted by powers of t; use t > 0".into(),
            ));
        }
        let data = theorem_data(f, g, m0)?.projected(&bank, k)?;
        let samples = sup_series(&Propagator::new(&data), times, sampling)?;
        Ok(Self {
            band: k,
            f_norm: l1_norm(&data.f),
            g_norm: l1_norm(&data.g),
            data,
            samples,
        })
    }

    fn dim(&self) -> f64 {
        self.data.grid().dim() as f64
    }

    fn norms(&self) -> (f64, f64) {
        (self.f_norm, self.g_norm)
    }

    /// `m0 t^(d/2) |P_k phi|` against
    /// `2^(kd/2) (2^k ||P_k f||_1 + ||P_k g||_1)`.
    pub fn highfreq_report(&self, window: (f64, f64)) -> DecayReport {
        let d = self.dim();
        let k = self.band as f64;
        let rhs = 2f64.powf(k * d / 2.0) * (2f64.powf(k) * self.f_norm + self.g_norm);
        let curve = DecayCurve::new(
            &self.samples,
            Term::Phi,
            self.data.mass,
            |t| t.powf(d / 2.0),
            rhs,
        );
        let r = DecayReport::build(
            InequalityId::Highfreq,
            Term::Phi,
            Some(self.band),
            &self.data,
            self.norms(),
            curve,
            self.f_norm + self.g_norm,
            window,
        );
        if self.data.mass == 0.0 && !r.skipped {
            r.mark_vacuous("m0 = 0: the mass-weighted estimate is vacuous")
        } else {
            r
        }
    }

    /// `t^((d-1)/2) |d P_k phi|` against
    /// `2^(k(d-1)/2) (2^(2k) ||P_k f||_1 + 2^k ||P_k g||_1)`.
    pub fn wavedecay_report(&self, window: (f64, f64)) -> DecayReport {
        let d = self.dim();
        let k = self.band as f64;
        let rhs = 2f64.powf(k * (d - 1.0) / 2.0)
            * (2f64.powf(2.0 * k) * self.f_norm + 2f64.powf(k) * self.g_norm);
        let curve = DecayCurve::new(
            &self.samples,
            Term::SpacetimeGradient,
            1.0,
            |t| t.powf((d - 1.0) / 2.0),
            rhs,
        );
        DecayReport::build(
            InequalityId::Wavedecay,
            Term::SpacetimeGradient,
            Some(self.band),
            &self.data,
            self.norms(),
            curve,
            self.f_norm + self.g_norm,
            window,
        )
    }

    /// `t^s |P_k phi|` against `2^(ks) (2^k ||P_k f||_1 + ||P_k g||_1)` for
    /// `s` in `[(d-1)/2, d/2]`.
    pub fn interpolation_report(&self, s: f64, window: (f64, f64)) -> Result<DecayReport> {
        let d = self.dim();
        let (lo, hi) = ((d - 1.0) / 2.0, d / 2.0);
        if !(s >= lo - 1e-15 && s <= hi + 1e-15) {
            return Err(Error::Contract(format!(
                "interpolation exponent s = {s} outside [{lo}, {hi}]"
            )));
        }
        let k = self.band as f64;
        let rhs = 2f64.powf(k * s) * (2f64.powf(k) * self.f_norm + self.g_norm);
        let curve = DecayCurve::new(&self.samples, Term::Phi, 1.0, |t| t.powf(s), rhs);
        Ok(DecayReport::build(
            InequalityId::Interpolation { s },
            Term::Phi,
            Some(self.band),
            &self.data,
            self.norms(),
            curve,
            self.f_norm + self.g_norm,
            window,
        ))
    }
}

/// High-frequency (`phi`) and wave-decay (`d phi`) estimates for band `k`.
pub fn highfreq_check(
    f: &Field,
    g: &Field,
    m0: f64,
    k: i32,
    times: &[f64],
    window: (f64, f64),
) -> Result<PairReport> {
    let series = BandSeries::new(f, g, m0, k, times)?;
    Ok(PairReport {
        phi: series.highfreq_report(window),
        dphi: series.wavedecay_report(window),
    })
}

pub fn interpolation_check(
    f: &Field,
    g: &Field,
    m0: f64,
    k: i32,
    s: f64,
    times: &[f64],
    window: (f64, f64),
) -> Result<DecayReport> {
    BandSeries::new(f, g, m0, k, times)?.interpolation_report(s, window)
}

/// Slope of `log2(constant)` against band index.
pub fn band_scaling_slope(bands: &[i32], constants: &[f64]) -> Result<f64> {
    if bands.len() < 2 || bands.len() != constants.len() {
        return Err(Error::Contract(
            "need at least two bands with constants".into(),
        ));
    }
    if let Some(c) = constants.iter().find(|c| !(**c > 0.0)) {
        return Err(Error::NonPositive {
            t: f64::NAN,
            value: *c,
        });
    }
    let xs: Vec<f64> = bands.iter().map(|&k| k as f64).collect();
    let ys: Vec<f64> = constants.iter().map(|c| c.log2()).collect();
    Ok(linear_fit(&xs, &ys).0)
}

/// Largest ratio between entries of a positive family.
pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}
