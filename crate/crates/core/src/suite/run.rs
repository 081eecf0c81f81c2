//! The individual suites. Each returns a [`SuiteReport`]; nothing here
//! touches the file system.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{RunConfig, SuiteKind, LOWFREQ_MAX_SHIFT, LOWFREQ_RADII, SLICE_DATA_RADIUS};
use super::report::{Check, SuiteReport};
use crate::decay::{
    band_scaling_slope, default_fit_window, lowfreq_check, prop2_decay_check, spread, BandSeries,
    DecayReport,
};
use crate::error::Result;
use crate::hyperboloid::{energy, entoinfty_check, global_sobolev_check};
use crate::lp::{LPBank, SpatialPartition};
use crate::profile::{random_bump, velocity_from, Bump};
use crate::propagator::CauchyData;
use crate::spectral::{Field, Grid, SobolevOrder};

/// Relative tolerance of the equality case of the energy identity.
pub const ENERGY_EQUALITY_TOL: f64 = 1e-4;
/// Allowed variation of slice ratios across the `tau` sweep.
pub const TAU_SPREAD: f64 = 4.0;
/// Allowed distance of a fitted exponent from `-d/2`.
pub const EXPONENT_TOL: f64 = 0.1;
/// Allowed spread of low-frequency constants across random data.
pub const LOWFREQ_SPREAD: f64 = 3.0;
/// Allowed distance of a band-scaling slope from its predicted value.
pub const SLOPE_TOL: f64 = 0.3;
/// Allowed spread of normalized band constants across `k`.
pub const BAND_UNIFORMITY: f64 = 8.0;
/// Allowed spread of wave-decay constants across the mass sweep.
pub const MASS_SPREAD: f64 = 2.0;
/// Interpolation endpoints must match their parent estimates within this
/// factor.
pub const ENDPOINT_FACTOR: f64 = 2.0;
pub const COMPLETENESS_TOL: f64 = 1e-10;
pub const PARTITION_SUM_TOL: f64 = 1e-12;
const PARTITION_POINTS: usize = 1000;
const PARTITION_TRANSLATES: usize = 20;
const PARTITION_BUMP_RADIUS: f64 = 5.0;

pub fn run_one(cfg: &RunConfig, kind: SuiteKind) -> Result<SuiteReport> {
    match kind {
        SuiteKind::Energy => energy_suite(cfg),
        SuiteKind::Sobolev => sobolev_suite(cfg),
        SuiteKind::Entoinfty => entoinfty_suite(cfg),
        SuiteKind::Prop2 => prop2_suite(cfg),
        SuiteKind::Lowfreq => lowfreq_suite(cfg),
        SuiteKind::Highfreq => highfreq_suite(cfg),
        SuiteKind::Interpolation => interpolation_suite(cfg),
        SuiteKind::Lp => lp_suite(cfg),
        SuiteKind::Partition => partition_suite(cfg),
        SuiteKind::All => unreachable!("`all` is expanded before dispatch"),
    }
}

/// Bump in `B(0, 1)` with the configured velocity, prescribed at `t = 2`.
pub fn slice_data(cfg: &RunConfig) -> Result<CauchyData> {
    let grid = cfg.grid()?;
    let bump = Bump::centered(cfg.dim, SLICE_DATA_RADIUS);
    let f = bump.sample(grid)?;
    let g = velocity_from(&bump, cfg.velocity, grid)?;
    CauchyData::new(f, g, 2.0, cfg.mass)
}

fn tau_label(tau: f64) -> String {
    format!("tau={tau}")
}

fn energy_suite(cfg: &RunConfig) -> Result<SuiteReport> {
    let data = slice_data(cfg)?;
    let mut rep = SuiteReport::new(SuiteKind::Energy);
    let reports = cfg
        .taus
        .iter()
        .map(|&tau| energy(&data, tau))
        .collect::<Result<Vec<_>>>()?;
    if let Some(first) = reports.first() {
        rep.constant("flat_energy", first.flat_energy);
    }
    for r in &reports {
        let t = tau_label(r.tau);
        rep.constant(format!("energy[{t}]"), r.energy);
        rep.check(Check::at_most(
            format!("equality[{t}]"),
            r.relative_gap(),
            ENERGY_EQUALITY_TOL,
        ));
        rep.check(Check::at_least(
            format!("components_nonnegative[{t}]"),
            r.boost_part.min(r.time_part).min(r.mass_part),
            0.0,
        ));
    }
    Ok(rep)
}

fn sobolev_suite(cfg: &RunConfig) -> Result<SuiteReport> {
    let data = slice_data(cfg)?;
    let order = SobolevOrder::new(cfg.dim).get();
    let mut rep = SuiteReport::new(SuiteKind::Sobolev);
    for ell in [0.0, 1.0] {
        let checks = cfg
            .taus
            .iter()
            .map(|&tau| global_sobolev_check(&data, tau, ell, order))
            .collect::<Result<Vec<_>>>()?;
        let ratios: Vec<f64> = checks.iter().map(|c| c.ratio).collect();
        for c in &checks {
            let t = tau_label(c.tau);
            rep.constant(format!("lhs[ell={ell},{t}]"), c.lhs);
            rep.constant(format!("rhs[ell={ell},{t}]"), c.rhs);
            rep.constant(format!("ratio[ell={ell},{t}]"), c.ratio);
            rep.check(Check::finite(
                format!("ratio_finite[ell={ell},{t}]"),
                c.ratio,
            ));
        }
        rep.constant(
            format!("max_ratio[ell={ell}]"),
            ratios.iter().fold(0.0, |a, b| a.max(*b)),
        );
        rep.check(Check::below(
            format!("tau_spread[ell={ell}]"),
            spread(&ratios),
            TAU_SPREAD,
        ));
    }
    Ok(rep)
}

fn entoinfty_suite(cfg: &RunConfig) -> Result<SuiteReport> {
    let data = slice_data(cfg)?;
    let mut rep = SuiteReport::new(SuiteKind::Entoinfty);
    let checks = cfg
        .taus
        .iter()
        .map(|&tau| entoinfty_check(&data, tau))
        .collect::<Result<Vec<_>>>()?;
    for c in &checks {
        let t = tau_label(c.tau);
        rep.constant(format!("rhs_energy_sum[{t}]"), c.rhs_energy_sum);
        rep.constant(format!("ratio[{t}]"), c.ratio);
        rep.check(Check::finite(format!("ratio_finite[{t}]"), c.ratio));
        if cfg.mass == 0.0 {
            rep.check(Check::at_most(
                format!("mass_term_vanishes[{t}]"),
                c.lhs_terms[0],
                0.0,
            ));
        }
    }
    let ratios: Vec<f64> = checks.iter().map(|c| c.ratio).collect();
    rep.check(Check::below("tau_spread", spread(&ratios), TAU_SPREAD));
    Ok(rep)
}

fn record_decay(rep: &mut SuiteReport, label: &str, r: &DecayReport) {
    rep.constant(format!("constant[{label}]"), r.empirical_constant);
    if let Some(e) = r.fitted_exponent {
        rep.constant(format!("exponent[{label}]"), e);
    }
}

fn exponent_check(name: &str, r: &DecayReport, target: f64) -> Check {
    if r.skipped {
        return Check::skipped(name, r.note.clone().unwrap_or_default());
    }
    match r.fitted_exponent {
        Some(e) => Check::near(name, e, target, EXPONENT_TOL),
        None => Check::near(name, f64::NAN, target, EXPONENT_TOL)
            .with_note(r.note.clone().unwrap_or_else(|| "no fit".into())),
    }
}

fn prop2_suite(cfg: &RunConfig) -> Result<SuiteReport> {
    let data = slice_data(cfg)?;
    let times: Vec<f64> = cfg
        .times
        .resolve()
        .into_iter()
        .filter(|t| *t >= 2.0)
        .collect();
    let window = default_fit_window(cfg.dim);
    let r = prop2_decay_check(&data, &times, window)?;
    let mut rep = SuiteReport::new(SuiteKind::Prop2);
    rep.constant("sobolev_rhs", r.sobolev_rhs);
    rep.constant("combined_constant", r.combined_constant);
    rep.check(Check::finite(
        "combined_constant_finite",
        r.combined_constant,
    ));
    for term in &r.terms {
        let label = format!("{:?}", term.term).to_lowercase();
        record_decay(&mut rep, &label, term);
        rep.check(Check::finite(
            format!("constant_finite[{label}]"),
            term.empirical_constant,
        ));
        rep.curve(
            format!("prop2_{label}"),
            format!("localized decay, {label}"),
            term.curve.clone(),
        );
    }
    let phi = &r.terms[0];
    let target = -(cfg.dim as f64) / 2.0;
    if cfg.mass == 0.0 {
        rep.check(Check::skipped(
            "exponent[phi]",
            "m = 0: the phi term is vacuous",
        ));
    } else {
        rep.check(exponent_check("exponent[phi]", phi, target));
    }
    Ok(rep)
}

/// The randomized bump family of the low-frequency suite, drawn in order
/// from the configured seed.
pub fn lowfreq_family(cfg: &RunConfig) -> Vec<Bump> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.samples)
        .map(|_| {
            random_bump(
                &mut rng,
                cfg.dim,
                LOWFREQ_MAX_SHIFT,
                LOWFREQ_RADII.0,
                LOWFREQ_RADII.1,
            )
        })
        .collect()
}

fn lowfreq_suite(cfg: &RunConfig) -> Result<SuiteReport> {
    let grid = cfg.grid()?;
    let times = cfg.times.resolve();
    let window = default_fit_window(cfg.dim);
    let m0 = cfg.mass;
    let mut rep = SuiteReport::new(SuiteKind::Lowfreq);

    let bump = Bump::centered(cfg.dim, SLICE_DATA_RADIUS);
    let f = bump.sample(grid)?;
    let g = velocity_from(&bump, cfg.velocity, grid)?;
    let base = lowfreq_check(&f, &g, m0, &times, window)?;
    record_decay(&mut rep, "centered,phi", &base.phi);
    record_decay(&mut rep, "centered,dphi", &base.dphi);
    rep.check(exponent_check(
        "exponent[phi]",
        &base.phi,
        -(cfg.dim as f64) / 2.0,
    ));
    rep.curve(
        "lowfreq_centered_phi",
        "low frequency, phi",
        base.phi.curve.clone(),
    );
    rep.curve(
        "lowfreq_centered_dphi",
        "low frequency, d phi",
        base.dphi.curve.clone(),
    );

    let family = lowfreq_family(cfg);
    let reports = family
        .par_iter()
        .map(|b| {
            let f = b.sample(grid)?;
            let g = velocity_from(b, cfg.velocity, grid)?;
            lowfreq_check(&f, &g, m0, &times, window)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut phi = Vec::new();
    let mut dphi = Vec::new();
    for (i, r) in reports.iter().enumerate() {
        record_decay(&mut rep, &format!("sample{i},phi"), &r.phi);
        record_decay(&mut rep, &format!("sample{i},dphi"), &r.dphi);
        rep.check(Check::finite(
            format!("constant_finite[sample{i},dphi]"),
            r.dphi.empirical_constant,
        ));
        if !r.phi.skipped {
            rep.check(Check::finite(
                format!("constant_finite[sample{i},phi]"),
                r.phi.empirical_constant,
            ));
            phi.push(r.phi.empirical_constant);
        }
        if !r.dphi.skipped {
            dphi.push(r.dphi.empirical_constant);
        }
    }
    if phi.is_empty() {
        rep.check(Check::skipped(
            "sample_spread[phi]",
            "no non-vacuous phi estimate",
        ));
    } else {
        rep.check(Check::below(
            "sample_spread[phi]",
            spread(&phi),
            LOWFREQ_SPREAD,
        ));
    }
    if !dphi.is_empty() {
        rep.check(Check::below(
            "sample_spread[dphi]",
            spread(&dphi),
            LOWFREQ_SPREAD,
        ));
    }
    Ok(rep)
}

/// Position bump of the band suites and the grid and times it lives on.
pub fn band_data(cfg: &RunConfig) -> Result<(Field, Vec<f64>)> {
    let (grid, times) = cfg.band_setup()?;
    let f = Bump::centered(cfg.dim, cfg.band_radius()).sample(grid)?;
    Ok((f, times))
}

fn band_series(
    f: &Field,
    g: &Field,
    m0: f64,
    bands: &[i32],
    times: &[f64],
) -> Result<Vec<BandSeries>> {
    bands
        .iter()
        .map(|&k| BandSeries::new(f, g, m0, k, times))
        .collect()
}

fn slope_check(name: &str, bands: &[i32], constants: &[f64], target: f64) -> Check {
    if bands.len() < 2 {
        return Check::skipped(name, "needs at least two bands");
    }
    match band_scaling_slope(bands, constants) {
        Ok(s) => Check::near(name, s, target, SLOPE_TOL),
        Err(e) => Check::near(name, f64::NAN, target, SLOPE_TOL).with_note(e.to_string()),
    }
}

fn highfreq_suite(cfg: &RunConfig) -> Result<SuiteReport> {
    let (f, times) = band_data(cfg)?;
    let zero = Field::zeros(*f.grid());
    let d = cfg.dim as f64;
    let m0 = cfg.mass;
    let window = default_fit_window(cfg.dim);
    let bands = &cfg.bands;
    let mut rep = SuiteReport::new(SuiteKind::Highfreq);
    rep.constant("bump_radius", cfg.band_radius());

    let f_branch = band_series(&f, &zero, m0, bands, &times)?;
    let g_branch = band_series(&zero, &f, m0, bands, &times)?;
    let mut phi_raw = Vec::new();
    let mut phi_g_raw = Vec::new();
    let mut dphi_raw = Vec::new();
    let mut phi_norm = Vec::new();
    let mut dphi_norm = Vec::new();
    for ((&k, sf), sg) in bands.iter().zip(&f_branch).zip(&g_branch) {
        let hf = sf.highfreq_report(window);
        let wd = sf.wavedecay_report(window);
        let hg = sg.highfreq_report(window);
        rep.constant(format!("raw_constant[k={k},phi,g=0]"), hf.raw_constant);
        rep.constant(format!("raw_constant[k={k},phi,f=0]"), hg.raw_constant);
        rep.constant(format!("raw_constant[k={k},dphi,g=0]"), wd.raw_constant);
        rep.constant(format!("constant[k={k},phi,g=0]"), hf.empirical_constant);
        rep.constant(format!("constant[k={k},dphi,g=0]"), wd.empirical_constant);
        rep.curve(
            format!("highfreq_k{k}_phi"),
            format!("band {k}, phi"),
            hf.curve.clone(),
        );
        rep.curve(
            format!("highfreq_k{k}_dphi"),
            format!("band {k}, d phi"),
            wd.curve.clone(),
        );
        phi_raw.push(hf.raw_constant);
        phi_g_raw.push(hg.raw_constant);
        dphi_raw.push(wd.raw_constant);
        if !hf.skipped {
            phi_norm.push(hf.empirical_constant);
        }
        dphi_norm.push(wd.empirical_constant);
    }

    if m0 == 0.0 {
        rep.check(Check::skipped(
            "band_slope[phi,g=0]",
            "m0 = 0: the phi estimate is vacuous",
        ));
        rep.check(Check::skipped(
            "band_slope[phi,f=0]",
            "m0 = 0: the phi estimate is vacuous",
        ));
    } else {
        rep.check(slope_check(
            "band_slope[phi,g=0]",
            bands,
            &phi_raw,
            d / 2.0 + 1.0,
        ));
        rep.check(slope_check(
            "band_slope[phi,f=0]",
            bands,
            &phi_g_raw,
            d / 2.0,
        ));
    }
    rep.check(slope_check(
        "band_slope[dphi,g=0]",
        bands,
        &dphi_raw,
        (d - 1.0) / 2.0 + 2.0,
    ));
    if !phi_norm.is_empty() {
        rep.check(Check::below(
            "band_uniformity[phi]",
            spread(&phi_norm),
            BAND_UNIFORMITY,
        ));
    }
    rep.check(Check::below(
        "band_uniformity[dphi]",
        spread(&dphi_norm),
        BAND_UNIFORMITY,
    ));

    if cfg.mass_sweep.len() < 2 {
        rep.check(Check::skipped(
            "mass_spread",
            "mass sweep has fewer than two masses",
        ));
        return Ok(rep);
    }
    for (i, &k) in bands.iter().enumerate() {
        let mut consts = Vec::new();
        for &m in &cfg.mass_sweep {
            let c = if m == m0 {
                f_branch[i].wavedecay_report(window).empirical_constant
            } else {
                BandSeries::new(&f, &zero, m, k, &times)?
                    .wavedecay_report(window)
                    .empirical_constant
            };
            rep.constant(format!("constant[k={k},dphi,m0={m}]"), c);
            consts.push(c);
        }
        rep.check(Check::below(
            format!("mass_spread[k={k}]"),
            spread(&consts),
            MASS_SPREAD,
        ));
    }
    Ok(rep)
}

/// Five evenly spaced exponents in `[(d-1)/2, d/2]`.
pub fn interpolation_exponents(dim: usize) -> Vec<f64> {
    let lo = (dim as f64 - 1.0) / 2.0;
    (0..5).map(|i| lo + 0.5 * i as f64 / 4.0).collect()
}

fn interpolation_suite(cfg: &RunConfig) -> Result<SuiteReport> {
    let (f, times) = band_data(cfg)?;
    let zero = Field::zeros(*f.grid());
    let m0 = cfg.mass;
    let window = default_fit_window(cfg.dim);
    let exps = interpolation_exponents(cfg.dim);
    let mut rep = SuiteReport::new(SuiteKind::Interpolation);
    for (&k, series) in cfg
        .bands
        .iter()
        .zip(band_series(&f, &zero, m0, &cfg.bands, &times)?)
    {
        let mut consts = Vec::new();
        for &s in &exps {
            let r = series.interpolation_report(s, window)?;
            rep.constant(format!("constant[k={k},s={s}]"), r.empirical_constant);
            rep.check(Check::finite(
                format!("constant_finite[k={k},s={s}]"),
                r.empirical_constant,
            ));
            consts.push(r.empirical_constant);
        }
        let low = consts[0];
        let high = consts[consts.len() - 1];
        let wd = series.wavedecay_report(window).empirical_constant;
        rep.check(Check::within_factor(
            format!("endpoint_wave[k={k}]"),
            low / wd,
            ENDPOINT_FACTOR,
        ));
        if m0 == 0.0 {
            rep.check(Check::skipped(
                format!("endpoint_dispersive[k={k}]"),
                "m0 = 0: the mass-weighted estimate is vacuous",
            ));
        } else {
            let hf = series.highfreq_report(window).empirical_constant;
            rep.check(Check::within_factor(
                format!("endpoint_dispersive[k={k}]"),
                m0 * high / hf,
                ENDPOINT_FACTOR,
            ));
        }
    }
    Ok(rep)
}

/// Sum of a few random bumps, a generic smooth test field.
fn random_field(grid: Grid, rng: &mut ChaCha8Rng, reach: f64) -> Result<Field> {
    let mut f = Field::zeros(grid);
    for _ in 0..4 {
        let mut b = random_bump(rng, grid.dim(), reach, 0.5, 2.0);
        b.amplitude = rng.gen_range(-1.0..=1.0);
        f = f.add(&b.sample(grid)?)?;
    }
    Ok(f)
}

fn lp_suite(cfg: &RunConfig) -> Result<SuiteReport> {
    let grid = cfg.grid()?;
    let bank = LPBank::new(grid);
    let mut rep = SuiteReport::new(SuiteKind::Lp);
    rep.constant("k_max", bank.k_max() as f64);

    let residual = bank.completeness_residual();
    rep.check(Check::at_most(
        "symbol_completeness",
        residual,
        COMPLETENESS_TOL,
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let reach = (0.5 * cfg.box_length - 3.0).clamp(0.0, 8.0);
    let f = random_field(grid, &mut rng, reach)?;
    let pieces = bank.decompose(&f)?;
    let mut sum = Field::zeros(grid);
    for p in &pieces {
        sum = sum.add(p)?;
    }
    let scale = f.max_abs().max(f64::MIN_POSITIVE);
    rep.check(Check::at_most(
        "reconstruction",
        sum.max_abs_diff(&f)? / scale,
        COMPLETENESS_TOL,
    ));

    // Bands two or more apart have disjoint annuli.
    let mut leak = 0.0f64;
    for (i, pi) in pieces.iter().enumerate() {
        let ki = i as i32 - 1;
        for kj in (ki + 2)..=bank.k_max() {
            leak = leak.max(bank.project(pi, kj)?.max_abs() / scale);
        }
    }
    rep.check(Check::at_most("band_separation", leak, 1e-12));
    Ok(rep)
}

fn partition_suite(cfg: &RunConfig) -> Result<SuiteReport> {
    let grid = cfg.grid()?;
    let half_width = (0.5 * cfg.box_length - 2.0).min(16.0);
    let part = SpatialPartition::build(cfg.dim, half_width, cfg.box_length)?;
    let mut rep = SuiteReport::new(SuiteKind::Partition);
    rep.constant("centers", part.len() as f64);
    rep.constant("overlap_bound", part.overlap_bound());
    rep.constant("derivative_bound", part.derivative_bound());

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let inner = (half_width - 1.0).max(0.0);
    let mut sum_err = 0.0f64;
    let mut overlap = 0usize;
    for _ in 0..PARTITION_POINTS {
        let x: Vec<f64> = (0..cfg.dim)
            .map(|_| {
                if inner > 0.0 {
                    rng.gen_range(-inner..=inner)
                } else {
                    0.0
                }
            })
            .collect();
        sum_err = sum_err.max((part.sum_at(&x) - 1.0).abs());
        overlap = overlap.max(part.overlap_count(&x));
    }
    rep.check(Check::at_most("sum_to_one", sum_err, PARTITION_SUM_TOL));
    rep.check(Check::at_most(
        "overlap_count",
        overlap as f64,
        part.overlap_bound(),
    ));

    let shift = (half_width - PARTITION_BUMP_RADIUS - 1.0).max(0.0);
    let mut worst = 0.0f64;
    for i in 0..PARTITION_TRANSLATES {
        let center: Vec<f64> = (0..cfg.dim)
            .map(|_| {
                if shift > 0.0 {
                    rng.gen_range(-shift..=shift)
                } else {
                    0.0
                }
            })
            .collect();
        let bump = Bump {
            center,
            radius: PARTITION_BUMP_RADIUS,
            ..Bump::centered(cfg.dim, PARTITION_BUMP_RADIUS)
        };
        let c = part.w_k1_comparability(&bump.sample(grid)?, 1)?;
        let ratio = c.mid_over_lhs.max(c.rhs_over_lhs).max(c.mid_over_rhs);
        worst = worst.max(ratio);
        rep.check(Check::finite(format!("ratios_finite[translate{i}]"), ratio));
        rep.check(Check::at_most(
            format!("within_dimension_constant[translate{i}]"),
            c.mid_over_lhs,
            c.dimension_constant,
        ));
    }
    rep.constant("max_comparability_ratio", worst);
    Ok(rep)
}
