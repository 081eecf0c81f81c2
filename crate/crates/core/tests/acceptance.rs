//! Acceptance run: one line per criterion with the measured value and the
//! pinned tolerance. Exits nonzero if any criterion fails.

mod common;

use std::time::Instant;

use kgdisp_core::hyperboloid::{energy, global_sobolev_check};
use kgdisp_core::profile::Bump;
use kgdisp_core::propagator::{boost_commuted_data, evolve, iterated_boost_data};
use kgdisp_core::spectral::{forward_transform, inverse_transform, spatial_derivative};
use kgdisp_core::suite::{evaluate, run_suite, RunConfig, SuiteKind, SuiteReport};
use kgdisp_core::{CauchyData, Field, Grid, SobolevOrder, SpectralField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{bump_prime, rk4_oscillator, slope, spread};

const ENERGY_GAP: f64 = 1e-4;
const RK4_ERROR: f64 = 1e-8;
const BOOST_ERROR: f64 = 1e-8;
const TAU_SPREAD: f64 = 4.0;
const EXPONENT_TOL: f64 = 0.1;
const LOWFREQ_SPREAD: f64 = 3.0;
const SLOPE_TOL: f64 = 0.3;
const ENDPOINT_FACTOR: f64 = 2.0;
const COMPLETENESS: f64 = 1e-10;
const PARTITION_SUM: f64 = 1e-12;
const MASS_SPREAD: f64 = 2.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// `f` = unit bump in `B(0, 1)`, `g` = half its derivative, at `t0 = 2`.
fn compact_data(grid: Grid, mass: f64, with_velocity: bool) -> CauchyData {
    let f = Bump::centered(1, 1.0).sample(grid).unwrap();
    let g = if with_velocity {
        Field::from_fn(grid, |x| 0.5 * bump_prime(x[0], 1.0)).unwrap()
    } else {
        Field::zeros(grid)
    };
    CauchyData::new(f, g, 2.0, mass).unwrap()
}

fn constant(rep: &SuiteReport, name: &str) -> f64 {
    rep.value(name)
        .unwrap_or_else(|| panic!("{:?} report has no constant {name}", rep.suite))
}

fn check_value(rep: &SuiteReport, name: &str) -> f64 {
    rep.find(name)
        .unwrap_or_else(|| panic!("{:?} report has no check {name}", rep.suite))
        .value
}

fn energy_equality() -> Outcome {
    let grid = Grid::new(1, 4096, 256.0).unwrap();
    let mut worst = 0.0f64;
    for with_velocity in [false, true] {
        let data = compact_data(grid, 1.0, with_velocity);
        for tau in [2.0, 4.0, 8.0, 16.0] {
            worst = worst.max(energy(&data, tau).unwrap().relative_gap());
        }
    }
    outcome(
        worst <= ENERGY_GAP,
        format!("max relative gap {worst:.3e} <= {ENERGY_GAP:.0e} over tau in {{2,4,8,16}}"),
    )
}

fn rk4_oracle() -> Outcome {
    let grid = Grid::new(1, 128, 20.0).unwrap();
    let n = grid.points_per_axis() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let random = |rng: &mut ChaCha8Rng| {
        let mut spec = SpectralField::zeros(grid);
        for j in 0..=24i64 {
            let im = if j == 0 {
                0.0
            } else {
                rng.gen_range(-1.0..1.0)
            };
            let c = Complex64::new(rng.gen_range(-1.0..1.0), im) * n;
            spec.coeffs_mut()[grid.slot_of(&[j])] = c;
            spec.coeffs_mut()[grid.slot_of(&[-j])] = c.conj();
        }
        let f = inverse_transform(&spec).unwrap();
        f.scaled(1.0 / f.max_abs())
    };
    let mut worst = 0.0f64;
    for mass in [1.0, 0.0] {
        let data = CauchyData::new(random(&mut rng), random(&mut rng), 0.0, mass).unwrap();
        let (fh, gh) = (forward_transform(&data.f), forward_transform(&data.g));
        for t in [1.0, 4.0, 10.0] {
            let mut out = SpectralField::zeros(grid);
            for p in 0..grid.len() {
                let omega = (grid.xi_squared(p) + mass * mass).sqrt();
                let (a, b) = (fh.coeffs()[p], gh.coeffs()[p]);
                let steps = ((omega * t / 0.005).ceil() as usize).max(64);
                let (y, _) = rk4_oscillator(omega, (a.re, a.im), (b.re, b.im), t, steps);
                out.coeffs_mut()[p] = Complex64::new(y.0, y.1);
            }
            let rk = inverse_transform(&out).unwrap();
            worst = worst.max(evolve(&data, t).unwrap().phi.max_abs_diff(&rk).unwrap());
        }
    }
    outcome(
        worst <= RK4_ERROR,
        format!("max |evolve - RK4| {worst:.3e} <= {RK4_ERROR:.0e}"),
    )
}

fn boost_commutation() -> Outcome {
    let grid = Grid::new(1, 8192, 32.0).unwrap();
    let data = compact_data(grid, 1.0, true);
    let m2 = data.mass * data.mass;
    let once = boost_commuted_data(&data, 0).unwrap();
    let twice = iterated_boost_data(&data, &[0, 0]).unwrap();
    let (mut worst_l, mut worst_ll) = (0.0f64, 0.0f64);
    for t in [3.0, 5.0, 9.0] {
        let s = evolve(&data, t).unwrap();
        let phi_x = &s.grad_phi[0];
        let phi_xx = spatial_derivative(phi_x, 0).unwrap();
        let phi_xt = spatial_derivative(&s.dphi_dt, 0).unwrap();
        let phi_tt = phi_xx.combine(1.0, &s.phi, -m2).unwrap();
        let l = Field::from_fn(grid, |x| x[0]).unwrap();
        let lphi = s.dphi_dt.mul(&l).unwrap().combine(1.0, phi_x, t).unwrap();
        let llphi = l
            .mul(&l)
            .unwrap()
            .mul(&phi_tt)
            .unwrap()
            .add(&l.mul(phi_x).unwrap())
            .unwrap()
            .add(&l.mul(&phi_xt).unwrap().scaled(2.0 * t))
            .unwrap()
            .add(&s.dphi_dt.scaled(t))
            .unwrap()
            .add(&phi_xx.scaled(t * t))
            .unwrap();
        let via_l = evolve(&once, t).unwrap().phi;
        let via_ll = evolve(&twice, t).unwrap().phi;
        worst_l = worst_l.max(via_l.max_abs_diff(&lphi).unwrap() / lphi.max_abs());
        worst_ll = worst_ll.max(via_ll.max_abs_diff(&llphi).unwrap() / llphi.max_abs());
    }
    outcome(
        worst_l <= BOOST_ERROR && worst_ll <= BOOST_ERROR,
        format!(
            "relative error L {worst_l:.3e}, LL {worst_ll:.3e} <= {BOOST_ERROR:.0e} at t in {{3,5,9}}"
        ),
    )
}

fn sobolev_uniformity() -> Outcome {
    let grid = Grid::new(1, 4096, 256.0).unwrap();
    let data = compact_data(grid, 1.0, false);
    let order = SobolevOrder::new(1).get();
    let mut spreads = Vec::new();
    let mut pass = true;
    for ell in [0.0, 1.0] {
        let ratios: Vec<f64> = [2.0, 4.0, 8.0, 16.0]
            .iter()
            .map(|&tau| global_sobolev_check(&data, tau, ell, order).unwrap().ratio)
            .collect();
        let s = spread(&ratios);
        pass &= ratios.iter().all(|r| r.is_finite() && *r > 0.0) && s < TAU_SPREAD;
        spreads.push(format!("ell={ell}: {s:.3}"));
    }
    outcome(
        pass,
        format!("tau spread {} < {TAU_SPREAD}", spreads.join(", ")),
    )
}

fn lowfreq(cfg: &RunConfig) -> Outcome {
    let mut cfg = cfg.clone();
    cfg.suites = vec![SuiteKind::Lowfreq];
    let summary = evaluate(&cfg).unwrap();
    let rep = summary.suite(SuiteKind::Lowfreq).unwrap();
    let e = constant(rep, "exponent[centered,phi]");
    let target = -(cfg.dim as f64) / 2.0;
    let phi: Vec<f64> = (0..cfg.samples)
        .map(|i| constant(rep, &format!("constant[sample{i},phi]")))
        .collect();
    let dphi: Vec<f64> = (0..cfg.samples)
        .map(|i| constant(rep, &format!("constant[sample{i},dphi]")))
        .collect();
    let (sp, sd) = (spread(&phi), spread(&dphi));
    outcome(
        (e - target).abs() <= EXPONENT_TOL && sp < LOWFREQ_SPREAD && sd < LOWFREQ_SPREAD,
        format!(
            "exponent {e:.3} vs {target} (tol {EXPONENT_TOL}); spread over {} bumps phi {sp:.3}, \
             dphi {sd:.3} < {LOWFREQ_SPREAD}",
            cfg.samples
        ),
    )
}

fn band_slope(rep: &SuiteReport, bands: &[i32], label: &str) -> f64 {
    let xs: Vec<f64> = bands.iter().map(|&k| k as f64).collect();
    let ys: Vec<f64> = bands
        .iter()
        .map(|k| constant(rep, &format!("raw_constant[k={k},{label}]")).log2())
        .collect();
    slope(&xs, &ys)
}

fn band_scaling(rep: &SuiteReport, cfg: &RunConfig) -> Outcome {
    let d = cfg.dim as f64;
    let targets = [
        ("phi,g=0", d / 2.0 + 1.0),
        ("phi,f=0", d / 2.0),
        ("dphi,g=0", (d - 1.0) / 2.0 + 2.0),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, target) in targets {
        let s = band_slope(rep, &cfg.bands, label);
        pass &= (s - target).abs() <= SLOPE_TOL;
        parts.push(format!("{label} {s:.3} vs {target}"));
    }
    outcome(
        pass,
        format!("slopes {} (tol {SLOPE_TOL})", parts.join("; ")),
    )
}

fn interpolation(hf: &SuiteReport, ip: &SuiteReport, cfg: &RunConfig) -> Outcome {
    let d = cfg.dim as f64;
    let (lo, hi) = ((d - 1.0) / 2.0, d / 2.0);
    let mut wave = Vec::new();
    let mut disp = Vec::new();
    for k in &cfg.bands {
        let wd = constant(hf, &format!("constant[k={k},dphi,g=0]"));
        let high = constant(hf, &format!("constant[k={k},phi,g=0]"));
        wave.push(constant(ip, &format!("constant[k={k},s={lo}]")) / wd);
        disp.push(cfg.mass * constant(ip, &format!("constant[k={k},s={hi}]")) / high);
    }
    let within = |r: &f64| *r >= 1.0 / ENDPOINT_FACTOR && *r <= ENDPOINT_FACTOR;
    let range = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        format!("[{lo:.3}, {hi:.3}]")
    };
    outcome(
        wave.iter().all(within) && disp.iter().all(within),
        format!(
            "s={lo} / wave decay {}, s={hi} / high frequency {} within factor {ENDPOINT_FACTOR}",
            range(&wave),
            range(&disp)
        ),
    )
}

fn lp_partition(cfg: &RunConfig) -> Outcome {
    let mut cfg = cfg.clone();
    cfg.suites = vec![SuiteKind::Lp, SuiteKind::Partition];
    let summary = evaluate(&cfg).unwrap();
    let lp = summary.suite(SuiteKind::Lp).unwrap();
    let part = summary.suite(SuiteKind::Partition).unwrap();
    let recon = check_value(lp, "reconstruction");
    let symbol = check_value(lp, "symbol_completeness");
    let sum = check_value(part, "sum_to_one");
    let overlap = check_value(part, "overlap_count");
    let bound = (16.0 * cfg.dim as f64).powf(cfg.dim as f64 / 2.0);
    let ratios: Vec<f64> = part
        .checks
        .iter()
        .filter(|c| c.name.starts_with("ratios_finite["))
        .map(|c| c.value)
        .collect();
    let finite = ratios.len() == 20 && ratios.iter().all(|r| r.is_finite() && *r > 0.0);
    outcome(
        recon.max(symbol) <= COMPLETENESS && sum <= PARTITION_SUM && overlap <= bound && finite,
        format!(
            "sum_k P_k u error {recon:.1e}, symbol {symbol:.1e} <= {COMPLETENESS:.0e}; \
             sum chi_i error {sum:.1e} <= {PARTITION_SUM:.0e}; overlap {overlap} <= {bound}; \
             {} translate ratios finite",
            ratios.len()
        ),
    )
}

fn vanishing_mass(rep: &SuiteReport, cfg: &RunConfig) -> Outcome {
    let mut worst = 0.0f64;
    for k in &cfg.bands {
        let c: Vec<f64> = cfg
            .mass_sweep
            .iter()
            .map(|m| constant(rep, &format!("constant[k={k},dphi,m0={m}]")))
            .collect();
        worst = worst.max(spread(&c));
    }
    outcome(
        worst < MASS_SPREAD,
        format!(
            "worst wave-decay spread over m0 in {:?}: {worst:.3} < {MASS_SPREAD}",
            cfg.mass_sweep
        ),
    )
}

fn determinism(cfg: &RunConfig) -> Outcome {
    let mut cfg = cfg.clone();
    cfg.suites = vec![
        SuiteKind::Prop2,
        SuiteKind::Lowfreq,
        SuiteKind::Lp,
        SuiteKind::Partition,
    ];
    let read = |cfg: &RunConfig| {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg.clone();
        c.out = dir.path().to_path_buf();
        run_suite(&c).unwrap();
        std::fs::read(dir.path().join("summary.json")).unwrap()
    };
    let (a, b) = (read(&cfg), read(&cfg));
    outcome(
        a == b,
        format!(
            "two runs with seed {}: {} and {} bytes, identical = {}",
            cfg.seed,
            a.len(),
            b.len(),
            a == b
        ),
    )
}

fn main() {
    let cfg = RunConfig::desk(1).unwrap();
    let mut results: Vec<(u32, &str, Outcome, f64)> = Vec::new();
    let mut run = |id: u32, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let secs = start.elapsed().as_secs_f64();
        println!(
            "{} {id:>2} {name}: {} ({secs:.1} s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push((id, name, o, secs));
    };

    run(1, "energy equality", &mut energy_equality);
    run(2, "propagator vs RK4", &mut rk4_oracle);
    run(3, "boost commutation", &mut boost_commutation);
    run(4, "global Sobolev tau-uniformity", &mut sobolev_uniformity);
    run(5, "low-frequency decay", &mut || lowfreq(&cfg));

    let mut band_cfg = cfg.clone();
    band_cfg.suites = vec![SuiteKind::Highfreq, SuiteKind::Interpolation];
    let start = Instant::now();
    let bands = evaluate(&band_cfg).unwrap();
    let band_secs = start.elapsed().as_secs_f64();
    let hf = bands.suite(SuiteKind::Highfreq).unwrap();
    let ip = bands.suite(SuiteKind::Interpolation).unwrap();
    println!("     band suites evaluated in {band_secs:.1} s");
    run(6, "high-frequency band scaling", &mut || {
        band_scaling(hf, &cfg)
    });
    run(7, "interpolation endpoints", &mut || {
        interpolation(hf, ip, &cfg)
    });
    run(8, "LP completeness and partition", &mut || {
        lp_partition(&cfg)
    });
    run(9, "vanishing-mass survival", &mut || {
        vanishing_mass(hf, &cfg)
    });
    run(10, "determinism", &mut || determinism(&cfg));

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {} of {} criteria pass",
        results.len() - failed.len(),
        results.len()
    );
    if !failed.is_empty() {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
