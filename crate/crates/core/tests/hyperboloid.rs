mod common;

use kgdisp_core::hyperboloid::{
    boost_field, energy, entoinfty_check, global_sobolev_check, HyperboloidSlice,
};
use kgdisp_core::profile::Bump;
use kgdisp_core::{CauchyData, Field, Grid, Propagator, SobolevOrder};

use common::{adaptive_simpson, bump, bump_prime};

/// Compactly supported data in `B(0, 1)`; the velocity is sampled from the
/// closed form so it carries no spectral tail.
fn bump_data(grid: Grid, mass: f64) -> CauchyData {
    let f = Bump::centered(1, 1.0).sample(grid).unwrap();
    let g = Field::from_fn(grid, |x| 0.5 * bump_prime(x[0], 1.0)).unwrap();
    CauchyData::new(f, g, 2.0, mass).unwrap()
}

#[test]
fn slice_weights_follow_the_closed_form() {
    let grid = Grid::new(1, 1024, 64.0).unwrap();
    let h = grid.spacing();
    // r0 = 1.5 keeps |x| = 2 inside the sampled part of the tau = 2 slice.
    let slice = HyperboloidSlice::build(2.0, grid, 1.5).unwrap();
    let mut saw_vertex = false;
    let mut saw_two = false;
    for ((x, &t), &w) in slice
        .points()
        .iter()
        .zip(slice.times())
        .zip(slice.weights())
    {
        assert!(t >= 2.0);
        if x[0] == 0.0 {
            assert_eq!(t, 2.0);
            assert!((w - h).abs() <= 1e-15);
            saw_vertex = true;
        }
        if x[0] == 2.0 {
            assert!((t - 8f64.sqrt()).abs() <= 1e-14);
            assert!((w / h - 0.5f64.sqrt()).abs() <= 1e-14);
            saw_two = true;
        }
    }
    assert!(saw_vertex && saw_two);
    let min_t = slice.times().iter().cloned().fold(f64::INFINITY, f64::min);
    assert_eq!(min_t, 2.0);
}

#[test]
fn slice_quadrature_matches_radial_quadrature() {
    // int u(x) (tau / t(x)) dx for a smooth bump u, against adaptive
    // Simpson on the closed-form integrand.
    let tau = 5.0;
    let grid = Grid::new(1, 2048, 64.0).unwrap();
    let slice = HyperboloidSlice::build(tau, grid, 1.0).unwrap();
    assert!(slice.truncation_radius() > 4.0);
    let u = |x: f64| bump(x - 0.5, 3.5);
    let values: Vec<f64> = slice.points().iter().map(|x| u(x[0])).collect();
    let quad = slice.integrate(&values);
    let oracle = adaptive_simpson(
        &|x| u(x) * tau / (tau * tau + x * x).sqrt(),
        -3.0,
        4.0,
        1e-14,
    );
    assert!((quad - oracle).abs() <= 1e-6 * oracle, "{quad} vs {oracle}");
}

#[test]
fn single_mode_boost_matches_closed_form() {
    let l = 2.0 * std::f64::consts::PI * 10.0;
    let grid = Grid::new(1, 512, l).unwrap();
    let xi0 = 1.5;
    let m: f64 = 1.0;
    let omega = (xi0 * xi0 + m * m).sqrt();
    let f = Field::from_fn(grid, |x| (xi0 * x[0]).cos()).unwrap();
    let g = Field::from_fn(grid, |x| (xi0 * x[0]).sin()).unwrap();
    let data = CauchyData::new(f, g, 2.0, m).unwrap();
    let slice = HyperboloidSlice::build(3.0, grid, 1.0).unwrap();
    let sample = slice.sample(&Propagator::new(&data)).unwrap();
    let lphi = boost_field(&slice, &sample, 0).unwrap();
    for (p, ((x, &t), &v)) in slice
        .points()
        .iter()
        .zip(slice.times())
        .zip(&lphi)
        .enumerate()
    {
        let (x, dt) = (x[0], t - 2.0);
        let (c, s) = ((omega * dt).cos(), (omega * dt).sin());
        let phi_t = -omega * s * (xi0 * x).cos() + c * (xi0 * x).sin();
        let phi_x = -xi0 * c * (xi0 * x).sin() + xi0 * s / omega * (xi0 * x).cos();
        let exact = x * phi_t + t * phi_x;
        assert!((v - exact).abs() <= 1e-8, "x = {x}: {v} vs {exact}");
        if x == 0.0 {
            assert!((v - 3.0 * sample.values[p].grad_phi[0]).abs() <= 1e-14);
        }
    }
}

#[test]
fn constant_massless_solution_has_zero_boost() {
    let grid = Grid::new(1, 256, 32.0).unwrap();
    let f = Field::from_fn(grid, |_| 2.5).unwrap();
    let data = CauchyData::new(f, Field::zeros(grid), 2.0, 0.0).unwrap();
    let slice = HyperboloidSlice::build(2.0, grid, 1.0).unwrap();
    let sample = slice.sample(&Propagator::new(&data)).unwrap();
    let l = boost_field(&slice, &sample, 0).unwrap();
    assert!(l.iter().all(|v| v.abs() <= 1e-12));
}

#[test]
fn energy_on_slices_equals_flat_energy() {
    let grid = Grid::new(1, 2048, 128.0).unwrap();
    let data = bump_data(grid, 1.0);
    for &tau in &[2.0, 4.0, 8.0] {
        let r = energy(&data, tau).unwrap();
        assert!(
            r.relative_gap() <= 1e-4,
            "tau = {tau}: gap {:.3e}",
            r.relative_gap()
        );
        assert!(r.boost_part >= 0.0 && r.time_part >= 0.0 && r.mass_part >= 0.0);
    }
}

#[test]
fn energy_is_quadratic() {
    let grid = Grid::new(1, 1024, 64.0).unwrap();
    let data = bump_data(grid, 1.0);
    let c = 3.7;
    let e1 = energy(&data, 4.0).unwrap().energy;
    let ec = energy(&data.scaled(c), 4.0).unwrap().energy;
    assert!((ec - c * c * e1).abs() <= 1e-12 * ec);
}

#[test]
fn sobolev_ratios_are_finite_for_both_weights() {
    let grid = Grid::new(1, 1024, 64.0).unwrap();
    let data = bump_data(grid, 1.0);
    let order = SobolevOrder::new(1).get();
    for &tau in &[2.0, 4.0] {
        for &ell in &[0.0, 1.0] {
            let c = global_sobolev_check(&data, tau, ell, order).unwrap();
            assert!(c.lhs > 0.0 && c.rhs > 0.0);
            assert!(c.ratio.is_finite(), "tau = {tau}, ell = {ell}");
        }
    }
}

#[test]
fn massless_entoinfty_has_no_mass_term() {
    let grid = Grid::new(1, 1024, 64.0).unwrap();
    let c = entoinfty_check(&bump_data(grid, 0.0), 4.0).unwrap();
    assert_eq!(c.lhs_terms[0], 0.0);
    assert!(c.lhs_terms[1] > 0.0 && c.rhs_energy_sum > 0.0);
    let massive = entoinfty_check(&bump_data(grid, 1.0), 4.0).unwrap();
    assert!(massive.lhs_terms[0] > 0.0);
}
