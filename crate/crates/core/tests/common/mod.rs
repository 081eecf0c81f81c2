//! Independent oracles shared by the integration tests. None of them call
//! into the spectral machinery they are used to check.

#![allow(dead_code)]

use std::f64::consts::E;

/// Classical RK4 for `y'' = -omega^2 y` with complex state split into real
/// and imaginary parts, integrated from 0 to `dt` in `steps` equal steps.
/// Returns `(y, y')` at `dt`.
pub fn rk4_oscillator(
    omega: f64,
    y0: (f64, f64),
    v0: (f64, f64),
    dt: f64,
    steps: usize,
) -> ((f64, f64), (f64, f64)) {
    let w2 = omega * omega;
    let h = dt / steps as f64;
    let rhs = |s: [f64; 4]| [s[2], s[3], -w2 * s[0], -w2 * s[1]];
    let mut s = [y0.0, y0.1, v0.0, v0.1];
    for _ in 0..steps {
        let k1 = rhs(s);
        let k2 = rhs(add(s, k1, 0.5 * h));
        let k3 = rhs(add(s, k2, 0.5 * h));
        let k4 = rhs(add(s, k3, h));
        for i in 0..4 {
            s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    ((s[0], s[1]), (s[2], s[3]))
}

fn add(s: [f64; 4], k: [f64; 4], c: f64) -> [f64; 4] {
    [
        s[0] + c * k[0],
        s[1] + c * k[1],
        s[2] + c * k[2],
        s[3] + c * k[3],
    ]
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Closed-form unit-peak bump `e * exp(-1 / (1 - (x/r)^2))`.
pub fn bump(x: f64, r: f64) -> f64 {
    let s = 1.0 - (x / r).powi(2);
    if s <= 0.0 {
        0.0
    } else {
        E * (-1.0 / s).exp()
    }
}

/// Exact derivative of [`bump`].
pub fn bump_prime(x: f64, r: f64) -> f64 {
    let u = x / r;
    let s = 1.0 - u * u;
    if s <= 0.0 {
        0.0
    } else {
        -2.0 * u / (r * s * s) * bump(x, r)
    }
}

/// Periodic centered difference `(v[j+1] - v[j-1]) / 2h`.
pub fn centered_difference(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|j| (values[(j + 1) % n] - values[(j + n - 1) % n]) / (2.0 * h))
        .collect()
}

pub fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |a, v| a.max(v.abs()))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    slope(&lx, &ly)
}

pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

/// `max / min` of a positive family.
pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}
