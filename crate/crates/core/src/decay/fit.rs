use serde::{Deserialize, Serialize};

use super::DecayCurve;
use crate::error::{Error, Result};

/// Least-squares line through `(log t, log value)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS of the fit errors in log space.
    pub residual: f64,
    pub points: usize,
}

/// Ordinary least squares `y = slope * x + intercept`; returns
/// `(slope, intercept, rms residual)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    (slope, intercept, (rss / n).sqrt())
}

pub const MIN_FIT_POINTS: usize = 5;

/// Fits the raw sup-norm of `curve` against `t` on a log-log scale over
/// `window = (t_lo, t_hi)` (inclusive).
pub fn fit_exponent(curve: &DecayCurve, window: (f64, f64)) -> Result<ExponentFit> {
    fit_power_law(&curve.times, &curve.raw_sup, window)
}

pub fn fit_power_law(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<ExponentFit> {
    let (lo, hi) = window;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in times.iter().zip(values) {
        if t >= lo && t <= hi {
            if !(v > 0.0) || !(t > 0.0) {
                return Err(Error::NonPositive { t, value: v });
            }
            xs.push(t.ln());
            ys.push(v.ln());
        }
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::FitWindow {
            needed: MIN_FIT_POINTS,
            got: xs.len(),
        });
    }
    let (slope, intercept, residual) = linear_fit(&xs, &ys);
    Ok(ExponentFit {
        slope,
        intercept,
        residual,
        points: xs.len(),
    })
}
