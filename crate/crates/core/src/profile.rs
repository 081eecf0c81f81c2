//! Smooth compactly supported profiles and the bump data family used by the
//! verification runs.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spectral::{spatial_derivative, Field, Grid};

/// `exp(-1 / (1 - r^2))` for `|r| < 1`, zero outside.
#[inline]
pub fn mollifier(r: f64) -> f64 {
    let s = 1.0 - r * r;
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

#[inline]
fn edge(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

/// C-infinity step: 0 for `u <= 0`, 1 for `u >= 1`, monotone in between.
#[inline]
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = edge(u);
        a / (a + edge(1.0 - u))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BumpShape {
    /// `mollifier(|x - c| / r)`, supported in the ball `B(c, r)`.
    Radial,
    /// Product of one-dimensional mollifiers, supported in the cube of
    /// half-width `r` around `c`.
    Tensor,
}

/// A smooth bump normalized to peak value `amplitude`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Vec<f64>,
    pub radius: f64,
    pub amplitude: f64,
    pub shape: BumpShape,
}

impl Bump {
    /// Radial unit-peak bump of the given radius at the origin.
    pub fn centered(dim: usize, radius: f64) -> Self {
        Self {
            center: vec![0.0; dim],
            radius,
            amplitude: 1.0,
            shape: BumpShape::Radial,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let e = std::f64::consts::E;
        match self.shape {
            BumpShape::Radial => {
                let r2: f64 = x
                    .iter()
                    .zip(&self.center)
                    .map(|(a, c)| (a - c) * (a - c))
                    .sum();
                self.amplitude * e * mollifier(r2.sqrt() / self.radius)
            }
            BumpShape::Tensor => x
                .iter()
                .zip(&self.center)
                .fold(self.amplitude, |acc, (a, c)| {
                    acc * e * mollifier((a - c) / self.radius)
                }),
        }
    }

    /// Radius of a ball around the origin containing the support.
    pub fn support_radius(&self) -> f64 {
        let c = self.center.iter().map(|v| v * v).sum::<f64>().sqrt();
        match self.shape {
            BumpShape::Radial => c + self.radius,
            BumpShape::Tensor => c + self.radius * (self.center.len() as f64).sqrt(),
        }
    }

    pub fn sample(&self, grid: Grid) -> Result<Field> {
        Field::from_fn(grid, |x| self.eval(x))
    }
}

/// Choice of velocity data relative to a position bump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VelocityKind {
    Zero,
    Bump,
    /// `d/dx^1` of a bump.
    DerivativeOfBump,
}

/// Randomized bump with center in `[-max_shift, max_shift]^d` and radius in
/// `[min_radius, max_radius]`.
pub fn random_bump<R: Rng>(
    rng: &mut R,
    dim: usize,
    max_shift: f64,
    min_radius: f64,
    max_radius: f64,
) -> Bump {
    let center = (0..dim)
        .map(|_| rng.gen_range(-max_shift..=max_shift))
        .collect();
    let radius = if max_radius > min_radius {
        rng.gen_range(min_radius..=max_radius)
    } else {
        min_radius
    };
    Bump {
        center,
        radius,
        amplitude: 1.0,
        shape: BumpShape::Radial,
    }
}

/// Velocity field of the requested kind built from `bump`.
pub fn velocity_from(bump: &Bump, kind: VelocityKind, grid: Grid) -> Result<Field> {
    match kind {
        VelocityKind::Zero => Ok(Field::zeros(grid)),
        VelocityKind::Bump => bump.sample(grid),
        VelocityKind::DerivativeOfBump => spatial_derivative(&bump.sample(grid)?, 0),
    }
}
