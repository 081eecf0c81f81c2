//! Fixtures shared by the criterion benchmarks under `benches/`.

use kgdisp_core::profile::Bump;
use kgdisp_core::{CauchyData, Field, Grid, Result};

/// Localized data on a `dim`-dimensional grid with `n` points per axis.
pub fn bump_data(dim: usize, n: usize, box_length: f64) -> Result<CauchyData> {
    let grid = Grid::new(dim, n, box_length)?;
    let f = Bump::centered(dim, 1.0).sample(grid)?;
    CauchyData::new(f, Field::zeros(grid), 2.0, 1.0)
}

/// `count` points on the segment `t = t0 + s`, `x = (s, 0, ...)`.
pub fn ray_points(dim: usize, t0: f64, count: usize) -> Vec<(f64, Vec<f64>)> {
    (0..count)
        .map(|i| {
            let s = i as f64 / count as f64;
            let mut x = vec![0.0; dim];
            x[0] = s;
            (t0 + s, x)
        })
        .collect()
}
