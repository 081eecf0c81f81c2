use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::mollifier;
use crate::spectral::{derivatives_up_to, l1_norm, multi_indices, Field, Grid};

/// Smooth partition of unity subordinate to the unit balls centered on the
/// lattice `(1/sqrt(d)) Z^d`.
///
/// `chi_i(x) = eta(x - c_i) / sum_j eta(x - c_j)` with `eta` the radial
/// mollifier of the unit ball. The lattice has covering radius `1/2`, so the
/// denominator never vanishes on the active cube `[-A, A]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialPartition {
    dim: usize,
    spacing: f64,
    half_width: f64,
    /// Lattice indices of every center are in `[-reach, reach]^d`.
    reach: i64,
    derivative_bound: f64,
}

impl SpatialPartition {
    /// Partition covering the active cube `[-half_width, half_width]^d` of a
    /// periodic box of length `box_length`. The box must leave a margin of
    /// one unit around the active cube.
    pub fn build(dim: usize, half_width: f64, box_length: f64) -> Result<Self> {
        if dim == 0 || dim > 3 {
            return Err(Error::Config(format!(
                "partition supports 1 <= d <= 3, got {dim}"
            )));
        }
        if !(half_width > 0.0) {
            return Err(Error::Config("active region must be nonempty".into()));
        }
        if half_width + 1.0 > 0.5 * box_length {
            return Err(Error::Config(format!(
                "box of length {box_length} is too small for an active cube of half-width \
                 {half_width} plus the unit margin"
            )));
        }
        let spacing = 1.0 / (dim as f64).sqrt();
        let reach = ((half_width + 1.0) / spacing).floor() as i64;
        let mut p = Self {
            dim,
            spacing,
            half_width,
            reach,
            derivative_bound: 0.0,
        };
        p.derivative_bound = p.mother_derivative_bound()?;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Lattice spacing `1/sqrt(d)`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        ((2 * self.reach + 1) as usize).pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Upper bound `(16 d)^(d/2)` on the number of balls containing a point.
    pub fn overlap_bound(&self) -> f64 {
        (16.0 * self.dim as f64).powf(0.5 * self.dim as f64)
    }

    /// `max_{|alpha| <= d+2} ||d^alpha chi||_inf` of the cutoff at the origin.
    pub fn derivative_bound(&self) -> f64 {
        self.derivative_bound
    }

    fn side(&self) -> usize {
        (2 * self.reach + 1) as usize
    }

    /// Lattice multi-index of center `i`.
    pub fn lattice_index(&self, i: usize) -> Vec<i64> {
        let side = self.side();
        let mut m = vec![0; self.dim];
        let mut rest = i;
        for a in (0..self.dim).rev() {
            m[a] = (rest % side) as i64 - self.reach;
            rest /= side;
        }
        m
    }

    pub fn center(&self, i: usize) -> Vec<f64> {
        self.lattice_index(i)
            .into_iter()
            .map(|m| m as f64 * self.spacing)
            .collect()
    }

    fn flat_index(&self, m: &[i64]) -> Option<usize> {
        let side = self.side();
        m.iter().try_fold(0usize, |acc, &v| {
            if v.abs() > self.reach {
                None
            } else {
                Some(acc * side + (v + self.reach) as usize)
            }
        })
    }

    /// Index of the center nearest to `x`, if it belongs to the family.
    pub fn nearest_center(&self, x: &[f64]) -> Option<usize> {
        let m: Vec<i64> = x
            .iter()
            .map(|v| (v / self.spacing).round() as i64)
            .collect();
        self.flat_index(&m)
    }

    /// Calls `visit(i, |x - c_i|^2)` for every family center within distance
    /// `< 1` of `x`.
    fn for_each_neighbor(&self, x: &[f64], mut visit: impl FnMut(usize, f64)) {
        visit_lattice_ball(x, self.spacing, Some(self.reach), |m, r2| {
            if let Some(i) = self.flat_index(m) {
                visit(i, r2);
            }
        });
    }

    /// `chi_i(x)`.
    pub fn cutoff(&self, i: usize, x: &[f64]) -> f64 {
        let c = self.center(i);
        let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
        if r2 >= 1.0 {
            return 0.0;
        }
        let mut total = 0.0;
        self.for_each_neighbor(x, |_, d2| total += mollifier(d2.sqrt()));
        if total == 0.0 {
            0.0
        } else {
            mollifier(r2.sqrt()) / total
        }
    }

    /// `sum_i chi_i(x)`.
    pub fn sum_at(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        let mut terms = Vec::new();
        self.for_each_neighbor(x, |_, d2| {
            let e = mollifier(d2.sqrt());
            total += e;
            terms.push(e);
        });
        if total == 0.0 {
            return 0.0;
        }
        terms.iter().map(|e| e / total).sum()
    }

    /// Number of family balls `B(c_i, 1)` containing `x`.
    pub fn overlap_count(&self, x: &[f64]) -> usize {
        let mut count = 0;
        self.for_each_neighbor(x, |_, _| count += 1);
        count
    }

    /// Indices of the balls that meet `B(y, r)`.
    pub fn centers_meeting_ball(&self, y: &[f64], r: f64) -> Vec<usize> {
        let mut out = Vec::new();
        let reach = 1.0 + r;
        visit_lattice_box(y, self.spacing, reach, Some(self.reach), |m, d2| {
            if d2 < reach * reach {
                if let Some(i) = self.flat_index(m) {
                    out.push(i);
                }
            }
        });
        out.sort_unstable();
        out
    }

    /// `chi_i f`.
    pub fn apply_cutoff(&self, i: usize, f: &Field) -> Result<Field> {
        if i >= self.len() {
            return Err(Error::Contract(format!(
                "cutoff index {i} out of range ({} centers)",
                self.len()
            )));
        }
        self.check_grid(f.grid())?;
        Ok(f.map_with_position(|x, v| if v == 0.0 { 0.0 } else { v * self.cutoff(i, x) }))
    }

    /// Nonzero pieces `(i, chi_i f)` of a field.
    pub fn pieces(&self, f: &Field) -> Result<Vec<(usize, Field)>> {
        self.check_grid(f.grid())?;
        self.check_support(f)?;
        self.touched_centers(f)
            .into_iter()
            .map(|i| Ok((i, self.apply_cutoff(i, f)?)))
            .collect::<Result<Vec<_>>>()
            .map(|v| {
                v.into_iter()
                    .filter(|(_, piece)| piece.max_abs() > 0.0)
                    .collect()
            })
    }

    /// Centers whose ball contains a grid point where `f` is nonzero.
    pub fn touched_centers(&self, f: &Field) -> Vec<usize> {
        let grid = f.grid();
        let mut hit = vec![false; self.len()];
        let mut x = vec![0.0; grid.dim()];
        for (p, &v) in f.values().iter().enumerate() {
            if v != 0.0 {
                grid.position(p, &mut x);
                self.for_each_neighbor(&x, |i, _| hit[i] = true);
            }
        }
        hit.iter()
            .enumerate()
            .filter_map(|(i, &h)| h.then_some(i))
            .collect()
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        if grid.dim() != self.dim {
            return Err(Error::Contract(format!(
                "partition is {}-dimensional, field is {}-dimensional",
                self.dim,
                grid.dim()
            )));
        }
        if self.half_width + 1.0 > 0.5 * grid.box_length() {
            return Err(Error::Config(format!(
                "box of length {} is too small for the partition's active cube",
                grid.box_length()
            )));
        }
        Ok(())
    }

    /// `f` must vanish outside the active cube.
    pub fn check_support(&self, f: &Field) -> Result<()> {
        let grid = f.grid();
        let mut x = vec![0.0; grid.dim()];
        for (p, &v) in f.values().iter().enumerate() {
            if v != 0.0 {
                grid.position(p, &mut x);
                if x.iter().any(|c| c.abs() > self.half_width) {
                    return Err(Error::Support(format!(
                        "field is nonzero at {x:?}, outside the active cube of half-width {}",
                        self.half_width
                    )));
                }
            }
        }
        Ok(())
    }

    /// `max_{|alpha| <= d+2} ||d^alpha chi_i||_inf` sampled on `grid`.
    pub fn cutoff_derivative_bound_on(&self, grid: Grid, i: usize) -> Result<f64> {
        let chi = Field::from_fn(grid, |x| self.cutoff(i, x))?;
        Ok(derivatives_up_to(&chi, self.dim + 2)?
            .iter()
            .fold(0.0f64, |m, d| m.max(d.max_abs())))
    }

    /// The same bound for the cutoff centered at the origin of the infinite
    /// lattice, sampled on a fine auxiliary box `[-2, 2)^d`.
    fn mother_derivative_bound(&self) -> Result<f64> {
        let n = match self.dim {
            1 => 512,
            2 => 128,
            _ => 64,
        };
        let grid = Grid::new(self.dim, n, 4.0)?;
        let spacing = self.spacing;
        let chi = Field::from_fn(grid, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            if r2 >= 1.0 {
                return 0.0;
            }
            let mut total = 0.0;
            visit_lattice_ball(x, spacing, None, |_, d2| total += mollifier(d2.sqrt()));
            mollifier(r2.sqrt()) / total
        })?;
        Ok(derivatives_up_to(&chi, self.dim + 2)?
            .iter()
            .fold(0.0f64, |m, d| m.max(d.max_abs())))
    }

    /// Compares `||f||_{W^{k,1}}`, `sum_i ||chi_i f||_{W^{k,1}}` and
    /// `sum_i ||f||_{W^{k,1}(B_i)}`.
    pub fn w_k1_comparability(&self, f: &Field, k: usize) -> Result<Comparability> {
        if k > self.dim + 2 {
            return Err(Error::Contract(format!(
                "comparability needs k <= d + 2 = {}, got {k}",
                self.dim + 2
            )));
        }
        self.check_grid(f.grid())?;
        self.check_support(f)?;
        let grid = *f.grid();
        let derivs = derivatives_up_to(f, k)?;
        let lhs: f64 = derivs.iter().map(l1_norm).sum();

        let touched = self.touched_centers(f);
        let mut mid = 0.0;
        for &i in &touched {
            let piece = self.apply_cutoff(i, f)?;
            mid += derivatives_up_to(&piece, k)?
                .iter()
                .map(l1_norm)
                .sum::<f64>();
        }

        // sum_i int_{B_i} |d^alpha f| = int |d^alpha f| * (overlap count).
        let counts: Vec<f64> = {
            let mut x = vec![0.0; grid.dim()];
            (0..grid.len())
                .map(|p| {
                    grid.position(p, &mut x);
                    self.overlap_count(&x) as f64
                })
                .collect()
        };
        let dv = grid.cell_volume();
        let rhs: f64 = derivs
            .iter()
            .map(|d| {
                d.values()
                    .iter()
                    .zip(&counts)
                    .map(|(v, c)| v.abs() * c)
                    .sum::<f64>()
                    * dv
            })
            .sum();

        let n_alpha = multi_indices(self.dim, k).len() as f64;
        let leibniz = self.derivative_bound.max(1.0) * 2f64.powi(k as i32) * n_alpha;
        let overlap = self.overlap_bound();
        let ratio = |a: f64, b: f64| if b == 0.0 { 0.0 } else { a / b };
        Ok(Comparability {
            order: k,
            lhs,
            mid,
            rhs,
            mid_over_lhs: ratio(mid, lhs),
            rhs_over_lhs: ratio(rhs, lhs),
            mid_over_rhs: ratio(mid, rhs),
            overlap_bound: overlap,
            leibniz_bound: leibniz,
            dimension_constant: leibniz * overlap,
            pieces: touched.len(),
        })
    }
}

/// Result of the `W^{k,1}` comparability check.
///
/// The chain `lhs <= mid <= leibniz_bound * rhs` and
/// `rhs <= overlap_bound * lhs` holds, so every ratio is at most
/// `dimension_constant`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparability {
    pub order: usize,
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
    pub mid_over_lhs: f64,
    pub rhs_over_lhs: f64,
    pub mid_over_rhs: f64,
    pub overlap_bound: f64,
    pub leibniz_bound: f64,
    pub dimension_constant: f64,
    pub pieces: usize,
}

impl Comparability {
    pub fn within_bounds(&self) -> bool {
        let slack = 1e-9;
        self.mid >= self.lhs * (1.0 - slack)
            && self.rhs_over_lhs <= self.overlap_bound * (1.0 + slack)
            && self.mid_over_rhs <= self.leibniz_bound * (1.0 + slack)
            && self.mid_over_lhs <= self.dimension_constant
    }
}

/// Visits lattice points `m * spacing` with `|x - m*spacing| < 1`.
fn visit_lattice_ball(
    x: &[f64],
    spacing: f64,
    reach: Option<i64>,
    mut visit: impl FnMut(&[i64], f64),
) {
    visit_lattice_box(x, spacing, 1.0, reach, |m, d2| {
        if d2 < 1.0 {
            visit(m, d2)
        }
    });
}

/// Visits lattice points in the cube of half-width `radius` around `x`,
/// passing the squared distance.
fn visit_lattice_box(
    x: &[f64],
    spacing: f64,
    radius: f64,
    reach: Option<i64>,
    mut visit: impl FnMut(&[i64], f64),
) {
    let dim = x.len();
    let clamp = |v: i64| match reach {
        Some(r) => v.clamp(-r - 1, r + 1),
        None => v,
    };
    let lo: Vec<i64> = x
        .iter()
        .map(|v| clamp(((v - radius) / spacing).ceil() as i64))
        .collect();
    let hi: Vec<i64> = x
        .iter()
        .map(|v| clamp(((v + radius) / spacing).floor() as i64))
        .collect();
    if lo.iter().zip(&hi).any(|(l, h)| l > h) {
        return;
    }
    let mut m = lo.clone();
    loop {
        let d2: f64 = m
            .iter()
            .zip(x)
            .map(|(&mi, &xi)| {
                let t = xi - mi as f64 * spacing;
                t * t
            })
            .sum();
        visit(&m, d2);
        let mut a = dim;
        loop {
            if a == 0 {
                return;
            }
            a -= 1;
            if m[a] < hi[a] {
                m[a] += 1;
                break;
            }
            m[a] = lo[a];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn too_small_box_is_rejected() {
        assert!(matches!(
            SpatialPartition::build(1, 10.0, 21.0),
            Err(Error::Config(_))
        ));
        assert!(SpatialPartition::build(1, 10.0, 22.0).is_ok());
    }

    #[test]
    fn centers_round_trip() {
        let p = SpatialPartition::build(2, 3.0, 10.0).unwrap();
        for i in [0, 7, p.len() / 2, p.len() - 1] {
            let c = p.center(i);
            assert_eq!(p.nearest_center(&c), Some(i));
        }
        let origin = p.nearest_center(&[0.0, 0.0]).unwrap();
        assert_eq!(p.center(origin), vec![0.0, 0.0]);
    }

    #[test]
    fn one_dimensional_overlap_is_at_most_two() {
        let p = SpatialPartition::build(1, 5.0, 16.0).unwrap();
        for j in 0..1000 {
            let x = -5.0 + j as f64 * 0.01;
            let c = p.overlap_count(&[x]);
            assert!((1..=2).contains(&c));
        }
        assert_eq!(p.overlap_bound(), 4.0);
    }

    #[test]
    fn cutoff_vanishes_outside_its_ball() {
        let p = SpatialPartition::build(2, 2.0, 8.0).unwrap();
        let i = p.nearest_center(&[0.0, 0.0]).unwrap();
        assert_eq!(p.cutoff(i, &[1.0, 0.0]), 0.0);
        assert_eq!(p.cutoff(i, &[0.8, 0.8]), 0.0);
        assert!(p.cutoff(i, &[0.1, 0.1]) > 0.0);
    }

    #[test]
    fn derivative_bound_is_finite_and_positive() {
        for d in 1..=2 {
            let p = SpatialPartition::build(d, 2.0, 8.0).unwrap();
            let b = p.derivative_bound();
            assert!(b.is_finite() && b >= 1.0, "d = {d}: {b}");
        }
    }
}
