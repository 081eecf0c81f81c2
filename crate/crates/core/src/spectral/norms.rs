use serde::{Deserialize, Serialize};

use super::field::Field;
use super::transform::{forward_transform, inverse_transform, partial_spectral};
use crate::error::{Error, Result};

/// Lebesgue norms of a field under the trapezoidal rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

impl Norms {
    pub fn of(f: &Field) -> Self {
        let dv = f.grid().cell_volume();
        let (mut l1, mut l2sq, mut linf) = (0.0, 0.0, 0.0f64);
        for &v in f.values() {
            l1 += v.abs();
            l2sq += v * v;
            linf = linf.max(v.abs());
        }
        Self {
            l1: l1 * dv,
            l2: (l2sq * dv).sqrt(),
            linf,
        }
    }
}

pub fn l1_norm(f: &Field) -> f64 {
    f.values().iter().map(|v| v.abs()).sum::<f64>() * f.grid().cell_volume()
}

/// `H^s` norm with frequency weight `(1 + |xi|^2)^s`.
pub fn sobolev_h(f: &Field, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::Contract(format!(
            "Sobolev order must be >= 0, got {s}"
        )));
    }
    let spec = forward_transform(f);
    Ok(spec.weighted_energy(|xi2| (1.0 + xi2).powf(s)).sqrt())
}

/// All multi-indices `alpha` in `N^dim` with `|alpha| <= k`, graded by order.
pub fn multi_indices(dim: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for order in 0..=k {
        let mut current = vec![0; dim];
        push_compositions(&mut out, &mut current, 0, order);
    }
    out
}

fn push_compositions(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, axis: usize, left: usize) {
    if axis + 1 == cur.len() {
        cur[axis] = left;
        out.push(cur.clone());
        return;
    }
    for take in (0..=left).rev() {
        cur[axis] = take;
        push_compositions(out, cur, axis + 1, left - take);
    }
    cur[axis] = 0;
}

/// Every `d^alpha f` with `|alpha| <= k`, in [`multi_indices`] order.
pub fn derivatives_up_to(f: &Field, k: usize) -> Result<Vec<Field>> {
    let spec = forward_transform(f);
    multi_indices(f.grid().dim(), k)
        .iter()
        .map(|alpha| {
            if alpha.iter().all(|&a| a == 0) {
                Ok(f.clone())
            } else {
                inverse_transform(&partial_spectral(&spec, alpha)?)
            }
        })
        .collect()
}

/// `W^{k,1}` norm: sum over `|alpha| <= k` of `||d^alpha f||_{L^1}`, with
/// derivatives computed spectrally. Requires `k <= d + 2`.
pub fn sobolev_w_k1(f: &Field, k: usize) -> Result<f64> {
    let d = f.grid().dim();
    if k > d + 2 {
        return Err(Error::Contract(format!(
            "W^(k,1) order {k} exceeds d + 2 = {}",
            d + 2
        )));
    }
    Ok(derivatives_up_to(f, k)?.iter().map(l1_norm).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(1, 3).len(), 4);
        assert_eq!(multi_indices(2, 2).len(), 6);
        assert_eq!(multi_indices(3, 2).len(), 10);
        assert_eq!(
            multi_indices(2, 1),
            vec![vec![0, 0], vec![1, 0], vec![0, 1]]
        );
    }

    #[test]
    fn zero_field_norms_vanish() {
        let g = Grid::new(2, 16, 4.0).unwrap();
        let z = Field::zeros(g);
        let n = Norms::of(&z);
        assert_eq!((n.l1, n.l2, n.linf), (0.0, 0.0, 0.0));
        assert_eq!(sobolev_h(&z, 2.0).unwrap(), 0.0);
        assert_eq!(sobolev_w_k1(&z, 4).unwrap(), 0.0);
    }

    #[test]
    fn cosine_l2_norm() {
        let l = 12.0;
        let g = Grid::new(1, 128, l).unwrap();
        let xi = g.wavenumber(4);
        let f = Field::from_fn(g, |x| (xi * x[0]).cos()).unwrap();
        assert!((Norms::of(&f).l2 - (l / 2.0).sqrt()).abs() < 1e-10);
        let g2 = Grid::new(2, 32, l).unwrap();
        let f2 = Field::from_fn(g2, |x| (xi * x[0]).cos()).unwrap();
        assert!((Norms::of(&f2).l2 - (l * l / 2.0).sqrt()).abs() < 1e-10);
        // H^s of a single mode is (1 + xi^2)^(s/2) times its L2 norm.
        let h2 = sobolev_h(&f, 2.0).unwrap();
        assert!((h2 - (1.0 + xi * xi) * (l / 2.0).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn w_k1_order_is_bounded_by_dimension() {
        let g = Grid::new(1, 16, 4.0).unwrap();
        assert!(sobolev_w_k1(&Field::zeros(g), 4).is_err());
        assert!(sobolev_h(&Field::zeros(g), -1.0).is_err());
    }
}
