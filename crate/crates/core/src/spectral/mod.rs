//! Periodic grid, discrete Fourier transform, spectral differentiation and
//! the norms the decay statements are phrased in.

mod field;
mod grid;
mod norms;
mod transform;

pub use field::{Field, SpectralField};
pub use grid::{Grid, SobolevOrder};
pub use norms::{derivatives_up_to, l1_norm, multi_indices, sobolev_h, sobolev_w_k1, Norms};
pub use transform::{
    forward_transform, inverse_transform, laplacian, partial, partial_spectral, spatial_derivative,
};
