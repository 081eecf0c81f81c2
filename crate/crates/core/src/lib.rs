//! Numerical verification of frequency-restricted dispersive estimates for
//! the Klein-Gordon equation `(-d_tt + lap - m^2) phi = 0`.
//!
//! The crate evolves data exactly by Fourier multipliers on a periodic box,
//! measures hyperboloidal energies and weighted sup-norms on slices
//! `t^2 - |x|^2 = tau^2`, splits data with Littlewood-Paley projectors and a
//! lattice partition of unity, and reports empirical constants and decay
//! exponents for each estimate.

// Negated float comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod decay;
pub mod error;
pub mod hyperboloid;
pub mod lp;
pub mod profile;
pub mod propagator;
pub mod spectral;
pub mod suite;

pub use error::{Error, Result};
pub use hyperboloid::{EnergyReport, HyperboloidSlice};
pub use lp::{LPBank, SpatialPartition};
pub use propagator::{CauchyData, EvolvedState, Propagator};
pub use spectral::{Field, Grid, SobolevOrder, SpectralField};
