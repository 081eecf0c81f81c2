//! Dyadic frequency projectors and the lattice partition of unity used to
//! localize data in physical space.

mod bank;
mod partition;

pub use bank::{low_pass, mother_bump, LPBank};
pub use partition::{Comparability, SpatialPartition};
