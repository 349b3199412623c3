//! Shared fixtures for the benchmarks.

use k3cox_core::coxgen::GenOptions;
use k3cox_core::database::{self, LatticeRecord};
use k3cox_core::K3Surface;

pub fn record(name: &str) -> &'static LatticeRecord {
    database::find(name).expect("bundled lattice")
}

/// A fresh surface, so no cached cohomology carries over between iterations.
pub fn surface(name: &str) -> K3Surface {
    K3Surface::from_record(record(name)).expect("bundled record builds a surface")
}

pub fn gen_options(name: &str) -> GenOptions {
    GenOptions {
        involutions: record(name).involution_matrices().expect("valid involutions"),
        use_l1: true,
        derive_involutions: true,
        ..Default::default()
    }
}
