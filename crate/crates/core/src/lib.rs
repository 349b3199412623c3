//! Exact lattice computations for K3 surfaces of small Picard rank: (−2)-curves,
//! effective and nef cones with their Hilbert bases, cohomology of divisor
//! classes, and the degrees of a generating set of the Cox ring.

pub mod arith;
pub mod cones;
pub mod coxgen;
pub mod database;
pub mod error;
pub mod lattice;
pub mod linsys;
pub mod minimal;
pub mod negcurves;
pub mod quadric;
pub mod report;
pub mod vector;

pub use arith::IntMatrix;
pub use cones::RationalCone;
pub use coxgen::{DegreeVerdict, GenOptions, GeneratorSet, Provenance, Status, Tier, WitnessPool};
pub use database::{ExpectedDegree, LatticeRecord};
pub use error::{Error, Result};
pub use lattice::Lattice;
pub use linsys::{Cohomology, K3Surface};
pub use minimal::MinimalityVerdict;
pub use report::{AnalysisOptions, GeneratorReport, Mismatch, Stages};
pub use vector::{DivisorClass, IntVector};
