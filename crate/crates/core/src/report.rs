//! One-call analysis of a lattice record and comparison against its expected tables.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::coxgen::{self, GenOptions, GeneratorSet, Provenance, WitnessPool};
use crate::database::LatticeRecord;
use crate::error::Result;
use crate::linsys::K3Surface;
use crate::minimal::{self, MinimalityVerdict};
use crate::negcurves;
use crate::vector::DivisorClass;

/// Which parts of the analysis to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stages {
    pub curves: bool,
    pub cones: bool,
    pub generators: bool,
    pub minimality: bool,
}

impl Stages {
    pub const ALL: Stages = Stages { curves: true, cones: true, generators: true, minimality: true };
    pub const NONE: Stages = Stages { curves: false, cones: false, generators: false, minimality: false };
}

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    pub stages: Stages,
    pub use_l1: bool,
    pub derive_involutions: bool,
    pub pool: WitnessPool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { stages: Stages::ALL, use_l1: true, derive_involutions: true, pool: WitnessPool::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeData {
    pub e: Vec<DivisorClass>,
    pub beff: Vec<DivisorClass>,
    pub n: Vec<DivisorClass>,
    pub bnef: Vec<DivisorClass>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorReport {
    pub lattice: String,
    /// Whether the curves were read from the record or searched for.
    pub curves_provenance: Provenance,
    /// Output of the curve search, when run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curves: Option<Vec<DivisorClass>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cones: Option<ConeData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<GeneratorSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minimality: Option<Vec<MinimalityVerdict>>,
    /// Wall time per stage in microseconds.
    #[serde(default)]
    pub timing_us: BTreeMap<String, u64>,
}

fn timed<T>(timing: &mut BTreeMap<String, u64>, key: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let t = Instant::now();
    let out = f()?;
    timing.insert(key.to_string(), t.elapsed().as_micros() as u64);
    Ok(out)
}

pub fn analyze(rec: &LatticeRecord, opts: &AnalysisOptions) -> Result<GeneratorReport> {
    let mut timing = BTreeMap::new();
    let lattice = rec.lattice()?;
    let st = opts.stages;

    let searched = match (&rec.neg_curves, st.curves) {
        (Some(_), false) => None,
        _ => Some(timed(&mut timing, "curves", || negcurves::find_neg_curves(&lattice))?),
    };
    let (neg, curves_provenance) = match &rec.neg_curves {
        Some(n) => (n.clone(), Provenance::Stored),
        None => (searched.clone().expect("searched when absent"), Provenance::Computed),
    };
    let s = K3Surface::new(lattice, neg, None)?;

    let cones = if st.cones {
        Some(timed(&mut timing, "cones", || {
            Ok(ConeData {
                e: s.neg().to_vec(),
                beff: s.beff().to_vec(),
                n: s.nef_cone().rays.clone(),
                bnef: s.bnef().to_vec(),
            })
        })?)
    } else {
        None
    };

    let generators = if st.generators || st.minimality {
        Some(timed(&mut timing, "generators", || generator_set(rec, &s, opts))?)
    } else {
        None
    };

    let minimality = match (&generators, st.minimality) {
        (Some(g), true) => Some(timed(&mut timing, "minimality", || {
            g.degrees
                .iter()
                .filter(|d| !s.neg().contains(d))
                .map(|d| minimal::is_minimal_degree(&s, d, &g.degrees))
                .collect::<Result<Vec<_>>>()
        })?),
        _ => None,
    };

    Ok(GeneratorReport {
        lattice: rec.name.clone(),
        curves_provenance,
        curves: if st.curves { searched } else { None },
        cones,
        generators: if st.generators { generators } else { None },
        minimality,
        timing_us: timing,
    })
}

/// The stored answer for flagged records, otherwise the computed pipeline.
pub fn generator_set(rec: &LatticeRecord, s: &K3Surface, opts: &AnalysisOptions) -> Result<GeneratorSet> {
    if rec.stored_answer {
        if let Some(exp) = &rec.expected_generators {
            let degrees: Vec<DivisorClass> = exp.iter().map(|d| d.class.clone()).collect();
            return Ok(coxgen::stored_generators(&degrees));
        }
    }
    let gen_opts = GenOptions {
        pool: opts.pool,
        involutions: rec.involution_matrices()?,
        use_l1: opts.use_l1,
        derive_involutions: opts.derive_involutions,
    };
    coxgen::generators(s, &gen_opts)
}

/// A field whose computed value differs from the record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub field: String,
    pub missing: Vec<DivisorClass>,
    pub extra: Vec<DivisorClass>,
}

/// Set difference both ways; with `ordered` the lists must also agree entry by entry.
fn diff(field: &str, expected: &[DivisorClass], got: &[DivisorClass], tolerated: &[DivisorClass], ordered: bool) -> Option<Mismatch> {
    let missing: Vec<DivisorClass> = expected.iter().filter(|d| !got.contains(d)).cloned().collect();
    let extra: Vec<DivisorClass> =
        got.iter().filter(|d| !expected.contains(d) && !tolerated.contains(d)).cloned().collect();
    let misordered = ordered && expected != got;
    (misordered || !missing.is_empty() || !extra.is_empty()).then(|| Mismatch { field: field.into(), missing, extra })
}

/// Compares every computed field that the record also lists. Empty means agreement.
///
/// Generator degrees flagged l1-unresolved are tolerated when the record omits them.
pub fn verify(rec: &LatticeRecord, report: &GeneratorReport) -> Result<Vec<Mismatch>> {
    let mut out = Vec::new();
    if let (Some(found), Some(expected)) = (&report.curves, &rec.neg_curves) {
        if !negcurves::match_curve_sets(&rec.lattice()?, found, expected) {
            out.push(Mismatch { field: "curves".into(), missing: expected.clone(), extra: found.clone() });
        }
    }
    if let Some(c) = &report.cones {
        let pairs = [("beff", &rec.expected_beff, &c.beff), ("n", &rec.expected_n, &c.n), ("bnef", &rec.expected_bnef, &c.bnef)];
        for (field, expected, got) in pairs {
            if let Some(expected) = expected {
                out.extend(diff(field, expected, got, &[], true));
            }
        }
    }
    if let (Some(g), Some(expected)) = (&report.generators, &rec.expected_generators) {
        let expected: Vec<DivisorClass> = expected.iter().map(|d| d.class.clone()).collect();
        out.extend(diff("generators", &expected, &g.degrees, &g.l1_unresolved, false));
    }
    Ok(out)
}
