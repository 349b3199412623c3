//! Certificates that a degree is needed in every generating set.
//!
//! If every way of writing `D` through other degrees forces a curve, or the
//! meeting point of two curves, into the base locus while `|D|` is base point
//! free, then `D` must carry a generator of its own. A plain dimension count
//! covers the remaining case where the products span too little of `H⁰(D)`.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::arith::IntMatrix;
use crate::cones;
use crate::error::{Error, Result};
use crate::lattice;
use crate::linsys::K3Surface;
use crate::vector::{DivisorClass, IntVector};

/// Nonnegative combinations of fixed columns, bounded by a grading positive on all of them.
struct Combinations {
    cols: Vec<IntVector>,
    grading: IntVector,
    weights: Vec<i128>,
}

impl Combinations {
    fn new(n: usize, cols: Vec<IntVector>) -> Result<Self> {
        if cols.iter().any(IntVector::is_zero) {
            return Err(Error::Unbounded);
        }
        let grading = if cols.is_empty() { IntVector::zeros(n) } else { positive_grading(n, &cols)? };
        let weights = cols.iter().map(|c| grading.dot(c)).collect();
        Ok(Combinations { cols, grading, weights })
    }

    /// Calls `f` on every coefficient vector over the columns in `allowed` summing to `v`.
    fn walk<F>(&self, v: &IntVector, allowed: &[usize], f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[i64]) -> ControlFlow<()>,
    {
        let mut coeffs = vec![0i64; self.cols.len()];
        if allowed.is_empty() {
            return if v.is_zero() { f(&coeffs) } else { ControlFlow::Continue(()) };
        }
        let grade = self.grading.dot(v);
        if grade < 0 {
            return ControlFlow::Continue(());
        }
        // Cones of the column suffixes: a remainder outside them cannot be completed.
        let suffixes: Vec<cones::RationalCone> = (0..allowed.len())
            .map(|i| {
                let cols: Vec<IntVector> = allowed[i..].iter().map(|&j| self.cols[j].clone()).collect();
                cones::cone_from_generators(v.len(), &cols).expect("columns span a pointed cone")
            })
            .collect();
        self.step(allowed, &suffixes, v.clone(), grade, &mut coeffs, f)
    }

    fn step<F>(
        &self,
        allowed: &[usize],
        suffixes: &[cones::RationalCone],
        rest: IntVector,
        grade: i128,
        coeffs: &mut Vec<i64>,
        f: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[i64]) -> ControlFlow<()>,
    {
        if grade == 0 {
            return if rest.is_zero() { f(coeffs) } else { ControlFlow::Continue(()) };
        }
        let Some((&j, later)) = allowed.split_first() else {
            return ControlFlow::Continue(());
        };
        if !suffixes[0].contains(&rest) {
            return ControlFlow::Continue(());
        }
        if later.is_empty() {
            // The last column must absorb the remainder exactly.
            if grade % self.weights[j] == 0 {
                let k = (grade / self.weights[j]) as i64;
                if self.cols[j].scaled(k) == rest {
                    coeffs[j] = k;
                    let r = f(coeffs);
                    coeffs[j] = 0;
                    return r;
                }
            }
            return ControlFlow::Continue(());
        }
        let max = (grade / self.weights[j]) as i64;
        let mut r = rest;
        for k in 0..=max {
            coeffs[j] = k;
            let flow = self.step(later, &suffixes[1..], r.clone(), grade - k as i128 * self.weights[j], coeffs, f);
            if flow.is_break() {
                coeffs[j] = 0;
                return flow;
            }
            r = &r - &self.cols[j];
        }
        coeffs[j] = 0;
        ControlFlow::Continue(())
    }

    fn exists(&self, v: &IntVector, allowed: &[usize]) -> bool {
        self.walk(v, allowed, &mut |_| ControlFlow::Break(())).is_break()
    }
}

/// All `w ≥ 0` with `M w = v`. The columns must span a pointed cone and be nonzero.
pub fn nonneg_solutions(m: &IntMatrix, v: &IntVector) -> Result<Vec<IntVector>> {
    if v.len() != m.nrows() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: v.len() });
    }
    let comb = Combinations::new(m.nrows(), (0..m.ncols()).map(|j| m.col(j)).collect())?;
    let all: Vec<usize> = (0..m.ncols()).collect();
    let mut out = Vec::new();
    let _ = comb.walk(v, &all, &mut |c| {
        out.push(IntVector::from(c));
        ControlFlow::Continue(())
    });
    out.sort();
    Ok(out)
}

/// A functional positive on every column; `Unbounded` if the columns span no pointed cone.
fn positive_grading(n: usize, cols: &[IntVector]) -> Result<IntVector> {
    let cone = match cones::cone_from_generators(n, cols) {
        Err(Error::NotPointed) => return Err(Error::Unbounded),
        other => other?,
    };
    let mut g = IntVector::zeros(n);
    for f in &cone.facets {
        g = &g + f;
    }
    if cols.iter().all(|c| g.dot(c) > 0) {
        return Ok(g);
    }
    // A lower-dimensional cone may have no facet positive on some ray.
    let r = cone.rays.iter().fold(IntVector::zeros(n), |acc, r| &acc + r);
    if cols.iter().all(|c| r.dot(c) > 0) {
        return Ok(r);
    }
    Err(Error::Unbounded)
}

/// The degrees usable in a writing of `D`, and the writings themselves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Writings {
    /// `w ∈ G` with `w ≠ D` and `D − w` effective.
    pub summands: Vec<DivisorClass>,
    /// Coefficient vectors over `summands`.
    pub combinations: Vec<IntVector>,
}

fn summands(s: &K3Surface, d: &DivisorClass, g: &[DivisorClass]) -> Vec<DivisorClass> {
    let mut out: Vec<DivisorClass> = g.iter().filter(|w| *w != d && s.is_effective(&(d - *w))).cloned().collect();
    out.sort();
    out.dedup();
    out
}

pub fn writings(s: &K3Surface, d: &DivisorClass, g: &[DivisorClass]) -> Result<Writings> {
    let summands = summands(s, d, g);
    if summands.is_empty() {
        return Ok(Writings { summands, combinations: Vec::new() });
    }
    let m = IntMatrix::from_vectors(&summands)?.transpose();
    let combinations = nonneg_solutions(&m, d)?;
    Ok(Writings { summands, combinations })
}

/// `D = E₁ + E₂ + E₃` for curves with `|D|` base point free and `h¹(Eᵢ + Eⱼ) = 0`.
pub fn lemma_l2_applies(s: &K3Surface, e1: &DivisorClass, e2: &DivisorClass, e3: &DivisorClass, d: &DivisorClass) -> bool {
    let es = [e1, e2, e3];
    if !es.iter().all(|e| s.neg().contains(e)) || &(&(e1 + e2) + e3) != d {
        return false;
    }
    if !matches!(s.is_bpf(d), Ok(true)) {
        return false;
    }
    (0..3).all(|i| (i + 1..3).all(|j| s.h1(&(es[i] + es[j])) == 0))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalityEvidence {
    pub no_writings: bool,
    /// Curves used by every writing.
    pub b1: Vec<DivisorClass>,
    /// Meeting curves, one of which every writing uses.
    pub b2: Vec<(DivisorClass, DivisorClass)>,
    /// Curve triples with `D` as their sum, one of which every writing uses.
    pub b3: Vec<[DivisorClass; 3]>,
    /// `(bound, h⁰(D))` when the products of all writings span at most `bound < h⁰(D)` dimensions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<(u64, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalityVerdict {
    pub degree: DivisorClass,
    /// `true` certifies necessity; `false` is inconclusive.
    pub necessary: bool,
    pub evidence: MinimalityEvidence,
}

pub fn is_minimal_degree(s: &K3Surface, d: &DivisorClass, g: &[DivisorClass]) -> Result<MinimalityVerdict> {
    if !g.contains(d) {
        return Err(Error::Precondition(format!("{d} is not among the given degrees")));
    }
    let sg = summands(s, d, g);
    let comb = Combinations::new(s.rank(), sg.clone())?;
    let all: Vec<usize> = (0..sg.len()).collect();
    let mut ev = MinimalityEvidence::default();
    let verdict = |necessary, evidence| Ok(MinimalityVerdict { degree: d.clone(), necessary, evidence });
    if !comb.exists(d, &all) {
        ev.no_writings = true;
        return verdict(true, ev);
    }

    if s.is_nef(d) && matches!(s.is_bpf(d), Ok(true)) {
        let curves: Vec<usize> = all.iter().copied().filter(|&i| s.neg().contains(&sg[i])).collect();
        // Every writing uses one of `idx` iff none avoids them all.
        let every = |idx: &[usize]| {
            let rest: Vec<usize> = all.iter().copied().filter(|i| !idx.contains(i)).collect();
            !comb.exists(d, &rest)
        };
        ev.b1 = curves.iter().filter(|&&i| every(&[i])).map(|&i| sg[i].clone()).collect();
        for (p, &i) in curves.iter().enumerate() {
            for &j in &curves[p + 1..] {
                if s.pair(&sg[i], &sg[j]) > 0 && every(&[i, j]) {
                    ev.b2.push((sg[i].clone(), sg[j].clone()));
                }
            }
        }
        for (p, &i) in curves.iter().enumerate() {
            for (q, &j) in curves.iter().enumerate().skip(p + 1) {
                for &k in &curves[q + 1..] {
                    if lemma_l2_applies(s, &sg[i], &sg[j], &sg[k], d) && every(&[i, j, k]) {
                        ev.b3.push([sg[i].clone(), sg[j].clone(), sg[k].clone()]);
                    }
                }
            }
        }
        if !(ev.b1.is_empty() && ev.b2.is_empty() && ev.b3.is_empty()) {
            return verdict(true, ev);
        }
    }

    let h0 = s.h0(d);
    let dims: Vec<u64> = sg.iter().map(|w| s.h0(w)).collect();
    let mut bound = 0u64;
    let flow = comb.walk(d, &all, &mut |c| {
        let span = c
            .iter()
            .zip(&dims)
            .filter(|(k, _)| **k > 0)
            .fold(1u64, |acc, (&k, &h)| acc.saturating_mul(symmetric_power_dim(h, k as u64)));
        bound = bound.saturating_add(span);
        if bound >= h0 {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    if flow.is_continue() {
        ev.dimension = Some((bound, h0));
        return verdict(true, ev);
    }
    verdict(false, ev)
}

/// `dim Sym^k` of an `h`-dimensional space, saturating at `u64::MAX`.
fn symmetric_power_dim(h: u64, k: u64) -> u64 {
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (h as u128 + i) / (i + 1);
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// True iff `E` is a curve moved by `ι` with `3A − E` effective, nef and base point free.
pub fn lemma_l1_eliminates(s: &K3Surface, a: &DivisorClass, e: &DivisorClass, iota: &IntMatrix) -> Result<bool> {
    if !s.is_nef(a) {
        return Err(Error::Precondition(format!("{a} is not nef")));
    }
    if s.sq(a) != 2 {
        return Err(Error::Precondition(format!("{a} does not have square 2")));
    }
    if !s.is_bpf(a)? {
        return Err(Error::Precondition(format!("|{a}| has base points")));
    }
    s.check_involution(iota, a)?;
    if !s.neg().contains(e) || lattice::apply(iota, e) == *e {
        return Ok(false);
    }
    let rest = &a.scaled(3) - e;
    Ok(s.is_effective(&rest) && s.is_nef(&rest) && !rest.is_zero() && s.is_bpf(&rest)?)
}
