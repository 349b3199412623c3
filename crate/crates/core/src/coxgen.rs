//! Candidate generator degrees of the Cox ring and the six elimination tests.
//!
//! A nef degree `D` needs no new generator when some vanishing statement shows
//! that the multiplication maps from lower degrees already fill `H⁰(D)`. The
//! candidates are the sums of at most three nef Hilbert basis elements plus
//! `2(F + F′)` for pairs of elliptic classes with `F · F′ = 2`.

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::IntMatrix;
use crate::error::{Error, Result};
use crate::lattice;
use crate::linsys::K3Surface;
use crate::minimal;
use crate::vector::{DivisorClass, IntVector};

/// How a candidate degree arises. Ordered from cheapest to most composite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tier {
    NegCurve,
    Hb,
    Sum2,
    Sum3,
    #[serde(rename = "special-2FF'")]
    Special,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestId {
    Test1,
    Test2,
    Test3,
    Test4,
    Test5,
    Test6,
    /// Elimination of `3A` through a covering involution.
    L1,
}

impl std::fmt::Display for TestId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TestId::Test1 => "test1",
            TestId::Test2 => "test2",
            TestId::Test3 => "test3",
            TestId::Test4 => "test4",
            TestId::Test5 => "test5",
            TestId::Test6 => "test6",
            TestId::L1 => "l1",
        };
        f.write_str(s)
    }
}

/// The classes that make an elimination replayable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// `h¹(D − A − B) = 0` with `A`, `B` disjoint.
    Pair { a: DivisorClass, b: DivisorClass },
    /// `h¹(D − Eᵢ − Eⱼ) = 0` for all pairs and `h²(D − E₁ − E₂ − E₃) = 0`.
    Triple { e1: DivisorClass, e2: DivisorClass, e3: DivisorClass },
    /// `D = A + B` with surjective multiplication `H⁰(A) ⊗ H⁰(B) → H⁰(D)`.
    Split { a: DivisorClass, b: DivisorClass },
    /// `D = k A` on a ray generated in lower degree.
    Multiple { base: DivisorClass, k: i64 },
    /// `D = F + D′`, `F = E₁ + E₂`, image of codimension two.
    Fibre { f: DivisorClass, d_prime: DivisorClass, e1: DivisorClass, e2: DivisorClass },
    /// `D = 3A`, `E` a curve moved by the involution.
    Involution { a: DivisorClass, e: DivisorClass },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Status {
    Kept,
    /// A `3A` degree with `A² = 2` that no supplied involution removes.
    #[serde(rename = "kept (l1-unresolved)")]
    KeptL1Unresolved,
    Eliminated { test: TestId, witness: Witness },
}

impl Status {
    pub fn is_kept(&self) -> bool {
        !matches!(self, Status::Eliminated { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeVerdict {
    pub degree: DivisorClass,
    pub tier: Tier,
    #[serde(flatten)]
    pub status: Status,
}

/// Which classes may serve as Koszul witnesses for a degree `D`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessPool {
    /// Curves and nef basis elements `w ≠ D` with `D − w` effective.
    #[default]
    Effective,
    /// Every curve and nef basis element other than `D`.
    Unrestricted,
}

#[derive(Clone, Debug, Default)]
pub struct GenOptions {
    pub pool: WitnessPool,
    /// Involutions for the `3A` elimination; `use_l1 = false` ignores them.
    pub involutions: Vec<IntMatrix>,
    pub use_l1: bool,
    /// Also use the covering involution `x ↦ (x · A) A − x` of an ample `A` with `A² = 2`.
    pub derive_involutions: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Computed,
    Stored,
}

/// Outcome of the generator pipeline: the degree set and how each candidate fared.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSet {
    pub provenance: Provenance,
    /// Kept degrees, sorted.
    pub degrees: Vec<DivisorClass>,
    /// Kept degrees carrying the l1-unresolved flag.
    pub l1_unresolved: Vec<DivisorClass>,
    /// One verdict per curve and candidate, sorted by degree. Empty for stored answers.
    pub verdicts: Vec<DegreeVerdict>,
}

/// `T1`, `T2`, `T3`, `T4` over the whole of `E(X) ∪ BNef`, without the per-degree pool filter.
#[derive(Clone, Debug)]
pub struct TSets {
    pub t1: Vec<(DivisorClass, DivisorClass)>,
    pub t2: Vec<[DivisorClass; 3]>,
    pub t3: Vec<(DivisorClass, DivisorClass)>,
    pub t4: Vec<DivisorClass>,
}

/// Precomputed data shared by all candidate checks on one surface.
pub struct Context<'a> {
    s: &'a K3Surface,
    pool: WitnessPool,
    /// Curves first, then nef basis elements; the flag marks nef members.
    members: Vec<(DivisorClass, bool)>,
    /// Nef basis members failing base point freeness are unusable as witnesses.
    usable: Vec<bool>,
    bnef_bpf: HashMap<DivisorClass, bool>,
    sums2: HashSet<DivisorClass>,
    t3: BTreeMap<DivisorClass, (DivisorClass, DivisorClass)>,
    t4: BTreeMap<DivisorClass, Witness>,
}

impl<'a> Context<'a> {
    pub fn new(s: &'a K3Surface, pool: WitnessPool) -> Result<Self> {
        let bnef = s.bnef();
        let mut bnef_bpf = HashMap::new();
        for b in bnef {
            bnef_bpf.insert(b.clone(), s.is_bpf(b)?);
        }
        let mut members: Vec<(DivisorClass, bool)> = s.neg().iter().map(|c| (c.clone(), false)).collect();
        members.extend(bnef.iter().map(|b| (b.clone(), true)));
        let usable = members.iter().map(|(m, nef)| !nef || bnef_bpf[m]).collect();

        let mut sums2 = HashSet::new();
        for (i, a) in bnef.iter().enumerate() {
            for b in &bnef[i..] {
                sums2.insert(a + b);
            }
        }

        let mut t3 = BTreeMap::new();
        for a in bnef {
            for b in bnef {
                if ottem_holds(s, a, b, bnef_bpf[b]) {
                    t3.entry(a + b).or_insert_with(|| (a.clone(), b.clone()));
                }
            }
        }

        let mut t4 = BTreeMap::new();
        for a in bnef {
            let sq = s.sq(a);
            if sq != 2 {
                t4.entry(a.scaled(3)).or_insert(Witness::Multiple { base: a.clone(), k: 3 });
            }
            if sq == 0 || sq == 2 || !s.is_hyperelliptic(a)? {
                t4.entry(a.scaled(2)).or_insert(Witness::Multiple { base: a.clone(), k: 2 });
            }
        }

        Ok(Context { s, pool, members, usable, bnef_bpf, sums2, t3, t4 })
    }

    pub fn t_sets(&self) -> TSets {
        let s = self.s;
        let idx: Vec<usize> = (0..self.members.len()).filter(|&i| self.usable[i]).collect();
        let mut t1 = Vec::new();
        for (p, &i) in idx.iter().enumerate() {
            for &j in &idx[p..] {
                if self.t1_pair(i, j) {
                    t1.push((self.members[i].0.clone(), self.members[j].0.clone()));
                }
            }
        }
        let mut t2 = Vec::new();
        for (p, &i) in idx.iter().enumerate() {
            for (q, &j) in idx.iter().enumerate().skip(p + 1) {
                for &k in &idx[q + 1..] {
                    if self.members[k].1 {
                        t2.push([self.members[i].0.clone(), self.members[j].0.clone(), self.members[k].0.clone()]);
                    }
                }
            }
        }
        let t3 = s
            .bnef()
            .iter()
            .flat_map(|a| s.bnef().iter().map(move |b| (a.clone(), b.clone())))
            .filter(|(a, b)| ottem_holds(s, a, b, self.bnef_bpf[b]))
            .collect();
        TSets { t1, t2, t3, t4: self.t4.keys().cloned().collect() }
    }

    /// `A · B = 0`, with `A = B` only for an isotropic nef class.
    fn t1_pair(&self, i: usize, j: usize) -> bool {
        let (a, a_nef) = &self.members[i];
        let b = &self.members[j].0;
        if i == j {
            return *a_nef && self.s.sq(a) == 0;
        }
        self.s.pair(a, b) == 0
    }

    fn pool_for(&self, d: &DivisorClass) -> Vec<usize> {
        (0..self.members.len())
            .filter(|&i| self.usable[i])
            .filter(|&i| {
                let w = &self.members[i].0;
                w != d && (self.pool == WitnessPool::Unrestricted || self.s.is_effective(&(d - w)))
            })
            .collect()
    }

    pub fn test1(&self, d: &DivisorClass) -> Option<Witness> {
        let pool = self.pool_for(d);
        for (p, &i) in pool.iter().enumerate() {
            for &j in &pool[p..] {
                if !self.t1_pair(i, j) {
                    continue;
                }
                let (a, b) = (&self.members[i].0, &self.members[j].0);
                if self.s.h1(&(&(d - a) - b)) == 0 {
                    return Some(Witness::Pair { a: a.clone(), b: b.clone() });
                }
            }
        }
        None
    }

    pub fn test2(&self, d: &DivisorClass) -> Option<Witness> {
        let pool = self.pool_for(d);
        let m = pool.len();
        let mut good = vec![vec![false; m]; m];
        for p in 0..m {
            for q in p + 1..m {
                let (a, b) = (&self.members[pool[p]].0, &self.members[pool[q]].0);
                let v = self.s.h1(&(&(d - a) - b)) == 0;
                good[p][q] = v;
                good[q][p] = v;
            }
        }
        for p in 0..m {
            for q in p + 1..m {
                if !good[p][q] {
                    continue;
                }
                for r in q + 1..m {
                    if !(good[p][r] && good[q][r]) {
                        continue;
                    }
                    let [e1, e2, e3] = [pool[p], pool[q], pool[r]].map(|i| &self.members[i]);
                    if !(e1.1 || e2.1 || e3.1) {
                        continue;
                    }
                    let rest = &(&(d - &e1.0) - &e2.0) - &e3.0;
                    if self.s.h2(&rest) == 0 {
                        // Put a nef member last, matching `E₃ ∉ E(X)`.
                        let mut t = [e1, e2, e3];
                        t.sort_by_key(|(_, nef)| *nef);
                        return Some(Witness::Triple { e1: t[0].0.clone(), e2: t[1].0.clone(), e3: t[2].0.clone() });
                    }
                }
            }
        }
        None
    }

    pub fn test3(&self, d: &DivisorClass) -> Option<Witness> {
        self.t3.get(d).map(|(a, b)| Witness::Split { a: a.clone(), b: b.clone() })
    }

    pub fn test4(&self, d: &DivisorClass) -> Option<Witness> {
        self.t4.get(d).cloned()
    }

    pub fn test5(&self, d: &DivisorClass) -> Result<Option<Witness>> {
        let s = self.s;
        for f in s.bnef() {
            if s.sq(f) != 0 {
                continue;
            }
            let dp = d - f;
            if !self.bnef_bpf.contains_key(&dp) || !s.is_very_ample(&dp)? {
                continue;
            }
            for (i, e1) in s.neg().iter().enumerate() {
                for e2 in &s.neg()[i + 1..] {
                    if &(e1 + e2) != f {
                        continue;
                    }
                    let image = s.h0(&(d - e1)) + s.h0(&(d - e2)) - s.h0(&dp);
                    if s.h0(d) == image + 2 {
                        return Ok(Some(Witness::Fibre { f: f.clone(), d_prime: dp, e1: e1.clone(), e2: e2.clone() }));
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn test6(&self, d: &DivisorClass) -> Option<Witness> {
        for b in self.s.bnef() {
            let a = d - b;
            if self.sums2.contains(&a) && ottem_holds(self.s, &a, b, self.bnef_bpf[b]) {
                return Some(Witness::Split { a, b: b.clone() });
            }
        }
        None
    }

    /// Runs the tests in the order 4, 1, 3, 2, 5, 6 and stops at the first elimination.
    pub fn check(&self, d: &DivisorClass) -> Result<Status> {
        if d.is_zero() || !self.s.is_nef(d) {
            return Err(Error::Precondition(format!("{d} must be a nonzero nef class")));
        }
        let found = [
            (TestId::Test4, self.test4(d)),
            (TestId::Test1, self.test1(d)),
            (TestId::Test3, self.test3(d)),
        ]
        .into_iter()
        .find_map(|(t, w)| w.map(|w| (t, w)));
        if let Some((test, witness)) = found {
            return Ok(Status::Eliminated { test, witness });
        }
        if let Some(witness) = self.test2(d) {
            return Ok(Status::Eliminated { test: TestId::Test2, witness });
        }
        if let Some(witness) = self.test5(d)? {
            return Ok(Status::Eliminated { test: TestId::Test5, witness });
        }
        if let Some(witness) = self.test6(d) {
            return Ok(Status::Eliminated { test: TestId::Test6, witness });
        }
        Ok(Status::Kept)
    }
}

/// `h¹(A − B) = h¹(A) = h⁰(2B − A) = 0` and `|B|` base point free.
fn ottem_holds(s: &K3Surface, a: &DivisorClass, b: &DivisorClass, b_bpf: bool) -> bool {
    b_bpf && s.h1(&(a - b)) == 0 && s.h1(a) == 0 && s.h0(&(&b.scaled(2) - a)) == 0
}

pub fn t_sets(s: &K3Surface) -> Result<TSets> {
    Ok(Context::new(s, WitnessPool::Effective)?.t_sets())
}

/// Unordered pairs of distinct elliptic classes with `F · F′ = 2`.
pub fn special_pairs(s: &K3Surface) -> Vec<(DivisorClass, DivisorClass)> {
    let ell = s.elliptic_classes();
    let mut out = Vec::new();
    for (i, f) in ell.iter().enumerate() {
        for g in &ell[i + 1..] {
            if s.pair(f, g) == 2 {
                out.push((f.clone(), g.clone()));
            }
        }
    }
    out
}

/// Sums of one to three nef basis elements and the special degrees, each with its lowest tier.
pub fn candidate_degrees(s: &K3Surface) -> Vec<(DivisorClass, Tier)> {
    let b = s.bnef();
    let mut out: BTreeMap<DivisorClass, Tier> = BTreeMap::new();
    let mut add = |d: DivisorClass, t: Tier| {
        let e = out.entry(d).or_insert(t);
        *e = (*e).min(t);
    };
    for (i, x) in b.iter().enumerate() {
        add(x.clone(), Tier::Hb);
        for (j, y) in b.iter().enumerate().skip(i) {
            let xy = x + y;
            for z in &b[j..] {
                add(&xy + z, Tier::Sum3);
            }
            add(xy, Tier::Sum2);
        }
    }
    for (f, g) in special_pairs(s) {
        add((&f + &g).scaled(2), Tier::Special);
    }
    out.into_iter().collect()
}

/// The generator degrees: curves plus every candidate surviving the tests.
pub fn generators(s: &K3Surface, opts: &GenOptions) -> Result<GeneratorSet> {
    let ctx = Context::new(s, opts.pool)?;
    let involutions: &[IntMatrix] = if opts.use_l1 { &opts.involutions } else { &[] };
    for iota in involutions {
        if !s.lattice().is_isometry(iota)? {
            return Err(Error::InvalidInvolution("not an isometry".into()));
        }
        if iota.checked_mul(iota)? != IntMatrix::identity(s.rank()) {
            return Err(Error::InvalidInvolution("not of order two".into()));
        }
    }

    let cands = candidate_degrees(s);
    let checked: Vec<DegreeVerdict> = cands
        .par_iter()
        .map(|(d, tier)| {
            let mut status = ctx.check(d)?;
            if status == Status::Kept {
                status = resolve_triple(s, d, involutions, opts.use_l1 && opts.derive_involutions)?;
            }
            Ok(DegreeVerdict { degree: d.clone(), tier: *tier, status })
        })
        .collect::<Result<_>>()?;

    let mut verdicts: Vec<DegreeVerdict> = s
        .neg()
        .iter()
        .map(|c| DegreeVerdict { degree: c.clone(), tier: Tier::NegCurve, status: Status::Kept })
        .collect();
    verdicts.extend(checked);
    verdicts.sort_by(|a, b| a.degree.cmp(&b.degree));
    let degrees = verdicts.iter().filter(|v| v.status.is_kept()).map(|v| v.degree.clone()).collect();
    let l1_unresolved = verdicts
        .iter()
        .filter(|v| v.status == Status::KeptL1Unresolved)
        .map(|v| v.degree.clone())
        .collect();
    Ok(GeneratorSet { provenance: Provenance::Computed, degrees, l1_unresolved, verdicts })
}

/// A kept `3A` with `A² = 2` is removed by an involution fixing `A`, or flagged.
fn resolve_triple(s: &K3Surface, d: &DivisorClass, involutions: &[IntMatrix], derive: bool) -> Result<Status> {
    let Some(a) = third(d) else { return Ok(Status::Kept) };
    if s.sq(&a) != 2 || !s.bnef().contains(&a) {
        return Ok(Status::Kept);
    }
    let mut usable: Vec<IntMatrix> = involutions.iter().filter(|m| lattice::apply(m, &a) == a).cloned().collect();
    if derive && s.neg().iter().all(|e| s.pair(&a, e) > 0) {
        usable.push(covering_involution(s, &a)?);
    }
    for iota in &usable {
        for e in s.neg() {
            if minimal::lemma_l1_eliminates(s, &a, e, iota)? {
                return Ok(Status::Eliminated {
                    test: TestId::L1,
                    witness: Witness::Involution { a: a.clone(), e: e.clone() },
                });
            }
        }
    }
    Ok(Status::KeptL1Unresolved)
}

/// For ample `A` with `A² = 2` the double cover of the plane acts as `+1` on `A` and `−1` on `A^⊥`.
pub fn covering_involution(s: &K3Surface, a: &DivisorClass) -> Result<IntMatrix> {
    if s.sq(a) != 2 {
        return Err(Error::Precondition(format!("{a} does not have square 2")));
    }
    let n = s.rank();
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let e = IntVector::unit(n, i);
            (&a.scaled(s.pair(&e, a)) - &e).coords().to_vec()
        })
        .collect();
    IntMatrix::from_rows(&rows)
}

fn third(d: &DivisorClass) -> Option<IntVector> {
    d.iter().all(|x| x % 3 == 0).then(|| IntVector::new(d.iter().map(|x| x / 3).collect::<Vec<_>>()))
}

/// The stored answer of a record, for the two lattices whose rings are not computed here.
pub fn stored_generators(degrees: &[DivisorClass]) -> GeneratorSet {
    let mut degrees = degrees.to_vec();
    degrees.sort();
    degrees.dedup();
    GeneratorSet { provenance: Provenance::Stored, degrees, l1_unresolved: Vec::new(), verdicts: Vec::new() }
}
