//! Pointed rational polyhedral cones.
//!
//! A [`RationalCone`] stores both descriptions: primitive extreme rays and
//! primitive facet normals, each sorted lexicographically. Facets come from the
//! double description method applied to the generator inequalities; Hilbert
//! bases come from a pulling triangulation and the lattice points of each
//! simplicial cone's fundamental parallelepiped.

use std::collections::{BTreeSet, HashSet, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::vector::IntVector;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalCone {
    pub dim: usize,
    pub rays: Vec<IntVector>,
    pub facets: Vec<IntVector>,
    /// Linear equations cutting out the span when the cone is not full-dimensional.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub equations: Vec<IntVector>,
}

impl RationalCone {
    pub fn is_full_dimensional(&self) -> bool {
        self.equations.is_empty()
    }

    /// Dimension of the linear span of the cone.
    pub fn cone_dim(&self) -> usize {
        self.dim - self.equations.len()
    }

    pub fn contains(&self, v: &IntVector) -> bool {
        self.facets.iter().all(|f| f.dot(v) >= 0) && self.equations.iter().all(|e| e.dot(v) == 0)
    }

    /// True iff `v` lies in the relative interior.
    pub fn contains_strictly(&self, v: &IntVector) -> bool {
        self.facets.iter().all(|f| f.dot(v) > 0) && self.equations.iter().all(|e| e.dot(v) == 0)
    }

    /// The facets vanishing on `v`.
    pub fn tight_facets(&self, v: &IntVector) -> Vec<&IntVector> {
        self.facets.iter().filter(|f| f.dot(v) == 0).collect()
    }
}

/// Canonical cone generated by `gens`.
pub fn cone_from_generators(n: usize, gens: &[IntVector]) -> Result<RationalCone> {
    if gens.is_empty() {
        return Err(Error::Degenerate("no generators".into()));
    }
    if let Some(g) = gens.iter().find(|g| g.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: g.len() });
    }
    let prims: Vec<IntVector> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(IntVector::primitive)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let r = arith::rank(&prims);
    if r == 0 {
        return Err(Error::Degenerate("all generators are zero".into()));
    }
    if r == n {
        return full_dimensional(n, &prims);
    }

    // Work in the coordinates that are pivots of the span, then lift back.
    let rows: Vec<Vec<_>> = prims.iter().map(|v| v.iter().map(|&x| arith::rat(x)).collect()).collect();
    let (_, pivots) = arith::rref(&rows);
    let project = |v: &IntVector| IntVector::new(pivots.iter().map(|&p| v[p]).collect::<Vec<_>>());
    let projected: Vec<IntVector> = prims.iter().map(project).collect();
    let inner = full_dimensional(r, &projected)?;
    let lift = |f: &IntVector| {
        let mut out = IntVector::zeros(n);
        for (k, &p) in pivots.iter().enumerate() {
            out.coords_mut()[p] = f[k];
        }
        out
    };
    let mut facets: Vec<IntVector> = inner.facets.iter().map(lift).collect();
    facets.sort();
    let rays: Vec<IntVector> =
        prims.iter().filter(|g| inner.rays.contains(&project(g))).cloned().collect();
    let mut equations = arith::integer_kernel(&prims, n);
    equations.sort();
    Ok(RationalCone { dim: n, rays, facets, equations })
}

fn full_dimensional(n: usize, prims: &[IntVector]) -> Result<RationalCone> {
    let mut facets = extreme_rays_of_inequalities(n, prims)?;
    facets.sort();
    if arith::rank(&facets) < n {
        return Err(Error::NotPointed);
    }
    let rays: Vec<IntVector> = prims
        .iter()
        .filter(|g| {
            let tight: Vec<IntVector> = facets.iter().filter(|f| f.dot(g) == 0).cloned().collect();
            arith::rank(&tight) == n - 1
        })
        .cloned()
        .collect();
    Ok(RationalCone { dim: n, rays, facets, equations: Vec::new() })
}

#[derive(Clone)]
struct DdRay {
    v: IntVector,
    zeros: Bits,
}

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn is_superset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & b == *b)
    }
}

/// Extreme rays of `{y : a · y >= 0 for all a}` when the `a` have full rank.
///
/// Double description: start from the simplicial cone of `n` independent
/// inequalities and insert the rest one at a time, combining adjacent pairs of
/// rays on opposite sides. Adjacency is decided combinatorially from zero sets.
fn extreme_rays_of_inequalities(n: usize, ineqs: &[IntVector]) -> Result<Vec<IntVector>> {
    let m = ineqs.len();
    let mut basis: Vec<usize> = Vec::new();
    for (i, a) in ineqs.iter().enumerate() {
        let mut trial: Vec<IntVector> = basis.iter().map(|&j| ineqs[j].clone()).collect();
        trial.push(a.clone());
        if arith::rank(&trial) > basis.len() {
            basis.push(i);
            if basis.len() == n {
                break;
            }
        }
    }
    if basis.len() < n {
        return Err(Error::Degenerate("inequalities do not have full rank".into()));
    }

    let a0: Vec<IntVector> = basis.iter().map(|&j| ineqs[j].clone()).collect();
    let adj = arith::adjugate(&a0);
    let det_sign = if arith::determinant(&a0) > num_bigint::BigInt::from(0) { 1 } else { -1 };
    let mut rays: Vec<DdRay> = (0..n)
        .map(|j| {
            let col: Vec<num_rational::BigRational> = (0..n)
                .map(|i| num_rational::BigRational::from_integer(&adj[i][j] * det_sign))
                .collect();
            let v = arith::rational_to_primitive(&col);
            let mut zeros = Bits::new(m);
            for (k, &b) in basis.iter().enumerate() {
                if k != j {
                    zeros.set(b);
                }
            }
            DdRay { v, zeros }
        })
        .collect();

    for (idx, a) in ineqs.iter().enumerate() {
        if basis.contains(&idx) {
            continue;
        }
        let vals: Vec<i128> = rays.iter().map(|r| a.dot(&r.v)).collect();
        let mut next: Vec<DdRay> = Vec::new();
        for (r, &s) in rays.iter().zip(&vals) {
            if s > 0 {
                next.push(r.clone());
            } else if s == 0 {
                let mut r = r.clone();
                r.zeros.set(idx);
                next.push(r);
            }
        }
        for (i, p) in rays.iter().enumerate() {
            if vals[i] <= 0 {
                continue;
            }
            for (j, q) in rays.iter().enumerate() {
                if vals[j] >= 0 {
                    continue;
                }
                let common = p.zeros.and(&q.zeros);
                if (common.count() as usize) + 2 < n {
                    continue;
                }
                let blocked = rays
                    .iter()
                    .enumerate()
                    .any(|(k, r)| k != i && k != j && r.zeros.is_superset_of(&common));
                if blocked {
                    continue;
                }
                let (sp, sq) = (vals[i], vals[j]);
                let combo: Vec<i128> = (0..n)
                    .map(|c| sp * q.v[c] as i128 - sq * p.v[c] as i128)
                    .collect();
                let g = combo.iter().fold(0i128, |g, &x| num_integer::Integer::gcd(&g, &x));
                let v = combo
                    .iter()
                    .map(|&x| i64::try_from(x / g).map_err(|_| Error::Overflow))
                    .collect::<Result<Vec<_>>>()?;
                let mut zeros = common;
                zeros.set(idx);
                next.push(DdRay { v: IntVector::new(v), zeros });
            }
        }
        rays = next;
    }
    Ok(rays.into_iter().map(|r| r.v).collect())
}

/// `{y : y · x >= 0 for all x in C}` in the standard pairing.
pub fn dual_cone(c: &RationalCone) -> Result<RationalCone> {
    if !c.is_full_dimensional() {
        return Err(Error::NotPointed);
    }
    Ok(RationalCone { dim: c.dim, rays: c.facets.clone(), facets: c.rays.clone(), equations: Vec::new() })
}

/// Unique minimal generating set of the monoid `C ∩ Z^n`, sorted ascending.
pub fn hilbert_basis(c: &RationalCone) -> Result<Vec<IntVector>> {
    if !c.is_full_dimensional() {
        return Err(Error::Degenerate("Hilbert basis requires a full-dimensional cone".into()));
    }
    let n = c.dim;
    let simplices = triangulate(c);
    let mut candidates: BTreeSet<IntVector> = c.rays.iter().cloned().collect();
    let points: Vec<Vec<IntVector>> = simplices
        .par_iter()
        .map(|s| {
            let rays: Vec<IntVector> = s.iter().map(|&i| c.rays[i].clone()).collect();
            parallelepiped_points(n, &rays)
        })
        .collect::<Result<_>>()?;
    candidates.extend(points.into_iter().flatten().filter(|p| !p.is_zero()));

    let grading = c.facets.iter().fold(IntVector::zeros(n), |acc, f| &acc + f);
    let mut ordered: Vec<(i128, IntVector)> =
        candidates.into_iter().map(|x| (grading.dot(&x), x)).collect();
    ordered.sort();
    let mut kept: Vec<(i128, IntVector)> = Vec::new();
    for (deg, x) in ordered {
        let reducible = kept
            .iter()
            .take_while(|(d, _)| *d < deg)
            .any(|(_, h)| c.contains(&(&x - h)));
        if !reducible {
            kept.push((deg, x));
        }
    }
    let mut out: Vec<IntVector> = kept.into_iter().map(|(_, x)| x).collect();
    out.sort();
    Ok(out)
}

/// Pulling triangulation from the lexicographically least ray, as ray-index sets.
pub fn triangulate(c: &RationalCone) -> Vec<Vec<usize>> {
    let incidence: Vec<BTreeSet<usize>> = c
        .facets
        .iter()
        .map(|f| (0..c.rays.len()).filter(|&i| f.dot(&c.rays[i]) == 0).collect())
        .collect();
    let all: BTreeSet<usize> = (0..c.rays.len()).collect();
    let mut out = Vec::new();
    pull(&c.rays, &incidence, &all, c.dim, &mut Vec::new(), &mut out);
    for s in out.iter_mut() {
        s.sort();
    }
    out.sort();
    out
}

fn pull(
    rays: &[IntVector],
    incidence: &[BTreeSet<usize>],
    face: &BTreeSet<usize>,
    d: usize,
    apexes: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if face.len() == d {
        let mut s: Vec<usize> = apexes.clone();
        s.extend(face.iter().copied());
        out.push(s);
        return;
    }
    let apex = *face.iter().min_by(|&&a, &&b| rays[a].cmp(&rays[b])).expect("empty face");
    let mut subfaces: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for z in incidence {
        let s: BTreeSet<usize> = face.intersection(z).copied().collect();
        if s.len() == face.len() || s.contains(&apex) || s.len() + 1 < d {
            continue;
        }
        let vs: Vec<IntVector> = s.iter().map(|&i| rays[i].clone()).collect();
        if arith::rank(&vs) == d - 1 {
            subfaces.insert(s);
        }
    }
    apexes.push(apex);
    for s in &subfaces {
        pull(rays, incidence, s, d - 1, apexes, out);
    }
    apexes.pop();
}

/// Lattice points `Σ λ_i r_i` with all `λ_i ∈ [0, 1)` for linearly independent `r_i`.
fn parallelepiped_points(n: usize, rays: &[IntVector]) -> Result<Vec<IntVector>> {
    let det = arith::determinant(rays);
    let sign = if det < num_bigint::BigInt::from(0) { -1 } else { 1 };
    let den = arith::to_i64(&(&det * sign))?;
    let adj = arith::adjugate(rays);
    // λ(e_j) = row j of adj / det, stored as numerators modulo |det|.
    let gens: Vec<Vec<i64>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| arith::to_i64(&(&adj[j][i] * sign)).map(|x| x.rem_euclid(den)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let zero = vec![0i64; n];
    let mut seen: HashSet<Vec<i64>> = HashSet::from([zero.clone()]);
    let mut queue = VecDeque::from([zero]);
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y: Vec<i64> = x.iter().zip(g).map(|(a, b)| (a + b) % den).collect();
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.into_iter()
        .map(|lam| {
            let coords = (0..n)
                .map(|c| {
                    let s: i128 = lam.iter().zip(rays).map(|(&l, r)| l as i128 * r[c] as i128).sum();
                    debug_assert_eq!(s % den as i128, 0);
                    i64::try_from(s / den as i128).map_err(|_| Error::Overflow)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(IntVector::new(coords))
        })
        .collect()
}

/// True iff the Gram matrix of `vs` has no positive eigenvalue.
pub fn is_negative_semidefinite(lattice: &Lattice, vs: &[IntVector]) -> bool {
    let g: Vec<Vec<_>> = vs
        .iter()
        .map(|a| vs.iter().map(|b| arith::rat(-lattice.pair(a, b))).collect())
        .collect();
    arith::is_positive_semidefinite(&g)
}
