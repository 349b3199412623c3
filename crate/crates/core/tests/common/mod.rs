//! Independent reference computations for the integration tests.
//!
//! Nothing here calls the library's cone, Hilbert basis or `h⁰` code: membership
//! is decided by Carathéodory (solve over linearly independent subsets of the
//! generators), Hilbert bases by exhaustive search in a box, and `h⁰` by peeling
//! one curve at a time straight from the Gram matrix.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use k3cox_core::coxgen::{TestId, Witness};
use k3cox_core::{IntVector, K3Surface, Lattice, Status};

fn det(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => (0..m.len())
            .map(|j| {
                let minor: Vec<Vec<i128>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| *x).collect()).collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

/// Whether `p = Σ λᵢ gᵢ` with all `λᵢ ≥ 0` for linearly independent `gᵢ`, by Cramer's rule
/// on a nonsingular choice of rows followed by an exact integer check of all rows.
fn nonneg_solution(gens: &[&IntVector], p: &IntVector) -> bool {
    let n = p.len();
    let k = gens.len();
    let entry = |r: usize, c: usize| gens[c].coords()[r] as i128;
    for rows in subsets(n, k) {
        let a: Vec<Vec<i128>> = rows.iter().map(|&r| (0..k).map(|c| entry(r, c)).collect()).collect();
        let d = det(&a);
        if d == 0 {
            continue;
        }
        let nums: Vec<i128> = (0..k)
            .map(|c| {
                let mut ac = a.clone();
                for (i, &r) in rows.iter().enumerate() {
                    ac[i][c] = p.coords()[r] as i128;
                }
                det(&ac)
            })
            .collect();
        if nums.iter().any(|x| x * d.signum() < 0) {
            return false;
        }
        return (0..n).all(|r| (0..k).map(|c| nums[c] * entry(r, c)).sum::<i128>() == d * p.coords()[r] as i128);
    }
    false
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// `p ∈ cone(gens)` by Carathéodory's theorem.
pub fn cone_member(gens: &[IntVector], p: &IntVector) -> bool {
    if p.is_zero() {
        return true;
    }
    let dim = p.len().min(gens.len());
    (1..=dim).any(|k| {
        subsets(gens.len(), k).into_iter().any(|s| {
            let g: Vec<&IntVector> = s.iter().map(|&i| &gens[i]).collect();
            nonneg_solution(&g, p)
        })
    })
}

/// All vectors in `[0, hi]` coordinatewise.
fn boxed(hi: &[i64]) -> Vec<IntVector> {
    let mut out = vec![IntVector::zeros(0)];
    for &h in hi {
        out = out
            .into_iter()
            .flat_map(|v| (0..=h).map(move |x| IntVector::new([v.coords(), &[x]].concat())))
            .collect();
    }
    out
}

/// Checks a claimed Hilbert basis of `cone(gens)` for generators in the nonnegative orthant.
///
/// Every cone point of coordinate sum at most `bound` must be a nonnegative integer
/// combination of `hb`, and every element of `hb` must lie in the cone and split into
/// no two nonzero cone points.
pub fn check_hilbert_basis(gens: &[IntVector], hb: &[IntVector], bound: i64) -> Result<(), String> {
    let n = gens[0].len();
    let mut memo: HashMap<IntVector, bool> = HashMap::new();
    let mut member = |p: &IntVector| *memo.entry(p.clone()).or_insert_with(|| cone_member(gens, p));
    for h in hb {
        if h.iter().any(|&x| x < 0) || !member(h) || h.is_zero() {
            return Err(format!("{h} is not a nonzero point of the cone"));
        }
        for p in boxed(h.coords()) {
            if !p.is_zero() && &p != h && member(&p) && member(&(h - &p)) {
                return Err(format!("{h} = {p} + {}", h - &p));
            }
        }
    }
    // Cone points by increasing coordinate sum; each generated one is 0 or h + (generated).
    let mut pts: Vec<IntVector> =
        boxed(&vec![bound; n]).into_iter().filter(|p| p.iter().sum::<i64>() <= bound).collect();
    pts.sort_by_key(|p| p.iter().sum::<i64>());
    let mut generated: HashSet<IntVector> = HashSet::new();
    for p in pts {
        if !member(&p) {
            continue;
        }
        if p.is_zero() || hb.iter().any(|h| generated.contains(&(&p - h))) {
            generated.insert(p);
        } else {
            return Err(format!("{p} is not generated"));
        }
    }
    Ok(())
}

/// `h⁰` from the Gram matrix: strip curves one copy at a time, then Riemann–Roch on the nef part.
pub fn h0_oracle(l: &Lattice, neg: &[IntVector], ample: &IntVector, d: &IntVector) -> u64 {
    let mut d = d.clone();
    loop {
        if d.is_zero() {
            return 1;
        }
        if l.pair(&d, ample) < 0 {
            return 0;
        }
        match neg.iter().find(|c| l.pair(&d, c) < 0) {
            Some(c) => d = &d - c,
            None => break,
        }
    }
    let s = l.sq(&d);
    if s > 0 {
        2 + (s / 2) as u64
    } else {
        // A nonzero nef class of square zero is a multiple of an elliptic fibre.
        let k = d.iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
        k as u64 + 1
    }
}

pub fn h1_oracle(l: &Lattice, neg: &[IntVector], ample: &IntVector, d: &IntVector) -> i64 {
    let h0 = h0_oracle(l, neg, ample, d) as i64;
    let h2 = h0_oracle(l, neg, ample, &-d) as i64;
    h0 + h2 - 2 - l.sq(d) / 2
}

/// Cohomology of the surface's classes recomputed by the oracle.
struct Oracle<'a>(&'a K3Surface);

impl Oracle<'_> {
    fn h0(&self, d: &IntVector) -> i64 {
        h0_oracle(self.0.lattice(), self.0.neg(), self.0.ample(), d) as i64
    }
    fn h1(&self, d: &IntVector) -> i64 {
        h1_oracle(self.0.lattice(), self.0.neg(), self.0.ample(), d)
    }
    fn h2(&self, d: &IntVector) -> i64 {
        self.h0(&-d)
    }
}

/// Replays an elimination, with every cohomology number taken from the oracle.
///
/// Base point freeness, very ampleness and hyperellipticity still come from the surface.
pub fn replay(s: &K3Surface, d: &IntVector, st: &Status) -> Result<(), String> {
    let Status::Eliminated { test, witness } = st else { return Ok(()) };
    let o = Oracle(s);
    let ok = match (test, witness) {
        (TestId::Test1, Witness::Pair { a, b }) => {
            s.pair(a, b) == 0 && (a != b || s.sq(a) == 0) && o.h1(&(&(d - a) - b)) == 0 && a != d && b != d
        }
        (TestId::Test2, Witness::Triple { e1, e2, e3 }) => {
            let es = [e1, e2, e3];
            es.iter().any(|e| s.is_nef(e))
                && (0..3).all(|i| (i + 1..3).all(|j| es[i] != es[j] && o.h1(&(&(d - es[i]) - es[j])) == 0))
                && o.h2(&(&(&(d - e1) - e2) - e3)) == 0
        }
        (TestId::Test3 | TestId::Test6, Witness::Split { a, b }) => {
            &(a + b) == d
                && s.is_nef(a)
                && s.is_bpf(b).unwrap_or(false)
                && o.h1(&(a - b)) == 0
                && o.h1(a) == 0
                && o.h0(&(&b.scaled(2) - a)) == 0
        }
        (TestId::Test4, Witness::Multiple { base, k }) => {
            &base.scaled(*k) == d
                && match k {
                    3 => s.sq(base) != 2,
                    2 => s.sq(base) == 0 || s.sq(base) == 2 || !s.is_hyperelliptic(base).unwrap(),
                    _ => false,
                }
        }
        (TestId::Test5, Witness::Fibre { f, d_prime, e1, e2 }) => {
            &(f + d_prime) == d
                && &(e1 + e2) == f
                && s.sq(f) == 0
                && s.is_very_ample(d_prime).unwrap()
                && o.h0(d) + o.h0(d_prime) == o.h0(&(d - e1)) + o.h0(&(d - e2)) + 2
        }
        (TestId::L1, Witness::Involution { a, e }) => &a.scaled(3) == d && s.neg().contains(e) && s.sq(a) == 2,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(format!("{d}: {test} witness {witness:?} does not replay"))
    }
}

/// Inward facet normals of a full-dimensional cone in `Z³`: cross products of generator
/// pairs on which every generator is nonnegative (after a sign flip).
pub fn facets3(gens: &[IntVector]) -> Vec<[i128; 3]> {
    let g: Vec<[i128; 3]> = gens.iter().map(|v| [v[0] as i128, v[1] as i128, v[2] as i128]).collect();
    let mut out = Vec::new();
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            let (a, b) = (g[i], g[j]);
            let n = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
            if n == [0; 3] {
                continue;
            }
            let dots: Vec<i128> = g.iter().map(|v| v[0] * n[0] + v[1] * n[1] + v[2] * n[2]).collect();
            if dots.iter().all(|&d| d >= 0) {
                out.push(n);
            } else if dots.iter().all(|&d| d <= 0) {
                out.push([-n[0], -n[1], -n[2]]);
            }
        }
    }
    out
}

/// Whether `d` is a nonnegative combination of `parts`, by a memoized descent that keeps
/// every remainder inside the rank-3 cone spanned by `curves`.
pub fn has_writing(curves: &[IntVector], parts: &[IntVector], d: &IntVector) -> bool {
    let facets = facets3(curves);
    let inside = |v: &IntVector| facets.iter().all(|n| (0..3).map(|i| n[i] * v[i] as i128).sum::<i128>() >= 0);
    fn go(parts: &[IntVector], rem: &IntVector, inside: &dyn Fn(&IntVector) -> bool, seen: &mut HashMap<IntVector, bool>) -> bool {
        if rem.is_zero() {
            return true;
        }
        if let Some(&r) = seen.get(rem) {
            return r;
        }
        let found = parts.iter().any(|p| {
            let next = rem - p;
            inside(&next) && go(parts, &next, inside, seen)
        });
        seen.insert(rem.clone(), found);
        found
    }
    go(parts, d, &inside, &mut HashMap::new())
}
