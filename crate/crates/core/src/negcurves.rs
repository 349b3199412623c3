//! Enumeration of the (−2)-curve classes of a hyperbolic lattice.
//!
//! A Vinberg-style search: fix the positive direction `P` from a diagonalization,
//! sweep the slices `{v : (P·v) = const}` in increasing order, and keep each root
//! pairing nonnegatively with everything kept on earlier slices. The sweep stops
//! once every facet of the cone spanned by the kept roots is negative semidefinite.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::cones::{self, cone_from_generators};
use crate::error::{Error, Result};
use crate::lattice::{Diagonalization, Lattice};
use crate::quadric::affine_quadric_points;
use crate::vector::{DivisorClass, IntVector};

/// Default number of positive slices searched before giving up.
pub const DEFAULT_SLICE_CAP: usize = 200;

/// The functional measuring the first diagonal coordinate.
///
/// `y₁(v) = (u · v) · step`, where `u` is primitive and `step > 0`.
#[derive(Clone, Debug)]
pub struct SliceFrame {
    pub u: IntVector,
    pub step: BigRational,
}

impl SliceFrame {
    pub fn new(lattice: &Lattice, diag: &Diagonalization) -> Result<Self> {
        check_sign_pattern(diag)?;
        let p = diag.basis.row(0);
        let w = lattice.dual_functional(&p);
        let lambda = w.content();
        let u = w.primitive();
        // v · P = y₁ · Dg₁₁ and v · P = λ (u · v).
        let step = BigRational::new(BigInt::from(lambda), BigInt::from(diag.dg[0]));
        Ok(SliceFrame { u, step })
    }

    /// The integer level `u · v` of slice `t`, if that slice can hold lattice points.
    pub fn level(&self, t: &BigRational) -> Option<i64> {
        let c = t / &self.step;
        c.is_integer().then(|| c.to_integer().try_into().ok()).flatten()
    }
}

fn check_sign_pattern(diag: &Diagonalization) -> Result<()> {
    if diag.dg.is_empty() || diag.dg[0] <= 0 || diag.dg[1..].iter().any(|&x| x >= 0) {
        return Err(Error::Invariant("diagonal form must have sign pattern (+, -, …, -)".into()));
    }
    Ok(())
}

/// Integer `v` with `square(v) = −2` whose first diagonal coordinate equals `t`.
pub fn pts(lattice: &Lattice, diag: &Diagonalization, t: &BigRational) -> Result<Vec<DivisorClass>> {
    let frame = SliceFrame::new(lattice, diag)?;
    match frame.level(t) {
        Some(c) => affine_quadric_points(lattice, &frame.u, c, -2),
        None => Ok(Vec::new()),
    }
}

/// Positive roots with respect to `h` that are not a sum of two positive roots.
pub fn simple_roots(lattice: &Lattice, roots: &[DivisorClass], h: &DivisorClass) -> Result<Vec<DivisorClass>> {
    let mut positive = Vec::new();
    for r in roots {
        match lattice.pair(h, r) {
            0 => return Err(Error::OrthogonalRoot(r.clone())),
            x if x > 0 => positive.push(r.clone()),
            _ => {}
        }
    }
    positive.sort();
    positive.dedup();
    let simple = positive
        .iter()
        .filter(|r| {
            !positive
                .iter()
                .any(|p| p != *r && positive.binary_search(&(*r - p)).is_ok())
        })
        .cloned()
        .collect();
    Ok(simple)
}

/// First nonnegative integer combination of `roots`, in graded order, that pairs
/// nonzero with every root.
pub fn auxiliary_class(lattice: &Lattice, roots: &[DivisorClass]) -> Result<DivisorClass> {
    let mut sorted = roots.to_vec();
    sorted.sort();
    let k = sorted.len();
    for degree in 1..=(2 * k + 2) as i64 {
        let mut found = None;
        for_each_composition(k, degree, &mut |coeffs| {
            let h = coeffs
                .iter()
                .zip(&sorted)
                .fold(IntVector::zeros(lattice.rank()), |acc, (&a, r)| acc.add_scaled(a, r));
            if sorted.iter().all(|r| lattice.pair(&h, r) != 0) {
                found = Some(h);
                return true;
            }
            false
        });
        if let Some(h) = found {
            return Ok(h);
        }
    }
    Err(Error::OrthogonalRoot(sorted[0].clone()))
}

/// Visit the compositions of `total` into `k` nonnegative parts, lexicographically
/// descending; stops early when `visit` returns true.
fn for_each_composition(k: usize, total: i64, visit: &mut impl FnMut(&[i64]) -> bool) {
    fn rec(prefix: &mut Vec<i64>, k: usize, left: i64, visit: &mut impl FnMut(&[i64]) -> bool) -> bool {
        if prefix.len() + 1 == k {
            prefix.push(left);
            let stop = visit(prefix);
            prefix.pop();
            return stop;
        }
        for a in (0..=left).rev() {
            prefix.push(a);
            let stop = rec(prefix, k, left - a, visit);
            prefix.pop();
            if stop {
                return true;
            }
        }
        false
    }
    if k > 0 {
        rec(&mut Vec::with_capacity(k), k, total, visit);
    }
}

/// Every facet of `cone(vs)` carries a negative semidefinite subset of `vs`.
///
/// Lower-dimensional cones fail the test.
pub fn cone_test(lattice: &Lattice, vs: &[DivisorClass]) -> Result<bool> {
    if vs.is_empty() {
        return Ok(false);
    }
    let cone = cone_from_generators(lattice.rank(), vs)?;
    if !cone.is_full_dimensional() {
        return Ok(false);
    }
    Ok(cone.facets.iter().all(|f| {
        let on: Vec<IntVector> = vs.iter().filter(|v| f.dot(v) == 0).cloned().collect();
        cones::is_negative_semidefinite(lattice, &on)
    }))
}

/// The (−2)-curve classes for the chamber selected by the diagonalization.
pub fn find_neg_curves(lattice: &Lattice) -> Result<Vec<DivisorClass>> {
    find_neg_curves_with_cap(lattice, DEFAULT_SLICE_CAP)
}

pub fn find_neg_curves_with_cap(lattice: &Lattice, cap: usize) -> Result<Vec<DivisorClass>> {
    let diag = lattice.diagonalize()?;
    let frame = SliceFrame::new(lattice, &diag)?;
    let level0 = affine_quadric_points(lattice, &frame.u, 0, -2)?;
    let mut found = if level0.len() >= 2 {
        let h = auxiliary_class(lattice, &level0)?;
        simple_roots(lattice, &level0, &h)?
    } else {
        level0
    };
    for level in 1..=cap as i64 {
        let slice = affine_quadric_points(lattice, &frame.u, level, -2)?;
        let accepted: Vec<IntVector> = slice
            .into_iter()
            .filter(|v| found.iter().all(|w| lattice.pair(v, w) >= 0))
            .collect();
        if accepted.is_empty() {
            continue;
        }
        found.extend(accepted);
        if cone_test(lattice, &found)? {
            found.sort();
            return Ok(found);
        }
    }
    Err(Error::FinitenessNotCertified { slices: cap })
}

/// Is there a bijection `s1 → s2` preserving all pairwise pairings?
pub fn match_curve_sets(lattice: &Lattice, s1: &[DivisorClass], s2: &[DivisorClass]) -> bool {
    if s1.len() != s2.len() {
        return false;
    }
    let g1 = lattice.gram_of(s1);
    let g2 = lattice.gram_of(s2);
    let mut used = vec![false; s2.len()];
    let mut image = Vec::with_capacity(s1.len());
    extend_matching(&g1, &g2, &mut used, &mut image)
}

fn extend_matching(g1: &[Vec<i64>], g2: &[Vec<i64>], used: &mut [bool], image: &mut Vec<usize>) -> bool {
    let i = image.len();
    if i == g1.len() {
        return true;
    }
    for j in 0..g2.len() {
        if used[j] || g1[i][i] != g2[j][j] {
            continue;
        }
        if (0..i).any(|k| g1[i][k] != g2[j][image[k]]) {
            continue;
        }
        used[j] = true;
        image.push(j);
        if extend_matching(g1, g2, used, image) {
            return true;
        }
        image.pop();
        used[j] = false;
    }
    false
}

/// Rational `t` as a convenience for callers of [`pts`].
pub fn slice(num: i64, den: i64) -> BigRational {
    assert!(!den.is_zero());
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s1() -> Lattice {
        Lattice::from_rows(&[vec![6, 0, 0], vec![0, -2, 0], vec![0, 0, -2]]).unwrap()
    }

    fn vs(x: &[[i64; 3]]) -> Vec<IntVector> {
        x.iter().map(|&c| IntVector::from(c)).collect()
    }

    #[test]
    fn s1_slices() {
        let l = s1();
        let d = l.diagonalize().unwrap();
        assert_eq!(pts(&l, &d, &slice(0, 1)).unwrap(), vs(&[[0, -1, 0], [0, 0, -1], [0, 0, 1], [0, 1, 0]]));
        assert_eq!(pts(&l, &d, &slice(1, 1)).unwrap(), vs(&[[1, -2, 0], [1, 0, -2], [1, 0, 2], [1, 2, 0]]));
        assert!(pts(&l, &d, &slice(1, 2)).unwrap().is_empty());
        let bad = Diagonalization { dg: vec![-2, 6, -2], basis: d.basis.clone() };
        assert!(matches!(pts(&l, &bad, &slice(0, 1)), Err(Error::Invariant(_))));
    }

    #[test]
    fn simple_roots_of_a1_squared() {
        let l = s1();
        let roots = vs(&[[0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]]);
        let h = IntVector::from([0, -1, -1]);
        assert_eq!(simple_roots(&l, &roots, &h).unwrap(), vs(&[[0, 0, 1], [0, 1, 0]]));
        let pair = vs(&[[0, 1, 0], [0, -1, 0]]);
        assert_eq!(simple_roots(&l, &pair, &h).unwrap(), vs(&[[0, 1, 0]]));
        assert!(simple_roots(&l, &[], &h).unwrap().is_empty());
        assert!(matches!(
            simple_roots(&l, &roots, &IntVector::from([0, -1, 0])),
            Err(Error::OrthogonalRoot(_))
        ));
    }

    #[test]
    fn a2_simple_roots_exclude_sums() {
        let l = Lattice::from_rows(&[vec![4, 0, 0], vec![0, -2, 1], vec![0, 1, -2]]).unwrap();
        let d = l.diagonalize().unwrap();
        let roots = pts(&l, &d, &slice(0, 1)).unwrap();
        assert_eq!(roots.len(), 6);
        let h = auxiliary_class(&l, &roots).unwrap();
        let simple = simple_roots(&l, &roots, &h).unwrap();
        assert_eq!(simple.len(), 2);
        assert_eq!(l.pair(&simple[0], &simple[1]), 1);
    }

    #[test]
    fn stopping_test() {
        let l = s1();
        let e = vs(&[[0, 1, 0], [0, 0, 1], [1, -2, 0], [1, 0, -2], [2, -3, -2], [2, -2, -3]]);
        assert!(cone_test(&l, &e).unwrap());
        assert!(!cone_test(&l, &e[..2]).unwrap());
        assert!(!cone_test(&l, &e[..4]).unwrap());
    }

    #[test]
    fn s1_curves() {
        let l = s1();
        let found = find_neg_curves(&l).unwrap();
        let e = vs(&[[0, 1, 0], [0, 0, 1], [1, -2, 0], [1, 0, -2], [2, -3, -2], [2, -2, -3]]);
        assert_eq!(found.len(), 6);
        assert!(match_curve_sets(&l, &found, &e));
        assert_eq!(find_neg_curves(&l).unwrap(), found);
    }

    #[test]
    fn matching() {
        let l = s1();
        let e = vs(&[[0, 1, 0], [0, 0, 1], [1, -2, 0]]);
        let mut r = e.clone();
        r.reverse();
        assert!(match_curve_sets(&l, &e, &e));
        assert!(match_curve_sets(&l, &e, &r));
        assert!(!match_curve_sets(&l, &e, &e[..2]));
        assert!(!match_curve_sets(&l, &e, &vs(&[[0, 1, 0], [0, 0, 1], [2, -3, -2]])));
    }

    #[test]
    fn slice_cap_is_reported() {
        assert_eq!(
            find_neg_curves_with_cap(&s1(), 1),
            Err(Error::FinitenessNotCertified { slices: 1 })
        );
    }
}
