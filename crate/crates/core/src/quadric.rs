//! Lattice points on an affine slice of a quadric.
//!
//! Finds every integer `v` with `u · v = c` and `vᵀ Q v = target` when the form is
//! negative definite on `ker u`. The slice is parametrized as `v = v0 + K z` with
//! `z ∈ Z^{n-1}`, the square is completed, and the resulting ellipsoid is walked
//! coordinate by coordinate (Fincke–Pohst) with exact rational bounds.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::vector::IntVector;

/// All integer `v` with `u · v = c` (standard dot product) and `square(v) = target`.
pub fn affine_quadric_points(
    lattice: &Lattice,
    u: &IntVector,
    c: i64,
    target: i64,
) -> Result<Vec<IntVector>> {
    let n = lattice.rank();
    if u.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: u.len() });
    }
    let (g, basis) = arith::unimodular_column_reduction(u)?;
    if g == 0 {
        return Err(Error::Precondition("slice functional is zero".into()));
    }
    if c % g != 0 {
        return Ok(Vec::new());
    }
    let v0 = basis.col(0).scaled(c / g);
    let k: Vec<IntVector> = (1..n).map(|j| basis.col(j)).collect();
    let m = k.len();
    if m == 0 {
        return Ok(if lattice.sq(&v0) == target { vec![v0] } else { Vec::new() });
    }

    // zᵀ N z - 2 b·z = r0 with N = -Kᵀ Q K.
    let r = |x: i64| arith::rat(x);
    let nmat: Vec<Vec<BigRational>> =
        k.iter().map(|a| k.iter().map(|b| r(-lattice.pair(a, b))).collect()).collect();
    let b: Vec<BigRational> = k.iter().map(|a| r(lattice.pair(a, &v0))).collect();
    let r0 = r(lattice.sq(&v0)) - r(target);

    let (d, mu) = fincke_pohst_form(&nmat)
        .ok_or_else(|| Error::Precondition("form is not negative definite on the slice".into()))?;
    let center = solve_spd(&nmat, &b);
    let bound = r0 + b.iter().zip(&center).map(|(x, y)| x * y).sum::<BigRational>();
    if bound.is_negative() {
        return Ok(Vec::new());
    }

    let mut out = Vec::new();
    let mut z = vec![BigInt::zero(); m];
    let walker = Walker { d: &d, mu: &mu, center: &center };
    walker.descend(m, bound, &mut z, &mut |z: &[BigInt]| {
        let mut v = v0.clone();
        for (zi, ki) in z.iter().zip(&k) {
            let zi = arith::to_i64(zi).expect("slice coordinate overflow");
            v = v.add_scaled(zi, ki);
        }
        if lattice.sq(&v) == target {
            out.push(v);
        }
    });
    out.sort();
    Ok(out)
}

struct Walker<'a> {
    d: &'a [BigRational],
    mu: &'a [Vec<BigRational>],
    center: &'a [BigRational],
}

impl Walker<'_> {
    /// Fix coordinates `i-1, …, 0` given coordinates `i..m` in `z`.
    fn descend(&self, i: usize, remaining: BigRational, z: &mut Vec<BigInt>, emit: &mut impl FnMut(&[BigInt])) {
        if i == 0 {
            emit(z);
            return;
        }
        let i = i - 1;
        let m = z.len();
        let mut c = self.center[i].clone();
        for j in i + 1..m {
            c -= &self.mu[i][j] * (BigRational::from_integer(z[j].clone()) - &self.center[j]);
        }
        let s = arith::isqrt_floor(&(&remaining / &self.d[i]));
        let base = arith::floor(&c);
        let lo: BigInt = &base - &s - 1;
        let hi: BigInt = &base + &s + 1;
        let mut x = lo;
        while x <= hi {
            let dev = BigRational::from_integer(x.clone()) - &c;
            let used = &self.d[i] * &dev * &dev;
            if used <= remaining {
                z[i] = x.clone();
                self.descend(i, &remaining - used, z, emit);
            }
            x += 1;
        }
        z[i] = BigInt::zero();
    }
}

/// `N(x) = Σ d_i (x_i + Σ_{j>i} μ_ij x_j)²`; `None` unless `N` is positive definite.
fn fincke_pohst_form(n: &[Vec<BigRational>]) -> Option<(Vec<BigRational>, Vec<Vec<BigRational>>)> {
    let m = n.len();
    let mut q: Vec<Vec<BigRational>> = n.to_vec();
    for i in 0..m {
        if !q[i][i].is_positive() {
            return None;
        }
        for j in i + 1..m {
            q[j][i] = q[i][j].clone();
            q[i][j] = &q[i][j] / &q[i][i];
        }
        for k in i + 1..m {
            for l in k..m {
                let t = &q[k][i] * &q[i][l];
                q[k][l] -= t;
            }
        }
    }
    let d = (0..m).map(|i| q[i][i].clone()).collect();
    let mu = (0..m)
        .map(|i| (0..m).map(|j| if j > i { q[i][j].clone() } else { BigRational::zero() }).collect())
        .collect();
    Some((d, mu))
}

/// Solve `N x = b` for a nonsingular rational `N` by Gauss–Jordan elimination.
fn solve_spd(n: &[Vec<BigRational>], b: &[BigRational]) -> Vec<BigRational> {
    let m = n.len();
    let rows: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            let mut r = n[i].clone();
            r.push(b[i].clone());
            r
        })
        .collect();
    let (red, _) = arith::rref(&rows);
    red.iter().map(|r| r[m].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(l: &Lattice, u: &IntVector, c: i64, target: i64, r: i64) -> Vec<IntVector> {
        let mut out = Vec::new();
        for a in -r..=r {
            for b in -r..=r {
                for cc in -r..=r {
                    let v = IntVector::from([a, b, cc]);
                    if v.dot(u) == c as i128 && l.sq(&v) == target {
                        out.push(v);
                    }
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn s1_levels() {
        let l = Lattice::from_rows(&[vec![6, 0, 0], vec![0, -2, 0], vec![0, 0, -2]]).unwrap();
        let u = IntVector::from([1, 0, 0]);
        let pts = affine_quadric_points(&l, &u, 1, -2).unwrap();
        let expected: Vec<IntVector> =
            vec![[1, -2, 0], [1, 0, -2], [1, 0, 2], [1, 2, 0]].into_iter().map(IntVector::from).collect();
        assert_eq!(pts, expected);
        assert_eq!(affine_quadric_points(&l, &u, 0, -2).unwrap().len(), 4);
        assert!(affine_quadric_points(&l, &IntVector::from([2, 0, 0]), 1, -2).unwrap().is_empty());
    }

    #[test]
    fn indefinite_slice_is_rejected() {
        let l = Lattice::from_rows(&[vec![6, 0, 0], vec![0, -2, 0], vec![0, 0, -2]]).unwrap();
        assert!(affine_quadric_points(&l, &IntVector::from([0, 1, 0]), 0, -2).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn matches_box_search(
            a in 1i64..8, e in 1i64..4, f in 1i64..4,
            b in -2i64..=2, cc in -2i64..=2, d in -1i64..=1,
            level in 0i64..4, target in prop::sample::select(vec![-2i64, 0, 2]),
        ) {
            let rows = vec![vec![2 * a, b, cc], vec![b, -2 * e, d], vec![cc, d, -2 * f]];
            let Ok(l) = Lattice::from_rows(&rows) else { return Ok(()); };
            if l.signature() != (1, 2) { return Ok(()); }
            let dg = l.diagonalize().unwrap();
            let u = l.dual_functional(&dg.basis.row(0)).primitive();
            let fast = affine_quadric_points(&l, &u, level, target).unwrap();
            for v in &fast {
                prop_assert_eq!(v.dot(&u), level as i128);
                prop_assert_eq!(l.sq(v), target);
            }
            let r = fast.iter().flat_map(|v| v.iter().map(|x| x.abs())).max().unwrap_or(0).max(12);
            prop_assert_eq!(fast, brute(&l, &u, level, target, r));
        }
    }
}
