//! Integer symmetric bilinear forms.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::arith::{self, IntMatrix};
use crate::error::{Error, Result};
use crate::vector::IntVector;

/// A nondegenerate integral symmetric bilinear form on `Z^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    gram: IntMatrix,
}

/// Diagonal form `dg = B Q Bᵀ` with integer `B` whose rows are primitive.
///
/// The first entry of `dg` is the unique positive one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagonalization {
    pub dg: Vec<i64>,
    pub basis: IntMatrix,
}

impl Lattice {
    /// Symmetric with nonzero determinant. The signature is not checked here.
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::DimensionMismatch { expected: gram.nrows(), found: gram.ncols() });
        }
        if !gram.is_symmetric() {
            return Err(Error::Invariant("Gram matrix is not symmetric".into()));
        }
        if gram.determinant().is_zero() {
            return Err(Error::Invariant("Gram matrix is degenerate".into()));
        }
        Ok(Lattice { gram })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(IntMatrix::from_rows(rows)?)
    }

    /// Like [`Lattice::new`] and additionally requires signature `(1, n-1)`.
    pub fn hyperbolic(gram: IntMatrix) -> Result<Self> {
        let l = Self::new(gram)?;
        let (p, m) = l.signature();
        if p != 1 || m + 1 != l.rank() {
            return Err(Error::Invariant(format!("signature ({p}, {m}) is not (1, {})", l.rank() - 1)));
        }
        Ok(l)
    }

    pub fn rank(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram.get(i, i) % 2 == 0)
    }

    fn check_len(&self, v: &IntVector) -> Result<()> {
        if v.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), found: v.len() });
        }
        Ok(())
    }

    /// `uᵀ Q v`.
    pub fn pairing(&self, u: &IntVector, v: &IntVector) -> Result<i64> {
        self.check_len(u)?;
        self.check_len(v)?;
        i64::try_from(self.pair_wide(u, v)).map_err(|_| Error::Overflow)
    }

    pub fn square(&self, v: &IntVector) -> Result<i64> {
        self.pairing(v, v)
    }

    /// Unchecked pairing for internal hot loops. Panics on a length mismatch.
    pub fn pair(&self, u: &IntVector, v: &IntVector) -> i64 {
        i64::try_from(self.pair_wide(u, v)).expect("pairing overflow")
    }

    pub fn sq(&self, v: &IntVector) -> i64 {
        self.pair(v, v)
    }

    fn pair_wide(&self, u: &IntVector, v: &IntVector) -> i128 {
        let n = self.rank();
        assert!(u.len() == n && v.len() == n, "vector length does not match lattice rank");
        let mut s = 0i128;
        for i in 0..n {
            if u[i] == 0 {
                continue;
            }
            let row: i128 = (0..n).map(|j| self.gram.get(i, j) as i128 * v[j] as i128).sum();
            s += u[i] as i128 * row;
        }
        s
    }

    /// `Q v`, the functional `x ↦ x · v` in standard coordinates.
    pub fn dual_functional(&self, v: &IntVector) -> IntVector {
        self.gram.mul_vec(v).expect("dual functional overflow")
    }

    pub fn gram_of(&self, vs: &[IntVector]) -> Vec<Vec<i64>> {
        vs.iter().map(|a| vs.iter().map(|b| self.pair(a, b)).collect()).collect()
    }

    /// Numbers of positive and negative eigenvalues.
    pub fn signature(&self) -> (usize, usize) {
        let n = self.rank();
        let d = congruence_diagonal(&self.gram).0;
        let p = d.iter().filter(|x| x.is_positive()).count();
        (p, n - p - d.iter().filter(|x| x.is_zero()).count())
    }

    /// Rational congruence diagonalization, normalized to integer primitive rows.
    pub fn diagonalize(&self) -> Result<Diagonalization> {
        let n = self.rank();
        let (d, b) = congruence_diagonal(&self.gram);
        let positives: Vec<usize> = (0..n).filter(|&i| d[i].is_positive()).collect();
        if positives.len() != 1 || d.iter().any(|x| x.is_zero()) {
            return Err(Error::Invariant("form does not have signature (1, n-1)".into()));
        }
        let mut order: Vec<usize> = vec![positives[0]];
        order.extend((0..n).filter(|&i| i != positives[0]));
        let rows: Vec<IntVector> = order.iter().map(|&i| arith::rational_to_primitive(&b[i])).collect();
        let basis = IntMatrix::from_vectors(&rows)?;
        let dg: Vec<i64> = rows.iter().map(|r| self.pairing(r, r)).collect::<Result<_>>()?;
        Ok(Diagonalization { dg, basis })
    }

    /// True iff `M Q Mᵀ = Q`, i.e. the map sending `e_i` to row `i` of `M` preserves the form.
    pub fn is_isometry(&self, m: &IntMatrix) -> Result<bool> {
        let n = self.rank();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: m.nrows().max(m.ncols()) });
        }
        let mq = m.checked_mul(&self.gram)?;
        Ok(mq.checked_mul(&m.transpose())? == self.gram)
    }
}

/// Image of `v` under the map whose rows are the images of the basis vectors.
pub fn apply(m: &IntMatrix, v: &IntVector) -> IntVector {
    m.transpose().mul_vec(v).expect("isometry image overflow")
}

/// Symmetric Gaussian congruence. Returns the diagonal and the rows of `B`
/// (over `Q`) with `B Q Bᵀ` diagonal.
fn congruence_diagonal(q: &IntMatrix) -> (Vec<BigRational>, Vec<Vec<BigRational>>) {
    let n = q.nrows();
    let mut a: Vec<Vec<BigRational>> =
        (0..n).map(|i| (0..n).map(|j| arith::rat(q.get(i, j))).collect()).collect();
    let mut b: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| arith::rat((i == j) as i64)).collect())
        .collect();
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(k, j);
                for row in a.iter_mut() {
                    row.swap(k, j);
                }
                b.swap(k, j);
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // Basis mix e_k <- e_k + e_j; the new diagonal entry is 2 a_kj.
                for c in 0..n {
                    let x = a[j][c].clone();
                    a[k][c] += x;
                }
                for r in 0..n {
                    let x = a[r][j].clone();
                    a[r][k] += x;
                }
                for c in 0..n {
                    let x = b[j][c].clone();
                    b[k][c] += x;
                }
            } else {
                continue;
            }
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &a[k][k];
            for c in 0..n {
                let x = &f * &a[k][c];
                a[i][c] -= x;
            }
            for r in 0..n {
                let x = &f * &a[r][k];
                a[r][i] -= x;
            }
            for c in 0..n {
                let x = &f * &b[k][c];
                b[i][c] -= x;
            }
        }
    }
    ((0..n).map(|i| a[i][i].clone()).collect(), b)
}
