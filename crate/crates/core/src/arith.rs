//! Exact integer and rational linear algebra on small dense matrices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::vector::IntVector;

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Build from rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(IntMatrix { rows: rows.len(), cols, data })
    }

    pub fn from_vectors(rows: &[IntVector]) -> Result<Self> {
        let rows: Vec<Vec<i64>> = rows.iter().map(|v| v.coords().to_vec()).collect();
        Self::from_rows(&rows)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: i64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> IntVector {
        IntVector::from_slice(&self.data[i * self.cols..(i + 1) * self.cols])
    }

    pub fn col(&self, j: usize) -> IntVector {
        IntVector::new((0..self.rows).map(|i| self.get(i, j)).collect::<Vec<_>>())
    }

    pub fn row_vectors(&self) -> Vec<IntVector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).coords().to_vec()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn checked_mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let s: i128 = (0..self.cols)
                    .map(|k| self.get(i, k) as i128 * other.get(k, j) as i128)
                    .sum();
                out.set(i, j, i64::try_from(s).map_err(|_| Error::Overflow)?);
            }
        }
        Ok(out)
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &IntVector) -> Result<IntVector> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        (0..self.rows)
            .map(|i| {
                let s: i128 = (0..self.cols).map(|k| self.get(i, k) as i128 * v[k] as i128).sum();
                i64::try_from(s).map_err(|_| Error::Overflow)
            })
            .collect::<Result<Vec<_>>>()
            .map(IntVector::new)
    }

    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square());
        determinant(&self.row_vectors())
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.row_vectors()).finish()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.row_vectors().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

pub fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

pub fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

pub fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or(Error::Overflow)
}

/// Floor and ceiling of a rational number.
pub fn floor(x: &BigRational) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil(x: &BigRational) -> BigInt {
    x.ceil().to_integer()
}

/// Largest integer `s` with `s * s <= x` for a nonnegative rational `x`.
pub fn isqrt_floor(x: &BigRational) -> BigInt {
    if !x.is_positive() {
        return BigInt::zero();
    }
    let mut s = floor(x).sqrt();
    while BigRational::from_integer(&s + 1u32) * BigRational::from_integer(&s + 1u32) <= *x {
        s += 1u32;
    }
    s
}

/// Reduced row echelon form over Q; returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[Vec<BigRational>]) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..ncols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

fn to_rational_rows(rows: &[IntVector]) -> Vec<Vec<BigRational>> {
    rows.iter().map(|v| v.iter().map(|&x| rat(x)).collect()).collect()
}

/// Rank of a list of integer vectors.
pub fn rank(rows: &[IntVector]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    // Fraction-free elimination in i128 with content reduction; falls back to
    // rationals if an entry grows too large.
    let n = rows[0].len();
    let mut m: Vec<Vec<i128>> = rows.iter().map(|v| v.iter().map(|&x| x as i128).collect()).collect();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if m[i][c] == 0 {
                continue;
            }
            let (a, b) = (m[r][c], m[i][c]);
            let mut g = 0i128;
            for j in 0..n {
                let Some(x) = m[i][j].checked_mul(a).and_then(|x| x.checked_sub(m[r][j].checked_mul(b)?))
                else {
                    return rref(&to_rational_rows(rows)).1.len();
                };
                m[i][j] = x;
                g = g.gcd(&x);
            }
            if g > 1 {
                for x in m[i].iter_mut() {
                    *x /= g;
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Basis of the integer solutions of `rows · x = 0`, each vector primitive.
pub fn integer_kernel(rows: &[IntVector], n: usize) -> Vec<IntVector> {
    let (m, pivots) = rref(&to_rational_rows(rows));
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![BigRational::zero(); n];
            x[f] = BigRational::one();
            for (row, &p) in m.iter().zip(&pivots) {
                x[p] = -row[f].clone();
            }
            rational_to_primitive(&x)
        })
        .collect()
}

/// Scale a rational vector to the primitive integer vector with the same direction.
pub fn rational_to_primitive(x: &[BigRational]) -> IntVector {
    let l = x.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = x.iter().map(|q| (q * BigRational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    let g = if g.is_zero() { BigInt::one() } else { g };
    IntVector::new(
        ints.iter()
            .map(|v| (v / &g).to_i64().expect("primitive vector out of i64 range"))
            .collect::<Vec<_>>(),
    )
}

/// Determinant by Bareiss fraction-free elimination.
pub fn determinant(rows: &[IntVector]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|v| v.iter().map(|&x| big(x)).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Adjugate matrix `adj` with `M · adj = adj · M = det(M) · I`.
pub fn adjugate(rows: &[IntVector]) -> Vec<Vec<BigInt>> {
    let n = rows.len();
    if n == 1 {
        return vec![vec![BigInt::one()]];
    }
    let minor = |skip_r: usize, skip_c: usize| -> BigInt {
        let sub: Vec<IntVector> = (0..n)
            .filter(|&r| r != skip_r)
            .map(|r| {
                IntVector::new((0..n).filter(|&c| c != skip_c).map(|c| rows[r][c]).collect::<Vec<_>>())
            })
            .collect();
        determinant(&sub)
    };
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let m = minor(j, i);
                    if (i + j) % 2 == 0 { m } else { -m }
                })
                .collect()
        })
        .collect()
}

/// Column operations reducing a row vector to `(g, 0, …, 0)`.
///
/// Returns `g = gcd(u) >= 0` and a unimodular `V` with `u · V = (g, 0, …, 0)`.
pub fn unimodular_column_reduction(u: &IntVector) -> Result<(i64, IntMatrix)> {
    let n = u.len();
    let mut v = IntMatrix::identity(n);
    let mut w: Vec<i64> = u.coords().to_vec();
    for j in 1..n {
        if w[j] == 0 {
            continue;
        }
        let e = w[0].extended_gcd(&w[j]);
        let (g, x, y) = (e.gcd, e.x, e.y);
        let (a, b) = (w[0] / g, w[j] / g);
        // [c0 cj] <- [c0 cj] · [[x, -b], [y, a]], determinant x·a + y·b = 1.
        for i in 0..n {
            let c0 = v.get(i, 0) as i128;
            let cj = v.get(i, j) as i128;
            let n0 = c0 * x as i128 + cj * y as i128;
            let nj = -c0 * b as i128 + cj * a as i128;
            v.set(i, 0, i64::try_from(n0).map_err(|_| Error::Overflow)?);
            v.set(i, j, i64::try_from(nj).map_err(|_| Error::Overflow)?);
        }
        w[0] = g;
        w[j] = 0;
    }
    if w[0] < 0 {
        w[0] = -w[0];
        for i in 0..n {
            v.set(i, 0, -v.get(i, 0));
        }
    }
    Ok((w[0], v))
}

/// Exact positive semidefiniteness of a rational symmetric matrix.
pub fn is_positive_semidefinite(m: &[Vec<BigRational>]) -> bool {
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut active: Vec<usize> = (0..a.len()).collect();
    while !active.is_empty() {
        if active.iter().any(|&i| a[i][i].is_negative()) {
            return false;
        }
        let Some(pos) = active.iter().position(|&i| a[i][i].is_positive()) else {
            // Every remaining diagonal entry is zero, so the block must vanish.
            return active.iter().all(|&i| active.iter().all(|&j| a[i][j].is_zero()));
        };
        let p = active.remove(pos);
        for &i in &active {
            for &j in &active {
                let d = &a[i][p] * &a[p][j] / &a[p][p];
                a[i][j] -= d;
            }
        }
    }
    true
}
