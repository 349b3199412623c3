//! Integer coordinate vectors.
//!
//! Classes, cone generators and facet functionals all share this
//! representation. Ordering is lexicographic on the coordinates, which is
//! the canonical order for every printed class list.

use std::fmt;
use std::ops::{Add, AddAssign, Index, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IntVector(SmallVec<[i64; 4]>);

/// A divisor class, written in a fixed basis of the Picard lattice.
pub type DivisorClass = IntVector;

impl IntVector {
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        IntVector(SmallVec::from_vec(coords.into()))
    }

    pub fn from_slice(coords: &[i64]) -> Self {
        IntVector(SmallVec::from_slice(coords))
    }

    pub fn zeros(n: usize) -> Self {
        IntVector(SmallVec::from_elem(0, n))
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = 1;
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn coords_mut(&mut self) -> &mut [i64] {
        &mut self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Standard dot product, accumulated in `i128`.
    pub fn dot(&self, other: &IntVector) -> i128 {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum()
    }

    /// Gcd of the coordinates (0 for the zero vector).
    pub fn content(&self) -> i64 {
        self.0.iter().fold(0i64, |g, &x| g.gcd(&x))
    }

    /// Divide by the content, keeping the direction.
    pub fn primitive(&self) -> IntVector {
        let g = self.content();
        if g <= 1 {
            return self.clone();
        }
        IntVector(self.0.iter().map(|&x| x / g).collect())
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    pub fn scaled(&self, k: i64) -> IntVector {
        IntVector(
            self.0
                .iter()
                .map(|&x| x.checked_mul(k).expect("integer overflow in scaling"))
                .collect(),
        )
    }

    /// `self + k * other`
    pub fn add_scaled(&self, k: i64, other: &IntVector) -> IntVector {
        IntVector(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(&a, &b)| {
                    b.checked_mul(k)
                        .and_then(|kb| a.checked_add(kb))
                        .expect("integer overflow in vector update")
                })
                .collect(),
        )
    }

    /// If `self` is an integer multiple `k * other` with `k >= 0`, return `k`.
    pub fn multiple_of(&self, other: &IntVector) -> Option<i64> {
        if other.is_zero() {
            return if self.is_zero() { Some(0) } else { None };
        }
        let (i, &o) = self.0.iter().enumerate().find(|(_, &x)| x != 0).map_or_else(
            || other.0.iter().enumerate().find(|(_, &x)| x != 0).unwrap(),
            |(i, _)| (i, &other.0[i]),
        );
        if o == 0 || self.0[i] % o != 0 {
            return None;
        }
        let k = self.0[i] / o;
        if k < 0 {
            return None;
        }
        (other.scaled(k) == *self).then_some(k)
    }

    pub fn iter(&self) -> impl Iterator<Item = &i64> {
        self.0.iter()
    }
}

impl From<Vec<i64>> for IntVector {
    fn from(v: Vec<i64>) -> Self {
        IntVector::new(v)
    }
}

impl From<&[i64]> for IntVector {
    fn from(v: &[i64]) -> Self {
        IntVector::from_slice(v)
    }
}

impl<const N: usize> From<[i64; N]> for IntVector {
    fn from(v: [i64; N]) -> Self {
        IntVector::from_slice(&v)
    }
}

impl Index<usize> for IntVector {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

fn zip_with(a: &IntVector, b: &IntVector, f: impl Fn(i64, i64) -> Option<i64>) -> IntVector {
    assert_eq!(a.len(), b.len(), "vector length mismatch");
    IntVector(
        a.0.iter()
            .zip(b.0.iter())
            .map(|(&x, &y)| f(x, y).expect("integer overflow"))
            .collect(),
    )
}

impl Add<&IntVector> for &IntVector {
    type Output = IntVector;
    fn add(self, rhs: &IntVector) -> IntVector {
        zip_with(self, rhs, i64::checked_add)
    }
}

impl Add for IntVector {
    type Output = IntVector;
    fn add(self, rhs: IntVector) -> IntVector {
        &self + &rhs
    }
}

impl Sub<&IntVector> for &IntVector {
    type Output = IntVector;
    fn sub(self, rhs: &IntVector) -> IntVector {
        zip_with(self, rhs, i64::checked_sub)
    }
}

impl Sub for IntVector {
    type Output = IntVector;
    fn sub(self, rhs: IntVector) -> IntVector {
        &self - &rhs
    }
}

impl AddAssign<&IntVector> for IntVector {
    fn add_assign(&mut self, rhs: &IntVector) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&IntVector> for IntVector {
    fn sub_assign(&mut self, rhs: &IntVector) {
        *self = &*self - rhs;
    }
}

impl Neg for &IntVector {
    type Output = IntVector;
    fn neg(self) -> IntVector {
        IntVector(self.0.iter().map(|&x| x.checked_neg().expect("integer overflow")).collect())
    }
}

impl Neg for IntVector {
    type Output = IntVector;
    fn neg(self) -> IntVector {
        -&self
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseVectorError(pub String);

impl fmt::Display for ParseVectorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed class `{}`", self.0)
    }
}

impl std::error::Error for ParseVectorError {}

impl FromStr for IntVector {
    type Err = ParseVectorError;

    /// Parses `(a,b,c)`; whitespace is ignored, including inside a sign.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = compact
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| ParseVectorError(s.to_string()))?;
        if inner.is_empty() {
            return Err(ParseVectorError(s.to_string()));
        }
        inner
            .split(',')
            .map(|t| t.parse::<i64>().map_err(|_| ParseVectorError(s.to_string())))
            .collect::<Result<Vec<_>, _>>()
            .map(IntVector::new)
    }
}

impl Serialize for IntVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IntVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parse a comma-separated list of classes: `(1,0,0), (0,1,0)`.
pub fn parse_class_list(s: &str) -> Result<Vec<IntVector>, ParseVectorError> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let open = rest.find('(').ok_or_else(|| ParseVectorError(rest.to_string()))?;
        if !rest[..open].trim().trim_matches(',').trim().is_empty() {
            return Err(ParseVectorError(rest.to_string()));
        }
        let close = rest[open..]
            .find(')')
            .map(|c| c + open)
            .ok_or_else(|| ParseVectorError(rest.to_string()))?;
        out.push(rest[open..=close].parse()?);
        rest = rest[close + 1..].trim_start().trim_start_matches(',').trim_start();
    }
    Ok(out)
}
