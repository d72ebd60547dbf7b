use std::fmt;
use std::ops::{Add, Deref, Index, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Integer vector in `Z^D`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntVec(Vec<i64>);

impl IntVec {
    pub fn zeros(dim: usize) -> Self {
        IntVec(vec![0; dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0; dim];
        v[i] = 1;
        IntVec(v)
    }

    pub fn splat(dim: usize, value: i64) -> Self {
        IntVec(vec![value; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<i64> {
        self.0
    }

    pub fn set(&mut self, i: usize, value: i64) {
        self.0[i] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn is_nonneg(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    /// Entrywise `self >= other`.
    pub fn dominates(&self, other: &IntVec) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    pub fn norm_inf(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn norm1(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).sum()
    }

    pub fn scale(&self, k: i64) -> IntVec {
        IntVec(self.0.iter().map(|x| x * k).collect())
    }

    pub fn checked_add(&self, other: &IntVec) -> Option<IntVec> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b))
            .collect::<Option<Vec<_>>>()
            .map(IntVec)
    }

    pub fn add_assign(&mut self, other: &IntVec) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    pub fn add_scaled(&mut self, other: &IntVec, k: i64) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b * k;
        }
    }

    /// Entrywise minimum.
    pub fn meet(&self, other: &IntVec) -> IntVec {
        IntVec(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }
}

impl Deref for IntVec {
    type Target = [i64];
    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl Index<usize> for IntVec {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl From<Vec<i64>> for IntVec {
    fn from(v: Vec<i64>) -> Self {
        IntVec(v)
    }
}

impl From<&[i64]> for IntVec {
    fn from(v: &[i64]) -> Self {
        IntVec(v.to_vec())
    }
}

impl<const N: usize> From<[i64; N]> for IntVec {
    fn from(v: [i64; N]) -> Self {
        IntVec(v.to_vec())
    }
}

impl FromIterator<i64> for IntVec {
    fn from_iter<I: IntoIterator<Item = i64>>(iter: I) -> Self {
        IntVec(iter.into_iter().collect())
    }
}

impl Add for &IntVec {
    type Output = IntVec;
    fn add(self, rhs: &IntVec) -> IntVec {
        debug_assert_eq!(self.dim(), rhs.dim());
        IntVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &IntVec {
    type Output = IntVec;
    fn sub(self, rhs: &IntVec) -> IntVec {
        debug_assert_eq!(self.dim(), rhs.dim());
        IntVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &IntVec {
    type Output = IntVec;
    fn neg(self) -> IntVec {
        IntVec(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for IntVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let a = IntVec::from([1, -2]);
        let b = IntVec::from([-3, 1]);
        assert_eq!(&a + &b, IntVec::from([-2, -1]));
        assert_eq!(&a - &b, IntVec::from([4, -3]));
        assert_eq!(a.norm_inf(), 2);
        assert_eq!(a.meet(&b), IntVec::from([-3, -2]));
        assert!(!a.is_nonneg());
        assert_eq!(a.to_string(), "(1,-2)");
    }

    #[test]
    fn checked_add_overflow() {
        let a = IntVec::from([i64::MAX]);
        assert!(a.checked_add(&IntVec::from([1])).is_none());
    }
}
