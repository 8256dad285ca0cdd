//! Arithmetic in the prime field F_p and bounded multi-indices.
//!
//! Elements are plain residues; every operation goes through a [`PrimeField`]
//! handle which carries the characteristic. Binomial coefficients are reduced
//! digit by digit in base p (Lucas), so no large integers are ever formed.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A residue in `[0, p)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The prime field F_p for an odd prime p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    /// Rejects 2 and every non-prime.
    pub fn new(p: u32) -> Result<Self> {
        if p == 2 || !is_prime(p) || p > (1 << 30) {
            return Err(Error::UnsupportedCharacteristic(p));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    /// Reduces an arbitrary integer into the field.
    #[inline]
    pub fn elem(&self, v: i64) -> FieldElem {
        FieldElem(v.rem_euclid(self.p as i64) as u32)
    }

    /// Wraps an already-reduced residue. Fails if `v >= p`.
    pub fn checked(&self, v: u32) -> Option<FieldElem> {
        (v < self.p).then_some(FieldElem(v))
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let s = a.0 + b.0;
        FieldElem(if s >= self.p { s - self.p } else { s })
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.p - b.0 })
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        FieldElem(if a.0 == 0 { 0 } else { self.p - a.0 })
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32)
    }

    pub fn pow(&self, a: FieldElem, mut e: u64) -> FieldElem {
        let mut base = a;
        let mut acc = FieldElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, (self.p - 2) as u64))
    }

    /// `(-1)^k` as a field element.
    #[inline]
    pub fn sign(&self, odd: bool) -> FieldElem {
        if odd {
            FieldElem(self.p - 1)
        } else {
            FieldElem::ONE
        }
    }

    /// `(-1)^k * a`.
    #[inline]
    pub fn signed(&self, odd: bool, a: FieldElem) -> FieldElem {
        if odd {
            self.neg(a)
        } else {
            a
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.p).map(FieldElem)
    }

    /// Symmetric representative in `(-p/2, p/2]`, for human-readable output.
    pub fn centered(&self, a: FieldElem) -> i64 {
        let v = a.0 as i64;
        if v > self.p as i64 / 2 {
            v - self.p as i64
        } else {
            v
        }
    }

    /// `C(top, bottom) mod p` by Lucas reduction; zero when `bottom > top`.
    pub fn binom(&self, mut top: u64, mut bottom: u64) -> FieldElem {
        let p = self.p as u64;
        let mut acc = FieldElem::ONE;
        while bottom > 0 || top > 0 {
            let (n, k) = (top % p, bottom % p);
            if k > n {
                return FieldElem::ZERO;
            }
            acc = self.mul(acc, self.small_binom(n as u32, k as u32));
            top /= p;
            bottom /= p;
        }
        acc
    }

    // n < p, so k! is invertible.
    fn small_binom(&self, n: u32, k: u32) -> FieldElem {
        let k = k.min(n - k);
        let mut num = FieldElem::ONE;
        let mut den = FieldElem::ONE;
        for i in 0..k {
            num = self.mul(num, FieldElem(n - i));
            den = self.mul(den, FieldElem(i + 1));
        }
        self.mul(num, self.inv(den).expect("k! is a unit for k < p"))
    }

    /// `∏_i C(top_i, bottom_i) mod p`.
    pub fn binom_multi(&self, top: &MultiIndex, bottom: &MultiIndex) -> Result<FieldElem> {
        if top.len() != bottom.len() {
            return Err(Error::LengthMismatch {
                expected: top.len(),
                found: bottom.len(),
            });
        }
        if !bottom.le(top) {
            return Err(Error::InvalidBinomial {
                top: top.0.clone(),
                bottom: bottom.0.clone(),
            });
        }
        Ok(top.0.iter().zip(&bottom.0).fold(FieldElem::ONE, |acc, (&a, &b)| {
            self.mul(acc, self.binom(a as u64, b as u64))
        }))
    }
}

/// An n-tuple of non-negative exponents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        Self(entries)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// The unit vector ε_i (0-based `i`).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// |α|
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `a + b` if it stays within `bounds`, `None` if it is truncated away.
    pub fn add_bounded(&self, other: &MultiIndex, bounds: &MultiIndex) -> Result<Option<MultiIndex>> {
        for len in [other.len(), bounds.len()] {
            if len != self.len() {
                return Err(Error::LengthMismatch {
                    expected: self.len(),
                    found: len,
                });
            }
        }
        let mut out = Vec::with_capacity(self.len());
        for ((a, b), bound) in self.0.iter().zip(&other.0).zip(&bounds.0) {
            let s = a + b;
            if s > *bound {
                return Ok(None);
            }
            out.push(s);
        }
        Ok(Some(MultiIndex(out)))
    }
}

impl Index<usize> for MultiIndex {
    type Output = u32;

    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn basic_ops() {
        let f3 = f(3);
        assert_eq!(f3.mul(f3.elem(2), f3.elem(2)), f3.elem(1));
        assert_eq!(f3.neg(f3.elem(1)), f3.elem(2));
        let f5 = f(5);
        assert_eq!(f5.inv(f5.elem(2)).unwrap(), f5.elem(3));
        assert_eq!(f5.inv(FieldElem::ZERO), Err(Error::ZeroInverse));
    }

    #[test]
    fn rejects_bad_characteristic() {
        for p in [0, 1, 2, 4, 9, 15] {
            assert_eq!(PrimeField::new(p), Err(Error::UnsupportedCharacteristic(p)));
        }
        assert!(PrimeField::new(7).is_ok());
    }

    #[test]
    fn binomials() {
        let f3 = f(3);
        assert_eq!(f3.binom(3, 1), FieldElem::ZERO);
        let top = MultiIndex::new(vec![2, 1]);
        let bottom = MultiIndex::new(vec![1, 1]);
        assert_eq!(f3.binom_multi(&top, &bottom).unwrap(), f3.elem(2));
        assert_eq!(f3.binom_multi(&top, &MultiIndex::zeros(2)).unwrap(), FieldElem::ONE);
        assert!(matches!(
            f3.binom_multi(&bottom, &top),
            Err(Error::InvalidBinomial { .. })
        ));
    }

    #[test]
    fn bounded_addition() {
        let bounds = MultiIndex::new(vec![2, 2]);
        let e1 = MultiIndex::unit(2, 0);
        assert_eq!(e1.add_bounded(&e1, &bounds).unwrap(), Some(MultiIndex::new(vec![2, 0])));
        let two = MultiIndex::new(vec![2, 0]);
        assert_eq!(two.add_bounded(&e1, &bounds).unwrap(), None);
        let a = MultiIndex::new(vec![1, 2]);
        assert_eq!(MultiIndex::zeros(2).add_bounded(&a, &bounds).unwrap(), Some(a.clone()));
        assert!(a.add_bounded(&MultiIndex::zeros(3), &bounds).is_err());
    }
}
