//! The truncated tensor superalgebra Λ(n,n;t) = U(n;t) ⊗ Λ(n).
//!
//! Even variables `x_1..x_n` carry divided powers `x^(α)` with `α_i ≤ p^{t_i} − 1`;
//! odd variables `x_{n+1}..x_{2n}` anticommute. A basis monomial `x^(α) x^u` is
//! identified by a packed integer key
//!
//! ```text
//! key = umask + 2^n * Σ_i α_i * Π_{l<i} p^{t_l}
//! ```
//!
//! where bit `j − n − 1` of `umask` is set when `x_j ∈ u`. Keys are a bijection onto
//! `[0, dim Λ)`, and adding the keys of two monomials whose product survives
//! truncation gives the key of the product (no digit carries, disjoint masks).
//! Internally monomials are addressed by their position in the canonical basis
//! order, sorted by `(|α| + |u|, key)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{FieldElem, MultiIndex, PrimeField};

/// Largest Λ dimension we agree to enumerate.
pub const MAX_LAMBDA_DIM: u128 = 1 << 22;

/// An element of Z₂.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(bit: u32) -> Self {
        if bit.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    #[inline]
    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    #[inline]
    pub fn bit(self) -> u32 {
        self as u32
    }

    /// Whether `(-1)^{self * other}` is −1.
    #[inline]
    pub fn sign_odd(self, other: Parity) -> bool {
        self.is_odd() && other.is_odd()
    }
}

impl std::ops::Add for Parity {
    type Output = Parity;

    #[inline]
    fn add(self, other: Parity) -> Parity {
        Parity::from_bit((self.bit() + other.bit()) % 2)
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "0",
            Parity::Odd => "1",
        })
    }
}

/// Parity summary of a possibly inhomogeneous element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityClass {
    Pure(Parity),
    Mixed,
}

/// Parity and the set of Z-degrees carried by an element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grading {
    pub parity: ParityClass,
    pub zdegrees: BTreeSet<i64>,
}

/// Set of odd variables; bit `k` stands for `x_{n+1+k}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OddSet(pub u32);

impl OddSet {
    /// Builds the set from 1-based variable indices in `n+1..=2n`.
    pub fn from_vars(n: usize, vars: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for &v in vars {
            if v <= n || v > 2 * n {
                return Err(Error::InvalidMonomial(format!("x{v} is not an odd variable")));
            }
            let bit = 1u32 << (v - n - 1);
            if mask & bit != 0 {
                return Err(Error::InvalidMonomial(format!("x{v} repeated")));
            }
            mask |= bit;
        }
        Ok(OddSet(mask))
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, n: usize, var: usize) -> bool {
        var > n && var <= 2 * n && self.0 & (1 << (var - n - 1)) != 0
    }

    /// Members as 1-based variable indices, increasing.
    pub fn vars(self, n: usize) -> Vec<usize> {
        (0..n).filter(|k| self.0 & (1 << k) != 0).map(|k| n + 1 + k).collect()
    }
}

/// A basis monomial `x^(α) x^u`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub alpha: MultiIndex,
    pub u: OddSet,
}

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial {
            alpha: MultiIndex::zeros(n),
            u: OddSet(0),
        }
    }

    /// `x^(α) x^u` with `u` listed as 1-based odd variable indices.
    pub fn new(alpha: Vec<u32>, odd_vars: &[usize]) -> Result<Self> {
        let n = alpha.len();
        Ok(Monomial {
            u: OddSet::from_vars(n, odd_vars)?,
            alpha: MultiIndex::new(alpha),
        })
    }

    pub fn parity(&self) -> Parity {
        Parity::from_bit(self.u.len())
    }

    pub fn zdegree(&self) -> u32 {
        self.alpha.degree() + self.u.len()
    }
}

/// Position of a monomial in the canonical basis order of a context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonoId(pub u32);

impl MonoId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Parameters `(n, p, t)` and the enumerated basis of Λ(n,n;t).
#[derive(Clone, Debug)]
pub struct AlgebraContext {
    n: usize,
    t: Vec<u32>,
    field: PrimeField,
    pi: MultiIndex,
    xi: u32,
    place: Vec<u64>,
    tag: u64,
    keys: Vec<u64>,
    key_to_id: Vec<u32>,
    alphas: Vec<u32>,
    masks: Vec<u32>,
    degrees: Vec<u32>,
}

impl PartialEq for AlgebraContext {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.t == other.t && self.field == other.field
    }
}

impl Eq for AlgebraContext {}

impl AlgebraContext {
    pub fn new(n: usize, p: u32, t: &[u32]) -> Result<Self> {
        let field = PrimeField::new(p)?;
        if n < 2 {
            return Err(Error::UnsupportedRank(n));
        }
        if t.len() != n {
            return Err(Error::InvalidTruncation(format!(
                "expected {n} entries, found {}",
                t.len()
            )));
        }
        if t.contains(&0) {
            return Err(Error::InvalidTruncation("entries must be positive".into()));
        }
        let mut size: u128 = 1u128 << n;
        let mut radices = Vec::with_capacity(n);
        for &ti in t {
            let mut r: u128 = 1;
            for _ in 0..ti {
                r *= p as u128;
                if r > MAX_LAMBDA_DIM {
                    return Err(Error::ContextTooLarge(r));
                }
            }
            radices.push(r as u64);
            size *= r;
            if size > MAX_LAMBDA_DIM {
                return Err(Error::ContextTooLarge(size));
            }
        }
        let mut place = Vec::with_capacity(n);
        let mut acc = 1u64;
        for r in &radices {
            place.push(acc);
            acc *= r;
        }
        let pi = MultiIndex::new(radices.iter().map(|r| (*r - 1) as u32).collect());
        let xi = pi.degree() + n as u32;

        let size = size as usize;
        let umask = (1u64 << n) - 1;
        let decode = |key: u64| -> (Vec<u32>, u32) {
            let rest = key >> n;
            let alpha = (0..n).map(|i| ((rest / place[i]) % radices[i]) as u32).collect();
            (alpha, (key & umask) as u32)
        };
        let mut order: Vec<(u32, u64)> = (0..size as u64)
            .map(|key| {
                let (alpha, mask) = decode(key);
                (alpha.iter().sum::<u32>() + mask.count_ones(), key)
            })
            .collect();
        order.sort_unstable();

        let mut keys = Vec::with_capacity(size);
        let mut key_to_id = vec![0u32; size];
        let mut alphas = Vec::with_capacity(size * n);
        let mut masks = Vec::with_capacity(size);
        let mut degrees = Vec::with_capacity(size);
        for (id, &(deg, key)) in order.iter().enumerate() {
            let (alpha, mask) = decode(key);
            keys.push(key);
            key_to_id[key as usize] = id as u32;
            alphas.extend_from_slice(&alpha);
            masks.push(mask);
            degrees.push(deg);
        }

        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        (n, p, t).hash(&mut hasher);

        Ok(Self {
            n,
            t: t.to_vec(),
            field,
            pi,
            xi,
            place,
            tag: hasher.finish(),
            keys,
            key_to_id,
            alphas,
            masks,
            degrees,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn t(&self) -> &[u32] {
        &self.t
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    /// Exponent bounds π.
    pub fn pi(&self) -> &MultiIndex {
        &self.pi
    }

    /// ξ = |π| + n.
    pub fn xi(&self) -> u32 {
        self.xi
    }

    pub(crate) fn tag(&self) -> u64 {
        self.tag
    }

    /// dim Λ(n,n;t) = p^{|t|} 2^n.
    pub fn dim(&self) -> usize {
        self.keys.len()
    }

    /// Number of derivation directions, 2n.
    pub fn directions(&self) -> usize {
        2 * self.n
    }

    pub fn ids(&self) -> impl Iterator<Item = MonoId> {
        (0..self.dim() as u32).map(MonoId)
    }

    pub fn key(&self, id: MonoId) -> u64 {
        self.keys[id.index()]
    }

    pub fn id_from_key(&self, key: u64) -> Result<MonoId> {
        self.key_to_id
            .get(key as usize)
            .map(|&i| MonoId(i))
            .ok_or_else(|| Error::InvalidMonomial(format!("key {key} out of range")))
    }

    #[inline]
    pub fn alpha(&self, id: MonoId) -> &[u32] {
        let i = id.index() * self.n;
        &self.alphas[i..i + self.n]
    }

    #[inline]
    pub fn odd_set(&self, id: MonoId) -> OddSet {
        OddSet(self.masks[id.index()])
    }

    #[inline]
    pub fn parity_of(&self, id: MonoId) -> Parity {
        Parity::from_bit(self.masks[id.index()].count_ones())
    }

    /// |α| + |u|
    #[inline]
    pub fn zdegree_of(&self, id: MonoId) -> u32 {
        self.degrees[id.index()]
    }

    /// τ(i) for a 1-based direction index.
    #[inline]
    pub fn tau(&self, i: usize) -> Parity {
        if i <= self.n {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// i′: pairs `i ↔ i + n`.
    #[inline]
    pub fn prime(&self, i: usize) -> usize {
        if i <= self.n {
            i + self.n
        } else {
            i - self.n
        }
    }

    pub fn monomial(&self, id: MonoId) -> Monomial {
        Monomial {
            alpha: MultiIndex::new(self.alpha(id).to_vec()),
            u: self.odd_set(id),
        }
    }

    pub fn id_of(&self, m: &Monomial) -> Result<MonoId> {
        if m.alpha.len() != self.n {
            return Err(Error::ContextMismatch);
        }
        if !m.alpha.le(&self.pi) {
            return Err(Error::InvalidMonomial(format!(
                "exponent {:?} exceeds bounds {:?}",
                m.alpha.entries(),
                self.pi.entries()
            )));
        }
        if m.u.0 >> self.n != 0 {
            return Err(Error::ContextMismatch);
        }
        let a: u64 = m
            .alpha
            .entries()
            .iter()
            .zip(&self.place)
            .map(|(&a, &pl)| a as u64 * pl)
            .sum();
        self.id_from_key((a << self.n) | m.u.0 as u64)
    }

    /// The basis monomial for the even variable `x_i` (1-based, `i ≤ n`) or odd
    /// variable `x_i` (`n < i ≤ 2n`).
    pub fn variable(&self, i: usize) -> Result<MonoId> {
        if i == 0 || i > 2 * self.n {
            return Err(Error::DirectionOutOfRange {
                index: i,
                max: 2 * self.n,
            });
        }
        let m = if i <= self.n {
            Monomial {
                alpha: MultiIndex::unit(self.n, i - 1),
                u: OddSet(0),
            }
        } else {
            Monomial {
                alpha: MultiIndex::zeros(self.n),
                u: OddSet(1 << (i - self.n - 1)),
            }
        };
        self.id_of(&m)
    }

    /// Product of two basis monomials; `None` when it vanishes.
    pub fn mul_ids(&self, a: MonoId, b: MonoId) -> Option<(FieldElem, MonoId)> {
        let (ma, mb) = (self.masks[a.index()], self.masks[b.index()]);
        if ma & mb != 0 {
            return None;
        }
        let f = &self.field;
        let mut coef = FieldElem::ONE;
        let (aa, ab) = (self.alpha(a), self.alpha(b));
        for i in 0..self.n {
            let s = aa[i] + ab[i];
            if s > self.pi[i] {
                return None;
            }
            if ab[i] != 0 && aa[i] != 0 {
                coef = f.mul(coef, f.binom(s as u64, aa[i] as u64));
                if coef.is_zero() {
                    return None;
                }
            }
        }
        // sign of moving each odd variable of b left past the larger ones of a
        let mut inversions = 0u32;
        let mut rest = mb;
        while rest != 0 {
            let bit = rest.trailing_zeros();
            inversions += (ma >> (bit + 1)).count_ones();
            rest &= rest - 1;
        }
        let key = self.keys[a.index()] + self.keys[b.index()];
        Some((
            f.signed(inversions % 2 == 1, coef),
            MonoId(self.key_to_id[key as usize]),
        ))
    }

    /// `D_i` applied to a basis monomial (1-based `i`, assumed in range).
    pub fn derive_id(&self, i: usize, m: MonoId) -> Option<(FieldElem, MonoId)> {
        let key = self.keys[m.index()];
        if i <= self.n {
            if self.alpha(m)[i - 1] == 0 {
                return None;
            }
            let key = key - (self.place[i - 1] << self.n);
            Some((FieldElem::ONE, MonoId(self.key_to_id[key as usize])))
        } else {
            let bit = 1u32 << (i - self.n - 1);
            let mask = self.masks[m.index()];
            if mask & bit == 0 {
                return None;
            }
            let pos = (mask & (bit - 1)).count_ones();
            let key = key - bit as u64;
            Some((self.field.sign(pos % 2 == 1), MonoId(self.key_to_id[key as usize])))
        }
    }

    /// Product of two monomials given by value.
    pub fn monomial_mul(&self, a: &Monomial, b: &Monomial) -> Result<Option<(FieldElem, Monomial)>> {
        let (a, b) = (self.id_of(a)?, self.id_of(b)?);
        Ok(self.mul_ids(a, b).map(|(c, m)| (c, self.monomial(m))))
    }

    pub fn check_direction(&self, i: usize) -> Result<()> {
        if i == 0 || i > 2 * self.n {
            Err(Error::DirectionOutOfRange {
                index: i,
                max: 2 * self.n,
            })
        } else {
            Ok(())
        }
    }

    fn check(&self, f: &SuperPoly) -> Result<()> {
        if f.tag == self.tag {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn mul(&self, f: &SuperPoly, g: &SuperPoly) -> Result<SuperPoly> {
        self.check(f)?;
        self.check(g)?;
        Ok(self.mul_unchecked(f, g))
    }

    pub(crate) fn mul_unchecked(&self, f: &SuperPoly, g: &SuperPoly) -> SuperPoly {
        let fld = &self.field;
        let mut out = SuperPoly::zero(self);
        for (&a, &ca) in &f.terms {
            for (&b, &cb) in &g.terms {
                if let Some((c, m)) = self.mul_ids(a, b) {
                    out.add_term(fld, m, fld.mul(c, fld.mul(ca, cb)));
                }
            }
        }
        out
    }

    /// The superderivation `D_i`, 1-based `i`.
    pub fn derive(&self, i: usize, f: &SuperPoly) -> Result<SuperPoly> {
        self.check(f)?;
        self.check_direction(i)?;
        Ok(self.derive_unchecked(i, f))
    }

    pub(crate) fn derive_unchecked(&self, i: usize, f: &SuperPoly) -> SuperPoly {
        let fld = &self.field;
        let mut out = SuperPoly::zero(self);
        for (&m, &c) in &f.terms {
            if let Some((s, m2)) = self.derive_id(i, m) {
                out.add_term(fld, m2, fld.mul(s, c));
            }
        }
        out
    }

    pub fn grading(&self, f: &SuperPoly) -> Grading {
        let mut parities = BTreeSet::new();
        let mut zdegrees = BTreeSet::new();
        for &m in f.terms.keys() {
            parities.insert(self.parity_of(m));
            zdegrees.insert(self.zdegree_of(m) as i64);
        }
        let parity = match parities.len() {
            0 => ParityClass::Pure(Parity::Even),
            1 => ParityClass::Pure(*parities.iter().next().unwrap()),
            _ => ParityClass::Mixed,
        };
        Grading { parity, zdegrees }
    }

    /// Renders a monomial as `x1^(2) x2^(1) x3 x4`, or `1`.
    pub fn render_monomial(&self, id: MonoId) -> String {
        let mut parts: Vec<String> = self
            .alpha(id)
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0)
            .map(|(i, a)| format!("x{}^({})", i + 1, a))
            .collect();
        parts.extend(self.odd_set(id).vars(self.n).iter().map(|v| format!("x{v}")));
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" ")
        }
    }

    /// Renders `c1 * m1 + c2 * m2 + ...`, or `0`.
    pub fn render(&self, f: &SuperPoly) -> String {
        if f.is_zero() {
            return "0".into();
        }
        f.terms
            .iter()
            .map(|(&m, c)| format!("{} * {}", c, self.render_monomial(m)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Adds `c` to `map[k]`, dropping the entry if it cancels.
#[inline]
pub(crate) fn accumulate<K: Ord>(field: &PrimeField, map: &mut BTreeMap<K, FieldElem>, k: K, c: FieldElem) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(k) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            let s = field.add(*o.get(), c);
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

/// A sparse element of Λ(n,n;t); zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperPoly {
    tag: u64,
    terms: BTreeMap<MonoId, FieldElem>,
}

impl SuperPoly {
    pub fn zero(ctx: &AlgebraContext) -> Self {
        Self {
            tag: ctx.tag(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &AlgebraContext) -> Self {
        Self::monomial(ctx, MonoId(0), FieldElem::ONE)
    }

    pub fn monomial(ctx: &AlgebraContext, m: MonoId, c: FieldElem) -> Self {
        let mut out = Self::zero(ctx);
        out.add_term(ctx.field(), m, c);
        out
    }

    pub fn from_terms(ctx: &AlgebraContext, terms: impl IntoIterator<Item = (MonoId, FieldElem)>) -> Self {
        let mut out = Self::zero(ctx);
        for (m, c) in terms {
            out.add_term(ctx.field(), m, c);
        }
        out
    }

    pub(crate) fn tag(&self) -> u64 {
        self.tag
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: MonoId) -> FieldElem {
        self.terms.get(&m).copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (MonoId, FieldElem)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn add_term(&mut self, field: &PrimeField, m: MonoId, c: FieldElem) {
        accumulate(field, &mut self.terms, m, c);
    }

    pub fn add(&self, ctx: &AlgebraContext, other: &SuperPoly) -> Result<SuperPoly> {
        ctx.check(self)?;
        ctx.check(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(ctx.field(), m, c);
        }
        Ok(out)
    }

    pub fn scale(&self, field: &PrimeField, c: FieldElem) -> SuperPoly {
        let mut out = SuperPoly {
            tag: self.tag,
            terms: BTreeMap::new(),
        };
        for (m, a) in self.terms() {
            out.add_term(field, m, field.mul(a, c));
        }
        out
    }

    /// `self - other`, both from the same context.
    pub fn sub(&self, ctx: &AlgebraContext, other: &SuperPoly) -> Result<SuperPoly> {
        self.add(ctx, &other.scale(ctx.field(), ctx.field().elem(-1)))
    }

    /// Parity if homogeneous; zero counts as even.
    pub fn parity(&self, ctx: &AlgebraContext) -> Option<Parity> {
        match ctx.grading(self).parity {
            ParityClass::Pure(p) => Some(p),
            ParityClass::Mixed => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx23() -> AlgebraContext {
        AlgebraContext::new(2, 3, &[1, 1]).unwrap()
    }

    fn mono(ctx: &AlgebraContext, alpha: &[u32], odd: &[usize]) -> MonoId {
        ctx.id_of(&Monomial::new(alpha.to_vec(), odd).unwrap()).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(AlgebraContext::new(1, 3, &[1]).unwrap_err(), Error::UnsupportedRank(1));
        assert_eq!(
            AlgebraContext::new(2, 2, &[1, 1]).unwrap_err(),
            Error::UnsupportedCharacteristic(2)
        );
        assert!(AlgebraContext::new(2, 3, &[1]).is_err());
        assert!(AlgebraContext::new(2, 3, &[1, 0]).is_err());
    }

    #[test]
    fn basis_enumeration() {
        for (n, p, t) in [
            (2usize, 3u32, vec![1u32, 1]),
            (2, 5, vec![1, 1]),
            (3, 3, vec![1, 1, 1]),
            (2, 3, vec![2, 1]),
        ] {
            let ctx = AlgebraContext::new(n, p, &t).unwrap();
            let expected = (p as usize).pow(t.iter().sum()) << n;
            assert_eq!(ctx.dim(), expected);
            let keys: BTreeSet<u64> = ctx.ids().map(|m| ctx.key(m)).collect();
            assert_eq!(keys.len(), expected);
            let order: Vec<(u32, u64)> = ctx.ids().map(|m| (ctx.zdegree_of(m), ctx.key(m))).collect();
            assert!(order.windows(2).all(|w| w[0] < w[1]));
            for m in ctx.ids() {
                assert_eq!(ctx.id_of(&ctx.monomial(m)).unwrap(), m);
            }
        }
    }

    #[test]
    fn divided_power_product() {
        let ctx = ctx23();
        let x1 = mono(&ctx, &[1, 0], &[]);
        let x1sq = mono(&ctx, &[2, 0], &[]);
        assert_eq!(ctx.mul_ids(x1, x1), Some((ctx.field().elem(2), x1sq)));
        assert_eq!(ctx.mul_ids(x1sq, x1), None);
    }

    #[test]
    fn odd_variables_anticommute() {
        let ctx = ctx23();
        let (x3, x4) = (ctx.variable(3).unwrap(), ctx.variable(4).unwrap());
        let x34 = mono(&ctx, &[0, 0], &[3, 4]);
        assert_eq!(ctx.mul_ids(x3, x4), Some((FieldElem::ONE, x34)));
        assert_eq!(ctx.mul_ids(x4, x3), Some((ctx.field().elem(-1), x34)));
        assert_eq!(ctx.mul_ids(x3, x3), None);
    }

    #[test]
    fn polynomial_products() {
        let ctx = ctx23();
        let f = ctx.field();
        let x3 = SuperPoly::monomial(&ctx, ctx.variable(3).unwrap(), FieldElem::ONE);
        let x4 = SuperPoly::monomial(&ctx, ctx.variable(4).unwrap(), FieldElem::ONE);
        let s = x3.add(&ctx, &x4).unwrap();
        assert!(ctx.mul(&s, &s).unwrap().is_zero());
        assert_eq!(ctx.mul(&s, &SuperPoly::one(&ctx)).unwrap(), s);

        let a = SuperPoly::monomial(&ctx, mono(&ctx, &[1, 0], &[3]), FieldElem::ONE);
        let b = SuperPoly::monomial(&ctx, mono(&ctx, &[1, 0], &[4]), FieldElem::ONE);
        let expected = SuperPoly::monomial(&ctx, mono(&ctx, &[2, 0], &[3, 4]), f.elem(2));
        assert_eq!(ctx.mul(&a, &b).unwrap(), expected);
    }

    #[test]
    fn derivations() {
        let ctx = ctx23();
        let f = ctx.field();
        let x1sq = SuperPoly::monomial(&ctx, mono(&ctx, &[2, 0], &[]), FieldElem::ONE);
        assert_eq!(
            ctx.derive(1, &x1sq).unwrap(),
            SuperPoly::monomial(&ctx, mono(&ctx, &[1, 0], &[]), FieldElem::ONE)
        );
        let x34 = SuperPoly::monomial(&ctx, mono(&ctx, &[0, 0], &[3, 4]), FieldElem::ONE);
        assert_eq!(
            ctx.derive(4, &x34).unwrap(),
            SuperPoly::monomial(&ctx, ctx.variable(3).unwrap(), f.elem(-1))
        );
        for i in 1..=4 {
            assert!(ctx.derive(i, &SuperPoly::one(&ctx)).unwrap().is_zero());
        }
        assert!(matches!(
            ctx.derive(5, &x34),
            Err(Error::DirectionOutOfRange { index: 5, max: 4 })
        ));
        assert!(ctx.derive(0, &x34).is_err());
    }

    #[test]
    fn gradings() {
        let ctx = ctx23();
        let x34 = SuperPoly::monomial(&ctx, mono(&ctx, &[0, 0], &[3, 4]), FieldElem::ONE);
        let g = ctx.grading(&x34);
        assert_eq!(g.parity, ParityClass::Pure(Parity::Even));
        assert_eq!(g.zdegrees, BTreeSet::from([2]));

        let x1x3 = SuperPoly::monomial(&ctx, mono(&ctx, &[1, 0], &[3]), FieldElem::ONE);
        let g = ctx.grading(&x1x3);
        assert_eq!(g.parity, ParityClass::Pure(Parity::Odd));
        assert_eq!(g.zdegrees, BTreeSet::from([2]));

        let mixed = SuperPoly::from_terms(
            &ctx,
            [
                (ctx.variable(3).unwrap(), FieldElem::ONE),
                (ctx.variable(1).unwrap(), FieldElem::ONE),
            ],
        );
        let g = ctx.grading(&mixed);
        assert_eq!(g.parity, ParityClass::Mixed);
        assert_eq!(g.zdegrees, BTreeSet::from([1]));
    }

    #[test]
    fn context_mismatch_is_an_error() {
        let a = ctx23();
        let b = AlgebraContext::new(2, 5, &[1, 1]).unwrap();
        let fa = SuperPoly::one(&a);
        let fb = SuperPoly::one(&b);
        assert_eq!(a.mul(&fa, &fb), Err(Error::ContextMismatch));
        assert_eq!(a.derive(1, &fb), Err(Error::ContextMismatch));
    }

    #[test]
    fn rendering() {
        let ctx = ctx23();
        let m = mono(&ctx, &[2, 1], &[3, 4]);
        assert_eq!(ctx.render_monomial(m), "x1^(2) x2^(1) x3 x4");
        assert_eq!(ctx.render_monomial(MonoId(0)), "1");
        assert_eq!(ctx.render(&SuperPoly::zero(&ctx)), "0");
    }
}
