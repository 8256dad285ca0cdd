//! Skew-symmetric super-biderivations of a structure tensor.
//!
//! A bilinear map `φ` is stored through its coordinates `x_{abk}` with
//! `φ(e_a, e_b) = Σ_k x_{abk} e_k`, flattened to the unknown index
//! `(a·d + b)·d + k`.
//!
//! Two solvers are provided. [`solve_flat`] streams the literal system over
//! all `d³` unknowns into one eliminator and is meant for small algebras and
//! cross-checks. [`solve`] computes the same space in two stages. Substituting
//! `x = e_a` into the left derivation law says that `φ(e_a, ·)` is a
//! superderivation of parity `d(φ) + d(a)`, so the first stage computes the
//! superderivation spaces of both parities and the second imposes
//! skew-symmetry on coefficients relative to those spaces. Both stages split
//! exactly along the Z-grading of the tensor, since every row involves
//! unknowns of a single degree shift.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{FieldElem, PrimeField};
use crate::lambda::Parity;
use crate::linalg::{ConstraintStream, Echelon, NullspaceStats, SparseVec};
use crate::structure::{StructureTensor, WeightVector};

/// Largest unknown count accepted by [`solve_flat`].
pub const FLAT_LIMIT: usize = 125_000;

/// Largest unknown count of a single block in [`solve`].
pub const BLOCK_LIMIT: usize = 60_000;

/// Basis dimension up to which lemma checks enumerate every tuple.
pub const EXHAUSTIVE_DIM: usize = 40;

/// Tuples drawn per identity when lemma checks sample.
pub const LEMMA_SAMPLES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    /// No restriction beyond the constraints themselves.
    Dense,
    /// Unknowns restricted to toral-weight compatible entries, then verified.
    Blocked,
}

impl fmt::Display for SolveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveMode::Dense => "dense",
            SolveMode::Blocked => "blocked",
        })
    }
}

impl FromStr for SolveMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dense" => Ok(SolveMode::Dense),
            "blocked" => Ok(SolveMode::Blocked),
            other => Err(format!("unknown solve mode '{other}'")),
        }
    }
}

/// Which derivation law generates the rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstraintForm {
    /// `φ(x,[y,z]) = [φ(x,y),z] + (−1)^{(d(φ)+d(x))d(y)} [y,φ(x,z)]`
    LeftLaw,
    /// `φ([x,y],z) = [x,φ(y,z)] + (−1)^{(d(φ)+d(z))d(y)} [φ(x,z),y]`
    RightLaw,
}

#[inline]
pub fn unknown_index(d: usize, a: usize, b: usize, k: usize) -> usize {
    (a * d + b) * d + k
}

/// A homogeneous bilinear map in coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiderTensor {
    dim: usize,
    parity: Parity,
    values: SparseVec,
}

impl BiderTensor {
    pub fn new(dim: usize, parity: Parity, values: SparseVec) -> Result<Self> {
        let expected = dim * dim * dim;
        if values.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: values.dim(),
            });
        }
        Ok(Self { dim, parity, values })
    }

    pub fn zero(dim: usize, parity: Parity) -> Self {
        Self {
            dim,
            parity,
            values: SparseVec::zero(dim * dim * dim),
        }
    }

    /// `φ(x, y) = λ [x, y]`.
    pub fn inner(s: &StructureTensor, lambda: FieldElem) -> Self {
        let d = s.dim();
        let f = s.field();
        let entries = s
            .entries()
            .map(|(a, b, k, c)| (unknown_index(d, a, b, k) as u32, f.mul(lambda, c)))
            .filter(|e| !e.1.is_zero())
            .collect();
        Self {
            dim: d,
            parity: Parity::Even,
            values: SparseVec::from_sorted(d * d * d, entries),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn values(&self) -> &SparseVec {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_zero()
    }

    pub fn get(&self, a: usize, b: usize, k: usize) -> FieldElem {
        self.values.get(unknown_index(self.dim, a, b, k) as u32)
    }

    /// Nonzero `(a, b, k, x_{abk})` in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, FieldElem)> + '_ {
        let d = self.dim;
        self.values.entries().iter().map(move |&(i, c)| {
            let i = i as usize;
            (i / (d * d), (i / d) % d, i % d, c)
        })
    }

    /// `φ(e_a, e_b)` in basis coordinates.
    pub fn image(&self, a: usize, b: usize) -> SparseVec {
        let d = self.dim;
        let lo = (unknown_index(d, a, b, 0)) as u32;
        let entries = slice_range(self.values.entries(), lo, lo + d as u32)
            .iter()
            .map(|&(i, c)| (i - lo, c))
            .collect();
        SparseVec::from_sorted(d, entries)
    }

    /// `φ(x, y)` for coordinate vectors.
    pub fn apply(&self, field: &PrimeField, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut acc = SparseVec::zero(self.dim);
        for &(a, xa) in x.entries() {
            for &(b, yb) in y.entries() {
                acc = acc.add_scaled(field, &self.image(a as usize, b as usize), field.mul(xa, yb));
            }
        }
        acc
    }
}

/// Entries of a sorted slice with coordinates in `lo..hi`.
fn slice_range(entries: &[(u32, FieldElem)], lo: u32, hi: u32) -> &[(u32, FieldElem)] {
    let start = entries.partition_point(|e| e.0 < lo);
    let end = entries.partition_point(|e| e.0 < hi);
    &entries[start..end]
}

fn sign_bit(field: &PrimeField, odd: bool) -> FieldElem {
    field.sign(odd)
}

/// Rows of the derivation law at basis triple `(a, b, c)`, keyed by output
/// coordinate `m`.
pub fn law_rows(
    s: &StructureTensor,
    parity: Parity,
    form: ConstraintForm,
    a: usize,
    b: usize,
    c: usize,
) -> Vec<(usize, SparseVec)> {
    let d = s.dim();
    let f = s.field();
    let n = d * d * d;
    let mut rows: BTreeMap<usize, Vec<(u32, FieldElem)>> = BTreeMap::new();
    let mut push = |m: usize, idx: usize, c: FieldElem| rows.entry(m).or_default().push((idx as u32, c));
    match form {
        ConstraintForm::LeftLaw => {
            let sg = sign_bit(f, (parity + s.parity(a)).sign_odd(s.parity(b)));
            for &(k, c1) in s.bracket_basis(b, c).entries() {
                for m in 0..d {
                    push(m, unknown_index(d, a, k as usize, m), c1);
                }
            }
            for k in 0..d {
                for &(m, c2) in s.bracket_basis(k, c).entries() {
                    push(m as usize, unknown_index(d, a, b, k), f.neg(c2));
                }
                for &(m, c3) in s.bracket_basis(b, k).entries() {
                    push(m as usize, unknown_index(d, a, c, k), f.neg(f.mul(sg, c3)));
                }
            }
        }
        ConstraintForm::RightLaw => {
            let sg = sign_bit(f, (parity + s.parity(c)).sign_odd(s.parity(b)));
            for &(k, c1) in s.bracket_basis(a, b).entries() {
                for m in 0..d {
                    push(m, unknown_index(d, k as usize, c, m), c1);
                }
            }
            for k in 0..d {
                for &(m, c2) in s.bracket_basis(a, k).entries() {
                    push(m as usize, unknown_index(d, b, c, k), f.neg(c2));
                }
                for &(m, c3) in s.bracket_basis(k, b).entries() {
                    push(m as usize, unknown_index(d, a, c, k), f.neg(f.mul(sg, c3)));
                }
            }
        }
    }
    rows.into_iter()
        .map(|(m, e)| (m, SparseVec::from_entries(f, n, e).expect("indices below d³")))
        .filter(|(_, r)| !r.is_zero())
        .collect()
}

/// `(−1)^{d(φ)d(a) + d(φ)d(b) + d(a)d(b)}`
fn skew_sign(f: &PrimeField, parity: Parity, pa: Parity, pb: Parity) -> FieldElem {
    let odd = parity.sign_odd(pa) ^ parity.sign_odd(pb) ^ pa.sign_odd(pb);
    f.sign(odd)
}

/// The full linear system over the `d³` unknowns: parity-zeroing rows, the
/// chosen derivation law on every basis triple, then skew-symmetry.
pub fn assemble(s: &StructureTensor, parity: Parity, form: ConstraintForm) -> ConstraintStream<'_> {
    let d = s.dim();
    let n = d * d * d;
    let f = *s.field();
    let parity_rows = (0..d).flat_map(move |a| {
        (0..d).flat_map(move |b| {
            let want = s.parity(a) + s.parity(b) + parity;
            (0..d)
                .filter(move |&k| s.parity(k) != want)
                .map(move |k| SparseVec::unit(n, unknown_index(d, a, b, k)))
        })
    });
    let law = (0..d).flat_map(move |a| {
        (0..d)
            .flat_map(move |b| (0..d).flat_map(move |c| law_rows(s, parity, form, a, b, c).into_iter().map(|(_, r)| r)))
    });
    let skew = (0..d).flat_map(move |a| {
        (a..d).flat_map(move |b| {
            let sg = skew_sign(&f, parity, s.parity(a), s.parity(b));
            (0..d).filter_map(move |k| {
                let row = SparseVec::from_entries(
                    &f,
                    n,
                    vec![
                        (unknown_index(d, a, b, k) as u32, FieldElem::ONE),
                        (unknown_index(d, b, a, k) as u32, sg),
                    ],
                )
                .expect("indices below d³");
                (!row.is_zero()).then_some(row)
            })
        })
    });
    ConstraintStream::new(n, parity_rows.chain(law).chain(skew))
}

/// Kernel of [`assemble`] by one streamed elimination over all `d³` unknowns.
pub fn solve_flat(
    s: &StructureTensor,
    parity: Parity,
    form: ConstraintForm,
) -> Result<(Vec<BiderTensor>, NullspaceStats)> {
    let d = s.dim();
    let n = d * d * d;
    if n > FLAT_LIMIT {
        return Err(Error::Infeasible {
            mode: "flat",
            unknowns: n,
            limit: FLAT_LIMIT,
        });
    }
    let (kernel, stats) = crate::linalg::nullspace(*s.field(), assemble(s, parity, form))?;
    let tensors = kernel
        .basis()
        .iter()
        .map(|v| BiderTensor::new(d, parity, v.clone()))
        .collect::<Result<_>>()?;
    Ok((tensors, stats))
}

/// How the returned solutions were checked against the unrestricted system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verification {
    /// Every solution satisfies every row of the unrestricted system.
    Verified,
    /// Blocked solutions failed verification; the dense solve replaced them.
    FellBackToDense,
    /// Blocked solutions failed verification and no dense solve was possible.
    Unverified,
}

/// Violation counts of a candidate against the unrestricted system.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FullCheck {
    pub law_violations: usize,
    pub skew_violations: usize,
    pub parity_violations: usize,
}

impl FullCheck {
    pub fn passed(&self) -> bool {
        self.law_violations == 0 && self.skew_violations == 0 && self.parity_violations == 0
    }
}

/// Residual of the left law at `(a, b, c)`, in basis coordinates.
pub fn left_law_residual(s: &StructureTensor, phi: &BiderTensor, a: usize, b: usize, c: usize) -> SparseVec {
    let f = s.field();
    let d = s.dim();
    let (eb, ec) = (SparseVec::unit(d, b), SparseVec::unit(d, c));
    let mut lhs = SparseVec::zero(d);
    for &(k, ck) in s.bracket_basis(b, c).entries() {
        lhs = lhs.add_scaled(f, &phi.image(a, k as usize), ck);
    }
    let t1 = s.bracket(&phi.image(a, b), &ec);
    let t2 = s.bracket(&eb, &phi.image(a, c));
    let sg = f.sign((phi.parity() + s.parity(a)).sign_odd(s.parity(b)));
    lhs.add_scaled(f, &t1, f.elem(-1)).add_scaled(f, &t2, f.neg(sg))
}

/// Residual of the right law at `(a, b, c)`, in basis coordinates.
pub fn right_law_residual(s: &StructureTensor, phi: &BiderTensor, a: usize, b: usize, c: usize) -> SparseVec {
    let f = s.field();
    let d = s.dim();
    let (ea, eb) = (SparseVec::unit(d, a), SparseVec::unit(d, b));
    let mut lhs = SparseVec::zero(d);
    for &(k, ck) in s.bracket_basis(a, b).entries() {
        lhs = lhs.add_scaled(f, &phi.image(k as usize, c), ck);
    }
    let t1 = s.bracket(&ea, &phi.image(b, c));
    let t2 = s.bracket(&phi.image(a, c), &eb);
    let sg = f.sign((phi.parity() + s.parity(c)).sign_odd(s.parity(b)));
    lhs.add_scaled(f, &t1, f.elem(-1)).add_scaled(f, &t2, f.neg(sg))
}

/// Evaluates every row of the unrestricted system at `φ`, counting the
/// basis triples (law), pairs (skew) and entries (parity) that fail.
pub fn check_full(s: &StructureTensor, phi: &BiderTensor) -> FullCheck {
    let d = s.dim();
    let f = s.field();
    let parity = phi.parity();
    let parity_violations = phi
        .entries()
        .filter(|&(a, b, k, _)| s.parity(k) != s.parity(a) + s.parity(b) + parity)
        .count();
    let mut skew_violations = 0;
    for a in 0..d {
        for b in a..d {
            let sg = skew_sign(f, parity, s.parity(a), s.parity(b));
            if !phi.image(a, b).add_scaled(f, &phi.image(b, a), sg).is_zero() {
                skew_violations += 1;
            }
        }
    }
    let law_violations = (0..d)
        .into_par_iter()
        .map(|a| {
            let mut bad = 0;
            for b in 0..d {
                for c in 0..d {
                    if !left_law_residual(s, phi, a, b, c).is_zero() {
                        bad += 1;
                    }
                }
            }
            bad
        })
        .sum();
    FullCheck {
        law_violations,
        skew_violations,
        parity_violations,
    }
}

/// `Some(λ)` when `φ = λ·[·,·]` entrywise.
pub fn classify_inner(phi: &BiderTensor, s: &StructureTensor) -> Option<FieldElem> {
    if phi.dim() != s.dim() {
        return None;
    }
    let f = s.field();
    let lambda = match s.entries().next() {
        None => return phi.is_zero().then_some(FieldElem::ZERO),
        Some((a, b, k, c)) => f.mul(phi.get(a, b, k), f.inv(c).ok()?),
    };
    if phi.parity() != Parity::Even && !phi.is_zero() {
        return None;
    }
    (phi.values == BiderTensor::inner(s, lambda).values).then_some(lambda)
}

/// Degrees used to split the systems: the tensor's own Z-degrees when the
/// bracket respects them, otherwise a single block.
fn splitting_degrees(s: &StructureTensor) -> Vec<i64> {
    let z = s.zdegrees();
    let graded = s.entries().all(|(a, b, k, _)| z[k] == z[a] + z[b]);
    if graded {
        z.to_vec()
    } else {
        vec![0; s.dim()]
    }
}

/// A block of the derivation stage: parity, degree shift and, in blocked
/// mode, weight shift.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct DerivationBlock {
    parity: Parity,
    shift: i64,
    weight: Option<WeightVector>,
}

struct Grades<'a> {
    degrees: Vec<i64>,
    weights: Option<&'a [WeightVector]>,
}

impl Grades<'_> {
    fn admits(&self, s: &StructureTensor, block: &DerivationBlock, b: usize, k: usize) -> bool {
        if s.parity(k) != s.parity(b) + block.parity || self.degrees[k] != self.degrees[b] + block.shift {
            return false;
        }
        match (&block.weight, self.weights) {
            (Some(nu), Some(w)) => {
                let f = s.field();
                w[k].0
                    .iter()
                    .zip(&w[b].0)
                    .zip(&nu.0)
                    .all(|((&x, &y), &z)| x == f.add(y, z))
            }
            _ => true,
        }
    }
}

/// Streams rows into an eliminator until the rows run out or the rank is full.
fn eliminate(field: PrimeField, dim: usize, rows: impl Iterator<Item = Vec<SparseVec>>) -> Result<(Echelon, u64)> {
    let mut ech = Echelon::new(field, dim);
    let mut consumed = 0u64;
    for chunk in rows {
        for row in &chunk {
            consumed += 1;
            ech.push(row)?;
            if ech.rank() == dim {
                return Ok((ech, consumed));
            }
        }
    }
    Ok((ech, consumed))
}

/// Superderivations of the given block, as vectors over `b·d + k`.
fn derivations(s: &StructureTensor, grades: &Grades<'_>, block: &DerivationBlock) -> Result<(Vec<SparseVec>, u64)> {
    let d = s.dim();
    let f = *s.field();
    let mut local = vec![u32::MAX; d * d];
    let mut targets: Vec<Vec<usize>> = vec![Vec::new(); d];
    let mut count = 0usize;
    for b in 0..d {
        for k in 0..d {
            if grades.admits(s, block, b, k) {
                local[b * d + k] = count as u32;
                targets[b].push(k);
                count += 1;
            }
        }
    }
    if count == 0 {
        return Ok((Vec::new(), 0));
    }
    if count > BLOCK_LIMIT {
        return Err(Error::Infeasible {
            mode: "derivation block",
            unknowns: count,
            limit: BLOCK_LIMIT,
        });
    }
    let local = &local;
    let targets = &targets;
    let q = block.parity;
    let rows_for = |b: usize| -> Vec<SparseVec> {
        (0..d)
            .into_par_iter()
            .flat_map_iter(|c| {
                let sg = f.sign(q.sign_odd(s.parity(b)));
                let mut acc: BTreeMap<u32, Vec<(u32, FieldElem)>> = BTreeMap::new();
                for &(k, c1) in s.bracket_basis(b, c).entries() {
                    for &m in &targets[k as usize] {
                        acc.entry(m as u32).or_default().push((local[k as usize * d + m], c1));
                    }
                }
                for &k in &targets[b] {
                    for &(m, c2) in s.bracket_basis(k, c).entries() {
                        acc.entry(m).or_default().push((local[b * d + k], f.neg(c2)));
                    }
                }
                for &k in &targets[c] {
                    for &(m, c3) in s.bracket_basis(b, k).entries() {
                        acc.entry(m).or_default().push((local[c * d + k], f.neg(f.mul(sg, c3))));
                    }
                }
                acc.into_values()
                    .map(|e| SparseVec::from_entries(&f, count, e).expect("local indices in range"))
                    .filter(|r| !r.is_zero())
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    let (ech, consumed) = eliminate(f, count, (0..d).map(rows_for))?;
    let mut global = vec![0u32; count];
    for (g, &l) in local.iter().enumerate() {
        if l != u32::MAX {
            global[l as usize] = g as u32;
        }
    }
    let basis = ech
        .kernel()
        .basis()
        .iter()
        .map(|v| {
            SparseVec::from_entries(
                &f,
                d * d,
                v.entries().iter().map(|&(i, c)| (global[i as usize], c)).collect(),
            )
            .expect("global indices in range")
        })
        .collect();
    Ok((basis, consumed))
}

/// Outcome of [`solve`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub parity: Parity,
    pub requested_mode: SolveMode,
    pub mode: SolveMode,
    pub fallback_reason: Option<String>,
    pub unknowns: u64,
    pub reduced_unknowns: u64,
    pub blocks: usize,
    pub rows_consumed: u64,
    pub even_derivations: usize,
    pub odd_derivations: usize,
    pub nullspace_dim: usize,
    pub lambdas: Vec<Option<FieldElem>>,
    pub verification: Verification,
    pub full_checks: Vec<FullCheck>,
    pub lemmas: Vec<LemmaResiduals>,
}

impl SolveReport {
    /// Whether the space is exactly the inner family `{λ[·,·]}`.
    pub fn all_inner(&self) -> bool {
        self.lambdas.iter().all(Option::is_some)
    }
}

struct StageResult {
    solutions: Vec<BiderTensor>,
    reduced_unknowns: u64,
    blocks: usize,
    rows_consumed: u64,
    even_derivations: usize,
    odd_derivations: usize,
}

fn solve_stages(s: &StructureTensor, parity: Parity, weights: Option<&[WeightVector]>) -> Result<StageResult> {
    let d = s.dim();
    let f = *s.field();
    let grades = Grades {
        degrees: splitting_degrees(s),
        weights,
    };
    let (lo, hi) = match (grades.degrees.iter().min(), grades.degrees.iter().max()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => {
            return Ok(StageResult {
                solutions: Vec::new(),
                reduced_unknowns: 0,
                blocks: 0,
                rows_consumed: 0,
                even_derivations: 0,
                odd_derivations: 0,
            })
        }
    };
    let weight_options: Vec<Option<WeightVector>> = match weights {
        Some(w) => {
            let mut distinct: Vec<WeightVector> = w.to_vec();
            distinct.sort();
            distinct.dedup();
            distinct.into_iter().map(Some).collect()
        }
        None => vec![None],
    };

    let mut rows_consumed = 0u64;
    let mut blocks = 0usize;
    let mut ders: BTreeMap<DerivationBlock, Vec<SparseVec>> = BTreeMap::new();
    for q in [Parity::Even, Parity::Odd] {
        for shift in (lo - hi)..=(hi - lo) {
            for weight in &weight_options {
                let block = DerivationBlock {
                    parity: q,
                    shift,
                    weight: weight.clone(),
                };
                let (basis, consumed) = derivations(s, &grades, &block)?;
                rows_consumed += consumed;
                blocks += 1;
                log::debug!("derivation block {block:?}: {} solutions", basis.len());
                ders.insert(block, basis);
            }
        }
    }
    let count_parity = |q: Parity| ders.iter().filter(|(k, _)| k.parity == q).map(|(_, v)| v.len()).sum();
    let even_derivations = count_parity(Parity::Even);
    let odd_derivations = count_parity(Parity::Odd);

    let mut reduced_unknowns = 0u64;
    let mut solutions: Vec<SparseVec> = Vec::new();
    let empty: Vec<SparseVec> = Vec::new();
    for shift in (lo - 2 * hi)..=(hi - 2 * lo) {
        let per_a: Vec<&Vec<SparseVec>> = (0..d)
            .map(|a| {
                let block = DerivationBlock {
                    parity: parity + s.parity(a),
                    shift: shift + grades.degrees[a],
                    weight: weights.map(|w| w[a].clone()),
                };
                ders.get(&block).unwrap_or(&empty)
            })
            .collect();
        let mut offsets = Vec::with_capacity(d + 1);
        offsets.push(0usize);
        for a in 0..d {
            offsets.push(offsets[a] + per_a[a].len());
        }
        let count = offsets[d];
        if count == 0 {
            continue;
        }
        if count > BLOCK_LIMIT {
            return Err(Error::Infeasible {
                mode: "skew block",
                unknowns: count,
                limit: BLOCK_LIMIT,
            });
        }
        reduced_unknowns += count as u64;
        blocks += 1;
        let per_a = &per_a;
        let offsets = &offsets;
        let rows_for = |a: usize| -> Vec<SparseVec> {
            (a..d)
                .into_par_iter()
                .flat_map_iter(|b| {
                    let sg = skew_sign(&f, parity, s.parity(a), s.parity(b));
                    let mut acc: BTreeMap<u32, Vec<(u32, FieldElem)>> = BTreeMap::new();
                    let lo_b = (b * d) as u32;
                    for (j, der) in per_a[a].iter().enumerate() {
                        for &(i, c) in slice_range(der.entries(), lo_b, lo_b + d as u32) {
                            acc.entry(i - lo_b).or_default().push(((offsets[a] + j) as u32, c));
                        }
                    }
                    let lo_a = (a * d) as u32;
                    for (j, der) in per_a[b].iter().enumerate() {
                        for &(i, c) in slice_range(der.entries(), lo_a, lo_a + d as u32) {
                            acc.entry(i - lo_a)
                                .or_default()
                                .push(((offsets[b] + j) as u32, f.mul(sg, c)));
                        }
                    }
                    acc.into_values()
                        .map(|e| SparseVec::from_entries(&f, count, e).expect("local indices in range"))
                        .filter(|r| !r.is_zero())
                        .collect::<Vec<_>>()
                })
                .collect()
        };
        let (ech, consumed) = eliminate(f, count, (0..d).map(rows_for))?;
        rows_consumed += consumed;
        for y in ech.kernel().basis() {
            let mut entries = Vec::new();
            for &(u, coef) in y.entries() {
                let u = u as usize;
                let a = offsets.partition_point(|&o| o <= u) - 1;
                let der = &per_a[a][u - offsets[a]];
                let base = (a * d * d) as u32;
                entries.extend(der.entries().iter().map(|&(i, c)| (base + i, f.mul(coef, c))));
            }
            solutions.push(SparseVec::from_entries(&f, d * d * d, entries)?);
        }
    }
    let mut ech = Echelon::new(f, d * d * d);
    ech.push_all(&solutions)?;
    let solutions = ech
        .row_space()
        .basis()
        .iter()
        .map(|v| BiderTensor::new(d, parity, v.clone()))
        .collect::<Result<_>>()?;
    Ok(StageResult {
        solutions,
        reduced_unknowns,
        blocks,
        rows_consumed,
        even_derivations,
        odd_derivations,
    })
}

/// Basis of the skew-symmetric super-biderivations of parity `parity`,
/// normalized to reduced echelon form in `(a, b, k)` order.
pub fn solve(
    s: &StructureTensor,
    parity: Parity,
    mode: SolveMode,
    seed: u64,
) -> Result<(Vec<BiderTensor>, SolveReport)> {
    let d = s.dim();
    let weights = s.basis_weights();
    let mut fallback_reason = None;
    let mut used = mode;
    let mut verification = Verification::Verified;

    let run = |w: Option<&[WeightVector]>| -> Result<(StageResult, Vec<FullCheck>)> {
        let stage = solve_stages(s, parity, w)?;
        let checks = stage.solutions.iter().map(|phi| check_full(s, phi)).collect();
        Ok((stage, checks))
    };

    let (mut stage, mut checks) = match (mode, &weights) {
        (SolveMode::Blocked, Some(w)) => run(Some(w))?,
        (SolveMode::Blocked, None) => {
            fallback_reason = Some("tensor carries no diagonal toral action".to_string());
            used = SolveMode::Dense;
            run(None)?
        }
        (SolveMode::Dense, _) => run(None)?,
    };
    if used == SolveMode::Blocked && !checks.iter().all(FullCheck::passed) {
        log::warn!("blocked solutions failed verification, falling back to the dense solve");
        match run(None) {
            Ok(dense) => {
                (stage, checks) = dense;
                used = SolveMode::Dense;
                verification = Verification::FellBackToDense;
                fallback_reason = Some("blocked solutions failed verification".to_string());
            }
            Err(e @ Error::Infeasible { .. }) => {
                log::warn!("dense fallback infeasible: {e}");
                verification = Verification::Unverified;
            }
            Err(e) => return Err(e),
        }
    }
    if verification == Verification::Verified && !checks.iter().all(FullCheck::passed) {
        verification = Verification::Unverified;
    }

    let lambdas = stage.solutions.iter().map(|phi| classify_inner(phi, s)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lemmas = stage
        .solutions
        .iter()
        .map(|phi| lemma_residuals(phi, s, &mut rng))
        .collect();
    let report = SolveReport {
        parity,
        requested_mode: mode,
        mode: used,
        fallback_reason,
        unknowns: (d as u64).pow(3),
        reduced_unknowns: stage.reduced_unknowns,
        blocks: stage.blocks,
        rows_consumed: stage.rows_consumed,
        even_derivations: stage.even_derivations,
        odd_derivations: stage.odd_derivations,
        nullspace_dim: stage.solutions.len(),
        lambdas,
        verification,
        full_checks: checks,
        lemmas,
    };
    Ok((stage.solutions, report))
}

/// Violation counts of the consequences of the biderivation axioms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaResiduals {
    pub exhaustive: bool,
    pub right_law_checked: usize,
    pub right_law_violations: usize,
    pub four_term_checked: usize,
    pub four_term_violations: usize,
    pub self_bracket_checked: usize,
    pub self_bracket_violations: usize,
    pub commuting_checked: usize,
    pub commuting_violations: usize,
    pub toral_weight_checked: usize,
    pub toral_weight_violations: usize,
}

impl LemmaResiduals {
    pub fn total_violations(&self) -> usize {
        self.right_law_violations
            + self.four_term_violations
            + self.self_bracket_violations
            + self.commuting_violations
            + self.toral_weight_violations
    }
}

/// Tuples to check: all of them for small algebras, else a seeded sample.
fn tuples<const K: usize>(d: usize, exhaustive: bool, rng: &mut impl Rng) -> Vec<[usize; K]> {
    if exhaustive {
        let total = d.pow(K as u32);
        (0..total)
            .map(|mut i| {
                let mut t = [0; K];
                for slot in t.iter_mut().rev() {
                    *slot = i % d;
                    i /= d;
                }
                t
            })
            .collect()
    } else {
        (0..LEMMA_SAMPLES)
            .map(|_| std::array::from_fn(|_| rng.gen_range(0..d)))
            .collect()
    }
}

/// Evaluates the right derivation law, the four-term identity
/// `[φ(x,y),[u,v]] = (−1)^{d(φ)(d(y)+d(u))}[[x,y],φ(u,v)]`, the vanishing of
/// `[φ(x,y),[x,y]]` when `d(x) = d(y)`, `φ(x,y) = 0` for commuting basis
/// pairs, and, when the tensor carries torals, that `φ(h, e_b)` stays in the
/// weight space of `e_b`.
pub fn lemma_residuals(phi: &BiderTensor, s: &StructureTensor, rng: &mut impl Rng) -> LemmaResiduals {
    let d = s.dim();
    let f = s.field();
    if d == 0 {
        return LemmaResiduals {
            exhaustive: true,
            ..Default::default()
        };
    }
    let exhaustive = d <= EXHAUSTIVE_DIM;
    let pair_exhaustive = exhaustive || d * d <= 4 * LEMMA_SAMPLES;
    let images: Vec<SparseVec> = (0..d * d).map(|i| phi.image(i / d, i % d)).collect();
    let img = |a: usize, b: usize| &images[a * d + b];

    let triples = tuples::<3>(d, exhaustive, rng);
    let right_law_violations = triples
        .par_iter()
        .filter(|&&[a, b, c]| !right_law_residual(s, phi, a, b, c).is_zero())
        .count();

    let quads = tuples::<4>(d, exhaustive, rng);
    let four_term_violations = quads
        .par_iter()
        .filter(|&&[x, y, u, v]| {
            let lhs = s.bracket(img(x, y), s.bracket_basis(u, v));
            let rhs = s.bracket(s.bracket_basis(x, y), img(u, v));
            let sg = f.sign(phi.parity().sign_odd(s.parity(y) + s.parity(u)));
            !lhs.add_scaled(f, &rhs, f.neg(sg)).is_zero()
        })
        .count();

    let pairs = tuples::<2>(d, pair_exhaustive, rng);
    let same_parity: Vec<&[usize; 2]> = pairs.iter().filter(|[a, b]| s.parity(*a) == s.parity(*b)).collect();
    let self_bracket_violations = same_parity
        .iter()
        .filter(|&&&[a, b]| !s.bracket(img(a, b), s.bracket_basis(a, b)).is_zero())
        .count();
    let commuting: Vec<&[usize; 2]> = pairs
        .iter()
        .filter(|[a, b]| s.bracket_basis(*a, *b).is_zero())
        .collect();
    let commuting_violations = commuting.iter().filter(|&&&[a, b]| !img(a, b).is_zero()).count();

    let (mut toral_weight_checked, mut toral_weight_violations) = (0, 0);
    if let Some(weights) = s.basis_weights() {
        for t in s.torals() {
            for (b, wb) in weights.iter().enumerate() {
                toral_weight_checked += 1;
                let image = phi.apply(f, t, &SparseVec::unit(d, b));
                if image.entries().iter().any(|&(k, _)| weights[k as usize] != *wb) {
                    toral_weight_violations += 1;
                }
            }
        }
    }

    LemmaResiduals {
        exhaustive,
        right_law_checked: triples.len(),
        right_law_violations,
        four_term_checked: quads.len(),
        four_term_violations,
        self_bracket_checked: same_parity.len(),
        self_bracket_violations,
        commuting_checked: commuting.len(),
        commuting_violations,
        toral_weight_checked,
        toral_weight_violations,
    }
}
