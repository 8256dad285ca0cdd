//! Exact sparse linear algebra over F_p.
//!
//! [`Echelon`] keeps a reduced row-echelon basis that is updated one row at a
//! time: incoming rows are reduced against the pivot table, and a new pivot is
//! eliminated from every stored row that mentions it. The full constraint matrix
//! is never materialized, which is what lets the biderivation system (about d⁴
//! sparse rows over d³ unknowns) run as a stream. Pivots are always the lowest
//! nonzero coordinate, scaled to 1.
//!
//! The dense routines at the bottom are the cross-check oracle for small
//! ambient dimensions.

use crate::error::{Error, Result};
use crate::ffield::{FieldElem, PrimeField};

/// Dense elimination is only offered up to this ambient dimension.
pub const DENSE_LIMIT: usize = 2000;

const NONE: u32 = u32::MAX;

/// Sparse vector with strictly increasing coordinates and no zero entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparseVec {
    dim: usize,
    entries: Vec<(u32, FieldElem)>,
}

impl SparseVec {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        Self {
            dim,
            entries: vec![(i as u32, FieldElem::ONE)],
        }
    }

    /// Trusts the caller: sorted, unique, nonzero, in range.
    pub fn from_sorted(dim: usize, entries: Vec<(u32, FieldElem)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|e| !e.1.is_zero() && (e.0 as usize) < dim));
        Self { dim, entries }
    }

    /// Sorts, merges repeated coordinates and drops zeros.
    pub fn from_entries(field: &PrimeField, dim: usize, mut entries: Vec<(u32, FieldElem)>) -> Result<Self> {
        if let Some(&(i, _)) = entries.iter().find(|e| e.0 as usize >= dim) {
            return Err(Error::CoordinateOutOfRange { index: i as usize, dim });
        }
        entries.sort_unstable_by_key(|e| e.0);
        let mut out: Vec<(u32, FieldElem)> = Vec::with_capacity(entries.len());
        for (i, c) in entries {
            match out.last_mut() {
                Some(last) if last.0 == i => last.1 = field.add(last.1, c),
                _ => out.push((i, c)),
            }
        }
        out.retain(|e| !e.1.is_zero());
        Ok(Self { dim, entries: out })
    }

    pub fn from_dense(dim: usize, values: &[FieldElem]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, &v)| (i as u32, v))
            .collect();
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(u32, FieldElem)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: u32) -> FieldElem {
        self.entries
            .binary_search_by_key(&i, |e| e.0)
            .map(|k| self.entries[k].1)
            .unwrap_or(FieldElem::ZERO)
    }

    pub fn leading(&self) -> Option<(u32, FieldElem)> {
        self.entries.first().copied()
    }

    pub fn to_dense(&self) -> Vec<FieldElem> {
        let mut out = vec![FieldElem::ZERO; self.dim];
        for &(i, c) in &self.entries {
            out[i as usize] = c;
        }
        out
    }

    pub fn scale(&self, field: &PrimeField, c: FieldElem) -> SparseVec {
        if c.is_zero() {
            return SparseVec::zero(self.dim);
        }
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&(i, x)| (i, field.mul(x, c))).collect(),
        }
    }

    /// `self + c · other`.
    pub fn add_scaled(&self, field: &PrimeField, other: &SparseVec, c: FieldElem) -> SparseVec {
        Self {
            dim: self.dim,
            entries: merge_scaled(field, &self.entries, &other.entries, c, |_| {}),
        }
    }

    pub fn dot_dense(&self, field: &PrimeField, x: &[FieldElem]) -> FieldElem {
        self.entries.iter().fold(FieldElem::ZERO, |acc, &(i, c)| {
            field.add(acc, field.mul(c, x[i as usize]))
        })
    }
}

/// `a + c·b` on sorted entry lists; `on_new` sees columns of `b` absent from `a`.
fn merge_scaled(
    field: &PrimeField,
    a: &[(u32, FieldElem)],
    b: &[(u32, FieldElem)],
    c: FieldElem,
    mut on_new: impl FnMut(u32),
) -> Vec<(u32, FieldElem)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i]);
            i += 1;
        } else if take_b {
            let v = field.mul(b[j].1, c);
            if !v.is_zero() {
                on_new(b[j].0);
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let v = field.add(a[i].1, field.mul(b[j].1, c));
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Incremental reduced row-echelon form.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: PrimeField,
    dim: usize,
    rows: Vec<Vec<(u32, FieldElem)>>,
    pivot_row: Vec<u32>,
    occurs: Vec<Vec<u32>>,
    acc: Vec<FieldElem>,
    touched: Vec<u32>,
    in_touched: Vec<bool>,
    consumed: u64,
}

impl Echelon {
    pub fn new(field: PrimeField, dim: usize) -> Self {
        Self {
            field,
            dim,
            rows: Vec::new(),
            pivot_row: vec![NONE; dim],
            occurs: vec![Vec::new(); dim],
            acc: vec![FieldElem::ZERO; dim],
            touched: Vec::new(),
            in_touched: vec![false; dim],
            consumed: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Rows offered so far, including dependent ones.
    pub fn rows_consumed(&self) -> u64 {
        self.consumed
    }

    pub fn is_pivot(&self, col: u32) -> bool {
        self.pivot_row[col as usize] != NONE
    }

    fn check(&self, v: &SparseVec) -> Result<()> {
        if v.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.dim,
            });
        }
        if let Some(&(i, _)) = v.entries.last() {
            if i as usize >= self.dim {
                return Err(Error::CoordinateOutOfRange {
                    index: i as usize,
                    dim: self.dim,
                });
            }
        }
        Ok(())
    }

    #[inline]
    fn bump(&mut self, col: u32, c: FieldElem) {
        let k = col as usize;
        if !self.in_touched[k] {
            self.in_touched[k] = true;
            self.touched.push(col);
        }
        self.acc[k] = self.field.add(self.acc[k], c);
    }

    /// Remainder of `v` modulo the current row space.
    fn reduce_entries(&mut self, v: &[(u32, FieldElem)]) -> Vec<(u32, FieldElem)> {
        for &(c, a) in v {
            let r = self.pivot_row[c as usize];
            if r == NONE {
                self.bump(c, a);
            } else {
                let na = self.field.neg(a);
                let row = std::mem::take(&mut self.rows[r as usize]);
                for &(c2, b) in &row[1..] {
                    self.bump(c2, self.field.mul(na, b));
                }
                self.rows[r as usize] = row;
            }
        }
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &c in &self.touched {
            let k = c as usize;
            if !self.acc[k].is_zero() {
                out.push((c, self.acc[k]));
            }
            self.acc[k] = FieldElem::ZERO;
            self.in_touched[k] = false;
        }
        self.touched.clear();
        out
    }

    pub fn reduce(&mut self, v: &SparseVec) -> Result<SparseVec> {
        self.check(v)?;
        Ok(SparseVec {
            dim: self.dim,
            entries: self.reduce_entries(&v.entries),
        })
    }

    /// Adds a row; returns whether the rank grew.
    pub fn push(&mut self, v: &SparseVec) -> Result<bool> {
        self.check(v)?;
        self.consumed += 1;
        if v.entries.is_empty() {
            return Ok(false);
        }
        let mut row = self.reduce_entries(&v.entries);
        let Some(&(lead, lc)) = row.first() else {
            return Ok(false);
        };
        if lc != FieldElem::ONE {
            let inv = self.field.inv(lc)?;
            for e in row.iter_mut() {
                e.1 = self.field.mul(e.1, inv);
            }
        }
        let new_idx = self.rows.len() as u32;
        let users = std::mem::take(&mut self.occurs[lead as usize]);
        for r in users {
            let target = &self.rows[r as usize];
            let Ok(pos) = target.binary_search_by_key(&lead, |e| e.0) else {
                continue;
            };
            let coef = self.field.neg(target[pos].1);
            let mut fresh = Vec::new();
            let merged = merge_scaled(&self.field, target, &row, coef, |c| fresh.push(c));
            self.rows[r as usize] = merged;
            for c in fresh {
                if c != lead {
                    self.occurs[c as usize].push(r);
                }
            }
        }
        for &(c, _) in &row[1..] {
            self.occurs[c as usize].push(new_idx);
        }
        self.pivot_row[lead as usize] = new_idx;
        self.rows.push(row);
        Ok(true)
    }

    pub fn push_all<'a>(&mut self, rows: impl IntoIterator<Item = &'a SparseVec>) -> Result<()> {
        for r in rows {
            self.push(r)?;
        }
        Ok(())
    }

    /// Row space as a [`Subspace`], basis sorted by pivot.
    pub fn row_space(&self) -> Subspace {
        let mut basis: Vec<SparseVec> = self
            .rows
            .iter()
            .map(|r| SparseVec {
                dim: self.dim,
                entries: r.clone(),
            })
            .collect();
        basis.sort_unstable_by_key(|v| v.entries[0].0);
        Subspace::from_rref(self.field, self.dim, basis)
    }

    /// Solutions of `R x = 0` for the rows pushed so far, in reduced echelon form.
    pub fn kernel(&self) -> Subspace {
        let mut null: Vec<Vec<(u32, FieldElem)>> = vec![Vec::new(); self.dim];
        for row in &self.rows {
            let pivot = row[0].0;
            for &(f, a) in &row[1..] {
                null[f as usize].push((pivot, self.field.neg(a)));
            }
        }
        let mut ech = Echelon::new(self.field, self.dim);
        for (f, mut entries) in null.into_iter().enumerate() {
            if self.pivot_row[f] != NONE {
                continue;
            }
            entries.push((f as u32, FieldElem::ONE));
            entries.sort_unstable_by_key(|e| e.0);
            ech.push(&SparseVec { dim: self.dim, entries })
                .expect("kernel vectors live in the ambient space");
        }
        ech.row_space()
    }
}

/// A subspace of `F_p^dim` held as a reduced row-echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    field: PrimeField,
    dim: usize,
    basis: Vec<SparseVec>,
    pivots: Vec<u32>,
}

impl Subspace {
    fn from_rref(field: PrimeField, dim: usize, basis: Vec<SparseVec>) -> Self {
        let pivots = basis.iter().map(|v| v.entries[0].0).collect();
        Self {
            field,
            dim,
            basis,
            pivots,
        }
    }

    pub fn zero(field: PrimeField, dim: usize) -> Self {
        Self::from_rref(field, dim, Vec::new())
    }

    pub fn full(field: PrimeField, dim: usize) -> Self {
        Self::from_rref(field, dim, (0..dim).map(|i| SparseVec::unit(dim, i)).collect())
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    pub fn pivots(&self) -> &[u32] {
        &self.pivots
    }

    fn check(&self, v: &SparseVec) -> Result<()> {
        if v.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.dim,
            });
        }
        Ok(())
    }

    fn pivot_index(&self, col: u32) -> Option<usize> {
        self.pivots.binary_search(&col).ok()
    }

    /// `v` minus its projection along the pivot coordinates.
    pub fn reduce(&self, v: &SparseVec) -> Result<SparseVec> {
        self.check(v)?;
        let mut out = v.clone();
        for &(c, a) in v.entries() {
            if let Some(k) = self.pivot_index(c) {
                out = out.add_scaled(&self.field, &self.basis[k], self.field.neg(a));
            }
        }
        Ok(out)
    }

    pub fn contains(&self, v: &SparseVec) -> Result<bool> {
        Ok(self.reduce(v)?.is_zero())
    }

    /// Coordinates of `v` in this basis, or `None` if `v` is not a member.
    pub fn coordinates(&self, v: &SparseVec) -> Result<Option<Vec<(usize, FieldElem)>>> {
        self.check(v)?;
        let coords: Vec<(usize, FieldElem)> = v
            .entries()
            .iter()
            .filter_map(|&(c, a)| self.pivot_index(c).map(|k| (k, a)))
            .collect();
        let mut rebuilt = SparseVec::zero(self.dim);
        for &(k, a) in &coords {
            rebuilt = rebuilt.add_scaled(&self.field, &self.basis[k], a);
        }
        Ok((rebuilt == *v).then_some(coords))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        for v in &self.basis {
            if !other.contains(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        echelonize(self.field, self.dim, self.basis.iter().chain(other.basis.iter()))
    }

    /// Intersection via the kernel of the stacked bases `[A | −B]`.
    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let (ra, rb) = (self.rank(), other.rank());
        let unknowns = ra + rb;
        let mut columns: Vec<Vec<(u32, FieldElem)>> = vec![Vec::new(); self.dim];
        for (i, v) in self.basis.iter().enumerate() {
            for &(c, a) in v.entries() {
                columns[c as usize].push((i as u32, a));
            }
        }
        for (j, v) in other.basis.iter().enumerate() {
            for &(c, a) in v.entries() {
                columns[c as usize].push(((ra + j) as u32, self.field.neg(a)));
            }
        }
        let mut ech = Echelon::new(self.field, unknowns);
        for col in columns {
            if !col.is_empty() {
                ech.push(&SparseVec::from_sorted(unknowns, col))?;
            }
        }
        let kernel = ech.kernel();
        let mut out = Echelon::new(self.field, self.dim);
        for z in kernel.basis() {
            let mut v = SparseVec::zero(self.dim);
            for &(i, a) in z.entries() {
                if (i as usize) < ra {
                    v = v.add_scaled(&self.field, &self.basis[i as usize], a);
                }
            }
            out.push(&v)?;
        }
        Ok(out.row_space())
    }
}

/// Reduced row-echelon basis of the span of `rows`.
pub fn echelonize<'a>(
    field: PrimeField,
    dim: usize,
    rows: impl IntoIterator<Item = &'a SparseVec>,
) -> Result<Subspace> {
    let mut ech = Echelon::new(field, dim);
    ech.push_all(rows)?;
    Ok(ech.row_space())
}

/// A finite stream of constraint rows over a fixed number of unknowns.
pub struct ConstraintStream<'a> {
    dim: usize,
    rows: Box<dyn Iterator<Item = SparseVec> + 'a>,
}

impl<'a> ConstraintStream<'a> {
    pub fn new(dim: usize, rows: impl Iterator<Item = SparseVec> + 'a) -> Self {
        Self {
            dim,
            rows: Box::new(rows),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Appends another stream over the same unknowns.
    pub fn chain(self, other: ConstraintStream<'a>) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(Self {
            dim: self.dim,
            rows: Box::new(self.rows.chain(other.rows)),
        })
    }
}

impl Iterator for ConstraintStream<'_> {
    type Item = SparseVec;

    fn next(&mut self) -> Option<SparseVec> {
        self.rows.next()
    }
}

/// Counters from a streamed elimination.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NullspaceStats {
    pub rows_consumed: u64,
    pub rank: usize,
}

/// Kernel of the streamed rows, consumed one at a time.
pub fn nullspace(field: PrimeField, stream: ConstraintStream<'_>) -> Result<(Subspace, NullspaceStats)> {
    let mut ech = Echelon::new(field, stream.dim());
    for row in stream {
        ech.push(&row)?;
    }
    let stats = NullspaceStats {
        rows_consumed: ech.rows_consumed(),
        rank: ech.rank(),
    };
    Ok((ech.kernel(), stats))
}

/// Gauss-Jordan on a dense matrix; the cross-check path for small dimensions.
pub fn dense_rref(field: &PrimeField, dim: usize, rows: &[SparseVec]) -> Result<Subspace> {
    if dim > DENSE_LIMIT {
        return Err(Error::Infeasible {
            mode: "dense",
            unknowns: dim,
            limit: DENSE_LIMIT,
        });
    }
    let mut m: Vec<Vec<FieldElem>> = Vec::with_capacity(rows.len());
    for r in rows {
        if r.dim != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: r.dim,
            });
        }
        m.push(r.to_dense());
    }
    let mut rank = 0;
    for col in 0..dim {
        let Some(sel) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, sel);
        let inv = field.inv(m[rank][col])?;
        for x in m[rank].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == rank || row[col].is_zero() {
                continue;
            }
            let c = field.neg(row[col]);
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x = field.add(*x, field.mul(c, y));
            }
        }
        rank += 1;
    }
    m.truncate(rank);
    let basis = m.iter().map(|r| SparseVec::from_dense(dim, r)).collect();
    Ok(Subspace::from_rref(*field, dim, basis))
}

/// Dense kernel of `rows`, for cross-checking [`nullspace`].
pub fn dense_nullspace(field: &PrimeField, dim: usize, rows: &[SparseVec]) -> Result<Subspace> {
    let rref = dense_rref(field, dim, rows)?;
    let mut vecs = Vec::new();
    for f in 0..dim as u32 {
        if rref.pivots.binary_search(&f).is_ok() {
            continue;
        }
        let mut x = vec![FieldElem::ZERO; dim];
        x[f as usize] = FieldElem::ONE;
        for (k, &pc) in rref.pivots.iter().enumerate() {
            x[pc as usize] = field.neg(rref.basis[k].get(f));
        }
        vecs.push(SparseVec::from_dense(dim, &x));
    }
    dense_rref(field, dim, &vecs)
}
