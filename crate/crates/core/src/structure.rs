//! Structure constants of SHO on its fixed basis, the toral subalgebra
//! `T_SHO`, weight-space decompositions and centralizers.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cartan::AlgebraChain;
use crate::error::{Error, Result};
use crate::ffield::{FieldElem, PrimeField};
use crate::lambda::{AlgebraContext, MonoId, Monomial, Parity, SuperPoly};
use crate::linalg::{echelonize, nullspace, ConstraintStream, Echelon, SparseVec, Subspace};
use crate::witt::VectorField;

/// Coordinates `c_{ab}^k` of `[e_a, e_b] = Σ_k c_{ab}^k e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureTensor {
    field: PrimeField,
    dim: usize,
    parities: Vec<Parity>,
    zdegrees: Vec<i64>,
    brackets: Vec<SparseVec>,
    torals: Vec<SparseVec>,
}

impl StructureTensor {
    /// Assembles a tensor from `(a, b, k, c)` quadruples.
    pub fn from_entries(
        field: PrimeField,
        parities: Vec<Parity>,
        zdegrees: Vec<i64>,
        entries: impl IntoIterator<Item = (usize, usize, usize, FieldElem)>,
        torals: Vec<SparseVec>,
    ) -> Result<Self> {
        let dim = parities.len();
        if zdegrees.len() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                found: zdegrees.len(),
            });
        }
        let mut raw: Vec<Vec<(u32, FieldElem)>> = vec![Vec::new(); dim * dim];
        for (a, b, k, c) in entries {
            for idx in [a, b, k] {
                if idx >= dim {
                    return Err(Error::CoordinateOutOfRange { index: idx, dim });
                }
            }
            raw[a * dim + b].push((k as u32, c));
        }
        let brackets = raw
            .into_iter()
            .map(|e| SparseVec::from_entries(&field, dim, e))
            .collect::<Result<_>>()?;
        for t in &torals {
            if t.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: t.dim(),
                });
            }
        }
        Ok(Self {
            field,
            dim,
            parities,
            zdegrees,
            brackets,
            torals,
        })
    }

    /// A tensor with every bracket zero.
    pub fn abelian(field: PrimeField, parities: Vec<Parity>) -> Self {
        let dim = parities.len();
        Self {
            field,
            dim,
            zdegrees: vec![0; dim],
            parities,
            brackets: vec![SparseVec::zero(dim); dim * dim],
            torals: Vec::new(),
        }
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parity(&self, a: usize) -> Parity {
        self.parities[a]
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parities
    }

    pub fn zdegrees(&self) -> &[i64] {
        &self.zdegrees
    }

    /// Toral elements `h_i` in basis coordinates (empty when unknown).
    pub fn torals(&self) -> &[SparseVec] {
        &self.torals
    }

    /// `[e_a, e_b]` in basis coordinates.
    #[inline]
    pub fn bracket_basis(&self, a: usize, b: usize) -> &SparseVec {
        &self.brackets[a * self.dim + b]
    }

    pub fn coeff(&self, a: usize, b: usize, k: usize) -> FieldElem {
        self.bracket_basis(a, b).get(k as u32)
    }

    /// All nonzero `(a, b, k, c)` in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, FieldElem)> + '_ {
        (0..self.dim).flat_map(move |a| {
            (0..self.dim).flat_map(move |b| {
                self.bracket_basis(a, b)
                    .entries()
                    .iter()
                    .map(move |&(k, c)| (a, b, k as usize, c))
            })
        })
    }

    pub fn nnz(&self) -> usize {
        self.brackets.iter().map(SparseVec::nnz).sum()
    }

    /// Bilinear bracket of coordinate vectors.
    pub fn bracket(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let f = &self.field;
        let mut acc = vec![FieldElem::ZERO; self.dim];
        for &(a, xa) in x.entries() {
            for &(b, yb) in y.entries() {
                let s = f.mul(xa, yb);
                for &(k, c) in self.bracket_basis(a as usize, b as usize).entries() {
                    acc[k as usize] = f.add(acc[k as usize], f.mul(s, c));
                }
            }
        }
        SparseVec::from_dense(self.dim, &acc)
    }

    /// Number of `(a, b)` violating `c_{ab} = −(−1)^{d(a)d(b)} c_{ba}`.
    pub fn skew_violations(&self) -> usize {
        let f = &self.field;
        let mut bad = 0;
        for a in 0..self.dim {
            for b in 0..self.dim {
                let odd = self.parities[a].sign_odd(self.parities[b]);
                let mirrored = self.bracket_basis(b, a).scale(f, f.sign(!odd));
                if *self.bracket_basis(a, b) != mirrored {
                    bad += 1;
                }
            }
        }
        bad
    }

    /// Whether `[e_a,[e_b,e_c]] = [[e_a,e_b],e_c] + (−1)^{d(a)d(b)} [e_b,[e_a,e_c]]`.
    pub fn jacobi_holds(&self, a: usize, b: usize, c: usize) -> bool {
        let f = &self.field;
        let d = self.dim;
        let (ea, eb, ec) = (SparseVec::unit(d, a), SparseVec::unit(d, b), SparseVec::unit(d, c));
        let lhs = self.bracket(&ea, self.bracket_basis(b, c));
        let r1 = self.bracket(self.bracket_basis(a, b), &ec);
        let r2 = self.bracket(&eb, self.bracket_basis(a, c));
        let odd = self.parities[a].sign_odd(self.parities[b]);
        lhs == r1.add_scaled(f, &r2, f.sign(odd))
    }

    /// Jacobi violations over all basis triples.
    pub fn jacobi_violations_exhaustive(&self) -> usize {
        let d = self.dim;
        (0..d)
            .into_par_iter()
            .map(|a| {
                let mut bad = 0;
                for b in 0..d {
                    for c in 0..d {
                        if !self.jacobi_holds(a, b, c) {
                            bad += 1;
                        }
                    }
                }
                bad
            })
            .sum()
    }

    /// Jacobi violations on `samples` random basis triples.
    pub fn jacobi_violations_sampled(&self, rng: &mut impl Rng, samples: usize) -> usize {
        if self.dim == 0 {
            return 0;
        }
        let triples: Vec<(usize, usize, usize)> = (0..samples)
            .map(|_| {
                (
                    rng.gen_range(0..self.dim),
                    rng.gen_range(0..self.dim),
                    rng.gen_range(0..self.dim),
                )
            })
            .collect();
        triples
            .par_iter()
            .filter(|&&(a, b, c)| !self.jacobi_holds(a, b, c))
            .count()
    }

    /// Weight of each basis vector on the stored torals, if every basis vector
    /// is a simultaneous eigenvector.
    pub fn basis_weights(&self) -> Option<Vec<WeightVector>> {
        if self.torals.is_empty() {
            return None;
        }
        let mut out = Vec::with_capacity(self.dim);
        for a in 0..self.dim {
            let ea = SparseVec::unit(self.dim, a);
            let mut w = Vec::with_capacity(self.torals.len());
            for t in &self.torals {
                let image = self.bracket(t, &ea);
                let mu = image.get(a as u32);
                if image != ea.scale(&self.field, mu) {
                    return None;
                }
                w.push(mu);
            }
            out.push(WeightVector(w));
        }
        Some(out)
    }
}

/// Structure constants of SHO on the chain's echelon basis.
pub fn structure_constants(chain: &AlgebraChain) -> Result<StructureTensor> {
    let ctx = chain.ctx();
    let basis = chain.basis_vf();
    let d = basis.len();
    let rows: Vec<Vec<SparseVec>> = (0..d)
        .into_par_iter()
        .map(|a| {
            (0..d)
                .map(|b| {
                    let w = ctx.bracket_unchecked(&basis[a], &basis[b]).to_sparse(ctx);
                    let coords = chain.sho.coordinates(&w)?.ok_or(Error::NotSubalgebra(a, b))?;
                    Ok(SparseVec::from_sorted(
                        d,
                        coords.into_iter().map(|(k, c)| (k as u32, c)).collect(),
                    ))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let parities = basis
        .iter()
        .map(|v| v.parity(ctx).expect("echelon basis vectors are homogeneous"))
        .collect();
    let mut torals = Vec::new();
    for h in toral_basis(ctx) {
        match chain.sho.coordinates(&h.to_sparse(ctx))? {
            Some(c) => torals.push(SparseVec::from_sorted(
                d,
                c.into_iter().map(|(k, x)| (k as u32, x)).collect(),
            )),
            None => {
                torals.clear();
                break;
            }
        }
    }
    Ok(StructureTensor {
        field: *ctx.field(),
        dim: d,
        parities,
        zdegrees: chain.basis_zdegrees(),
        brackets: rows.into_iter().flatten().collect(),
        torals,
    })
}

/// Eigenvalues on the toral basis `h_1, …, h_{n−1}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(pub Vec<FieldElem>);

/// `h_i = T_H(x_i x_{i′} − x_{i+1} x_{(i+1)′})` for `i = 1..n−1`.
pub fn toral_basis(ctx: &AlgebraContext) -> Vec<VectorField> {
    let n = ctx.n();
    let pair = |i: usize| {
        let mut alpha = vec![0; n];
        alpha[i - 1] = 1;
        let m = Monomial::new(alpha, &[i + n]).expect("valid pair monomial");
        ctx.id_of(&m).expect("x_i x_i' lies in every truncation")
    };
    (1..n)
        .map(|i| {
            let f = SuperPoly::from_terms(ctx, [(pair(i), FieldElem::ONE), (pair(i + 1), ctx.field().elem(-1))]);
            ctx.t_h(&f)
        })
        .collect()
}

/// Closed-form weight of `T_H(x^(α)x^u)` on the toral basis:
/// `δ(i′ ∈ u) − α_i + α_j − δ(j′ ∈ u)` with `j = i + 1`.
pub fn monomial_weight(ctx: &AlgebraContext, m: MonoId) -> WeightVector {
    let n = ctx.n();
    let f = ctx.field();
    let alpha = ctx.alpha(m);
    let u = ctx.odd_set(m);
    WeightVector(
        (1..n)
            .map(|i| {
                let j = i + 1;
                let v = u.contains(n, i + n) as i64 - alpha[i - 1] as i64 + alpha[j - 1] as i64
                    - u.contains(n, j + n) as i64;
                f.elem(v)
            })
            .collect(),
    )
}

/// Matrix of `ad h` on `space` in its own basis: `out[k]` lists `(i, M_{ki})`.
fn action_matrix(ctx: &AlgebraContext, space: &Subspace, h: &VectorField) -> Result<Vec<Vec<(u32, FieldElem)>>> {
    let images: Vec<Option<Vec<(usize, FieldElem)>>> = space
        .basis()
        .par_iter()
        .map(|v| {
            let vf = VectorField::from_sparse(ctx, v)?;
            space.coordinates(&ctx.bracket_unchecked(h, &vf).to_sparse(ctx))
        })
        .collect::<Result<_>>()?;
    let mut rows = vec![Vec::new(); space.rank()];
    for (i, coords) in images.into_iter().enumerate() {
        let coords = coords
            .ok_or_else(|| Error::WeightDecomposition(format!("basis vector {i} is not mapped into the space")))?;
        for (k, c) in coords {
            rows[k].push((i as u32, c));
        }
    }
    Ok(rows)
}

/// Simultaneous eigenspace decomposition of `space` under the given torals.
pub fn weight_decompose(
    ctx: &AlgebraContext,
    space: &Subspace,
    torals: &[VectorField],
) -> Result<BTreeMap<WeightVector, Subspace>> {
    let fld = *ctx.field();
    let mut parts: Vec<(Vec<FieldElem>, Subspace)> = vec![(Vec::new(), space.clone())];
    for h in torals {
        let mut next = Vec::new();
        for (weight, part) in parts {
            let r = part.rank();
            let matrix = action_matrix(ctx, &part, h)?;
            let mut found = 0;
            for lambda in fld.elements() {
                let rows = matrix.iter().enumerate().map(|(k, row)| {
                    let mut entries = row.clone();
                    entries.push((k as u32, fld.neg(lambda)));
                    SparseVec::from_entries(&fld, r, entries).expect("indices below rank")
                });
                let (kernel, _) = nullspace(fld, ConstraintStream::new(r, rows))?;
                if kernel.rank() == 0 {
                    continue;
                }
                found += kernel.rank();
                let mut ech = Echelon::new(fld, part.dim());
                for y in kernel.basis() {
                    let mut v = SparseVec::zero(part.dim());
                    for &(i, c) in y.entries() {
                        v = v.add_scaled(&fld, &part.basis()[i as usize], c);
                    }
                    ech.push(&v)?;
                }
                let mut w = weight.clone();
                w.push(lambda);
                next.push((w, ech.row_space()));
            }
            if found != r {
                return Err(Error::WeightDecomposition(format!(
                    "toral action is not semisimple: eigenspaces span {found} of {r} dimensions"
                )));
            }
        }
        parts = next;
    }
    Ok(parts.into_iter().map(|(w, s)| (WeightVector(w), s)).collect())
}

/// `{x : [x, u] = 0 for every basis vector u of U}`, `U` in basis coordinates.
pub fn centralizer(tensor: &StructureTensor, u: &Subspace) -> Result<Subspace> {
    let d = tensor.dim();
    if u.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: u.dim(),
        });
    }
    let mut rows: Vec<SparseVec> = Vec::new();
    for uv in u.basis() {
        let mut by_output: Vec<Vec<(u32, FieldElem)>> = vec![Vec::new(); d];
        for a in 0..d {
            let image = tensor.bracket(&SparseVec::unit(d, a), uv);
            for &(k, c) in image.entries() {
                by_output[k as usize].push((a as u32, c));
            }
        }
        rows.extend(by_output.into_iter().map(|r| SparseVec::from_sorted(d, r)));
    }
    Ok(nullspace(*tensor.field(), ConstraintStream::new(d, rows.into_iter()))?.0)
}

/// The ideal generated by `v`, by bracketing with basis vectors to a fixed point.
pub fn ideal_generated(tensor: &StructureTensor, v: &SparseVec) -> Result<Subspace> {
    let d = tensor.dim();
    let mut ech = Echelon::new(*tensor.field(), d);
    let mut queue = vec![v.clone()];
    ech.push(v)?;
    while let Some(w) = queue.pop() {
        for a in 0..d {
            let image = tensor.bracket(&SparseVec::unit(d, a), &w);
            if ech.push(&image)? {
                queue.push(image);
            }
            if ech.rank() == d {
                return Ok(ech.row_space());
            }
        }
    }
    Ok(ech.row_space())
}

/// Whether every basis vector generates the whole algebra as an ideal.
pub fn basis_ideals_are_whole(tensor: &StructureTensor) -> Result<bool> {
    let d = tensor.dim();
    if d == 0 {
        return Ok(false);
    }
    let ranks: Vec<usize> = (0..d)
        .into_par_iter()
        .map(|a| ideal_generated(tensor, &SparseVec::unit(d, a)).map(|s| s.rank()))
        .collect::<Result<_>>()?;
    Ok(ranks.iter().all(|&r| r == d))
}

/// Diagnostics deciding whether a tensor describes a simple algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Simplicity {
    pub dim: usize,
    pub basis_ideals_whole: bool,
    pub centerless: bool,
    pub perfect: bool,
}

impl Simplicity {
    /// Zero, or failing any of the three tests.
    pub fn degenerate(&self) -> bool {
        self.dim == 0 || !(self.basis_ideals_whole && self.centerless && self.perfect)
    }
}

pub fn simplicity(tensor: &StructureTensor) -> Result<Simplicity> {
    let d = tensor.dim();
    let fld = *tensor.field();
    let derived = echelonize(fld, d, tensor.brackets.iter())?;
    Ok(Simplicity {
        dim: d,
        basis_ideals_whole: basis_ideals_are_whole(tensor)?,
        centerless: centralizer(tensor, &Subspace::full(fld, d))?.rank() == 0,
        perfect: derived.rank() == d,
    })
}

/// Subspace of basis coordinates spanned by the basis vectors of Z-degree `r`.
pub fn degree_coordinates(tensor: &StructureTensor, r: i64) -> Subspace {
    let d = tensor.dim();
    let units: Vec<SparseVec> = (0..d)
        .filter(|&a| tensor.zdegrees[a] == r)
        .map(|a| SparseVec::unit(d, a))
        .collect();
    echelonize(*tensor.field(), d, &units).expect("unit vectors share the ambient dimension")
}
