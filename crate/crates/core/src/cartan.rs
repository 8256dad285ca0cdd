//! The odd Hamiltonian map `T_H`, the algebras HO and S′, and the chain
//!
//! ```text
//! SHO′ = S′ ∩ HO,   SHŌ = [SHO′, SHO′],   SHO = [SHŌ, SHŌ]
//! ```
//!
//! All subspaces are held in W-coordinates. SHO is stored by its reduced
//! echelon basis rather than by `T_H`-preimages, which are not unique.

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::FieldElem;
use crate::lambda::{AlgebraContext, MonoId, SuperPoly};
use crate::linalg::{echelonize, nullspace, ConstraintStream, Echelon, SparseVec, Subspace};
use crate::witt::VectorField;

impl AlgebraContext {
    /// `T_H(f) = Σ_i (−1)^{τ(i)d(f)} D_i(f) D_{i′}`, applied per homogeneous term.
    pub fn t_h(&self, f: &SuperPoly) -> VectorField {
        let fld = self.field();
        let mut out = VectorField::zero(self);
        for (m, c) in f.terms() {
            let parity = self.parity_of(m);
            for i in 1..=self.directions() {
                if let Some((s, dm)) = self.derive_id(i, m) {
                    let odd = self.tau(i).sign_odd(parity);
                    out.add_term(fld, self.w_coord(dm, self.prime(i)), fld.signed(odd, fld.mul(s, c)));
                }
            }
        }
        out
    }

    /// `T_H` of a single basis monomial.
    pub fn t_h_monomial(&self, m: MonoId) -> VectorField {
        self.t_h(&SuperPoly::monomial(self, m, FieldElem::ONE))
    }
}

/// `HO = span{T_H(x^(α)x^u)}`.
pub fn build_ho(ctx: &AlgebraContext) -> Result<Subspace> {
    let images: Vec<SparseVec> = ctx.ids().map(|m| ctx.t_h_monomial(m).to_sparse(ctx)).collect();
    echelonize(*ctx.field(), ctx.w_dim(), &images)
}

/// Kernel of `f ↦ (D_1 f, …, D_2n f)`; `T_H(f) = 0` exactly on this kernel.
pub fn derivation_kernel(ctx: &AlgebraContext) -> Result<Subspace> {
    let dirs = ctx.directions();
    let mut rows: Vec<Vec<(u32, FieldElem)>> = vec![Vec::new(); ctx.dim() * dirs];
    for m in ctx.ids() {
        for i in 1..=dirs {
            if let Some((s, dm)) = ctx.derive_id(i, m) {
                rows[dm.index() * dirs + i - 1].push((m.0, s));
            }
        }
    }
    let dim = ctx.dim();
    let stream = rows.into_iter().map(move |r| SparseVec::from_sorted(dim, r));
    Ok(nullspace(*ctx.field(), ConstraintStream::new(dim, stream))?.0)
}

/// `S′ = {D ∈ W : div D = 0}`.
pub fn build_sprime(ctx: &AlgebraContext) -> Result<Subspace> {
    let wdim = ctx.w_dim();
    let mut rows: Vec<Vec<(u32, FieldElem)>> = vec![Vec::new(); ctx.dim()];
    for coord in 0..wdim as u32 {
        let (m, i) = ctx.w_split(coord);
        let e = VectorField::basis(ctx, m, i, FieldElem::ONE);
        for (target, c) in ctx.divergence(&e)?.terms() {
            rows[target.index()].push((coord, c));
        }
    }
    let stream = rows.into_iter().map(move |r| SparseVec::from_sorted(wdim, r));
    Ok(nullspace(*ctx.field(), ConstraintStream::new(wdim, stream))?.0)
}

/// Brackets of every ordered pair of basis vectors of `space`, row-major.
fn pair_brackets(ctx: &AlgebraContext, space: &Subspace) -> Result<Vec<Vec<SparseVec>>> {
    let fields: Vec<VectorField> = space
        .basis()
        .iter()
        .map(|v| VectorField::from_sparse(ctx, v))
        .collect::<Result<_>>()?;
    Ok(fields
        .par_iter()
        .map(|a| {
            fields
                .iter()
                .map(|b| ctx.bracket_unchecked(a, b).to_sparse(ctx))
                .collect()
        })
        .collect())
}

/// `[S, S]`; fails if some bracket of basis vectors leaves `S`.
pub fn derived_subalgebra(ctx: &AlgebraContext, space: &Subspace) -> Result<Subspace> {
    if space.dim() != ctx.w_dim() {
        return Err(Error::DimensionMismatch {
            expected: ctx.w_dim(),
            found: space.dim(),
        });
    }
    let brackets = pair_brackets(ctx, space)?;
    let outside = brackets.par_iter().enumerate().find_map_first(|(i, row)| {
        row.iter()
            .position(|b| !space.contains(b).unwrap_or(false))
            .map(|j| (i, j))
    });
    if let Some((i, j)) = outside {
        return Err(Error::NotSubalgebra(i, j));
    }
    let mut ech = Echelon::new(*ctx.field(), ctx.w_dim());
    for b in brackets.iter().flatten() {
        ech.push(b)?;
    }
    Ok(ech.row_space())
}

/// Dimensions of every stage of the chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainDims {
    pub w: usize,
    pub ho: usize,
    pub sprime: usize,
    pub sho_prime: usize,
    pub sho_bar: usize,
    pub sho: usize,
}

/// W ⊇ S′ ∩ HO = SHO′ ⊇ SHŌ ⊇ SHO, all in W-coordinates.
#[derive(Clone, Debug)]
pub struct AlgebraChain {
    ctx: AlgebraContext,
    pub ho: Subspace,
    pub sprime: Subspace,
    pub sho_prime: Subspace,
    pub sho_bar: Subspace,
    pub sho: Subspace,
    basis_vf: Vec<VectorField>,
}

impl AlgebraChain {
    pub fn ctx(&self) -> &AlgebraContext {
        &self.ctx
    }

    pub fn w(&self) -> Subspace {
        Subspace::full(*self.ctx.field(), self.ctx.w_dim())
    }

    /// The SHO basis in graded order.
    pub fn basis_vf(&self) -> &[VectorField] {
        &self.basis_vf
    }

    pub fn dims(&self) -> ChainDims {
        ChainDims {
            w: self.ctx.w_dim(),
            ho: self.ho.rank(),
            sprime: self.sprime.rank(),
            sho_prime: self.sho_prime.rank(),
            sho_bar: self.sho_bar.rank(),
            sho: self.sho.rank(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sho.rank() == 0
    }

    /// Z-degree of each SHO basis vector (basis vectors are degree-homogeneous).
    pub fn basis_zdegrees(&self) -> Vec<i64> {
        self.sho
            .basis()
            .iter()
            .map(|v| self.ctx.w_zdegree(v.entries()[0].0))
            .collect()
    }

    /// Intersection of SHO with the W-coordinates of Z-degree `r`, without range checks.
    pub fn degree_slice(&self, r: i64) -> Result<Subspace> {
        let wdim = self.ctx.w_dim();
        let coords: Vec<SparseVec> = (0..wdim as u32)
            .filter(|&c| self.ctx.w_zdegree(c) == r)
            .map(|c| SparseVec::unit(wdim, c as usize))
            .collect();
        let slice = echelonize(*self.ctx.field(), wdim, &coords)?;
        self.sho.intersection(&slice)
    }

    /// `SHO_r` for `−1 ≤ r ≤ ξ − 5`; empty (with a warning) outside that range.
    pub fn graded_component(&self, r: i64) -> Result<Subspace> {
        let top = self.ctx.xi() as i64 - 5;
        if r < -1 || r > top {
            warn!("graded component {r} outside -1..={top}; returning the zero subspace");
            return Ok(Subspace::zero(*self.ctx.field(), self.ctx.w_dim()));
        }
        self.degree_slice(r)
    }
}

/// Builds HO, S′ and the derived chain down to SHO.
pub fn build_chain(ctx: &AlgebraContext) -> Result<AlgebraChain> {
    let ho = build_ho(ctx)?;
    let sprime = build_sprime(ctx)?;
    let sho_prime = sprime.intersection(&ho)?;
    let sho_bar = derived_subalgebra(ctx, &sho_prime)?;
    let sho = derived_subalgebra(ctx, &sho_bar)?;
    let basis_vf = sho
        .basis()
        .iter()
        .map(|v| VectorField::from_sparse(ctx, v))
        .collect::<Result<_>>()?;
    Ok(AlgebraChain {
        ctx: ctx.clone(),
        ho,
        sprime,
        sho_prime,
        sho_bar,
        sho,
        basis_vf,
    })
}
