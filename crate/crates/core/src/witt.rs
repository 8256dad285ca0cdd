//! The generalized Witt superalgebra W(n,n;t) of vector fields `Σ f_j D_j`.
//!
//! A vector field is stored in W-coordinates: the basis vector `x^(α)x^u D_j` has
//! coordinate `mono_id * 2n + (j − 1)`, so coordinates are ordered by the Z-degree
//! of the coefficient monomial first.
//!
//! Functions and vector fields are mixed in the divergence identity. The action
//! convention used there is `[D, g] := D(g)` and `[g, E] := −(−1)^{d(g)d(E)} E(g)`,
//! see [`DivergenceConvention`].

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::ffield::{FieldElem, PrimeField};
use crate::lambda::{accumulate, AlgebraContext, Grading, MonoId, Parity, ParityClass, SuperPoly};
use crate::linalg::SparseVec;

/// Sparse element of W(n,n;t); zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    tag: u64,
    terms: BTreeMap<u32, FieldElem>,
}

impl AlgebraContext {
    /// dim W(n,n;t) = 2n · dim Λ.
    pub fn w_dim(&self) -> usize {
        self.dim() * self.directions()
    }

    /// W-coordinate of `m D_j` (1-based `j`).
    #[inline]
    pub fn w_coord(&self, m: MonoId, j: usize) -> u32 {
        (m.index() * self.directions() + j - 1) as u32
    }

    /// Inverse of [`AlgebraContext::w_coord`].
    #[inline]
    pub fn w_split(&self, coord: u32) -> (MonoId, usize) {
        let dirs = self.directions() as u32;
        (MonoId(coord / dirs), (coord % dirs) as usize + 1)
    }

    /// Parity of the basis vector at a W-coordinate: `|u| + τ(j)`.
    #[inline]
    pub fn w_parity(&self, coord: u32) -> Parity {
        let (m, j) = self.w_split(coord);
        self.parity_of(m) + self.tau(j)
    }

    /// Z-degree of the basis vector at a W-coordinate: `|α| + |u| − 1`.
    #[inline]
    pub fn w_zdegree(&self, coord: u32) -> i64 {
        self.zdegree_of(self.w_split(coord).0) as i64 - 1
    }

    fn check_vf(&self, v: &VectorField) -> Result<()> {
        if v.tag == self.tag() {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    fn check_poly(&self, f: &SuperPoly) -> Result<()> {
        if f.tag() == self.tag() {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    /// `Σ f_j D_j(g)`.
    pub fn apply(&self, vf: &VectorField, g: &SuperPoly) -> Result<SuperPoly> {
        self.check_vf(vf)?;
        self.check_poly(g)?;
        Ok(self.apply_unchecked(vf, g))
    }

    pub(crate) fn apply_unchecked(&self, vf: &VectorField, g: &SuperPoly) -> SuperPoly {
        let fld = self.field();
        let mut out = SuperPoly::zero(self);
        for (&coord, &c) in &vf.terms {
            let (f, j) = self.w_split(coord);
            for (gm, gc) in g.terms() {
                let Some((s, dg)) = self.derive_id(j, gm) else {
                    continue;
                };
                if let Some((s2, prod)) = self.mul_ids(f, dg) {
                    out.add_term(fld, prod, fld.mul(fld.mul(s, s2), fld.mul(c, gc)));
                }
            }
        }
        out
    }

    /// Super-bracket, extended bilinearly over basis vector fields.
    pub fn bracket(&self, a: &VectorField, b: &VectorField) -> Result<VectorField> {
        self.check_vf(a)?;
        self.check_vf(b)?;
        Ok(self.bracket_unchecked(a, b))
    }

    pub(crate) fn bracket_unchecked(&self, a: &VectorField, b: &VectorField) -> VectorField {
        let fld = self.field();
        let mut out = VectorField::zero(self);
        for (&ca, &xa) in &a.terms {
            for (&cb, &xb) in &b.terms {
                self.bracket_basis_into(ca, cb, fld.mul(xa, xb), &mut out.terms);
            }
        }
        out
    }

    /// Adds `scale · [e_ca, e_cb]` to `out`.
    fn bracket_basis_into(&self, ca: u32, cb: u32, scale: FieldElem, out: &mut BTreeMap<u32, FieldElem>) {
        let fld = self.field();
        let (f, i) = self.w_split(ca);
        let (g, j) = self.w_split(cb);
        // f D_i(g) D_j
        if let Some((s, dg)) = self.derive_id(i, g) {
            if let Some((s2, prod)) = self.mul_ids(f, dg) {
                accumulate(fld, out, self.w_coord(prod, j), fld.mul(scale, fld.mul(s, s2)));
            }
        }
        // −(−1)^{d(fD_i)d(gD_j)} g D_j(f) D_i
        if let Some((s, df)) = self.derive_id(j, f) {
            if let Some((s2, prod)) = self.mul_ids(g, df) {
                let odd = self.w_parity(ca).sign_odd(self.w_parity(cb));
                let c = fld.signed(!odd, fld.mul(scale, fld.mul(s, s2)));
                accumulate(fld, out, self.w_coord(prod, i), c);
            }
        }
    }

    /// `Σ (−1)^{τ(i)d(f_i)} D_i(f_i)`.
    pub fn divergence(&self, vf: &VectorField) -> Result<SuperPoly> {
        self.check_vf(vf)?;
        Ok(self.divergence_unchecked(vf))
    }

    pub(crate) fn divergence_unchecked(&self, vf: &VectorField) -> SuperPoly {
        let fld = self.field();
        let mut out = SuperPoly::zero(self);
        for (&coord, &c) in &vf.terms {
            let (f, i) = self.w_split(coord);
            if let Some((s, df)) = self.derive_id(i, f) {
                let odd = self.tau(i).sign_odd(self.parity_of(f));
                out.add_term(fld, df, fld.signed(odd, fld.mul(s, c)));
            }
        }
        out
    }

    pub fn vf_grading(&self, vf: &VectorField) -> Grading {
        let parities: BTreeSet<Parity> = vf.terms.keys().map(|&c| self.w_parity(c)).collect();
        let zdegrees = vf.terms.keys().map(|&c| self.w_zdegree(c)).collect();
        let parity = match parities.len() {
            0 => ParityClass::Pure(Parity::Even),
            1 => ParityClass::Pure(*parities.iter().next().unwrap()),
            _ => ParityClass::Mixed,
        };
        Grading { parity, zdegrees }
    }

    /// Renders `c * mono * D_j + ...`, or `0`.
    pub fn render_vf(&self, vf: &VectorField) -> String {
        if vf.is_zero() {
            return "0".into();
        }
        vf.terms
            .iter()
            .map(|(&coord, c)| {
                let (m, j) = self.w_split(coord);
                format!("{} * {} * D{}", c, self.render_monomial(m), j)
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl VectorField {
    pub fn zero(ctx: &AlgebraContext) -> Self {
        Self {
            tag: ctx.tag(),
            terms: BTreeMap::new(),
        }
    }

    /// `c · m D_j`.
    pub fn basis(ctx: &AlgebraContext, m: MonoId, j: usize, c: FieldElem) -> Self {
        let mut out = Self::zero(ctx);
        out.add_term(ctx.field(), ctx.w_coord(m, j), c);
        out
    }

    /// `Σ f_j D_j` from coefficient functions, `j` 1-based.
    pub fn from_components(ctx: &AlgebraContext, comps: &[(SuperPoly, usize)]) -> Result<Self> {
        let mut out = Self::zero(ctx);
        for (f, j) in comps {
            ctx.check_direction(*j)?;
            ctx.check_poly(f)?;
            for (m, c) in f.terms() {
                out.add_term(ctx.field(), ctx.w_coord(m, *j), c);
            }
        }
        Ok(out)
    }

    pub fn from_sparse(ctx: &AlgebraContext, v: &SparseVec) -> Result<Self> {
        if v.dim() != ctx.w_dim() {
            return Err(Error::DimensionMismatch {
                expected: ctx.w_dim(),
                found: v.dim(),
            });
        }
        let mut out = Self::zero(ctx);
        out.terms.extend(v.entries().iter().copied());
        Ok(out)
    }

    pub fn to_sparse(&self, ctx: &AlgebraContext) -> SparseVec {
        SparseVec::from_sorted(ctx.w_dim(), self.terms.iter().map(|(&c, &x)| (c, x)).collect())
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

    pub fn coeff(&self, coord: u32) -> FieldElem {
        self.terms.get(&coord).copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, FieldElem)> + '_ {
        self.terms.iter().map(|(&c, &x)| (c, x))
    }

    pub fn add_term(&mut self, field: &PrimeField, coord: u32, c: FieldElem) {
        accumulate(field, &mut self.terms, coord, c);
    }

    pub fn add(&self, ctx: &AlgebraContext, other: &VectorField) -> Result<VectorField> {
        ctx.check_vf(self)?;
        ctx.check_vf(other)?;
        let mut out = self.clone();
        for (c, x) in other.terms() {
            out.add_term(ctx.field(), c, x);
        }
        Ok(out)
    }

    pub fn scale(&self, field: &PrimeField, c: FieldElem) -> VectorField {
        let mut out = VectorField {
            tag: self.tag,
            terms: BTreeMap::new(),
        };
        for (coord, x) in self.terms() {
            out.add_term(field, coord, field.mul(x, c));
        }
        out
    }

    pub fn sub(&self, ctx: &AlgebraContext, other: &VectorField) -> Result<VectorField> {
        self.add(ctx, &other.scale(ctx.field(), ctx.field().elem(-1)))
    }

    /// Parity if homogeneous; zero counts as even.
    pub fn parity(&self, ctx: &AlgebraContext) -> Option<Parity> {
        match ctx.vf_grading(self).parity {
            ParityClass::Pure(p) => Some(p),
            ParityClass::Mixed => None,
        }
    }
}

/// The two candidate meanings of a bracket between a function and a vector field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceConvention {
    /// `[g, E] = −(−1)^{d(g)d(E)} E(g)`, making the pairing super skew-symmetric.
    SkewAction,
    /// `[g, E] = +(−1)^{d(g)d(E)} E(g)`.
    SymmetricAction,
}

impl DivergenceConvention {
    pub const ALL: [DivergenceConvention; 2] =
        [DivergenceConvention::SkewAction, DivergenceConvention::SymmetricAction];
}

impl AlgebraContext {
    /// `div([D,E]) − [div D, E] − [D, div E]` under the given convention, for
    /// homogeneous `D`, `E`.
    pub fn divergence_defect(&self, conv: DivergenceConvention, d: &VectorField, e: &VectorField) -> Result<SuperPoly> {
        let fld = self.field();
        let (Some(pd), Some(pe)) = (d.parity(self), e.parity(self)) else {
            return Err(Error::InvalidMonomial(
                "divergence identity needs homogeneous inputs".into(),
            ));
        };
        let lhs = self.divergence(&self.bracket(d, e)?)?;
        let div_d = self.divergence_unchecked(d);
        let div_e = self.divergence_unchecked(e);
        let d_on_div_e = self.apply_unchecked(d, &div_e);
        // div is even, so d(div D) = d(D)
        let odd = pd.sign_odd(pe);
        let minus = match conv {
            DivergenceConvention::SkewAction => !odd,
            DivergenceConvention::SymmetricAction => odd,
        };
        let e_on_div_d = self.apply_unchecked(e, &div_d).scale(fld, fld.sign(minus));
        lhs.sub(self, &d_on_div_e.add(self, &e_on_div_d)?)
    }
}
