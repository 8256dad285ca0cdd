//! Construction of the special odd Hamiltonian Lie superalgebra `SHO(n,n;t)` over
//! the prime field F_p, together with exact tools for analysing its
//! skew-symmetric super-biderivations.
//!
//! Everything is computed over F_p itself rather than an algebraic closure:
//! every structure constant and every linear constraint is defined over F_p,
//! and kernel dimensions and proportionality relations do not change under
//! field extension.
//!
//! Module map, bottom-up:
//!
//! * [`ffield`]: prime field arithmetic, multi-indices, Lucas binomials.
//! * [`lambda`]: the superalgebra Λ(n,n;t), its basis and derivations `D_i`.
//! * [`witt`]: vector fields in W(n,n;t), bracket, divergence.
//! * [`linalg`]: streamed sparse elimination, subspaces, nullspaces.
//! * [`cartan`]: the map `T_H`, the algebras HO and S′, and the chain down to SHO.
//! * [`structure`]: structure constants, toral weights, centralizers.
//! * [`bider`]: the biderivation constraint system, its solver and lemma checks.

pub mod bider;
pub mod cartan;
pub mod error;
pub mod ffield;
pub mod lambda;
pub mod linalg;
pub mod structure;
pub mod witt;

pub use error::{Error, Result};
pub use ffield::{FieldElem, MultiIndex, PrimeField};
pub use lambda::{AlgebraContext, MonoId, Monomial, OddSet, Parity, SuperPoly};
pub use linalg::{SparseVec, Subspace};
pub use witt::VectorField;
