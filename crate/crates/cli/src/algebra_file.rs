//! The algebra file: a canonical JSON snapshot of a built SHO.
//!
//! Basis vectors are lists of `[monomial_key, direction, coeff]` triples in
//! W-coordinates. The monomial key of `x^(α) x^u` packs the odd set into the
//! low `n` bits and the divided-power exponents above them:
//!
//! ```text
//! key = umask + 2^n · Σ_i α_i · Π_{l<i} p^{t_l}
//! ```
//!
//! where bit `k` of `umask` is set when `x_{n+1+k}` belongs to `u` and
//! `α_1` is the least significant mixed-radix digit. Directions are 1-based.
//! Structure constants are `[a, b, k, c]` quadruples meaning
//! `[e_a, e_b] = Σ_k c e_k`, sorted lexicographically.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sho_core::cartan::{AlgebraChain, ChainDims};
use sho_core::structure::{Simplicity, StructureTensor};
use sho_core::{AlgebraContext, FieldElem, Parity, PrimeField, SparseVec};

use crate::error::{CliError, CliResult};
use crate::json::to_canonical_string;

pub const FORMAT_VERSION: u32 = 1;

pub const KEY_PACKING: &str = "umask + 2^n * sum_i alpha_i * prod_{l<i} p^t_l";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub format_version: u32,
    pub n: usize,
    pub p: u32,
    pub t: Vec<u32>,
    pub dims: ChainDims,
    pub degenerate: bool,
    pub simplicity: Simplicity,
    pub key_packing: String,
    pub basis: Vec<Vec<[u64; 3]>>,
    pub parities: Vec<u8>,
    pub zdegrees: Vec<i64>,
    pub torals: Vec<Vec<[u32; 2]>>,
    pub structure_constants: Vec<[u32; 4]>,
}

impl AlgebraFile {
    pub fn from_chain(chain: &AlgebraChain, tensor: &StructureTensor, simplicity: Simplicity) -> Self {
        let ctx = chain.ctx();
        let basis = chain
            .sho
            .basis()
            .iter()
            .map(|v| {
                v.entries()
                    .iter()
                    .map(|&(coord, c)| {
                        let (m, j) = ctx.w_split(coord);
                        [ctx.key(m), j as u64, c.value() as u64]
                    })
                    .collect()
            })
            .collect();
        AlgebraFile {
            format_version: FORMAT_VERSION,
            n: ctx.n(),
            p: ctx.p(),
            t: ctx.t().to_vec(),
            dims: chain.dims(),
            degenerate: simplicity.degenerate(),
            simplicity,
            key_packing: KEY_PACKING.to_string(),
            basis,
            parities: tensor.parities().iter().map(|p| p.bit() as u8).collect(),
            zdegrees: tensor.zdegrees().to_vec(),
            torals: tensor
                .torals()
                .iter()
                .map(|v| v.entries().iter().map(|&(i, c)| [i, c.value()]).collect())
                .collect(),
            structure_constants: tensor
                .entries()
                .map(|(a, b, k, c)| [a as u32, b as u32, k as u32, c.value()])
                .collect(),
        }
    }

    pub fn to_canonical_string(&self) -> String {
        to_canonical_string(self)
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        fs::write(path, self.to_canonical_string()).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let file: AlgebraFile = serde_json::from_str(&text).map_err(|e| CliError::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        if file.format_version != FORMAT_VERSION {
            return Err(CliError::Format {
                path: path.to_path_buf(),
                message: format!("unsupported format_version {}", file.format_version),
            });
        }
        file.to_tensor().map_err(|message| CliError::Format {
            path: path.to_path_buf(),
            message,
        })?;
        Ok(file)
    }

    pub fn context(&self) -> CliResult<AlgebraContext> {
        Ok(AlgebraContext::new(self.n, self.p, &self.t)?)
    }

    /// The structure tensor, validated against the header.
    pub fn to_tensor(&self) -> Result<StructureTensor, String> {
        let field = PrimeField::new(self.p).map_err(|e| e.to_string())?;
        let d = self.dims.sho;
        if self.parities.len() != d || self.zdegrees.len() != d || self.basis.len() != d {
            return Err(format!(
                "expected {d} basis vectors, parities and degrees, found {}, {} and {}",
                self.basis.len(),
                self.parities.len(),
                self.zdegrees.len()
            ));
        }
        let coeff = |c: u32| -> Result<FieldElem, String> {
            match field.checked(c) {
                Some(x) if !x.is_zero() => Ok(x),
                _ => Err(format!("coefficient {c} is not a nonzero residue mod {}", self.p)),
            }
        };
        let parities = self
            .parities
            .iter()
            .map(|&b| match b {
                0 => Ok(Parity::Even),
                1 => Ok(Parity::Odd),
                other => Err(format!("parity {other} is neither 0 nor 1")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut prev: Option<[u32; 4]> = None;
        let mut entries = Vec::with_capacity(self.structure_constants.len());
        for q in &self.structure_constants {
            if prev.is_some_and(|p| p[..3] >= q[..3]) {
                return Err(format!("structure constants out of order at {q:?}"));
            }
            prev = Some(*q);
            entries.push((q[0] as usize, q[1] as usize, q[2] as usize, coeff(q[3])?));
        }
        let torals = self
            .torals
            .iter()
            .map(|v| {
                let entries = v
                    .iter()
                    .map(|&[i, c]| Ok((i, coeff(c)?)))
                    .collect::<Result<Vec<_>, String>>()?;
                SparseVec::from_entries(&field, d, entries).map_err(|e| e.to_string())
            })
            .collect::<Result<Vec<_>, String>>()?;
        StructureTensor::from_entries(field, parities, self.zdegrees.clone(), entries, torals)
            .map_err(|e| e.to_string())
    }
}
