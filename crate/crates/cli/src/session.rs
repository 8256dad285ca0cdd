//! One algebra under study: built from parameters or loaded from a file,
//! with the W-level chain rebuilt lazily and solver results cached.

use std::collections::HashMap;
use std::path::Path;

use log::info;
use sho_core::bider::{solve, BiderTensor, SolveMode, SolveReport};
use sho_core::cartan::{build_chain, AlgebraChain};
use sho_core::structure::{simplicity, structure_constants, Simplicity, StructureTensor};
use sho_core::{AlgebraContext, Parity};

use crate::algebra_file::AlgebraFile;
use crate::error::{CliError, CliResult};

/// Algebras up to this dimension default to the dense solver.
pub const AUTO_DENSE_MAX_DIM: usize = 60;

pub struct Session {
    ctx: AlgebraContext,
    file: AlgebraFile,
    tensor: StructureTensor,
    chain: Option<AlgebraChain>,
    seed: u64,
    solves: HashMap<(Parity, SolveMode), (Vec<BiderTensor>, SolveReport)>,
}

impl Session {
    pub fn build(n: usize, p: u32, t: &[u32], seed: u64) -> CliResult<Self> {
        let ctx = AlgebraContext::new(n, p, t)?;
        info!("building the chain for n={n} p={p} t={t:?}");
        let chain = build_chain(&ctx)?;
        let tensor = structure_constants(&chain)?;
        let sim = simplicity(&tensor)?;
        let file = AlgebraFile::from_chain(&chain, &tensor, sim);
        info!("SHO has dimension {}", tensor.dim());
        Ok(Session {
            ctx,
            file,
            tensor,
            chain: Some(chain),
            seed,
            solves: HashMap::new(),
        })
    }

    pub fn load(path: &Path, seed: u64) -> CliResult<Self> {
        let file = AlgebraFile::load(path)?;
        let ctx = file.context()?;
        let tensor = file.to_tensor().map_err(|message| CliError::Format {
            path: path.to_path_buf(),
            message,
        })?;
        Ok(Session {
            ctx,
            file,
            tensor,
            chain: None,
            seed,
            solves: HashMap::new(),
        })
    }

    pub fn ctx(&self) -> &AlgebraContext {
        &self.ctx
    }

    pub fn file(&self) -> &AlgebraFile {
        &self.file
    }

    pub fn tensor(&self) -> &StructureTensor {
        &self.tensor
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn simplicity(&self) -> Simplicity {
        self.file.simplicity
    }

    pub fn degenerate(&self) -> bool {
        self.file.degenerate
    }

    /// The chain in W, rebuilt from the parameters for loaded files and
    /// checked against the recorded dimensions.
    pub fn chain(&mut self) -> CliResult<&AlgebraChain> {
        if self.chain.is_none() {
            info!("rebuilding the chain from the recorded parameters");
            let chain = build_chain(&self.ctx)?;
            if chain.dims() != self.file.dims {
                return Err(CliError::Usage(format!(
                    "algebra file records dimensions {:?} but the parameters give {:?}",
                    self.file.dims,
                    chain.dims()
                )));
            }
            self.chain = Some(chain);
        }
        Ok(self.chain.as_ref().expect("set above"))
    }

    pub fn resolve_mode(&self, requested: Option<SolveMode>) -> SolveMode {
        requested.unwrap_or(if self.tensor.dim() <= AUTO_DENSE_MAX_DIM {
            SolveMode::Dense
        } else {
            SolveMode::Blocked
        })
    }

    pub fn solve(&mut self, parity: Parity, mode: SolveMode) -> CliResult<&(Vec<BiderTensor>, SolveReport)> {
        if !self.solves.contains_key(&(parity, mode)) {
            info!("solving for {parity:?} biderivations, {mode} mode");
            let result = solve(&self.tensor, parity, mode, self.seed)?;
            self.solves.insert((parity, mode), result);
        }
        Ok(&self.solves[&(parity, mode)])
    }
}
