//! The trivial-sector ground state as a set of spin configurations: the
//! all-zero reference plus everything reachable by flipping A-term supports.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::gf2::{BitMatrix, BitVec};
use crate::models::StabilizerModel;
use crate::Limits;

/// Affine GF(2) subspace `offset ⊕ span(basis)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigGroup {
    pub n_qubits: usize,
    pub offset: BitVec,
    /// Independent rows in reduced echelon form.
    pub basis: Vec<BitVec>,
}

impl ConfigGroup {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn size(&self) -> u128 {
        1u128 << self.basis.len()
    }
}

pub fn config_group(model: &StabilizerModel) -> ConfigGroup {
    let n = model.n_qubits();
    let flips: Vec<BitVec> = model
        .generators
        .iter()
        .filter(|g| g.op.z_bits().is_zero() && !g.op.x_bits().is_zero())
        .map(|g| g.op.x_bits().clone())
        .collect();
    let basis = BitMatrix::from_rows(n, &flips).rref().row_vecs();
    ConfigGroup { n_qubits: n, offset: BitVec::zeros(n), basis }
}

/// True iff every Z-type generator sees an even number of flipped spins.
pub fn check_b_constraints(config: &BitVec, model: &StabilizerModel) -> bool {
    assert_eq!(config.len(), model.n_qubits(), "configuration length mismatch");
    model.generators.iter().filter(|g| !g.op.z_bits().is_zero()).all(|g| !g.op.z_bits().and_parity(config))
}

/// Materializes the whole coset, in Gray-code order from the offset.
pub fn enumerate_configs(g: &ConfigGroup, limits: &Limits) -> Result<Vec<BitVec>> {
    if g.basis.len() >= 127 {
        limits.check_configs(u128::MAX)?;
    }
    limits.check_configs(g.size())?;
    let total = 1usize << g.basis.len();
    let mut out = Vec::with_capacity(total);
    let mut cur = g.offset.clone();
    out.push(cur.clone());
    for i in 1..total {
        cur.xor_assign(&g.basis[i.trailing_zeros() as usize]);
        out.push(cur.clone());
    }
    Ok(out)
}

pub fn config_set(configs: &[BitVec]) -> BTreeSet<BitVec> {
    configs.iter().cloned().collect()
}
