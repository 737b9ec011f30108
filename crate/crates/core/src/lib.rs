//! Stabilizer models on hypercubic lattices, their ground-state degeneracy, and
//! exact verification of entanglement-renormalization steps between sizes.

pub mod coarsegrain;
pub mod erg;
pub mod error;
pub mod gf2;
pub mod groundstate;
pub mod lattice;
pub mod models;
pub mod pauli;

pub use error::{Error, Result};

/// Size caps that keep every computation at desk scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_qubits: usize,
    pub max_configs: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_qubits: 8192, max_configs: 1 << 20 }
    }
}

impl Limits {
    pub fn check_qubits(&self, n: usize) -> Result<()> {
        if n > self.max_qubits {
            return Err(Error::Resource(format!("{n} qubits exceed the cap of {}", self.max_qubits)));
        }
        Ok(())
    }

    pub fn check_configs(&self, n: u128) -> Result<()> {
        if n > self.max_configs as u128 {
            return Err(Error::Resource(format!("{n} configurations exceed the cap of {}", self.max_configs)));
        }
        Ok(())
    }
}
