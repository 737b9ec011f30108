//! Pauli strings in symplectic form and their conjugation by CNOT circuits.
//!
//! A string stands for `(−1)^sign · ∏_q X_q^{x_q} Z_q^{z_q}`, with all X factors
//! written to the left of all Z factors. CNOT conjugation maps products of X's
//! to products of X's and products of Z's to products of Z's, so in this
//! ordering it never touches the sign.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::lattice::QubitIndexMap;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    x: BitVec,
    z: BitVec,
    negative: bool,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString { x: BitVec::zeros(n), z: BitVec::zeros(n), negative: false }
    }

    pub fn new(x: BitVec, z: BitVec) -> Self {
        assert_eq!(x.len(), z.len(), "x/z length mismatch");
        PauliString { x, z, negative: false }
    }

    pub fn pure_x(n: usize, support: impl IntoIterator<Item = usize>) -> Self {
        Self::new(BitVec::from_indices(n, support), BitVec::zeros(n))
    }

    pub fn pure_z(n: usize, support: impl IntoIterator<Item = usize>) -> Self {
        Self::new(BitVec::zeros(n), BitVec::from_indices(n, support))
    }

    pub fn n_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    /// +1 or −1.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn is_pure_x(&self) -> bool {
        self.z.is_zero() && !self.x.is_zero()
    }

    pub fn is_pure_z(&self) -> bool {
        self.x.is_zero() && !self.z.is_zero()
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        self.support().len()
    }

    pub fn support(&self) -> Vec<usize> {
        let s: BTreeSet<usize> = self.x.ones().chain(self.z.ones()).collect();
        s.into_iter().collect()
    }

    /// `x ‖ z`, the row of the stacked symplectic generator matrix.
    pub fn symplectic_row(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    pub fn commutes(&self, other: &PauliString) -> bool {
        self.x.and_parity(&other.z) == other.x.and_parity(&self.z)
    }

    /// Operator product `self · other`.
    ///
    /// Fails when the factors anticommute, since the product is then not a
    /// Hermitian Pauli operator with a real sign.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        if self.n_qubits() != other.n_qubits() {
            return domain("qubit count mismatch");
        }
        if !self.commutes(other) {
            return Err(Error::Domain("product of anticommuting strings carries an imaginary phase".into()));
        }
        // Z^{z1} X^{x2} = (−1)^{z1·x2} X^{x2} Z^{z1}
        let flip = self.z.and_parity(&other.x);
        Ok(PauliString {
            x: self.x.xor(&other.x),
            z: self.z.xor(&other.z),
            negative: self.negative ^ other.negative ^ flip,
        })
    }

    /// Text form: sorted `X@(coords)` / `Z@(coords)` atoms.
    pub fn to_atoms(&self, qubits: &QubitIndexMap) -> String {
        let mut atoms: Vec<String> = Vec::new();
        for q in self.x.ones() {
            atoms.push(format!("X@{}", qubits.cube(q)));
        }
        for q in self.z.ones() {
            atoms.push(format!("Z@{}", qubits.cube(q)));
        }
        atoms.sort();
        let body = atoms.join(" ");
        if self.negative {
            format!("-{body}")
        } else {
            body
        }
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.n_qubits())
            .map(|i| match (self.x.get(i), self.z.get(i)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            })
            .collect();
        write!(f, "{}{}", if self.negative { "-" } else { "+" }, s)
    }
}

/// Conjugation by a single CNOT: XI→XX, IX→IX, ZI→ZI, IZ→ZZ.
pub fn cnot_conjugate(p: &PauliString, control: usize, target: usize) -> PauliString {
    let mut out = p.clone();
    cnot_in_place(&mut out, control, target);
    out
}

fn cnot_in_place(p: &mut PauliString, control: usize, target: usize) {
    assert_ne!(control, target, "CNOT control equals target");
    if p.x.get(control) {
        p.x.flip(target);
    }
    if p.z.get(target) {
        p.z.flip(control);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cnot {
    pub control: usize,
    pub target: usize,
}

/// An ordered CNOT layer. No qubit may serve as both control and target, so
/// the gates commute and the order of application is immaterial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnotCircuit {
    gates: Vec<Cnot>,
}

impl CnotCircuit {
    pub fn new(gates: Vec<Cnot>) -> Result<Self> {
        if let Some(g) = gates.iter().find(|g| g.control == g.target) {
            return Err(Error::Construction(format!("gate on qubit {} uses it as control and target", g.control)));
        }
        let controls: HashSet<usize> = gates.iter().map(|g| g.control).collect();
        if let Some(g) = gates.iter().find(|g| controls.contains(&g.target)) {
            return Err(Error::Construction(format!(
                "qubit {} is both a control and a target; gates would not commute",
                g.target
            )));
        }
        Ok(CnotCircuit { gates })
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(control, target)| Cnot { control, target }).collect())
    }

    pub fn empty() -> Self {
        CnotCircuit { gates: Vec::new() }
    }

    pub fn gates(&self) -> &[Cnot] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.gates.iter().map(|g| g.control.max(g.target)).max()
    }

    /// Controls of each target qubit.
    pub fn controls_of(&self, target: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.gates.iter().filter(|g| g.target == target).map(|g| g.control).collect();
        v.sort_unstable();
        v
    }

    pub fn without_gate(&self, index: usize) -> CnotCircuit {
        let mut gates = self.gates.clone();
        gates.remove(index);
        CnotCircuit { gates }
    }
}

/// Applies the circuit's gates to `p` in sequence order.
pub fn circuit_conjugate(c: &CnotCircuit, p: &PauliString) -> PauliString {
    if let Some(m) = c.max_qubit() {
        assert!(m < p.n_qubits(), "circuit touches qubit {m} beyond {}", p.n_qubits());
    }
    let mut out = p.clone();
    for g in &c.gates {
        cnot_in_place(&mut out, g.control, g.target);
    }
    debug_assert_eq!(out.sign(), p.sign());
    out
}

pub fn conjugate_group(c: &CnotCircuit, group: &[PauliString]) -> Vec<PauliString> {
    group.par_iter().map(|p| circuit_conjugate(c, p)).collect()
}

/// Stacked `x ‖ z` rows of a set of strings.
pub fn symplectic_matrix(n_qubits: usize, group: &[PauliString]) -> BitMatrix {
    let rows: Vec<BitVec> = group.iter().map(|p| p.symplectic_row()).collect();
    BitMatrix::from_rows(2 * n_qubits, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two(x: &[usize], z: &[usize]) -> PauliString {
        PauliString::new(BitVec::from_indices(2, x.iter().copied()), BitVec::from_indices(2, z.iter().copied()))
    }

    #[test]
    fn conjugation_table() {
        // qubit 0 control, qubit 1 target
        assert_eq!(cnot_conjugate(&two(&[0], &[]), 0, 1), two(&[0, 1], &[]));
        assert_eq!(cnot_conjugate(&two(&[0, 1], &[]), 0, 1), two(&[0], &[]));
        assert_eq!(cnot_conjugate(&two(&[1], &[]), 0, 1), two(&[1], &[]));
        assert_eq!(cnot_conjugate(&two(&[], &[0]), 0, 1), two(&[], &[0]));
        assert_eq!(cnot_conjugate(&two(&[], &[1]), 0, 1), two(&[], &[0, 1]));
        assert_eq!(cnot_conjugate(&two(&[], &[0, 1]), 0, 1), two(&[], &[1]));
    }

    #[test]
    fn commutation_examples() {
        assert!(two(&[0], &[]).commutes(&two(&[], &[1])));
        let x = PauliString::pure_x(1, [0]);
        let z = PauliString::pure_z(1, [0]);
        assert!(!x.commutes(&z));
        assert!(x.multiply(&z).is_err());
    }

    #[test]
    fn multiply_signs() {
        let p = PauliString::pure_x(3, [0, 1]);
        assert!(p.multiply(&p).unwrap().is_identity());
        // X0X1 and Z0Z1 commute; Z·X picks up (−1)^2
        let zz = PauliString::pure_z(3, [0, 1]);
        assert_eq!(zz.multiply(&p).unwrap().sign(), 1);
        assert_eq!(p.multiply(&zz).unwrap().sign(), 1);
        // X0 Z1 times Z0 X1: z1·x2 = 1 on qubit 1, z-part of first is {1}, x of second is {1}
        let a = two(&[0], &[1]);
        let b = two(&[1], &[0]);
        assert!(a.commutes(&b));
        assert_eq!(a.multiply(&b).unwrap().sign(), -1);
        assert_eq!(b.multiply(&a).unwrap().sign(), -1);
    }

    #[test]
    fn empty_circuit_is_identity() {
        let p = PauliString::pure_x(4, [1, 3]);
        assert_eq!(circuit_conjugate(&CnotCircuit::empty(), &p), p);
    }

    #[test]
    fn circuit_rejects_chained_gates() {
        assert!(CnotCircuit::from_pairs([(0, 1), (1, 2)]).is_err());
        assert!(CnotCircuit::from_pairs([(0, 0)]).is_err());
        assert!(CnotCircuit::from_pairs([(0, 1), (0, 2), (3, 2)]).is_ok());
    }
}
