use crate::error::{Error, Result};
use crate::sim::gate::{Gate, GateKind};

/// An ordered list of gates over a fixed-width qubit register.
///
/// Gates are validated on insertion, so a constructed circuit always refers to
/// qubits inside its register.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Append a gate after validating its operands.
    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(self)
    }

    /// Append all gates of another circuit of the same width.
    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::CircuitWidthMismatch {
                expected: self.num_qubits,
                got: other.num_qubits,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(self)
    }

    /// Whether every gate maps basis states to basis states (no H/Z/CZ and no
    /// classical conditions).
    pub fn is_permutation(&self) -> bool {
        self.gates
            .iter()
            .all(|g| g.kind().is_permutation() && g.condition().is_none())
    }

    /// Track a computational basis state through the circuit classically.
    ///
    /// Only valid for permutation circuits; H, Z, CZ, or classically
    /// conditioned gates are rejected. The returned index is the basis state
    /// the circuit maps `index` to, and by unitarity the map is a bijection.
    pub fn apply_to_basis(&self, index: u64) -> Result<u64> {
        if self.num_qubits < 64 && index >> self.num_qubits != 0 {
            return Err(Error::BasisIndexOutOfRange {
                index,
                num_qubits: self.num_qubits,
            });
        }
        let mut s = index;
        for gate in &self.gates {
            if gate.condition().is_some() {
                return Err(Error::NonPermutationGate("classically conditioned"));
            }
            let q = gate.qubits();
            match gate.kind() {
                GateKind::X => s ^= 1 << q[0],
                GateKind::Cnot => {
                    if s >> q[0] & 1 == 1 {
                        s ^= 1 << q[1];
                    }
                }
                GateKind::Toffoli => {
                    if s >> q[0] & 1 == 1 && s >> q[1] & 1 == 1 {
                        s ^= 1 << q[2];
                    }
                }
                GateKind::Cswap => {
                    if s >> q[0] & 1 == 1 && (s >> q[1] ^ s >> q[2]) & 1 == 1 {
                        s ^= (1 << q[1]) | (1 << q[2]);
                    }
                }
                other => return Err(Error::NonPermutationGate(other.name())),
            }
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_validates_against_register_width() {
        let mut c = Circuit::new(3);
        assert!(c.push(Gate::toffoli(0, 1, 2)).is_ok());
        assert!(c.push(Gate::x(3)).is_err());
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn append_requires_matching_width() {
        let mut a = Circuit::new(3);
        let b = Circuit::new(4);
        assert!(a.append(&b).is_err());
        let mut c = Circuit::new(3);
        c.push(Gate::x(1)).unwrap();
        a.append(&c).unwrap();
        assert_eq!(a.len(), 1);
    }

    #[test]
    fn basis_tracking_matches_gate_semantics() {
        let mut c = Circuit::new(4);
        c.push(Gate::x(0)).unwrap();
        c.push(Gate::cnot(0, 1)).unwrap();
        c.push(Gate::toffoli(0, 1, 2)).unwrap();
        c.push(Gate::cswap(2, 0, 3)).unwrap();
        // 0000 -> 0001 -> 0011 -> 0111 -> swap q0,q3 under q2=1 -> 1110
        assert_eq!(c.apply_to_basis(0b0000).unwrap(), 0b1110);
        // control clear: cswap does nothing
        let mut d = Circuit::new(3);
        d.push(Gate::cswap(2, 0, 1)).unwrap();
        assert_eq!(d.apply_to_basis(0b001).unwrap(), 0b001);
        assert_eq!(d.apply_to_basis(0b101).unwrap(), 0b110);
    }

    #[test]
    fn basis_tracking_rejects_phase_gates() {
        let mut c = Circuit::new(2);
        c.push(Gate::h(0)).unwrap();
        assert!(c.apply_to_basis(0).is_err());
        assert!(!c.is_permutation());
    }

    #[test]
    fn basis_tracking_is_a_bijection() {
        let mut c = Circuit::new(3);
        c.push(Gate::cnot(0, 2)).unwrap();
        c.push(Gate::toffoli(2, 0, 1)).unwrap();
        c.push(Gate::x(2)).unwrap();
        let mut seen = [false; 8];
        for i in 0..8u64 {
            let out = c.apply_to_basis(i).unwrap() as usize;
            assert!(!seen[out]);
            seen[out] = true;
        }
    }
}
