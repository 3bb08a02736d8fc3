use crate::error::{Error, Result};

/// Index of a bit in a program's classical store.
///
/// Gates carrying a [`ClassicalBit`] condition are applied only when that bit
/// was measured as 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ClassicalBit(pub usize);

/// The closed gate set understood by the simulator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    X,
    H,
    Z,
    Cnot,
    Cz,
    Toffoli,
    Cswap,
}

impl GateKind {
    /// Number of qubits the gate acts on.
    pub fn arity(self) -> usize {
        match self {
            GateKind::X | GateKind::H | GateKind::Z => 1,
            GateKind::Cnot | GateKind::Cz => 2,
            GateKind::Toffoli | GateKind::Cswap => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::H => "H",
            GateKind::Z => "Z",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::Toffoli => "TOFFOLI",
            GateKind::Cswap => "CSWAP",
        }
    }

    /// Whether the gate maps computational basis states to basis states
    /// without introducing phases.
    pub fn is_permutation(self) -> bool {
        matches!(
            self,
            GateKind::X | GateKind::Cnot | GateKind::Toffoli | GateKind::Cswap
        )
    }
}

/// A single gate application, optionally conditioned on a classical bit.
///
/// Qubit operand order follows the constructors: controls first, then targets
/// (for CSWAP, the control followed by the two swapped qubits).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gate {
    kind: GateKind,
    qubits: [usize; 3],
    condition: Option<ClassicalBit>,
}

impl Gate {
    fn new(kind: GateKind, qubits: [usize; 3]) -> Self {
        Gate {
            kind,
            qubits,
            condition: None,
        }
    }

    pub fn x(target: usize) -> Self {
        Gate::new(GateKind::X, [target, 0, 0])
    }

    pub fn h(target: usize) -> Self {
        Gate::new(GateKind::H, [target, 0, 0])
    }

    pub fn z(target: usize) -> Self {
        Gate::new(GateKind::Z, [target, 0, 0])
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::new(GateKind::Cnot, [control, target, 0])
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Gate::new(GateKind::Cz, [a, b, 0])
    }

    pub fn toffoli(control_a: usize, control_b: usize, target: usize) -> Self {
        Gate::new(GateKind::Toffoli, [control_a, control_b, target])
    }

    pub fn cswap(control: usize, a: usize, b: usize) -> Self {
        Gate::new(GateKind::Cswap, [control, a, b])
    }

    /// Attach a classical condition: the gate fires only if `bit` is 1.
    pub fn with_condition(mut self, bit: ClassicalBit) -> Self {
        self.condition = Some(bit);
        self
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    /// The qubits this gate acts on, controls first.
    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn condition(&self) -> Option<ClassicalBit> {
        self.condition
    }

    /// Check operand indices against a register width.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        for &q in qs {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    num_qubits,
                });
            }
        }
        for i in 0..qs.len() {
            for j in (i + 1)..qs.len() {
                if qs[i] == qs[j] {
                    return Err(Error::DuplicateQubit { qubit: qs[i] });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operand_slices_match_arity() {
        assert_eq!(Gate::x(3).qubits(), &[3]);
        assert_eq!(Gate::cnot(1, 4).qubits(), &[1, 4]);
        assert_eq!(Gate::toffoli(0, 2, 5).qubits(), &[0, 2, 5]);
        assert_eq!(Gate::cswap(7, 1, 2).qubits(), &[7, 1, 2]);
    }

    #[test]
    fn validation_rejects_out_of_range_and_duplicates() {
        assert!(Gate::x(3).validate(4).is_ok());
        assert!(Gate::x(4).validate(4).is_err());
        assert!(Gate::cnot(2, 2).validate(4).is_err());
        assert!(Gate::toffoli(0, 1, 1).validate(4).is_err());
    }

    #[test]
    fn conditions_are_carried() {
        let g = Gate::x(0).with_condition(ClassicalBit(5));
        assert_eq!(g.condition(), Some(ClassicalBit(5)));
        assert_eq!(Gate::x(0).condition(), None);
    }
}
