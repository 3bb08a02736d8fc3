use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

use crate::error::{Error, Result};
use crate::sim::circuit::Circuit;
use crate::sim::gate::ClassicalBit;
use crate::sim::state::{MeasurementRecord, StateVector};

/// Classical bits accumulated by measurement stages, in measurement order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassicalStore {
    bits: Vec<bool>,
}

impl ClassicalStore {
    pub fn new() -> Self {
        ClassicalStore::default()
    }

    pub fn get(&self, bit: ClassicalBit) -> Option<bool> {
        self.bits.get(bit.0).copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Append all bits of a measurement record, returning the offset of the
    /// first appended bit.
    pub fn extend_from_record(&mut self, record: &MeasurementRecord) -> usize {
        let offset = self.bits.len();
        self.bits.extend_from_slice(&record.bits);
        offset
    }
}

/// Circuit synthesized at run time from the measurement records seen so far.
pub type SynthesisFn = Box<dyn Fn(&[MeasurementRecord]) -> Result<Circuit> + Send + Sync>;

/// One step of a dynamic program.
pub enum Stage {
    /// Apply a fixed circuit.
    Unitary(Circuit),
    /// Measure the listed qubits and append their bits to the classical store.
    Measure(Vec<usize>),
    /// Build a circuit from all earlier measurement records, then apply it.
    Synthesize(SynthesisFn),
}

impl fmt::Debug for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Unitary(c) => write!(f, "Unitary({} gates)", c.len()),
            Stage::Measure(qs) => write!(f, "Measure({qs:?})"),
            Stage::Synthesize(_) => write!(f, "Synthesize(..)"),
        }
    }
}

/// A circuit interleaved with measurements and measurement-dependent
/// synthesis, over a fixed qubit register.
#[derive(Debug, Default)]
pub struct DynamicProgram {
    num_qubits: usize,
    stages: Vec<Stage>,
}

impl DynamicProgram {
    pub fn new(num_qubits: usize) -> Self {
        DynamicProgram {
            num_qubits,
            stages: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn push_unitary(&mut self, circuit: Circuit) -> Result<&mut Self> {
        if circuit.num_qubits() != self.num_qubits {
            return Err(Error::CircuitWidthMismatch {
                expected: self.num_qubits,
                got: circuit.num_qubits(),
            });
        }
        self.stages.push(Stage::Unitary(circuit));
        Ok(self)
    }

    pub fn push_measurement(&mut self, qubits: Vec<usize>) -> Result<&mut Self> {
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.num_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    num_qubits: self.num_qubits,
                });
            }
            if qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubit { qubit: q });
            }
        }
        self.stages.push(Stage::Measure(qubits));
        Ok(self)
    }

    pub fn push_synthesis(&mut self, f: SynthesisFn) -> &mut Self {
        self.stages.push(Stage::Synthesize(f));
        self
    }

    /// Number of measurement stages.
    pub fn measurement_stages(&self) -> usize {
        self.stages
            .iter()
            .filter(|s| matches!(s, Stage::Measure(_)))
            .count()
    }

    /// Total number of measured bits across all measurement stages.
    pub fn measured_bits(&self) -> usize {
        self.stages
            .iter()
            .map(|s| match s {
                Stage::Measure(qs) => qs.len(),
                _ => 0,
            })
            .sum()
    }

    /// Execute the program on a copy of `initial`.
    ///
    /// Measurement outcomes are sampled from a ChaCha8 stream seeded with
    /// `seed`, unless `forced_outcomes` supplies one bit vector per
    /// measurement stage, in which case those outcomes are post-selected.
    /// Returns the final state together with all measurement records.
    pub fn run(
        &self,
        initial: &StateVector,
        seed: u64,
        forced_outcomes: Option<&[Vec<bool>]>,
    ) -> Result<(StateVector, Vec<MeasurementRecord>)> {
        if initial.num_qubits() != self.num_qubits {
            return Err(Error::CircuitWidthMismatch {
                expected: self.num_qubits,
                got: initial.num_qubits(),
            });
        }
        if let Some(forced) = forced_outcomes {
            let stages = self.measurement_stages();
            if forced.len() != stages {
                return Err(Error::ForcedOutcomeCount {
                    expected: stages,
                    got: forced.len(),
                });
            }
        }
        let mut state = initial.clone();
        let mut store = ClassicalStore::new();
        let mut records: Vec<MeasurementRecord> = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut measure_index = 0usize;
        for stage in &self.stages {
            match stage {
                Stage::Unitary(circuit) => state.apply_circuit(circuit, &store)?,
                Stage::Measure(qubits) => {
                    let mut record = match forced_outcomes {
                        Some(forced) => state.measure_forced(qubits, &forced[measure_index])?,
                        None => state.measure_with_rng(qubits, &mut rng)?,
                    };
                    measure_index += 1;
                    record.bit_offset = store.extend_from_record(&record);
                    records.push(record);
                }
                Stage::Synthesize(f) => {
                    let circuit = f(&records)?;
                    if circuit.num_qubits() != self.num_qubits {
                        return Err(Error::CircuitWidthMismatch {
                            expected: self.num_qubits,
                            got: circuit.num_qubits(),
                        });
                    }
                    state.apply_circuit(&circuit, &store)?;
                }
            }
        }
        Ok((state, records))
    }
}
