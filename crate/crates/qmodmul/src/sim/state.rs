use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::sim::circuit::Circuit;
use crate::sim::gate::{Gate, GateKind};
use crate::sim::program::ClassicalStore;

/// Tolerance below which a forced measurement outcome counts as impossible.
pub const ZERO_PROBABILITY_TOLERANCE: f64 = 1e-12;

/// Default tolerance for state comparisons and normalization checks.
pub const STATE_TOLERANCE: f64 = 1e-10;

const MAX_QUBITS: usize = 24;

/// How a measurement outcome is chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasureMode {
    /// Post-select the given bits (one per measured qubit, in listed order).
    Forced(Vec<bool>),
    /// Sample from the Born distribution with a ChaCha8 stream seeded by `u64`.
    Sampled(u64),
}

/// Outcome of one measurement stage.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    /// Measured qubits, in the order they were listed.
    pub qubits: Vec<usize>,
    /// Observed bits, parallel to `qubits`.
    pub bits: Vec<bool>,
    /// Joint probability of this outcome in the pre-collapse state.
    pub probability: f64,
    /// True if the outcome was forced rather than sampled.
    pub forced: bool,
    /// Offset of `bits[0]` in the owning program's classical store.
    pub bit_offset: usize,
}

impl MeasurementRecord {
    /// Classical-store handle for the `j`-th measured bit.
    pub fn bit(&self, j: usize) -> crate::sim::gate::ClassicalBit {
        crate::sim::gate::ClassicalBit(self.bit_offset + j)
    }

    /// Outcome rendered with bit `j` of the string at string index `j`.
    pub fn outcome_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// Outcome as an integer with `bits[j]` contributing `2^j`.
    pub fn outcome_value(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &b)| acc | (u64::from(b) << j))
    }
}

/// Dense statevector over `num_qubits` qubits.
///
/// Amplitude indexing is little-endian: qubit `i` is bit `i` of the index, so
/// an integer register stores its least significant bit at its lowest qubit.
#[derive(Clone, Debug)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

#[inline(always)]
fn insert_zero(v: usize, pos: usize) -> usize {
    let low = v & ((1usize << pos) - 1);
    ((v >> pos) << (pos + 1)) | low
}

fn parse_bitstring(bits: &str, expected: usize) -> Result<u64> {
    if bits.len() != expected {
        return Err(Error::BitstringLength {
            expected,
            got: bits.len(),
        });
    }
    let mut index = 0u64;
    for (i, ch) in bits.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => index |= 1 << i,
            other => return Err(Error::BitstringChar(other)),
        }
    }
    Ok(index)
}

impl StateVector {
    fn check_width(num_qubits: usize) -> Result<()> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(num_qubits));
        }
        Ok(())
    }

    /// The all-zeros basis state.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis_from_index(num_qubits, 0)
    }

    /// Basis state `|index>`.
    pub fn basis_from_index(num_qubits: usize, index: u64) -> Result<Self> {
        Self::check_width(num_qubits)?;
        if index >> num_qubits != 0 {
            return Err(Error::BasisIndexOutOfRange { index, num_qubits });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    /// Basis state from a bitstring where string index `i` is qubit `i`.
    ///
    /// `basis_state(2, "10")` puts qubit 0 in state 1, i.e. amplitude index 1.
    pub fn basis_state(num_qubits: usize, bits: &str) -> Result<Self> {
        let index = parse_bitstring(bits, num_qubits)?;
        Self::basis_from_index(num_qubits, index)
    }

    /// Build a state from raw amplitudes (length must be a power of two).
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude vector length {len} is not a power of two"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        Self::check_width(num_qubits)?;
        Ok(StateVector { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: u64) -> Complex64 {
        self.amps[index as usize]
    }

    /// Sum of squared magnitudes; 1 for a normalized state.
    pub fn norm_squared(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn validate_targets(&self, qubits: &[usize]) -> Result<()> {
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
        Ok(())
    }

    /// Apply one gate, honoring its classical condition against `store`.
    pub fn apply_gate(&mut self, gate: &Gate, store: &ClassicalStore) -> Result<()> {
        gate.validate(self.num_qubits)?;
        if let Some(bit) = gate.condition() {
            match store.get(bit) {
                Some(true) => {}
                Some(false) => return Ok(()),
                None => {
                    return Err(Error::MissingClassicalBit {
                        bit: bit.0,
                        available: store.len(),
                    })
                }
            }
        }
        let q = gate.qubits();
        match gate.kind() {
            GateKind::X => self.kernel_x(q[0]),
            GateKind::H => self.kernel_h(q[0]),
            GateKind::Z => self.kernel_z(q[0]),
            GateKind::Cnot => self.kernel_cnot(q[0], q[1]),
            GateKind::Cz => self.kernel_cz(q[0], q[1]),
            GateKind::Toffoli => self.kernel_toffoli(q[0], q[1], q[2]),
            GateKind::Cswap => self.kernel_cswap(q[0], q[1], q[2]),
        }
        Ok(())
    }

    /// Apply every gate of a circuit in order.
    pub fn apply_circuit(&mut self, circuit: &Circuit, store: &ClassicalStore) -> Result<()> {
        if circuit.num_qubits() != self.num_qubits {
            return Err(Error::CircuitWidthMismatch {
                expected: self.num_qubits,
                got: circuit.num_qubits(),
            });
        }
        for gate in circuit.gates() {
            self.apply_gate(gate, store)?;
        }
        Ok(())
    }

    fn kernel_x(&mut self, t: usize) {
        let bit = 1usize << t;
        for free in 0..self.amps.len() >> 1 {
            let i = insert_zero(free, t);
            self.amps.swap(i, i | bit);
        }
    }

    fn kernel_h(&mut self, t: usize) {
        let bit = 1usize << t;
        for free in 0..self.amps.len() >> 1 {
            let i = insert_zero(free, t);
            let a = self.amps[i];
            let b = self.amps[i | bit];
            self.amps[i] = (a + b) * FRAC_1_SQRT_2;
            self.amps[i | bit] = (a - b) * FRAC_1_SQRT_2;
        }
    }

    fn kernel_z(&mut self, t: usize) {
        let bit = 1usize << t;
        for free in 0..self.amps.len() >> 1 {
            let i = insert_zero(free, t) | bit;
            self.amps[i] = -self.amps[i];
        }
    }

    fn kernel_cnot(&mut self, c: usize, t: usize) {
        let (lo, hi) = if c < t { (c, t) } else { (t, c) };
        let cbit = 1usize << c;
        let tbit = 1usize << t;
        for free in 0..self.amps.len() >> 2 {
            let i = insert_zero(insert_zero(free, lo), hi) | cbit;
            self.amps.swap(i, i | tbit);
        }
    }

    fn kernel_cz(&mut self, a: usize, b: usize) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let mask = (1usize << a) | (1usize << b);
        for free in 0..self.amps.len() >> 2 {
            let i = insert_zero(insert_zero(free, lo), hi) | mask;
            self.amps[i] = -self.amps[i];
        }
    }

    fn kernel_toffoli(&mut self, c0: usize, c1: usize, t: usize) {
        let mut sorted = [c0, c1, t];
        sorted.sort_unstable();
        let cmask = (1usize << c0) | (1usize << c1);
        let tbit = 1usize << t;
        for free in 0..self.amps.len() >> 3 {
            let i = insert_zero(insert_zero(insert_zero(free, sorted[0]), sorted[1]), sorted[2])
                | cmask;
            self.amps.swap(i, i | tbit);
        }
    }

    fn kernel_cswap(&mut self, c: usize, a: usize, b: usize) {
        let mut sorted = [c, a, b];
        sorted.sort_unstable();
        let cbit = 1usize << c;
        let abit = 1usize << a;
        let bbit = 1usize << b;
        for free in 0..self.amps.len() >> 3 {
            let i = insert_zero(insert_zero(insert_zero(free, sorted[0]), sorted[1]), sorted[2])
                | cbit
                | abit;
            self.amps.swap(i, i ^ abit ^ bbit);
        }
    }

    /// Joint probability of observing `bits` on `qubits`.
    pub fn probability_of(&self, qubits: &[usize], bits: &[bool]) -> Result<f64> {
        self.validate_targets(qubits)?;
        if bits.len() != qubits.len() {
            return Err(Error::BitstringLength {
                expected: qubits.len(),
                got: bits.len(),
            });
        }
        let mut sorted: Vec<usize> = qubits.to_vec();
        sorted.sort_unstable();
        let want: usize = qubits
            .iter()
            .zip(bits)
            .filter(|(_, &b)| b)
            .map(|(&q, _)| 1usize << q)
            .sum();
        let k = qubits.len();
        let mut p = 0.0;
        for free in 0..self.amps.len() >> k {
            let mut i = free;
            for &q in &sorted {
                i = insert_zero(i, q);
            }
            p += self.amps[i | want].norm_sqr();
        }
        Ok(p)
    }

    /// Probability that qubit `q` reads 1.
    pub fn probability_one(&self, q: usize) -> Result<f64> {
        self.probability_of(&[q], &[true])
    }

    /// Collapse `qubits` onto `bits`, renormalizing.
    ///
    /// Fails with a zero-probability error when the outcome's joint
    /// probability is below [`ZERO_PROBABILITY_TOLERANCE`].
    pub fn measure_forced(&mut self, qubits: &[usize], bits: &[bool]) -> Result<MeasurementRecord> {
        let probability = self.probability_of(qubits, bits)?;
        if probability < ZERO_PROBABILITY_TOLERANCE {
            return Err(Error::ZeroProbabilityOutcome { probability });
        }
        let mask: usize = qubits.iter().map(|&q| 1usize << q).sum();
        let want: usize = qubits
            .iter()
            .zip(bits)
            .filter(|(_, &b)| b)
            .map(|(&q, _)| 1usize << q)
            .sum();
        let scale = Complex64::new(1.0 / probability.sqrt(), 0.0);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == want {
                *amp *= scale;
            } else {
                *amp = Complex64::new(0.0, 0.0);
            }
        }
        Ok(MeasurementRecord {
            qubits: qubits.to_vec(),
            bits: bits.to_vec(),
            probability,
            forced: true,
            bit_offset: 0,
        })
    }

    /// Sample an outcome for `qubits` from the given RNG stream and collapse.
    ///
    /// Bits are drawn qubit by qubit from conditional marginals, which matches
    /// the joint Born distribution; the recorded probability is the exact
    /// pre-collapse joint probability of the drawn outcome.
    pub fn measure_with_rng(
        &mut self,
        qubits: &[usize],
        rng: &mut ChaCha8Rng,
    ) -> Result<MeasurementRecord> {
        self.validate_targets(qubits)?;
        let mut fixed_qubits: Vec<usize> = Vec::with_capacity(qubits.len());
        let mut fixed_bits: Vec<bool> = Vec::with_capacity(qubits.len());
        for &q in qubits {
            fixed_qubits.push(q);
            fixed_bits.push(true);
            let p_prefix_one = self.probability_of(&fixed_qubits, &fixed_bits)?;
            fixed_bits.pop();
            fixed_bits.push(false);
            let p_prefix_zero = self.probability_of(&fixed_qubits, &fixed_bits)?;
            let total = p_prefix_one + p_prefix_zero;
            let p_one = if total > 0.0 { p_prefix_one / total } else { 0.0 };
            let draw: f64 = rng.gen();
            let bit = draw < p_one;
            fixed_bits.pop();
            fixed_bits.push(bit);
        }
        let joint = self.probability_of(&fixed_qubits, &fixed_bits)?;
        let mut record = self.measure_forced(qubits, &fixed_bits)?;
        record.probability = joint;
        record.forced = false;
        Ok(record)
    }

    /// Measure `qubits`, either forcing an outcome or sampling from a seed.
    pub fn measure(&mut self, qubits: &[usize], mode: MeasureMode) -> Result<MeasurementRecord> {
        match mode {
            MeasureMode::Forced(bits) => self.measure_forced(qubits, &bits),
            MeasureMode::Sampled(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                self.measure_with_rng(qubits, &mut rng)
            }
        }
    }
}

/// Largest elementwise amplitude difference between two states.
pub fn max_amplitude_deviation(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.num_qubits != b.num_qubits {
        return Err(Error::StateSizeMismatch {
            left: a.num_qubits,
            right: b.num_qubits,
        });
    }
    Ok(a.amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

/// Amplitude-wise equality with no phase slack.
pub fn states_equal_exact(a: &StateVector, b: &StateVector, tol: f64) -> Result<bool> {
    Ok(max_amplitude_deviation(a, b)? < tol)
}

/// Equality up to a single global phase.
///
/// Both states are rotated so their first non-negligible amplitude (at the
/// same index) is real positive, then compared elementwise.
pub fn states_equal(a: &StateVector, b: &StateVector, tol: f64) -> Result<bool> {
    if a.num_qubits != b.num_qubits {
        return Err(Error::StateSizeMismatch {
            left: a.num_qubits,
            right: b.num_qubits,
        });
    }
    let cutoff = tol.sqrt();
    let pivot = a
        .amps
        .iter()
        .zip(&b.amps)
        .position(|(x, y)| x.norm() > cutoff || y.norm() > cutoff);
    let Some(pivot) = pivot else {
        // Both states are numerically zero everywhere.
        return Ok(true);
    };
    let phase = |c: Complex64| {
        if c.norm() > cutoff {
            c / c.norm()
        } else {
            Complex64::new(1.0, 0.0)
        }
    };
    let pa = phase(a.amps[pivot]).conj();
    let pb = phase(b.amps[pivot]).conj();
    let dev = a
        .amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| (x * pa - y * pb).norm())
        .fold(0.0, f64::max);
    Ok(dev < tol)
}

/// Whether all listed qubits carry probability mass below `tol` on 1.
pub fn register_is_zero(state: &StateVector, qubits: &[usize], tol: f64) -> Result<bool> {
    state.validate_targets(qubits)?;
    let mask: usize = qubits.iter().map(|&q| 1usize << q).sum();
    let mass: f64 = state
        .amps
        .iter()
        .enumerate()
        .filter(|(i, _)| i & mask != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    Ok(mass < tol)
}
