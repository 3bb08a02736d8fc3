//! The three controlled modular multiplication schemes and their
//! statevector verification harness.
//!
//! All schemes implement `|b>|x> -> |b>|a^b x mod N>` on the data qubit `b`
//! and the x register, with every scratch qubit returned to zero:
//!
//! * scheme A: controlled multiply-accumulate into the work register, a
//!   controlled register swap, then a second controlled pass that uncomputes
//!   the leftover copy. Both passes carry the data qubit as an extra
//!   control.
//! * scheme B: a controlled copy of x into the work register first; the two
//!   multiply-accumulate passes then act on honest residues in both branches
//!   and need no extra control, at the cost of the copy's n Toffolis and a
//!   second controlled swap.
//! * scheme C: like scheme B up to the point where the work register holds
//!   `a x` in the active branch, but instead of uncomputing it with a second
//!   pass the work register is rotated into the X basis and measured. The
//!   outcome `s` leaves a known relative phase `(-1)^(s . a x)` between the
//!   branches, which a classically synthesized parity oracle removes.
//!
//! The verification harness replays each scheme on basis inputs and compares
//! against the ideal target state amplitude by amplitude.

use serde::Serialize;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::modarith::{
    build_ccopy, build_cmac, build_cswap_registers, build_mac, classical_mul, RegisterLayout,
    SchemeParams,
};
use crate::sim::{
    max_amplitude_deviation, register_is_zero, Circuit, ClassicalStore, DynamicProgram, Gate,
    MeasurementRecord, Stage, StateVector,
};

/// Tolerance used for amplitude deviations, outcome probabilities, and
/// residual scratch-register mass during verification.
pub const VERIFY_TOLERANCE: f64 = 1e-9;

/// Which multiplication construction to build or verify.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SchemeKind {
    A,
    B,
    C,
}

impl SchemeKind {
    pub fn all() -> [SchemeKind; 3] {
        [SchemeKind::A, SchemeKind::B, SchemeKind::C]
    }

    /// Whether the scheme's multiply-accumulate passes carry an extra
    /// control, requiring the layout's conjunction ancilla.
    pub fn needs_control_and(self) -> bool {
        matches!(self, SchemeKind::A)
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::A => "A",
            SchemeKind::B => "B",
            SchemeKind::C => "C",
        })
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(SchemeKind::A),
            "B" | "b" => Ok(SchemeKind::B),
            "C" | "c" => Ok(SchemeKind::C),
            other => Err(Error::InvalidArgument(format!(
                "unknown scheme {other:?}, expected A, B, or C"
            ))),
        }
    }
}

/// A subset of register bits, written as a bitstring with character `i`
/// giving bit `i`.
///
/// Used both for measurement outcomes of the work register and as the mask
/// of the parity oracle they induce.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityMask {
    bits: Vec<bool>,
}

impl ParityMask {
    pub fn from_bits(bits: &[bool]) -> Self {
        ParityMask {
            bits: bits.to_vec(),
        }
    }

    /// Mask whose bit `i` is bit `i` of `value`, over `len` bits.
    pub fn from_value(value: u64, len: usize) -> Self {
        ParityMask {
            bits: (0..len).map(|i| value >> i & 1 == 1).collect(),
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    /// True when no bit is set, in which case the oracle is empty.
    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Indices of the set bits, ascending.
    pub fn positions(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
            .collect()
    }

    /// The mask as an integer with bit `i` worth `2^i`.
    pub fn value(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (u64::from(b) << i))
    }
}

impl FromStr for ParityMask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => return Err(Error::BitstringChar(other)),
            }
        }
        Ok(ParityMask { bits })
    }
}

impl fmt::Display for ParityMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// The sign `(-1)^(s . y)` the oracle must imprint on a branch holding `y`.
pub fn parity_phase(mask: &ParityMask, y: u64) -> i32 {
    if (mask.value() & y).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Build the phase-correction oracle for `mask`.
///
/// A CNOT chain folds the parity of the masked `target` bits into the last
/// masked position, one Toffoli controlled by `data` and that position flips
/// the `oracle` qubit (held in the state `(|0> - |1>)/sqrt(2)`, so the flip
/// becomes a sign), and the mirrored chain restores the register: exactly
/// `2(k-1)` CNOTs and one Toffoli for `k` set bits. An all-zero mask yields
/// an empty circuit.
pub fn build_parity_oracle(
    mask: &ParityMask,
    data: usize,
    target: &[usize],
    oracle: usize,
    num_qubits: usize,
) -> Result<Circuit> {
    if mask.len() != target.len() {
        return Err(Error::RegisterWidth {
            expected: target.len(),
            got: mask.len(),
        });
    }
    let mut circ = Circuit::new(num_qubits);
    if mask.is_empty() {
        return Ok(circ);
    }
    if target.contains(&oracle) {
        return Err(Error::OracleQubitInTarget { qubit: oracle });
    }
    if target.contains(&data) || data == oracle {
        return Err(Error::RegisterOverlap(format!(
            "data control {data} collides with the oracle operands"
        )));
    }
    let positions = mask.positions();
    for pair in positions.windows(2) {
        circ.push(Gate::cnot(target[pair[0]], target[pair[1]]))?;
    }
    let last = target[*positions.last().expect("mask is nonempty")];
    circ.push(Gate::toffoli(data, last, oracle))?;
    for pair in positions.windows(2).rev() {
        circ.push(Gate::cnot(target[pair[0]], target[pair[1]]))?;
    }
    Ok(circ)
}

/// The ideal output `(|0>|x> + |1>|a x mod N>)/sqrt(2)` with all other
/// qubits zero, embedded in the layout's full register.
pub fn expected_target_state(
    params: &SchemeParams,
    x: u64,
    layout: &RegisterLayout,
) -> Result<StateVector> {
    if x >= params.modulus() {
        return Err(Error::ValueOutOfRange {
            value: x,
            modulus: params.modulus(),
        });
    }
    let ax = classical_mul(params.multiplier(), x, params.modulus());
    let amp = num_complex::Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut amps =
        vec![num_complex::Complex64::new(0.0, 0.0); 1usize << layout.total_qubits()];
    amps[layout.basis_index(false, x, 0) as usize] = amp;
    amps[layout.basis_index(true, ax, 0) as usize] += amp;
    StateVector::from_amplitudes(amps)
}

/// Scheme A: both multiply-accumulate passes doubly controlled.
///
/// `H(data)`, then `a`-times-x into work controlled on data, a controlled
/// swap, and an inverse pass with constant `-a^{-1}` that clears the copy.
pub fn build_scheme_a(params: &SchemeParams, layout: &RegisterLayout) -> Result<DynamicProgram> {
    let a = params.multiplier();
    let back = params.norm(-(params.multiplier_inverse() as i64));
    let mut circ = Circuit::new(layout.total_qubits());
    circ.push(Gate::h(layout.data()))?;
    circ.append(&build_cmac(
        a,
        layout.data(),
        layout.xreg(),
        layout.work(),
        params,
        layout,
    )?)?;
    circ.append(&build_cswap_registers(
        layout.data(),
        layout.xreg(),
        layout.work(),
        layout.total_qubits(),
    )?)?;
    circ.append(&build_cmac(
        back,
        layout.data(),
        layout.xreg(),
        layout.work(),
        params,
        layout,
    )?)?;
    let mut program = DynamicProgram::new(layout.total_qubits());
    program.push_unitary(circ)?;
    Ok(program)
}

/// Scheme B: a controlled copy makes both multiply-accumulate passes
/// uncontrolled.
///
/// After `ccopy`, the work register holds `b x`, so a pass with constant
/// `a - 1` maps the x register to `a x` only in the active branch; a swap,
/// the inverse pass with `-a^{-1}`, and a second swap clear the copy.
pub fn build_scheme_b(params: &SchemeParams, layout: &RegisterLayout) -> Result<DynamicProgram> {
    let fwd = params.norm(params.multiplier() as i64 - 1);
    let back = params.norm(-(params.multiplier_inverse() as i64));
    let total = layout.total_qubits();
    let mut circ = Circuit::new(total);
    circ.push(Gate::h(layout.data()))?;
    circ.append(&build_ccopy(layout.data(), layout.xreg(), layout.work(), total)?)?;
    circ.append(&build_mac(fwd, layout.work(), layout.xreg(), params, layout)?)?;
    circ.append(&build_cswap_registers(
        layout.data(),
        layout.xreg(),
        layout.work(),
        total,
    )?)?;
    circ.append(&build_mac(back, layout.work(), layout.xreg(), params, layout)?)?;
    circ.append(&build_cswap_registers(
        layout.data(),
        layout.xreg(),
        layout.work(),
        total,
    )?)?;
    let mut program = DynamicProgram::new(total);
    program.push_unitary(circ)?;
    Ok(program)
}

fn scheme_c_program(
    params: &SchemeParams,
    layout: &RegisterLayout,
    correct: bool,
) -> Result<DynamicProgram> {
    let fwd = params.norm(params.multiplier() as i64 - 1);
    let fill = params.norm(1 - params.multiplier_inverse() as i64);
    let total = layout.total_qubits();
    let mut circ = Circuit::new(total);
    circ.push(Gate::h(layout.data()))?;
    circ.append(&build_ccopy(layout.data(), layout.xreg(), layout.work(), total)?)?;
    circ.append(&build_mac(fwd, layout.work(), layout.xreg(), params, layout)?)?;
    circ.append(&build_cswap_registers(
        layout.data(),
        layout.xreg(),
        layout.work(),
        total,
    )?)?;
    // Rebuild the work register to a x in the active branch (constant
    // 1 - a^{-1} sends x to x + (1 - a^{-1}) a x = a x); the inactive branch
    // holds zero and is untouched. Both branches then agree with their x
    // register, which is what the X-basis measurement can disentangle.
    circ.append(&build_mac(fill, layout.work(), layout.xreg(), params, layout)?)?;
    for &q in layout.work() {
        circ.push(Gate::h(q))?;
    }
    let mut program = DynamicProgram::new(total);
    program.push_unitary(circ)?;
    program.push_measurement(layout.work().to_vec())?;
    let layout_c = layout.clone();
    program.push_synthesis(Box::new(move |records: &[MeasurementRecord]| {
        let record = records.last().ok_or_else(|| {
            Error::InvalidArgument("synthesis stage reached without a measurement".into())
        })?;
        synthesize_correction(&layout_c, record, correct)
    }));
    Ok(program)
}

/// Build the measurement-dependent tail of scheme C: reset the measured work
/// qubits, then (unless suppressed) apply the parity oracle for the observed
/// outcome to cancel the leftover branch phase.
fn synthesize_correction(
    layout: &RegisterLayout,
    record: &MeasurementRecord,
    correct: bool,
) -> Result<Circuit> {
    let mut circ = Circuit::new(layout.total_qubits());
    // Return every measured-1 qubit to zero; conditioning on the stored bits
    // keeps the circuit shape outcome-independent.
    for (j, &q) in record.qubits.iter().enumerate() {
        circ.push(Gate::x(q).with_condition(record.bit(j)))?;
    }
    let mask = ParityMask::from_bits(&record.bits);
    if correct && !mask.is_empty() {
        let oracle = layout.oracle();
        circ.push(Gate::x(oracle))?;
        circ.push(Gate::h(oracle))?;
        circ.append(&build_parity_oracle(
            &mask,
            layout.data(),
            layout.xreg(),
            oracle,
            layout.total_qubits(),
        )?)?;
        circ.push(Gate::h(oracle))?;
        circ.push(Gate::x(oracle))?;
    }
    Ok(circ)
}

/// Scheme C: measurement-assisted uncomputation of the work register.
pub fn build_scheme_c(params: &SchemeParams, layout: &RegisterLayout) -> Result<DynamicProgram> {
    scheme_c_program(params, layout, true)
}

/// Scheme C with the phase correction suppressed: the work register is still
/// reset, but the branch phase `(-1)^(s . a x)` is left in place. Used to
/// observe the phase law directly.
pub fn build_scheme_c_uncorrected(
    params: &SchemeParams,
    layout: &RegisterLayout,
) -> Result<DynamicProgram> {
    scheme_c_program(params, layout, false)
}

/// Build the program for any scheme over a layout made by
/// [`layout_for`].
pub fn scheme_program(
    kind: SchemeKind,
    params: &SchemeParams,
    layout: &RegisterLayout,
) -> Result<DynamicProgram> {
    match kind {
        SchemeKind::A => build_scheme_a(params, layout),
        SchemeKind::B => build_scheme_b(params, layout),
        SchemeKind::C => build_scheme_c(params, layout),
    }
}

/// The register layout a scheme needs: scheme A carries an extra conjunction
/// ancilla for its doubly controlled additions.
pub fn layout_for(kind: SchemeKind, params: &SchemeParams) -> RegisterLayout {
    RegisterLayout::new(params, kind.needs_control_and())
}

/// How scheme C's measurement outcomes are chosen during verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    /// Post-select every possible outcome in turn (schemes A and B, which
    /// are measurement-free, run their single deterministic check).
    AllOutcomes,
    /// Sample one outcome from the given seed.
    Sampled(u64),
    /// Post-select one specific work-register outcome.
    Forced(Vec<bool>),
}

/// Verification verdict for one input and one measurement outcome.
#[derive(Clone, Debug, Serialize)]
pub struct SchemeCase {
    /// Work-register outcome bits, present for scheme C.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
    /// Pre-collapse probability of the outcome, present for scheme C.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probability: Option<f64>,
    /// Largest amplitude difference from the ideal target state.
    pub max_deviation: f64,
    /// Whether the pre-correction branch phase matched `(-1)^(s . a x)`;
    /// only observable when post-selecting scheme C outcomes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_law_ok: Option<bool>,
    /// Whether work and scratch qubits carry no residual probability mass.
    pub registers_clean: bool,
    pub pass: bool,
}

/// All case verdicts for one `(scheme, N, a, x)` instance.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub scheme: SchemeKind,
    pub modulus: u64,
    pub multiplier: u64,
    pub x: u64,
    pub cases: Vec<SchemeCase>,
    pub pass: bool,
}

fn outcome_bits(value: u64, len: usize) -> Vec<bool> {
    (0..len).map(|i| value >> i & 1 == 1).collect()
}

/// Run one scheme on the basis input `x` and check it against the ideal
/// target state.
///
/// Checks per case: amplitude-exact agreement with the target (no global
/// phase slack), scratch hygiene, and for scheme C the outcome probability
/// `2^-n` and the pre-correction phase law. `AllOutcomes` mode replays every
/// work-register outcome by post-selection, sharing the expensive unitary
/// prefix across outcomes.
pub fn verify_scheme(
    kind: SchemeKind,
    params: &SchemeParams,
    x: u64,
    mode: VerifyMode,
) -> Result<VerificationReport> {
    if x >= params.modulus() {
        return Err(Error::ValueOutOfRange {
            value: x,
            modulus: params.modulus(),
        });
    }
    let layout = layout_for(kind, params);
    let expected = expected_target_state(params, x, &layout)?;
    let initial =
        StateVector::basis_from_index(layout.total_qubits(), layout.basis_index(false, x, 0))?;
    let mut dirty: Vec<usize> = layout.work().to_vec();
    dirty.extend(layout.ancilla_qubits());

    let mut cases = Vec::new();
    match kind {
        SchemeKind::A | SchemeKind::B => {
            let program = scheme_program(kind, params, &layout)?;
            let (state, _) = program.run(&initial, 0, None)?;
            let max_deviation = max_amplitude_deviation(&state, &expected)?;
            let registers_clean = register_is_zero(&state, &dirty, VERIFY_TOLERANCE)?;
            let pass = max_deviation < VERIFY_TOLERANCE && registers_clean;
            cases.push(SchemeCase {
                outcome: None,
                probability: None,
                max_deviation,
                phase_law_ok: None,
                registers_clean,
                pass,
            });
        }
        SchemeKind::C => match &mode {
            VerifyMode::Sampled(_) | VerifyMode::Forced(_) => {
                let program = build_scheme_c(params, &layout)?;
                let (state, records) = match &mode {
                    VerifyMode::Sampled(seed) => program.run(&initial, *seed, None)?,
                    VerifyMode::Forced(bits) => {
                        program.run(&initial, 0, Some(std::slice::from_ref(bits)))?
                    }
                    VerifyMode::AllOutcomes => unreachable!(),
                };
                let record = &records[0];
                let n = params.width();
                let probability = record.probability;
                let max_deviation = max_amplitude_deviation(&state, &expected)?;
                let registers_clean = register_is_zero(&state, &dirty, VERIFY_TOLERANCE)?;
                let pass = max_deviation < VERIFY_TOLERANCE
                    && registers_clean
                    && (probability - 0.5f64.powi(n as i32)).abs() < VERIFY_TOLERANCE;
                cases.push(SchemeCase {
                    outcome: Some(record.outcome_string()),
                    probability: Some(probability),
                    max_deviation,
                    phase_law_ok: None,
                    registers_clean,
                    pass,
                });
            }
            VerifyMode::AllOutcomes => {
                cases = verify_scheme_c_all_outcomes(params, &layout, x, &expected, &dirty)?;
            }
        },
    }
    let pass = cases.iter().all(|c| c.pass);
    Ok(VerificationReport {
        scheme: kind,
        modulus: params.modulus(),
        multiplier: params.multiplier(),
        x,
        cases,
        pass,
    })
}

/// Post-select every work-register outcome of scheme C for input `x`.
///
/// The unitary prefix (everything before the measurement) is simulated once;
/// each outcome then only pays for its own collapse and the short synthesized
/// tail.
fn verify_scheme_c_all_outcomes(
    params: &SchemeParams,
    layout: &RegisterLayout,
    x: u64,
    expected: &StateVector,
    dirty: &[usize],
) -> Result<Vec<SchemeCase>> {
    let program = build_scheme_c(params, layout)?;
    let empty_store = ClassicalStore::new();
    let mut prefix = StateVector::basis_from_index(
        layout.total_qubits(),
        layout.basis_index(false, x, 0),
    )?;
    let mut stages = program.stages().iter();
    let mut measured: Option<&[usize]> = None;
    for stage in stages.by_ref() {
        match stage {
            Stage::Unitary(circ) => prefix.apply_circuit(circ, &empty_store)?,
            Stage::Measure(qubits) => {
                measured = Some(qubits);
                break;
            }
            Stage::Synthesize(_) => {
                return Err(Error::InvalidArgument(
                    "synthesis stage before the measurement".into(),
                ))
            }
        }
    }
    let qubits = measured.ok_or_else(|| {
        Error::InvalidArgument("scheme C program has no measurement stage".into())
    })?;
    let tail: Vec<&Stage> = stages.collect();

    let n = params.width();
    let ax = classical_mul(params.multiplier(), x, params.modulus());
    let uniform = 0.5f64.powi(n as i32);
    let mut cases = Vec::with_capacity(1 << n);
    for s in 0..1u64 << n {
        let bits = outcome_bits(s, n);
        let mut state = prefix.clone();
        let mut record = state.measure_forced(qubits, &bits)?;
        let probability = record.probability;

        // Before the correction runs, the active branch must carry exactly
        // the parity phase relative to the idle branch.
        let idle = state.amplitude(layout.basis_index(false, x, s));
        let active = state.amplitude(layout.basis_index(true, ax, s));
        let sign = f64::from(parity_phase(&ParityMask::from_value(s, n), ax));
        let phase_law_ok = idle.norm() > 0.5 && (active - idle * sign).norm() < VERIFY_TOLERANCE;

        let mut store = ClassicalStore::new();
        record.bit_offset = store.extend_from_record(&record);
        let records = [record];
        for stage in &tail {
            match stage {
                Stage::Unitary(circ) => state.apply_circuit(circ, &store)?,
                Stage::Synthesize(f) => {
                    let circ = f(&records)?;
                    state.apply_circuit(&circ, &store)?;
                }
                Stage::Measure(_) => {
                    return Err(Error::InvalidArgument(
                        "outcome replay supports a single measurement stage".into(),
                    ))
                }
            }
        }

        let max_deviation = max_amplitude_deviation(&state, expected)?;
        let registers_clean = register_is_zero(&state, dirty, VERIFY_TOLERANCE)?;
        let pass = max_deviation < VERIFY_TOLERANCE
            && registers_clean
            && (probability - uniform).abs() < VERIFY_TOLERANCE
            && phase_law_ok;
        cases.push(SchemeCase {
            outcome: Some(records[0].outcome_string()),
            probability: Some(probability),
            max_deviation,
            phase_law_ok: Some(phase_law_ok),
            registers_clean,
            pass,
        });
    }
    Ok(cases)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modarith::unpack_register;
    use crate::sim::{states_equal_exact, GateKind, MeasureMode, STATE_TOLERANCE};

    #[test]
    fn scheme_a_maps_basis_input_to_target_state() {
        let params = SchemeParams::new(15, 7).unwrap();
        let report = verify_scheme(SchemeKind::A, &params, 3, VerifyMode::AllOutcomes).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.cases.len(), 1);
        assert!(report.cases[0].max_deviation < 1e-12);
    }

    #[test]
    fn scheme_b_maps_basis_input_to_target_state() {
        let params = SchemeParams::new(15, 7).unwrap();
        for x in [0u64, 1, 3, 14] {
            let report =
                verify_scheme(SchemeKind::B, &params, x, VerifyMode::AllOutcomes).unwrap();
            assert!(report.pass, "x={x}: {report:?}");
        }
    }

    #[test]
    fn scheme_c_all_outcomes_for_a_small_modulus() {
        let params = SchemeParams::new(9, 2).unwrap();
        let report = verify_scheme(SchemeKind::C, &params, 5, VerifyMode::AllOutcomes).unwrap();
        assert_eq!(report.cases.len(), 16);
        assert!(report.pass, "{report:?}");
        for case in &report.cases {
            assert!((case.probability.unwrap() - 1.0 / 16.0).abs() < 1e-12);
            assert_eq!(case.phase_law_ok, Some(true));
        }
    }

    #[test]
    fn scheme_c_sampled_mode_is_deterministic() {
        let params = SchemeParams::new(15, 7).unwrap();
        let r1 = verify_scheme(SchemeKind::C, &params, 3, VerifyMode::Sampled(11)).unwrap();
        let r2 = verify_scheme(SchemeKind::C, &params, 3, VerifyMode::Sampled(11)).unwrap();
        assert!(r1.pass);
        assert_eq!(r1.cases[0].outcome, r2.cases[0].outcome);
    }

    #[test]
    fn degenerate_multiplier_works_in_all_schemes() {
        let params = SchemeParams::new(15, 1).unwrap();
        for kind in SchemeKind::all() {
            let report = verify_scheme(kind, &params, 6, VerifyMode::AllOutcomes).unwrap();
            assert!(report.pass, "scheme {kind}: {report:?}");
        }
    }

    #[test]
    fn uncorrected_scheme_c_shows_the_parity_phase() {
        let params = SchemeParams::new(15, 7).unwrap();
        let layout = layout_for(SchemeKind::C, &params);
        let program = build_scheme_c_uncorrected(&params, &layout).unwrap();
        let x = 3u64;
        let ax = 6u64;
        let initial = StateVector::basis_from_index(
            layout.total_qubits(),
            layout.basis_index(false, x, 0),
        )
        .unwrap();
        // Outcome 0100 selects work bit 1; a x = 6 has bit 1 set, so the
        // surviving relative phase must be -1.
        let bits = outcome_bits(0b0010, 4);
        let (state, records) = program.run(&initial, 0, Some(&[bits])).unwrap();
        assert_eq!(records[0].outcome_string(), "0100");
        let idle = state.amplitude(layout.basis_index(false, x, 0));
        let active = state.amplitude(layout.basis_index(true, ax, 0));
        assert!((idle.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((active.re + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        // An outcome orthogonal to a x leaves phase +1.
        let bits = outcome_bits(0b0001, 4);
        let (state, _) = program.run(&initial, 0, Some(&[bits])).unwrap();
        let active = state.amplitude(layout.basis_index(true, ax, 0));
        assert!((active.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn oracle_matches_the_reference_shape_for_10111() {
        let mask: ParityMask = "10111".parse().unwrap();
        assert_eq!(mask.positions(), vec![0, 2, 3, 4]);
        let params = SchemeParams::new(21, 2).unwrap();
        let layout = layout_for(SchemeKind::C, &params);
        let circ = build_parity_oracle(
            &mask,
            layout.data(),
            layout.xreg(),
            layout.oracle(),
            layout.total_qubits(),
        )
        .unwrap();
        let kinds: Vec<GateKind> = circ.gates().iter().map(|g| g.kind()).collect();
        assert_eq!(
            kinds,
            vec![
                GateKind::Cnot,
                GateKind::Cnot,
                GateKind::Cnot,
                GateKind::Toffoli,
                GateKind::Cnot,
                GateKind::Cnot,
                GateKind::Cnot
            ]
        );
        let x = layout.xreg();
        assert_eq!(circ.gates()[0].qubits(), &[x[0], x[2]]);
        assert_eq!(circ.gates()[1].qubits(), &[x[2], x[3]]);
        assert_eq!(circ.gates()[2].qubits(), &[x[3], x[4]]);
        assert_eq!(
            circ.gates()[3].qubits(),
            &[layout.data(), x[4], layout.oracle()]
        );
        assert_eq!(circ.gates()[4].qubits(), &[x[3], x[4]]);
        assert_eq!(circ.gates()[5].qubits(), &[x[2], x[3]]);
        assert_eq!(circ.gates()[6].qubits(), &[x[0], x[2]]);
    }

    #[test]
    fn oracle_toffoli_flip_tracks_the_masked_parity() {
        // In the computational basis the oracle flips its target qubit
        // exactly when data = 1 and the masked parity of y is odd.
        let mask: ParityMask = "101".parse().unwrap();
        let data = 0usize;
        let target = [1usize, 2, 3];
        let oracle = 4usize;
        let circ = build_parity_oracle(&mask, data, &target, oracle, 5).unwrap();
        for d in 0..2u64 {
            for y in 0..8u64 {
                let index = d | crate::modarith::pack_register(y, &target);
                let out = circ.apply_to_basis(index).unwrap();
                let expect_flip = d == 1 && (y & 0b101).count_ones() % 2 == 1;
                assert_eq!(out >> oracle & 1 == 1, expect_flip, "d={d} y={y:03b}");
                assert_eq!(unpack_register(out, &target), y, "register not restored");
            }
        }
    }

    #[test]
    fn oracle_rejects_the_oracle_qubit_inside_its_target() {
        let mask: ParityMask = "11".parse().unwrap();
        let err = build_parity_oracle(&mask, 0, &[1, 2], 2, 4);
        assert!(matches!(err, Err(Error::OracleQubitInTarget { .. })));
        // An all-zero mask never touches the register, so the clash is moot.
        let empty: ParityMask = "00".parse().unwrap();
        let circ = build_parity_oracle(&empty, 0, &[1, 2], 2, 4).unwrap();
        assert!(circ.is_empty());
    }

    #[test]
    fn parity_phase_examples() {
        let mask = ParityMask::from_value(0b0010, 4);
        assert_eq!(parity_phase(&mask, 6), -1);
        assert_eq!(parity_phase(&mask, 4), 1);
        let empty = ParityMask::from_value(0, 4);
        assert_eq!(parity_phase(&empty, 6), 1);
        let full = ParityMask::from_value(0b1111, 4);
        assert_eq!(parity_phase(&full, 6), 1);
        assert_eq!(parity_phase(&full, 7), -1);
    }

    #[test]
    fn expected_state_places_both_branches() {
        let params = SchemeParams::new(15, 7).unwrap();
        let layout = layout_for(SchemeKind::B, &params);
        let state = expected_target_state(&params, 3, &layout).unwrap();
        let a0 = state.amplitude(layout.basis_index(false, 3, 0));
        let a1 = state.amplitude(layout.basis_index(true, 6, 0));
        assert!((a0.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((a1.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((state.norm_squared() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn verify_rejects_out_of_range_inputs() {
        let params = SchemeParams::new(15, 7).unwrap();
        assert!(verify_scheme(SchemeKind::B, &params, 15, VerifyMode::AllOutcomes).is_err());
    }

    #[test]
    fn forcing_an_invalid_work_outcome_fails_cleanly() {
        // All 2^n outcomes have positive probability in scheme C, so force an
        // impossible one by measuring after the data qubit collapsed the
        // superposition: post-selecting data=0 then expecting the x register
        // to read a x is impossible for a != 1. Simpler: outcome vector of
        // wrong length.
        let params = SchemeParams::new(15, 7).unwrap();
        let layout = layout_for(SchemeKind::C, &params);
        let program = build_scheme_c(&params, &layout).unwrap();
        let initial = StateVector::basis_from_index(
            layout.total_qubits(),
            layout.basis_index(false, 3, 0),
        )
        .unwrap();
        let err = program.run(&initial, 0, Some(&[vec![true]]));
        assert!(err.is_err());
    }

    #[test]
    fn scheme_programs_have_the_expected_stage_shapes() {
        let params = SchemeParams::new(15, 7).unwrap();
        for kind in SchemeKind::all() {
            let layout = layout_for(kind, &params);
            let program = scheme_program(kind, &params, &layout).unwrap();
            match kind {
                SchemeKind::A | SchemeKind::B => {
                    assert_eq!(program.stages().len(), 1);
                    assert_eq!(program.measurement_stages(), 0);
                }
                SchemeKind::C => {
                    assert_eq!(program.stages().len(), 3);
                    assert_eq!(program.measurement_stages(), 1);
                    assert_eq!(program.measured_bits(), 4);
                }
            }
        }
    }

    #[test]
    fn sampled_outcomes_cover_the_distribution() {
        let params = SchemeParams::new(9, 2).unwrap();
        let layout = layout_for(SchemeKind::C, &params);
        let program = build_scheme_c(&params, &layout).unwrap();
        let initial = StateVector::basis_from_index(
            layout.total_qubits(),
            layout.basis_index(false, 4, 0),
        )
        .unwrap();
        let mut seen = std::collections::HashSet::new();
        for seed in 0..48 {
            let (_, records) = program.run(&initial, seed, None).unwrap();
            seen.insert(records[0].outcome_value());
        }
        // 48 draws over 16 uniform outcomes: expect a broad spread.
        assert!(seen.len() >= 10, "only {} distinct outcomes", seen.len());
    }

    #[test]
    fn scheme_c_final_state_survives_a_work_measurement_check() {
        let params = SchemeParams::new(9, 4).unwrap();
        let layout = layout_for(SchemeKind::C, &params);
        let program = build_scheme_c(&params, &layout).unwrap();
        let initial = StateVector::basis_from_index(
            layout.total_qubits(),
            layout.basis_index(false, 7, 0),
        )
        .unwrap();
        let (mut state, _) = program.run(&initial, 5, None).unwrap();
        let expected = expected_target_state(&params, 7, &layout).unwrap();
        assert!(states_equal_exact(&state, &expected, STATE_TOLERANCE).unwrap());
        // Measuring the work register after the fact is a no-op: it is
        // deterministically zero.
        let rec = state
            .measure(layout.work(), MeasureMode::Forced(vec![false; 4]))
            .unwrap();
        assert!((rec.probability - 1.0).abs() < 1e-9);
    }
}
