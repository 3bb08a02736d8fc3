//! Gate-count accounting by circuit traversal, including enumeration of the
//! measurement-dependent tails of dynamic programs, and the head-to-head
//! scheme comparison.
//!
//! Counts are never taken from closed-form formulas: every number reported
//! here comes from walking an actually constructed circuit, so the comparison
//! identities double as structural regression tests of the builders.

use serde::Serialize;
use std::ops::AddAssign;

use crate::error::{Error, Result};
use crate::modarith::{build_ccopy, build_cmac, build_mac, RegisterLayout, SchemeParams};
use crate::schemes::{
    build_parity_oracle, layout_for, scheme_program, ParityMask, SchemeKind,
};
use crate::sim::{Circuit, DynamicProgram, GateKind, MeasurementRecord, Stage};

/// Outcome enumeration is capped at this many measured bits.
pub const MAX_ENUMERATION_BITS: usize = 12;

/// Gate totals for a circuit or program stage, bucketed by kind.
///
/// `classically_conditioned` counts gates that carry a classical condition;
/// those gates are also included in their kind bucket and in `total_gates`.
/// `measured_qubits` counts measurement operations, which are not gates and
/// do not enter `total_gates`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ResourceCount {
    pub toffoli: usize,
    pub cnot: usize,
    pub cz: usize,
    pub single_qubit: usize,
    pub cswap: usize,
    pub measured_qubits: usize,
    pub classically_conditioned: usize,
    pub total_gates: usize,
}

impl AddAssign for ResourceCount {
    fn add_assign(&mut self, rhs: ResourceCount) {
        self.toffoli += rhs.toffoli;
        self.cnot += rhs.cnot;
        self.cz += rhs.cz;
        self.single_qubit += rhs.single_qubit;
        self.cswap += rhs.cswap;
        self.measured_qubits += rhs.measured_qubits;
        self.classically_conditioned += rhs.classically_conditioned;
        self.total_gates += rhs.total_gates;
    }
}

impl ResourceCount {
    pub fn plus(mut self, rhs: ResourceCount) -> ResourceCount {
        self += rhs;
        self
    }
}

/// Tally one circuit gate by gate.
pub fn count_circuit(circuit: &Circuit) -> ResourceCount {
    let mut count = ResourceCount::default();
    for gate in circuit.gates() {
        match gate.kind() {
            GateKind::X | GateKind::H | GateKind::Z => count.single_qubit += 1,
            GateKind::Cnot => count.cnot += 1,
            GateKind::Cz => count.cz += 1,
            GateKind::Toffoli => count.toffoli += 1,
            GateKind::Cswap => count.cswap += 1,
        }
        if gate.condition().is_some() {
            count.classically_conditioned += 1;
        }
        count.total_gates += 1;
    }
    count
}

/// Cost of a dynamic program, split into its fixed part and the enumerated
/// worst case of its synthesized tails.
#[derive(Clone, Debug, Serialize)]
pub struct ProgramCost {
    /// Unitary stages plus measurement operations.
    pub fixed: ResourceCount,
    /// Largest synthesized-tail cost over all enumerated outcomes (by total
    /// gates, then Toffolis). Absent for programs without synthesis stages.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synthesized_worst: Option<ResourceCount>,
    /// Outcome attaining the worst case, as a bitstring over all measured
    /// bits in measurement order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_outcome: Option<String>,
    /// Equal-weight mean of synthesized total gates over all outcomes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synthesized_mean_total: Option<f64>,
    /// Equal-weight mean of synthesized Toffolis over all outcomes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synthesized_mean_toffoli: Option<f64>,
    /// Number of enumerated joint outcomes (1 when nothing is synthesized).
    pub outcomes_enumerated: usize,
}

impl ProgramCost {
    /// Fixed cost plus the worst-case synthesized tail.
    pub fn worst_total(&self) -> ResourceCount {
        match self.synthesized_worst {
            Some(tail) => self.fixed.plus(tail),
            None => self.fixed,
        }
    }
}

fn worse(a: &ResourceCount, b: &ResourceCount) -> bool {
    (a.total_gates, a.toffoli) > (b.total_gates, b.toffoli)
}

/// Count a dynamic program by traversal.
///
/// Fixed stages are counted directly. If the program synthesizes circuits
/// from measurements, every joint outcome over all measured bits is
/// enumerated (outcome bits do not affect which stages run, only what the
/// synthesis closures emit), the synthesized tail is counted per outcome,
/// and the worst case and equal-weight means are reported. Enumeration
/// refuses programs measuring more than [`MAX_ENUMERATION_BITS`] bits.
pub fn count_program(program: &DynamicProgram) -> Result<ProgramCost> {
    let mut fixed = ResourceCount::default();
    let mut has_synthesis = false;
    for stage in program.stages() {
        match stage {
            Stage::Unitary(circ) => fixed += count_circuit(circ),
            Stage::Measure(qs) => fixed.measured_qubits += qs.len(),
            Stage::Synthesize(_) => has_synthesis = true,
        }
    }
    if !has_synthesis {
        return Ok(ProgramCost {
            fixed,
            synthesized_worst: None,
            worst_outcome: None,
            synthesized_mean_total: None,
            synthesized_mean_toffoli: None,
            outcomes_enumerated: 1,
        });
    }
    let bits = program.measured_bits();
    if bits > MAX_ENUMERATION_BITS {
        return Err(Error::EnumerationTooLarge {
            bits,
            max: MAX_ENUMERATION_BITS,
        });
    }
    let outcomes = 1u64 << bits;
    let mut worst: Option<(ResourceCount, u64)> = None;
    let mut sum_total = 0f64;
    let mut sum_toffoli = 0f64;
    for outcome in 0..outcomes {
        let mut records: Vec<MeasurementRecord> = Vec::new();
        let mut offset = 0usize;
        let mut tail = ResourceCount::default();
        for stage in program.stages() {
            match stage {
                Stage::Unitary(_) => {}
                Stage::Measure(qs) => {
                    let stage_bits: Vec<bool> =
                        (0..qs.len()).map(|j| outcome >> (offset + j) & 1 == 1).collect();
                    records.push(MeasurementRecord {
                        qubits: qs.clone(),
                        bits: stage_bits,
                        probability: 0.5f64.powi(qs.len() as i32),
                        forced: true,
                        bit_offset: offset,
                    });
                    offset += qs.len();
                }
                Stage::Synthesize(f) => {
                    tail += count_circuit(&f(&records)?);
                }
            }
        }
        sum_total += tail.total_gates as f64;
        sum_toffoli += tail.toffoli as f64;
        let replace = match &worst {
            Some((best, _)) => worse(&tail, best),
            None => true,
        };
        if replace {
            worst = Some((tail, outcome));
        }
    }
    let (worst_count, worst_value) = worst.expect("at least one outcome was enumerated");
    let worst_outcome: String = (0..bits)
        .map(|j| if worst_value >> j & 1 == 1 { '1' } else { '0' })
        .collect();
    Ok(ProgramCost {
        fixed,
        synthesized_worst: Some(worst_count),
        worst_outcome: Some(worst_outcome),
        synthesized_mean_total: Some(sum_total / outcomes as f64),
        synthesized_mean_toffoli: Some(sum_toffoli / outcomes as f64),
        outcomes_enumerated: outcomes as usize,
    })
}

/// One scheme's cost at a given modulus and multiplier.
#[derive(Clone, Debug, Serialize)]
pub struct SchemeCost {
    pub scheme: SchemeKind,
    pub qubits: usize,
    pub cost: ProgramCost,
}

/// Build and count one scheme.
pub fn scheme_cost(kind: SchemeKind, params: &SchemeParams) -> Result<SchemeCost> {
    let layout = layout_for(kind, params);
    let program = scheme_program(kind, params, &layout)?;
    Ok(SchemeCost {
        scheme: kind,
        qubits: layout.total_qubits(),
        cost: count_program(&program)?,
    })
}

/// One row of the scheme comparison: worst-case totals per scheme.
#[derive(Clone, Debug, Serialize)]
pub struct ComparisonRow {
    pub scheme: SchemeKind,
    pub qubits: usize,
    /// Full worst-case cost: fixed stages plus worst synthesized tail.
    pub counts: ResourceCount,
    /// The worst synthesized tail on its own, for schemes that have one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_case_tail: Option<ResourceCount>,
    pub notes: String,
}

/// Toffoli-count relations between the schemes, all read off from traversed
/// circuits.
#[derive(Clone, Debug, Serialize)]
pub struct SavingsSummary {
    /// Register width n.
    pub width: usize,
    pub toffoli_a: usize,
    pub toffoli_b: usize,
    /// Worst case over measurement outcomes.
    pub toffoli_c: usize,
    /// Toffolis saved by measuring the work register instead of uncomputing
    /// scheme B's copy; equals n - 1 whenever the oracle's worst case (one
    /// Toffoli) replaces the copy's n Toffolis.
    pub measured_uncompute_saves: i64,
    pub measured_uncompute_expected: i64,
    pub measured_uncompute_exact: bool,
    /// Toffolis saved against scheme A by dropping the extra control from
    /// both multiply-accumulate passes.
    pub control_elision_saves: i64,
    /// The same quantity predicted from building-block counts: twice the
    /// controlled-vs-plain pass difference, minus the controlled copy,
    /// minus the oracle's single Toffoli.
    pub control_elision_predicted: i64,
    pub control_elision_exact: bool,
    pub control_elision_positive: bool,
    pub toffoli_controlled_pass: usize,
    pub toffoli_plain_pass: usize,
    pub toffoli_controlled_copy: usize,
}

/// Full comparison of the three schemes at one `(N, a)`.
#[derive(Clone, Debug, Serialize)]
pub struct SchemeComparison {
    pub modulus: u64,
    pub multiplier: u64,
    pub rows: Vec<ComparisonRow>,
    pub savings: SavingsSummary,
}

/// Build all three schemes at `(N, a)`, count them, and relate the counts.
pub fn compare_schemes(params: &SchemeParams) -> Result<SchemeComparison> {
    let mut rows = Vec::new();
    let mut toffoli = [0usize; 3];
    for (i, kind) in SchemeKind::all().into_iter().enumerate() {
        let sc = scheme_cost(kind, params)?;
        let counts = sc.cost.worst_total();
        toffoli[i] = counts.toffoli;
        let notes = match kind {
            SchemeKind::A => "both passes doubly controlled".to_string(),
            SchemeKind::B => "controlled copy, passes uncontrolled".to_string(),
            SchemeKind::C => format!(
                "worst tail at outcome {}; mean synthesized Toffoli {:.3}",
                sc.cost.worst_outcome.as_deref().unwrap_or("-"),
                sc.cost.synthesized_mean_toffoli.unwrap_or(0.0),
            ),
        };
        rows.push(ComparisonRow {
            scheme: kind,
            qubits: sc.qubits,
            counts,
            worst_case_tail: sc.cost.synthesized_worst,
            notes,
        });
    }

    // Building-block counts, taken from the same builders the schemes use.
    // The layout with the conjunction ancilla accommodates both pass
    // variants; counting is layout-independent.
    let layout = RegisterLayout::new(params, true);
    let a = params.multiplier();
    let n = params.width();
    let plain = count_circuit(&build_mac(a, layout.xreg(), layout.work(), params, &layout)?);
    let controlled = count_circuit(&build_cmac(
        a,
        layout.data(),
        layout.xreg(),
        layout.work(),
        params,
        &layout,
    )?);
    let copy = count_circuit(&build_ccopy(
        layout.data(),
        layout.xreg(),
        layout.work(),
        layout.total_qubits(),
    )?);
    let oracle_worst = count_circuit(&build_parity_oracle(
        &ParityMask::from_value((1 << n) - 1, n),
        layout.data(),
        layout.xreg(),
        layout.oracle(),
        layout.total_qubits(),
    )?);

    let measured_uncompute_saves = toffoli[1] as i64 - toffoli[2] as i64;
    let measured_uncompute_expected = n as i64 - 1;
    let control_elision_saves = toffoli[0] as i64 - toffoli[2] as i64;
    let control_elision_predicted = 2 * (controlled.toffoli as i64 - plain.toffoli as i64)
        - copy.toffoli as i64
        - oracle_worst.toffoli as i64;
    let savings = SavingsSummary {
        width: n,
        toffoli_a: toffoli[0],
        toffoli_b: toffoli[1],
        toffoli_c: toffoli[2],
        measured_uncompute_saves,
        measured_uncompute_expected,
        measured_uncompute_exact: measured_uncompute_saves == measured_uncompute_expected,
        control_elision_saves,
        control_elision_predicted,
        control_elision_exact: control_elision_saves == control_elision_predicted,
        control_elision_positive: control_elision_saves > 0,
        toffoli_controlled_pass: controlled.toffoli,
        toffoli_plain_pass: plain.toffoli,
        toffoli_controlled_copy: copy.toffoli,
    };
    Ok(SchemeComparison {
        modulus: params.modulus(),
        multiplier: params.multiplier(),
        rows,
        savings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{ClassicalBit, Gate};

    #[test]
    fn circuit_counting_buckets_by_kind() {
        let mut c = Circuit::new(4);
        c.push(Gate::x(0)).unwrap();
        c.push(Gate::h(1)).unwrap();
        c.push(Gate::z(2)).unwrap();
        c.push(Gate::cnot(0, 1)).unwrap();
        c.push(Gate::cz(1, 2)).unwrap();
        c.push(Gate::toffoli(0, 1, 2)).unwrap();
        c.push(Gate::cswap(3, 0, 1)).unwrap();
        c.push(Gate::x(3).with_condition(ClassicalBit(0))).unwrap();
        let count = count_circuit(&c);
        assert_eq!(count.single_qubit, 4);
        assert_eq!(count.cnot, 1);
        assert_eq!(count.cz, 1);
        assert_eq!(count.toffoli, 1);
        assert_eq!(count.cswap, 1);
        assert_eq!(count.classically_conditioned, 1);
        assert_eq!(count.total_gates, 8);
    }

    #[test]
    fn measurement_free_programs_have_no_tail() {
        let params = SchemeParams::new(15, 7).unwrap();
        let cost = scheme_cost(SchemeKind::A, &params).unwrap().cost;
        assert!(cost.synthesized_worst.is_none());
        assert_eq!(cost.outcomes_enumerated, 1);
        assert_eq!(cost.fixed.measured_qubits, 0);
    }

    #[test]
    fn scheme_c_worst_tail_is_the_all_ones_outcome() {
        let params = SchemeParams::new(15, 7).unwrap();
        let cost = scheme_cost(SchemeKind::C, &params).unwrap().cost;
        assert_eq!(cost.outcomes_enumerated, 16);
        assert_eq!(cost.worst_outcome.as_deref(), Some("1111"));
        let worst = cost.synthesized_worst.unwrap();
        // n resets + oracle prep/unprep (4 gates) + 2(n-1) chain CNOTs + 1
        // Toffoli.
        assert_eq!(worst.toffoli, 1);
        assert_eq!(worst.cnot, 6);
        assert_eq!(worst.single_qubit, 8);
        assert_eq!(worst.classically_conditioned, 4);
        assert!(cost.synthesized_mean_total.unwrap() < worst.total_gates as f64);
        // The all-zero outcome needs no correction at all, so the mean
        // Toffoli count sits strictly below 1.
        assert!(cost.synthesized_mean_toffoli.unwrap() < 1.0);
        assert_eq!(cost.fixed.measured_qubits, 4);
    }

    #[test]
    fn comparison_identities_hold_for_a_reference_modulus() {
        let params = SchemeParams::new(15, 7).unwrap();
        let cmp = compare_schemes(&params).unwrap();
        assert!(cmp.savings.measured_uncompute_exact, "{:?}", cmp.savings);
        assert_eq!(cmp.savings.measured_uncompute_saves, 3);
        assert!(cmp.savings.control_elision_exact, "{:?}", cmp.savings);
        assert!(cmp.savings.control_elision_positive);
        assert_eq!(cmp.rows.len(), 3);
        // Scheme A pays one extra qubit for the conjunction ancilla.
        assert_eq!(cmp.rows[0].qubits, cmp.rows[1].qubits + 1);
    }

    #[test]
    fn identities_hold_for_every_valid_multiplier() {
        for modulus in [9u64, 15] {
            for a in 1..modulus {
                if crate::modarith::gcd(a, modulus) != 1 {
                    continue;
                }
                let params = SchemeParams::new(modulus, a).unwrap();
                let cmp = compare_schemes(&params).unwrap();
                assert!(
                    cmp.savings.measured_uncompute_exact,
                    "N={modulus} a={a}: {:?}",
                    cmp.savings
                );
                assert!(
                    cmp.savings.control_elision_exact,
                    "N={modulus} a={a}: {:?}",
                    cmp.savings
                );
            }
        }
    }

    #[test]
    fn enumeration_guardrail_trips_on_wide_measurements() {
        // Width 13 modulus: counting would enumerate 2^13 outcomes.
        let params = SchemeParams::new(8191, 2).unwrap();
        assert_eq!(params.width(), 13);
        let err = scheme_cost(SchemeKind::C, &params);
        assert!(matches!(err, Err(Error::EnumerationTooLarge { .. })));
        // Schemes without measurements stay countable at that size.
        assert!(scheme_cost(SchemeKind::B, &params).is_ok());
    }

    #[test]
    fn counting_never_builds_a_statevector() {
        // Far beyond simulable width, counting still works.
        let params = SchemeParams::new((1 << 20) - 1, 2).unwrap();
        let cost = scheme_cost(SchemeKind::A, &params).unwrap();
        assert!(cost.cost.fixed.toffoli > 0);
        assert_eq!(cost.qubits, 3 * 20 + 4);
    }
}
