//! Reversible builders for controlled modular constant addition and the
//! multiply-accumulate passes composed from it.
//!
//! The adder follows the classic ripple-carry recipe: carries into each bit
//! are computed into dedicated ancillas, sum bits are written top-down with
//! the carries uncomputed on the way back, and the modular reduction is done
//! with a borrowed overflow bit, a comparison flag, and a final flag-clearing
//! comparison against the added constant. Toffoli placement never depends on
//! the bits of the constant, so every constant (including 0) costs the same
//! number of Toffoli gates; only the X/CNOT dressing varies.

use crate::error::{Error, Result};
use crate::modarith::{ConstantSchedule, RegisterLayout, SchemeParams};
use crate::sim::{Circuit, Gate};

/// Compute the ripple carries of `targets + k` into `carries[..m-1]`.
///
/// Step `i` writes the carry into bit `i+1`. Each step past the first costs
/// exactly one Toffoli regardless of `k`.
fn emit_carry_step(circ: &mut Circuit, k: u64, i: usize, targets: &[usize], prev: Option<usize>, dest: usize) -> Result<()> {
    let ki = k >> i & 1 == 1;
    match prev {
        None => {
            if ki {
                circ.push(Gate::cnot(targets[i], dest))?;
            }
        }
        Some(prev) => {
            circ.push(Gate::toffoli(targets[i], prev, dest))?;
            if ki {
                circ.push(Gate::cnot(targets[i], dest))?;
                circ.push(Gate::cnot(prev, dest))?;
            }
        }
    }
    Ok(())
}

/// Add the constant `k` into the `targets` register when `control` is set.
///
/// Plain non-modular addition over `targets.len()` bits, discarding the final
/// carry-out. Carry ancillas enter and leave in state 0.
fn emit_ctrl_add_const(
    circ: &mut Circuit,
    control: usize,
    k: u64,
    targets: &[usize],
    carries: &[usize],
) -> Result<()> {
    let m = targets.len();
    for i in 0..m - 1 {
        let prev = (i > 0).then(|| carries[i - 1]);
        emit_carry_step(circ, k, i, targets, prev, carries[i])?;
    }
    for i in (0..m).rev() {
        if k >> i & 1 == 1 {
            circ.push(Gate::cnot(control, targets[i]))?;
        }
        if i >= 1 {
            circ.push(Gate::toffoli(control, carries[i - 1], targets[i]))?;
            // The carry into bit i is no longer needed; replay its
            // computation (self-inverse) while the lower sum bits are
            // still untouched.
            let j = i - 1;
            let prev = (j > 0).then(|| carries[j - 1]);
            emit_carry_step(circ, k, j, targets, prev, carries[j])?;
        }
    }
    Ok(())
}

/// Flip `target` by the carry-out of `values + k`, leaving `values` and the
/// carry ancillas unchanged.
///
/// With `k = 2^w - t` this is the comparison `values >= t`.
fn emit_carry_out(
    circ: &mut Circuit,
    k: u64,
    values: &[usize],
    carries: &[usize],
    target: usize,
) -> Result<()> {
    let w = values.len();
    for i in 0..w {
        let prev = (i > 0).then(|| carries[i - 1]);
        let dest = if i < w - 1 { carries[i] } else { target };
        emit_carry_step(circ, k, i, values, prev, dest)?;
    }
    for i in (0..w - 1).rev() {
        let prev = (i > 0).then(|| carries[i - 1]);
        emit_carry_step(circ, k, i, values, prev, carries[i])?;
    }
    Ok(())
}

fn check_register(reg: &[usize], width: usize) -> Result<()> {
    if reg.len() != width {
        return Err(Error::RegisterWidth {
            expected: width,
            got: reg.len(),
        });
    }
    Ok(())
}

fn check_disjoint(groups: &[(&str, &[usize])]) -> Result<()> {
    for (gi, (name_i, qs_i)) in groups.iter().enumerate() {
        for (name_j, qs_j) in groups.iter().skip(gi + 1) {
            for q in *qs_i {
                if qs_j.contains(q) {
                    return Err(Error::RegisterOverlap(format!(
                        "{name_i} and {name_j} share qubit {q}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Controlled modular addition of the constant `c`: when `control` is set,
/// `target` goes from `y` to `(y + c) mod N`.
///
/// Valid on basis states with `y < N`. Uses the layout's overflow, flag, and
/// carry ancillas, all of which are returned to 0; `control` is any qubit
/// outside `target` and those ancillas. The Toffoli count is the same for
/// every constant, and `c = 0` acts as the identity.
pub fn build_cmodadd(
    c: u64,
    control: usize,
    target: &[usize],
    params: &SchemeParams,
    layout: &RegisterLayout,
) -> Result<Circuit> {
    let n = params.width();
    let modulus = params.modulus();
    if c >= modulus {
        return Err(Error::ValueOutOfRange {
            value: c,
            modulus,
        });
    }
    check_register(target, n)?;
    let scratch = [layout.overflow(), layout.flag()];
    check_disjoint(&[
        ("control", &[control]),
        ("target", target),
        ("overflow/flag", &scratch),
        ("carries", layout.carries()),
    ])?;

    let mut circ = Circuit::new(layout.total_qubits());
    let m = n + 1;
    let mut ext: Vec<usize> = target.to_vec();
    ext.push(layout.overflow());
    let two_m = 1u64 << m;
    let carries = layout.carries();

    // 1. y += c when controlled, over n+1 bits so the sum never wraps.
    emit_ctrl_add_const(&mut circ, control, c, &ext, carries)?;
    // 2. flag ^= (y' >= N), read off the carry-out of y' + (2^m - N).
    emit_carry_out(&mut circ, two_m - modulus, &ext, carries, layout.flag())?;
    // 3. Subtract N exactly when the flag was raised.
    emit_ctrl_add_const(&mut circ, layout.flag(), two_m - modulus, &ext, carries)?;
    // 4. Clear the flag: after reduction the result is below c exactly when
    //    the subtraction happened (given the control fired). The comparison
    //    lands in the overflow bit, which is 0 again at this point, and is
    //    uncomputed by replaying the chain. With c = 0 the constant below is
    //    0, the chain moves nothing, and the Toffoli on a clear overflow bit
    //    keeps the flag untouched, as required.
    let k4 = (1u64 << n).wrapping_sub(c) & ((1 << n) - 1);
    emit_carry_out(&mut circ, k4, target, carries, layout.overflow())?;
    if c != 0 {
        circ.push(Gate::x(layout.overflow()))?;
    }
    circ.push(Gate::toffoli(control, layout.overflow(), layout.flag()))?;
    if c != 0 {
        circ.push(Gate::x(layout.overflow()))?;
    }
    emit_carry_out(&mut circ, k4, target, carries, layout.overflow())?;
    Ok(circ)
}

fn check_mac_registers(
    src: &[usize],
    dst: &[usize],
    extra: Option<usize>,
    params: &SchemeParams,
    layout: &RegisterLayout,
) -> Result<()> {
    let n = params.width();
    check_register(src, n)?;
    check_register(dst, n)?;
    let scratch = [layout.overflow(), layout.flag()];
    let extra_slice: Vec<usize> = extra.into_iter().collect();
    let and_slice: Vec<usize> = layout.control_and().into_iter().collect();
    check_disjoint(&[
        ("source", src),
        ("destination", dst),
        ("overflow/flag", &scratch),
        ("carries", layout.carries()),
        ("extra control", &extra_slice),
        ("conjunction ancilla", &and_slice),
    ])
}

/// Multiply-accumulate `|x>|y> -> |x>|(y + c x) mod N>`: one controlled
/// modular addition of `c * 2^i` per source bit `i`.
pub fn build_mac(
    c: u64,
    src: &[usize],
    dst: &[usize],
    params: &SchemeParams,
    layout: &RegisterLayout,
) -> Result<Circuit> {
    check_mac_registers(src, dst, None, params, layout)?;
    let schedule = ConstantSchedule::new(c, params)?;
    let mut circ = Circuit::new(layout.total_qubits());
    for (i, &q) in src.iter().enumerate() {
        circ.append(&build_cmodadd(schedule.get(i), q, dst, params, layout)?)?;
    }
    Ok(circ)
}

/// Multiply-accumulate with an extra control qubit.
///
/// Each per-bit addition is gated on `extra AND src[i]`, computed into the
/// layout's conjunction ancilla by one Toffoli and uncomputed by another, so
/// the controlled version costs exactly 2n Toffolis more than [`build_mac`].
pub fn build_cmac(
    c: u64,
    extra: usize,
    src: &[usize],
    dst: &[usize],
    params: &SchemeParams,
    layout: &RegisterLayout,
) -> Result<Circuit> {
    check_mac_registers(src, dst, Some(extra), params, layout)?;
    let and_anc = layout.control_and().ok_or(Error::MissingControlAncilla)?;
    let schedule = ConstantSchedule::new(c, params)?;
    let mut circ = Circuit::new(layout.total_qubits());
    for (i, &q) in src.iter().enumerate() {
        circ.push(Gate::toffoli(extra, q, and_anc))?;
        circ.append(&build_cmodadd(schedule.get(i), and_anc, dst, params, layout)?)?;
        circ.push(Gate::toffoli(extra, q, and_anc))?;
    }
    Ok(circ)
}

/// Copy `src` into a cleared `dst` when `control` is set: one Toffoli per
/// bit.
pub fn build_ccopy(control: usize, src: &[usize], dst: &[usize], num_qubits: usize) -> Result<Circuit> {
    if src.len() != dst.len() {
        return Err(Error::RegisterWidth {
            expected: src.len(),
            got: dst.len(),
        });
    }
    check_disjoint(&[("control", &[control]), ("source", src), ("destination", dst)])?;
    let mut circ = Circuit::new(num_qubits);
    for (&s, &d) in src.iter().zip(dst) {
        circ.push(Gate::toffoli(control, s, d))?;
    }
    Ok(circ)
}

/// Swap two registers bitwise when `control` is set, using the CNOT-Toffoli-
/// CNOT realization of a Fredkin gate on each bit pair.
pub fn build_cswap_registers(
    control: usize,
    a: &[usize],
    b: &[usize],
    num_qubits: usize,
) -> Result<Circuit> {
    if a.len() != b.len() {
        return Err(Error::RegisterWidth {
            expected: a.len(),
            got: b.len(),
        });
    }
    check_disjoint(&[("control", &[control]), ("first register", a), ("second register", b)])?;
    let mut circ = Circuit::new(num_qubits);
    for (&qa, &qb) in a.iter().zip(b) {
        circ.push(Gate::cnot(qb, qa))?;
        circ.push(Gate::toffoli(control, qa, qb))?;
        circ.push(Gate::cnot(qb, qa))?;
    }
    Ok(circ)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modarith::{pack_register, unpack_register, classical_mac};
    use crate::sim::{
        states_equal_exact, ClassicalStore, GateKind, StateVector, STATE_TOLERANCE,
    };

    fn toffoli_count(c: &Circuit) -> usize {
        c.gates()
            .iter()
            .filter(|g| g.kind() == GateKind::Toffoli)
            .count()
    }

    /// Track `(control, y)` through a controlled adder and read the result.
    fn run_cmodadd_classical(
        circ: &Circuit,
        control: usize,
        target: &[usize],
        layout: &RegisterLayout,
        ctrl: bool,
        y: u64,
    ) -> (bool, u64, u64) {
        let index = (u64::from(ctrl) << control) | pack_register(y, target);
        let out = circ.apply_to_basis(index).unwrap();
        let ctrl_out = out >> control & 1 == 1;
        let y_out = unpack_register(out, target);
        let junk = unpack_register(out, &layout.ancilla_qubits());
        (ctrl_out, y_out, junk)
    }

    #[test]
    fn cmodadd_is_exhaustively_correct_for_n15() {
        let params = SchemeParams::new(15, 7).unwrap();
        let layout = RegisterLayout::new(&params, false);
        for c in 0..15u64 {
            let circ =
                build_cmodadd(c, layout.data(), layout.xreg(), &params, &layout).unwrap();
            for ctrl in [false, true] {
                for y in 0..15u64 {
                    let (ctrl_out, y_out, junk) = run_cmodadd_classical(
                        &circ,
                        layout.data(),
                        layout.xreg(),
                        &layout,
                        ctrl,
                        y,
                    );
                    let expect = if ctrl { (y + c) % 15 } else { y };
                    assert_eq!(ctrl_out, ctrl, "c={c} y={y}");
                    assert_eq!(y_out, expect, "c={c} ctrl={ctrl} y={y}");
                    assert_eq!(junk, 0, "dirty ancillas at c={c} ctrl={ctrl} y={y}");
                }
            }
        }
    }

    #[test]
    fn cmodadd_is_exhaustively_correct_for_small_odd_moduli() {
        for modulus in [3u64, 5, 9, 21] {
            let params = SchemeParams::new(modulus, modulus - 1).unwrap();
            let layout = RegisterLayout::new(&params, false);
            for c in 0..modulus {
                let circ =
                    build_cmodadd(c, layout.data(), layout.xreg(), &params, &layout).unwrap();
                for ctrl in [false, true] {
                    for y in 0..modulus {
                        let (_, y_out, junk) = run_cmodadd_classical(
                            &circ,
                            layout.data(),
                            layout.xreg(),
                            &layout,
                            ctrl,
                            y,
                        );
                        let expect = if ctrl { (y + c) % modulus } else { y };
                        assert_eq!(y_out, expect, "N={modulus} c={c} ctrl={ctrl} y={y}");
                        assert_eq!(junk, 0, "N={modulus} c={c} ctrl={ctrl} y={y}");
                    }
                }
            }
        }
    }

    #[test]
    fn cmodadd_toffoli_count_is_constant_independent() {
        let params = SchemeParams::new(21, 2).unwrap();
        let layout = RegisterLayout::new(&params, false);
        let counts: Vec<usize> = (0..21)
            .map(|c| {
                toffoli_count(
                    &build_cmodadd(c, layout.data(), layout.xreg(), &params, &layout).unwrap(),
                )
            })
            .collect();
        assert!(counts.windows(2).all(|w| w[0] == w[1]), "{counts:?}");
    }

    #[test]
    fn cmodadd_statevector_matches_basis_tracking() {
        let params = SchemeParams::new(9, 2).unwrap();
        let layout = RegisterLayout::new(&params, false);
        let circ = build_cmodadd(5, layout.data(), layout.xreg(), &params, &layout).unwrap();
        let store = ClassicalStore::new();
        for (ctrl, y) in [(true, 0u64), (true, 7), (false, 4), (true, 8)] {
            let index = (u64::from(ctrl) << layout.data()) | pack_register(y, layout.xreg());
            let mut state =
                StateVector::basis_from_index(layout.total_qubits(), index).unwrap();
            state.apply_circuit(&circ, &store).unwrap();
            let expect = StateVector::basis_from_index(
                layout.total_qubits(),
                circ.apply_to_basis(index).unwrap(),
            )
            .unwrap();
            assert!(states_equal_exact(&state, &expect, STATE_TOLERANCE).unwrap());
        }
    }

    #[test]
    fn cmodadd_rejects_bad_inputs() {
        let params = SchemeParams::new(15, 7).unwrap();
        let layout = RegisterLayout::new(&params, false);
        assert!(build_cmodadd(15, layout.data(), layout.xreg(), &params, &layout).is_err());
        assert!(build_cmodadd(3, layout.flag(), layout.xreg(), &params, &layout).is_err());
        assert!(build_cmodadd(3, layout.data(), &layout.xreg()[..3], &params, &layout).is_err());
        assert!(
            build_cmodadd(3, layout.data(), layout.carries(), &params, &layout).is_err()
        );
    }

    #[test]
    fn mac_matches_classical_multiply_accumulate() {
        let params = SchemeParams::new(15, 7).unwrap();
        let layout = RegisterLayout::new(&params, false);
        for c in [0u64, 1, 2, 6, 7, 11, 14] {
            let circ = build_mac(c, layout.xreg(), layout.work(), &params, &layout).unwrap();
            for x in 0..15u64 {
                for y in 0..15u64 {
                    let index = layout.basis_index(false, x, y);
                    let out = circ.apply_to_basis(index).unwrap();
                    assert_eq!(unpack_register(out, layout.xreg()), x);
                    assert_eq!(
                        unpack_register(out, layout.work()),
                        classical_mac(c, x, y, 15),
                        "c={c} x={x} y={y}"
                    );
                    assert_eq!(unpack_register(out, &layout.ancilla_qubits()), 0);
                }
            }
        }
    }

    #[test]
    fn mac_spec_values() {
        // (y + c x) mod 15 for the pairs used by the multiplication schemes
        // at a = 7: 3 + 6*3 = 21 = 6, then 6 + 2*... the inverse direction
        // clears: 3 + 2*6 = 15 = 0.
        let params = SchemeParams::new(15, 7).unwrap();
        let layout = RegisterLayout::new(&params, false);
        let run = |c: u64, x: u64, y: u64| {
            let circ = build_mac(c, layout.xreg(), layout.work(), &params, &layout).unwrap();
            let out = circ
                .apply_to_basis(layout.basis_index(false, x, y))
                .unwrap();
            unpack_register(out, layout.work())
        };
        assert_eq!(run(6, 3, 3), 6);
        assert_eq!(run(2, 6, 3), 0);
        assert_eq!(run(0, 11, 9), 9);
    }

    #[test]
    fn cmac_obeys_the_extra_control() {
        let params = SchemeParams::new(15, 7).unwrap();
        let layout = RegisterLayout::new(&params, true);
        let circ = build_cmac(
            7,
            layout.data(),
            layout.xreg(),
            layout.work(),
            &params,
            &layout,
        )
        .unwrap();
        for extra in [false, true] {
            for x in 0..15u64 {
                for y in 0..15u64 {
                    let index = layout.basis_index(extra, x, y);
                    let out = circ.apply_to_basis(index).unwrap();
                    let expect = if extra { classical_mac(7, x, y, 15) } else { y };
                    assert_eq!(unpack_register(out, layout.work()), expect);
                    assert_eq!(unpack_register(out, layout.xreg()), x);
                    assert_eq!(unpack_register(out, &layout.ancilla_qubits()), 0);
                }
            }
        }
    }

    #[test]
    fn cmac_requires_the_conjunction_ancilla() {
        let params = SchemeParams::new(15, 7).unwrap();
        let layout = RegisterLayout::new(&params, false);
        let err = build_cmac(
            7,
            layout.data(),
            layout.xreg(),
            layout.work(),
            &params,
            &layout,
        );
        assert!(matches!(err, Err(Error::MissingControlAncilla)));
    }

    #[test]
    fn cmac_costs_two_extra_toffolis_per_addition() {
        let params = SchemeParams::new(21, 5).unwrap();
        let layout = RegisterLayout::new(&params, true);
        let mac = build_mac(5, layout.xreg(), layout.work(), &params, &layout).unwrap();
        let cmac = build_cmac(
            5,
            layout.data(),
            layout.xreg(),
            layout.work(),
            &params,
            &layout,
        )
        .unwrap();
        assert_eq!(
            toffoli_count(&cmac),
            toffoli_count(&mac) + 2 * params.width()
        );
    }

    #[test]
    fn ccopy_and_cswap_semantics() {
        let params = SchemeParams::new(15, 7).unwrap();
        let layout = RegisterLayout::new(&params, false);
        let n_q = layout.total_qubits();
        let copy = build_ccopy(layout.data(), layout.xreg(), layout.work(), n_q).unwrap();
        let swap =
            build_cswap_registers(layout.data(), layout.xreg(), layout.work(), n_q).unwrap();
        for ctrl in [false, true] {
            for x in 0..15u64 {
                let idx = layout.basis_index(ctrl, x, 0);
                let out = copy.apply_to_basis(idx).unwrap();
                let expect = if ctrl { x } else { 0 };
                assert_eq!(unpack_register(out, layout.work()), expect);
                for w in [0u64, 9, 13] {
                    let idx = layout.basis_index(ctrl, x, w);
                    let out = swap.apply_to_basis(idx).unwrap();
                    let (ex, ew) = if ctrl { (w, x) } else { (x, w) };
                    assert_eq!(unpack_register(out, layout.xreg()), ex);
                    assert_eq!(unpack_register(out, layout.work()), ew);
                }
            }
        }
        assert_eq!(toffoli_count(&copy), 4);
        assert_eq!(toffoli_count(&swap), 4);
        assert_eq!(swap.len(), 12);
    }

    #[test]
    fn builders_are_reversible() {
        // Running a permutation circuit forward then checking injectivity
        // over the embedded domain is enough: the map is its own certificate.
        let params = SchemeParams::new(21, 4).unwrap();
        let layout = RegisterLayout::new(&params, false);
        let circ = build_mac(13, layout.xreg(), layout.work(), &params, &layout).unwrap();
        let mut seen = std::collections::HashSet::new();
        for x in 0..21u64 {
            for y in 0..21u64 {
                let out = circ.apply_to_basis(layout.basis_index(false, x, y)).unwrap();
                assert!(seen.insert(out));
            }
        }
    }
}
