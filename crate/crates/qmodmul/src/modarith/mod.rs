//! Classical modular arithmetic plus reversible-circuit builders for
//! controlled modular addition and multiply-accumulate over the simulator's
//! gate set.

mod circuits;

pub use circuits::{
    build_ccopy, build_cmac, build_cmodadd, build_cswap_registers, build_mac,
};

use crate::error::{Error, Result};

/// Greatest common divisor.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Multiplicative inverse of `a` modulo `n`, via the extended Euclidean
/// algorithm.
pub fn modinv(a: u64, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidModulus(0));
    }
    let (mut old_r, mut r) = (a as i128, n as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NoInverse {
            value: a,
            modulus: n,
        });
    }
    Ok(old_s.rem_euclid(n as i128) as u64)
}

/// Canonical residue of a possibly negative constant: `norm_const(-13, 15)`
/// is 2.
pub fn norm_const(c: i64, n: u64) -> u64 {
    (c as i128).rem_euclid(n as i128) as u64
}

/// Classical multiply-accumulate `(y + c * x) mod n`.
pub fn classical_mac(c: u64, x: u64, y: u64, n: u64) -> u64 {
    ((y as u128 + c as u128 * x as u128) % n as u128) as u64
}

/// Classical modular product `(a * x) mod n`.
pub fn classical_mul(a: u64, x: u64, n: u64) -> u64 {
    ((a as u128 * x as u128) % n as u128) as u64
}

/// Pack a register value into a basis-state index: bit `j` of `value` lands
/// on qubit `register[j]`.
pub fn pack_register(value: u64, register: &[usize]) -> u64 {
    register
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &q)| acc | ((value >> j & 1) << q))
}

/// Read a register value out of a basis-state index.
pub fn unpack_register(index: u64, register: &[usize]) -> u64 {
    register
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &q)| acc | ((index >> q & 1) << j))
}

/// Modulus, multiplier, and their derived constants for one scheme instance.
///
/// Valid instances have an odd modulus `N >= 3` and a multiplier in `1..N`
/// coprime to it, so the multiplier's inverse always exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchemeParams {
    modulus: u64,
    multiplier: u64,
    width: usize,
    inverse: u64,
}

impl SchemeParams {
    pub fn new(modulus: u64, multiplier: u64) -> Result<Self> {
        if modulus < 3 || modulus % 2 == 0 {
            return Err(Error::InvalidModulus(modulus));
        }
        if multiplier == 0 || multiplier >= modulus {
            return Err(Error::ValueOutOfRange {
                value: multiplier,
                modulus,
            });
        }
        let inverse = modinv(multiplier, modulus)?;
        let width = (64 - (modulus - 1).leading_zeros()) as usize;
        Ok(SchemeParams {
            modulus,
            multiplier,
            width,
            inverse,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn multiplier(&self) -> u64 {
        self.multiplier
    }

    /// Register width `n`: the number of bits needed for residues `0..N`.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn multiplier_inverse(&self) -> u64 {
        self.inverse
    }

    /// Reduce a signed constant into `0..N`.
    pub fn norm(&self, c: i64) -> u64 {
        norm_const(c, self.modulus)
    }
}

/// Qubit assignment for one scheme instance.
///
/// The data qubit sits at index 0, followed by the two n-bit value registers
/// and the adder's scratch qubits (overflow, comparison flag, and n carry
/// qubits). A layout built with `with_control_and` adds one more ancilla
/// holding the conjunction of two controls, needed only when a
/// multiply-accumulate pass is itself controlled by the data qubit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    data: usize,
    xreg: Vec<usize>,
    work: Vec<usize>,
    overflow: usize,
    flag: usize,
    carries: Vec<usize>,
    control_and: Option<usize>,
    total: usize,
}

impl RegisterLayout {
    pub fn new(params: &SchemeParams, with_control_and: bool) -> Self {
        let n = params.width();
        let xreg: Vec<usize> = (1..=n).collect();
        let work: Vec<usize> = (n + 1..=2 * n).collect();
        let overflow = 2 * n + 1;
        let flag = 2 * n + 2;
        let carries: Vec<usize> = (2 * n + 3..3 * n + 3).collect();
        let control_and = with_control_and.then_some(3 * n + 3);
        let total = 3 * n + 3 + usize::from(with_control_and);
        RegisterLayout {
            data: 0,
            xreg,
            work,
            overflow,
            flag,
            carries,
            control_and,
            total,
        }
    }

    pub fn data(&self) -> usize {
        self.data
    }

    /// The register holding the input value x.
    pub fn xreg(&self) -> &[usize] {
        &self.xreg
    }

    /// The scratch value register.
    pub fn work(&self) -> &[usize] {
        &self.work
    }

    pub fn overflow(&self) -> usize {
        self.overflow
    }

    pub fn flag(&self) -> usize {
        self.flag
    }

    pub fn carries(&self) -> &[usize] {
        &self.carries
    }

    pub fn control_and(&self) -> Option<usize> {
        self.control_and
    }

    /// The qubit reused as the phase-correction oracle target.
    pub fn oracle(&self) -> usize {
        self.work[0]
    }

    pub fn total_qubits(&self) -> usize {
        self.total
    }

    /// All non-register scratch qubits (everything except data, x, and work).
    pub fn ancilla_qubits(&self) -> Vec<usize> {
        let mut qs = vec![self.overflow, self.flag];
        qs.extend_from_slice(&self.carries);
        qs.extend(self.control_and);
        qs
    }

    /// Basis-state index for data bit `b`, x-register value `x`, and work
    /// value `w`, with all scratch qubits zero.
    pub fn basis_index(&self, b: bool, x: u64, w: u64) -> u64 {
        (u64::from(b) << self.data) | pack_register(x, &self.xreg) | pack_register(w, &self.work)
    }
}

/// The per-step addends of a multiply-accumulate pass: entry `i` is
/// `c * 2^i mod N`, the amount added when source bit `i` is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantSchedule {
    constants: Vec<u64>,
}

impl ConstantSchedule {
    pub fn new(c: u64, params: &SchemeParams) -> Result<Self> {
        if c >= params.modulus() {
            return Err(Error::ValueOutOfRange {
                value: c,
                modulus: params.modulus(),
            });
        }
        let mut constants = Vec::with_capacity(params.width());
        let mut k = c;
        for _ in 0..params.width() {
            constants.push(k);
            k = (k * 2) % params.modulus();
        }
        Ok(ConstantSchedule { constants })
    }

    pub fn constants(&self) -> &[u64] {
        &self.constants
    }

    pub fn get(&self, i: usize) -> u64 {
        self.constants[i]
    }
}
