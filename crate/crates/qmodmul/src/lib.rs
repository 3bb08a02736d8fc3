//! Circuit construction, dense statevector verification, and resource
//! accounting for three realizations of controlled modular multiplication,
//! the arithmetic core of order-finding circuits.
//!
//! The three schemes compute `|b>|x> -> |b>|a^b * x mod N>` for an odd
//! modulus N and a multiplier a coprime to N:
//!
//! * scheme A: two multiply-accumulate passes, each doubly controlled, with a
//!   controlled register swap in between;
//! * scheme B: singly controlled passes only, at the price of n extra
//!   Toffoli gates in a controlled copy;
//! * scheme C: replaces scheme B's uncomputation pass by measuring the
//!   scratch register in the X basis and undoing the leftover phase with a
//!   classically synthesized parity oracle, saving close to n Toffoli gates.
//!
//! Conventions used throughout:
//!
//! * Statevector indices are little-endian: qubit `i` is bit `i` of the
//!   amplitude index, and an integer register keeps its least significant
//!   bit at its lowest qubit index.
//! * Bitstrings are written in qubit order: character `i` of the string is
//!   the value of qubit `i` (or bit `i` of an outcome).
//! * Registers hold residues: inputs are taken from `0..N` and arithmetic
//!   circuits are only specified on that domain.
//!
//! Start with the runnable examples (`cargo run --example run_scheme_c`),
//! or with [`schemes::verify_scheme`] and [`resources::compare_schemes`].

pub mod cli;
pub mod error;
pub mod modarith;
pub mod resources;
pub mod schemes;
pub mod sim;

pub use error::{Error, Result};
