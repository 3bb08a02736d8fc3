use thiserror::Error;

/// Errors surfaced by circuit construction, simulation, and verification.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {qubit} out of range for {num_qubits}-qubit object")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("gate touches qubit {qubit} more than once")]
    DuplicateQubit { qubit: usize },

    #[error("bitstring has length {got}, expected {expected}")]
    BitstringLength { expected: usize, got: usize },

    #[error("bitstring contains character {0:?}, expected '0' or '1'")]
    BitstringChar(char),

    #[error("basis index {index} out of range for {num_qubits} qubits")]
    BasisIndexOutOfRange { index: u64, num_qubits: usize },

    #[error("state vectors have different sizes ({left} vs {right} qubits)")]
    StateSizeMismatch { left: usize, right: usize },

    #[error("circuit acts on {expected} qubits but was given {got}")]
    CircuitWidthMismatch { expected: usize, got: usize },

    #[error("statevector width {0} exceeds the supported maximum of 24 qubits")]
    TooManyQubits(usize),

    #[error("forced measurement outcome has probability {probability:.3e}, below the zero-probability cutoff")]
    ZeroProbabilityOutcome { probability: f64 },

    #[error("classical bit {bit} referenced but store holds only {available} bits")]
    MissingClassicalBit { bit: usize, available: usize },

    #[error("forced outcomes cover {got} measurement stages, program has {expected}")]
    ForcedOutcomeCount { expected: usize, got: usize },

    #[error("gate {0} does not act as a basis-state permutation")]
    NonPermutationGate(&'static str),

    #[error("modulus {0} must be an odd integer of at least 3")]
    InvalidModulus(u64),

    #[error("{value} has no inverse modulo {modulus}")]
    NoInverse { value: u64, modulus: u64 },

    #[error("value {value} is outside the residue range of modulus {modulus}")]
    ValueOutOfRange { value: u64, modulus: u64 },

    #[error("register slice has width {got}, expected {expected}")]
    RegisterWidth { expected: usize, got: usize },

    #[error("conflicting register allocation: {0}")]
    RegisterOverlap(String),

    #[error("layout has no control-conjunction ancilla; build it with controlled multiplication enabled")]
    MissingControlAncilla,

    #[error("oracle qubit {qubit} may not be part of the phase-target register")]
    OracleQubitInTarget { qubit: usize },

    #[error("outcome enumeration over {bits} measured bits exceeds the {max}-bit limit")]
    EnumerationTooLarge { bits: usize, max: usize },

    #[error("{0}")]
    Guardrail(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialize(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
