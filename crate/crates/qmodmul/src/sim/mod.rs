//! Dense statevector simulation of a small permutation-plus-phase gate set,
//! with mid-circuit measurement and measurement-dependent circuit synthesis.

mod circuit;
mod gate;
mod program;
mod state;

pub use circuit::Circuit;
pub use gate::{ClassicalBit, Gate, GateKind};
pub use program::{ClassicalStore, DynamicProgram, Stage, SynthesisFn};
pub use state::{
    max_amplitude_deviation, register_is_zero, states_equal, states_equal_exact, MeasureMode,
    MeasurementRecord, StateVector, STATE_TOLERANCE, ZERO_PROBABILITY_TOLERANCE,
};
