//! The informationally complete quantum computer: `n` system qubits, `n`
//! apparatus qubits and `2n` programming qubits.

mod config;
mod gates;
mod run;

pub use config::{
    random_sa_circuit, tomographic_program, BranchProgram, Capacity, IcqcConfig, Preparation,
    RegisterSizes, DEFAULT_MAX_DIM, MAX_DIM_ENV,
};
pub use gates::{GateKind, GateOp, Qubit, Register};
pub use run::{apply_gates, apply_programmed_op, init_state, run, RunReport};
