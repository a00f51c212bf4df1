//! Trinary Hamiltonians, measurability checks and factorized evolution.

mod block;
mod evolve;
mod hamiltonian;
mod symmetric;
mod trajectory;

pub use block::{
    check_sapmc, evolve_programmed_block, CommutationCheck, ProgrammedBlockStructure,
    StructuredBlockPropagator, COMMUTATION_TOL,
};
pub use evolve::{
    evolve_factorized, evolve_forced_factorized, evolve_full, Engine, FactorizedPropagator,
    ForcedFactorization, FullPropagator, Propagate, Route, Schedule, ScheduleEngine,
};
pub use hamiltonian::{check_pmc, check_sapmc_all, diagonal_in, TrinaryHamiltonian};
pub use symmetric::SaProgrammedHamiltonian;
pub use trajectory::{
    branch_entropies, entanglement_trajectory, schedule_trajectory, EntanglementTrajectory,
};
