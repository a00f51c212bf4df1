use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{Capacity, IcqcConfig, Preparation};
use super::gates::{apply_gate, GateOp, Register};
use crate::born::{dual_born_report, DualBornReport};
use crate::error::{IcqtError, Result};
use crate::hilbert::schmidt::decompose_unchecked;
use crate::hilbert::StateVector;
use crate::trinary::{TrinaryDims, TrinaryState};

fn dims_for(n: usize) -> TrinaryDims {
    TrinaryDims::new(1 << n, 1 << n, 1 << (2 * n)).expect("nonzero")
}

fn n_of(dims: TrinaryDims) -> Result<usize> {
    let n = dims.system.trailing_zeros() as usize;
    if dims != dims_for(n) || n == 0 {
        return Err(IcqtError::RegisterLaw {
            system: dims.system,
            apparatus: dims.apparatus,
            programming: dims.programming,
        });
    }
    Ok(n)
}

/// Uniform superposition on every register.
pub fn init_state(n: usize, capacity: Capacity) -> Result<TrinaryState> {
    if n == 0 {
        return Err(IcqtError::ZeroDimension);
    }
    let dim = capacity.check(n)?;
    TrinaryState::from_dense(dims_for(n), StateVector::uniform(dim))
}

fn prepare(n: usize, preparation: Preparation, capacity: Capacity) -> Result<TrinaryState> {
    match preparation {
        Preparation::Uniform => init_state(n, capacity),
        Preparation::ResetSa => {
            capacity.check(n)?;
            let dims = dims_for(n);
            let chi = StateVector::uniform(dims.programming);
            TrinaryState::from_dense(dims, chi.tensor(&StateVector::basis(dims.sa(), 0)))
        }
    }
}

/// Standard state-vector application of `gates` in order.
pub fn apply_gates(state: &TrinaryState, gates: &[GateOp]) -> Result<TrinaryState> {
    let n = n_of(state.dims())?;
    for g in gates {
        g.validate(n, &[Register::P, Register::S, Register::A])?;
    }
    let mut amps = state.dense().as_slice().to_vec();
    for g in gates {
        apply_gate(&mut amps, g, n);
    }
    Ok(TrinaryState::from_dense_unchecked(state.dims(), DVector::from_vec(amps)))
}

/// `U_P sum_p |p><p| (x) U(p, A, S)`, applied one `S (x) A` block at a time.
///
/// Each block needs only its own `4^n` amplitudes; the full-space operator
/// is never formed.
pub fn apply_programmed_op(state: &TrinaryState, config: &IcqcConfig) -> Result<TrinaryState> {
    let n = config.n();
    if n_of(state.dims())? != n {
        return Err(IcqtError::DimensionMismatch {
            expected: dims_for(n).total(),
            actual: state.dims().total(),
        });
    }
    let sa = state.dims().sa();
    let mut amps = state.dense().as_slice().to_vec();
    amps.par_chunks_mut(sa)
        .zip(config.program_table().par_iter())
        .for_each(|(block, program)| program.apply(block, n));
    for g in config.post_program() {
        apply_gate(&mut amps, g, n);
    }
    Ok(TrinaryState::from_dense_unchecked(state.dims(), DVector::from_vec(amps)))
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub n: usize,
    #[serde(skip)]
    pub final_state: TrinaryState,
    /// `P | SA` entanglement entropy.
    pub psa_entropy: f64,
    /// `S | A` entropy of each computational programming branch.
    pub branch_entropies: Vec<f64>,
    /// Branch entropies averaged with the decision probabilities.
    pub mean_branch_entropy: f64,
    pub born: DualBornReport,
}

impl RunReport {
    /// Normalized `S (x) A` state of branch `p`, or `None` when the branch
    /// is empty.
    pub fn branch_state(&self, p: usize) -> Option<StateVector> {
        let block = DVector::from_column_slice(self.final_state.block(p));
        let norm = block.norm();
        (norm * norm > crate::born::EMPTY_BRANCH_TOL)
            .then(|| StateVector::from_raw(block / Complex64::new(norm, 0.0)))
    }
}

/// Preparation, gates, programmed operation and the dual report.
pub fn run(config: &IcqcConfig, capacity: Capacity) -> Result<RunReport> {
    let n = config.n();
    let state = prepare(n, config.preparation(), capacity)?;
    let state = apply_gates(&state, config.gates())?;
    let state = apply_programmed_op(&state, config)?;
    let dims = state.dims();

    let psa_entropy = state.program_entropy()?;
    let born = dual_born_report(&state)?.with_labels(config.labels().iter().cloned());
    let branch_entropies: Vec<f64> = (0..dims.programming)
        .map(|p| {
            let block = DVector::from_column_slice(state.block(p));
            let norm = block.norm();
            if norm * norm <= crate::born::EMPTY_BRANCH_TOL {
                0.0
            } else {
                decompose_unchecked(&(block / Complex64::new(norm, 0.0)), dims.system, dims.apparatus)
                    .entropy()
            }
        })
        .collect();
    let mean_branch_entropy = branch_entropies
        .iter()
        .zip(&born.decision_probs)
        .map(|(s, p)| s * p)
        .sum();
    Ok(RunReport {
        n,
        final_state: state,
        psa_entropy,
        branch_entropies,
        mean_branch_entropy,
        born,
    })
}
