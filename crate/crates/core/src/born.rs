//! The dual Born rule: decision probabilities over programmed operations and
//! outcome probabilities inside each branch.

use serde::Serialize;

use crate::error::{IcqtError, Result};
use crate::hilbert::schmidt::decompose_unchecked;
use crate::hilbert::{Basis, StateVector};
use crate::trinary::state::complete_basis;
use crate::trinary::TrinaryState;

/// Branches with `|g_r|^2` at or below this carry no outcome statistics.
pub const EMPTY_BRANCH_TOL: f64 = 1e-14;
/// Schmidt coefficients closer than this make the measured basis ambiguous.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Round-off negatives down to this are clamped to zero.
const CLAMP_TOL: f64 = 1e-12;

fn clamp(p: f64) -> f64 {
    if (-CLAMP_TOL..0.0).contains(&p) {
        0.0
    } else {
        p
    }
}

/// `|g_r|^2` for each branch of the branch view.
///
/// For a state without stored branches these are the diagonal entries of
/// `rho_P` in the computational programming basis.
pub fn decision_probabilities(state: &TrinaryState) -> Vec<f64> {
    state
        .branch_view()
        .iter()
        .map(|b| clamp(b.weight.norm_sqr()))
        .collect()
}

/// Outcome statistics of one branch.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchOutcomes {
    /// Squared `S | A` Schmidt coefficients, descending, padded to `d_S`.
    pub probs: Vec<f64>,
    /// The branch's Schmidt left basis on `S`, paired with `probs`.
    pub measured_basis: Vec<StateVector>,
    /// The measured basis is not unique.
    pub degenerate: bool,
}

impl BranchOutcomes {
    /// Outcome probabilities re-expressed in `basis` order:
    /// `sum_k p_k |<b_j|u_k>|^2`, the diagonal of the branch's `rho_S`.
    ///
    /// Well-defined even when the measured basis is degenerate.
    pub fn in_basis(&self, basis: &Basis) -> Vec<f64> {
        basis
            .vectors()
            .iter()
            .map(|b| {
                let p: f64 = self
                    .probs
                    .iter()
                    .zip(&self.measured_basis)
                    .map(|(p, u)| p * b.inner(u).norm_sqr())
                    .sum();
                clamp(p)
            })
            .collect()
    }
}

/// Squared Schmidt coefficients of branch `r` across `S | A`.
pub fn outcome_probabilities(state: &TrinaryState, r: usize) -> Result<BranchOutcomes> {
    let dims = state.dims();
    let branches = state.branch_view();
    let branch = branches.get(r).ok_or(IcqtError::DimensionMismatch {
        expected: dims.programming,
        actual: r,
    })?;
    let weight = branch.weight.norm_sqr();
    if weight <= EMPTY_BRANCH_TOL {
        return Err(IcqtError::EmptyBranch { branch: r, weight });
    }
    let sd = decompose_unchecked(branch.state.amplitudes(), dims.system, dims.apparatus);
    let degenerate = sd.is_degenerate(DEGENERACY_TOL);
    let mut probs: Vec<f64> = sd.probabilities().into_iter().map(clamp).collect();
    let mut measured_basis = sd.left_basis;
    if probs.len() < dims.system {
        // complete the left basis so every outcome has a vector
        let mut vectors: Vec<_> = measured_basis.iter().map(|v| v.amplitudes().clone()).collect();
        complete_basis(&mut vectors, dims.system);
        for extra in vectors.into_iter().skip(probs.len()) {
            probs.push(0.0);
            measured_basis.push(StateVector::from_raw(extra));
        }
    }
    Ok(BranchOutcomes {
        probs,
        measured_basis,
        degenerate,
    })
}

/// `|<b_j|psi>|^2` over an orthonormal basis: the conventional Born rule.
pub fn conventional_oracle(psi: &StateVector, basis: &Basis) -> Vec<f64> {
    basis.vectors().iter().map(|b| b.inner(psi).norm_sqr()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualBornReport {
    pub decision_probs: Vec<f64>,
    /// `None` for empty branches.
    pub outcome_probs: Vec<Option<Vec<f64>>>,
    pub branch_observable_labels: Vec<Option<String>>,
    pub empty_branches: Vec<usize>,
    pub degenerate_branches: Vec<usize>,
}

impl DualBornReport {
    pub fn with_labels<I, S>(mut self, labels: I) -> Self
    where
        I: IntoIterator<Item = Option<S>>,
        S: Into<String>,
    {
        for (slot, l) in self.branch_observable_labels.iter_mut().zip(labels) {
            *slot = l.map(Into::into);
        }
        self
    }

    /// Largest deviation of any row sum from one.
    pub fn max_row_deviation(&self) -> f64 {
        let decision = (self.decision_probs.iter().sum::<f64>() - 1.0).abs();
        self.outcome_probs
            .iter()
            .flatten()
            .map(|row| (row.iter().sum::<f64>() - 1.0).abs())
            .fold(decision, f64::max)
    }

    pub fn min_entry(&self) -> f64 {
        self.decision_probs
            .iter()
            .chain(self.outcome_probs.iter().flatten().flatten())
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Decision and outcome tables for every branch.
pub fn dual_born_report(state: &TrinaryState) -> Result<DualBornReport> {
    let dp = state.dims().programming;
    let decision_probs = decision_probabilities(state);
    let mut outcome_probs = Vec::with_capacity(dp);
    let mut empty_branches = Vec::new();
    let mut degenerate_branches = Vec::new();
    for r in 0..dp {
        match outcome_probabilities(state, r) {
            Ok(o) => {
                if o.degenerate {
                    degenerate_branches.push(r);
                }
                outcome_probs.push(Some(o.probs));
            }
            Err(IcqtError::EmptyBranch { .. }) => {
                empty_branches.push(r);
                outcome_probs.push(None);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(DualBornReport {
        decision_probs,
        outcome_probs,
        branch_observable_labels: vec![None; dp],
        empty_branches,
        degenerate_branches,
    })
}
