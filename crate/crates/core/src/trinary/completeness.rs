use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::program::{induced_effects, ProgrammedUnitary};
use crate::error::{IcqtError, Result};
use crate::hilbert::StateVector;

/// Singular values of the Gram matrix above this count toward the rank.
pub const GRAM_RANK_TOL: f64 = 1e-8;
const ZERO_EFFECT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompletenessReport {
    /// `D_A = D_S` and `D_P = D_S D_A`.
    pub dims_ok: bool,
    /// `D_P >= D_S^2`.
    pub minimal_complete: bool,
    /// Rank of the Hilbert-Schmidt Gram matrix of all branch effects.
    pub tomographic_rank: usize,
    pub required_rank: usize,
    /// Number of nonzero pointer effects contributed by each branch.
    pub effects_per_branch: Vec<usize>,
    pub complete: bool,
}

/// Checks whether the programmed measurements span the operator space of
/// `S`.
///
/// Each branch is probed with the apparatus ready state; reading the
/// pointer then induces effects on `S` (the projectors onto the branch's
/// measured basis for a pointer measurement). The program is complete when
/// the dimension law holds and those effects span all `D_S^2` directions.
pub fn validate_informational_completeness(
    pu: &ProgrammedUnitary,
    probe_apparatus: &StateVector,
) -> Result<CompletenessReport> {
    let dims = pu.dims();
    if probe_apparatus.dim() != dims.apparatus {
        return Err(IcqtError::DimensionMismatch {
            expected: dims.apparatus,
            actual: probe_apparatus.dim(),
        });
    }
    let ds = dims.system;

    let mut flattened: Vec<Vec<Complex64>> = Vec::new();
    let mut effects_per_branch = Vec::with_capacity(pu.branches().len());
    for branch in pu.branches() {
        let mut count = 0;
        for e in induced_effects(&branch.unitary, ds, probe_apparatus) {
            if e.iter().all(|z| z.norm() <= ZERO_EFFECT_TOL) {
                continue;
            }
            count += 1;
            flattened.push(e.iter().copied().collect());
        }
        effects_per_branch.push(count);
    }

    let gram = DMatrix::from_fn(flattened.len(), flattened.len(), |a, b| {
        // Tr(E_a^dag E_b)
        flattened[a]
            .iter()
            .zip(&flattened[b])
            .map(|(x, y)| x.conj() * y)
            .sum::<Complex64>()
    });
    let tomographic_rank = if gram.is_empty() {
        0
    } else {
        gram.singular_values()
            .iter()
            .filter(|&&s| s > GRAM_RANK_TOL)
            .count()
    };

    let required_rank = ds * ds;
    let dims_ok = dims.is_measurability_valid();
    Ok(CompletenessReport {
        dims_ok,
        minimal_complete: dims.is_minimal_complete(),
        tomographic_rank,
        required_rank,
        effects_per_branch,
        complete: dims_ok && tomographic_rank >= required_rank,
    })
}
