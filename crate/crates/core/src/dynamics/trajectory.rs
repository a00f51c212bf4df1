use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::evolve::{Engine, Propagate, Route, Schedule, ScheduleEngine};
use super::hamiltonian::TrinaryHamiltonian;
use crate::error::{IcqtError, Result};
use crate::hilbert::schmidt::decompose_unchecked;
use crate::hilbert::Basis;
use crate::trinary::TrinaryState;

/// Components whose weight falls below this contribute zero branch entropy.
const EMPTY_COMPONENT_TOL: f64 = 1e-14;
/// Slack allowed when deciding whether a trajectory is nondecreasing.
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntanglementTrajectory {
    pub times: Vec<f64>,
    /// `P | SA` entropy at each time.
    pub s_psa: Vec<f64>,
    /// `s_sa_branches[k][n]`: `S | A` entropy of programming component `n`
    /// at time `k`.
    pub s_sa_branches: Vec<Vec<f64>>,
    /// Whether the factorized route was used.
    pub factorized: bool,
    /// Recorded, not asserted: `S_PSA` never decreased along the samples.
    pub monotone: bool,
}

impl EntanglementTrajectory {
    pub fn final_psa(&self) -> f64 {
        *self.s_psa.last().expect("at least one time")
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    match times.first() {
        None => return Err(IcqtError::InvalidInput("no sample times".into())),
        Some(&t0) if t0 != 0.0 => {
            return Err(IcqtError::InvalidInput(format!("times must start at 0, got {t0}")))
        }
        _ => {}
    }
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(IcqtError::InvalidInput("times must be ascending".into()));
    }
    Ok(())
}

/// `S | A` entropy of each component `<e_n| state` of the programming basis.
pub fn branch_entropies(state: &TrinaryState, basis: &Basis) -> Vec<f64> {
    let dims = state.dims();
    let (dp, n) = (dims.programming, dims.sa());
    let v = state.dense().amplitudes();
    (0..dp)
        .map(|k| {
            let e = basis.vector(k);
            let mut block = DVector::<Complex64>::zeros(n);
            for r in 0..dp {
                let c = e.amplitudes()[r].conj();
                if c != Complex64::new(0.0, 0.0) {
                    block += v.rows(r * n, n) * c;
                }
            }
            let norm = block.norm();
            if norm * norm <= EMPTY_COMPONENT_TOL {
                return 0.0;
            }
            decompose_unchecked(&(block / Complex64::new(norm, 0.0)), dims.system, dims.apparatus)
                .entropy()
        })
        .collect()
}

fn record(
    states: Vec<TrinaryState>,
    times: &[f64],
    basis: &Basis,
    factorized: bool,
) -> Result<EntanglementTrajectory> {
    let s_psa = states
        .iter()
        .map(TrinaryState::program_entropy)
        .collect::<Result<Vec<_>>>()?;
    let s_sa_branches = states.iter().map(|s| branch_entropies(s, basis)).collect();
    let monotone = s_psa.windows(2).all(|w| w[1] >= w[0] - MONOTONE_SLACK);
    Ok(EntanglementTrajectory {
        times: times.to_vec(),
        s_psa,
        s_sa_branches,
        factorized,
        monotone,
    })
}

/// Samples the dual entanglement along the evolution of `state`.
///
/// Uses the factorized route when the measurability condition holds and the
/// dense route otherwise. Time points are evolved independently from the
/// initial state.
pub fn entanglement_trajectory(
    h: &TrinaryHamiltonian,
    state: &TrinaryState,
    times: &[f64],
) -> Result<EntanglementTrajectory> {
    h.dims().ensure_matches(&state.dims())?;
    check_times(times)?;
    let engine = Engine::new(h)?;
    let states = times
        .par_iter()
        .map(|&t| engine.evolve(state, t))
        .collect::<Result<Vec<_>>>()?;
    record(states, times, h.programming_basis(), engine.is_factorized())
}

/// Trajectory under a piecewise-constant schedule. Branch entropies use the
/// programming basis of the first segment.
pub fn schedule_trajectory(
    schedule: &Schedule,
    state: &TrinaryState,
    times: &[f64],
) -> Result<EntanglementTrajectory> {
    schedule.dims().ensure_matches(&state.dims())?;
    check_times(times)?;
    let engine = ScheduleEngine::new(schedule, Route::Auto)?;
    let states = times
        .par_iter()
        .map(|&t| engine.evolve(state, t))
        .collect::<Result<Vec<_>>>()?;
    let factorized = schedule
        .segments()
        .iter()
        .all(|(_, h)| super::hamiltonian::check_pmc(h).satisfied);
    record(states, times, schedule.segments()[0].1.programming_basis(), factorized)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::random::{random_state, stream_rng};
    use crate::hilbert::StateVector;
    use crate::trinary::TrinaryDims;

    fn dims() -> TrinaryDims {
        TrinaryDims::new(2, 2, 4).unwrap()
    }

    fn separable(seed: u64) -> TrinaryState {
        let mut rng = stream_rng(seed, 7);
        let chi = random_state(4, &mut rng);
        let psi = random_state(2, &mut rng);
        let phi = random_state(2, &mut rng);
        TrinaryState::from_dense(dims(), chi.tensor(&psi).tensor(&phi)).unwrap()
    }

    #[test]
    fn zero_hamiltonian_keeps_entropies_constant() {
        let mut rng = stream_rng(1, 0);
        let st = TrinaryState::from_dense(dims(), random_state(16, &mut rng)).unwrap();
        let tr = entanglement_trajectory(&TrinaryHamiltonian::zero(dims()), &st, &[0.0, 0.5, 3.0]).unwrap();
        for k in 1..3 {
            assert!((tr.s_psa[k] - tr.s_psa[0]).abs() < 1e-10);
            for n in 0..4 {
                assert!((tr.s_sa_branches[k][n] - tr.s_sa_branches[0][n]).abs() < 1e-10);
            }
        }
        assert!(tr.factorized);
    }

    #[test]
    fn generic_hamiltonian_creates_entanglement() {
        let mut rng = stream_rng(2, 0);
        let h = TrinaryHamiltonian::random_generic(dims(), &mut rng);
        let tr = entanglement_trajectory(&h, &separable(2), &[0.0, 0.1]).unwrap();
        assert!(tr.s_psa[0] < 1e-10);
        assert!(tr.s_psa[1] > 1e-6);
        assert!(!tr.factorized);
    }

    #[test]
    fn maximally_entangled_start_stays_bounded() {
        let mut rng = stream_rng(3, 0);
        let h = TrinaryHamiltonian::random_generic(dims(), &mut rng);
        // sum_r |r>|r> / 2 across P | SA
        let mut v = DVector::<Complex64>::zeros(16);
        for r in 0..4 {
            v[r * 4 + r] = Complex64::new(0.5, 0.0);
        }
        let st = TrinaryState::from_dense(dims(), StateVector::new(v).unwrap()).unwrap();
        let tr = entanglement_trajectory(&h, &st, &[0.0, 0.3, 1.0, 4.0]).unwrap();
        let bound = 4f64.ln() + 1e-9;
        assert!((tr.s_psa[0] - 4f64.ln()).abs() < 1e-10);
        for (s, row) in tr.s_psa.iter().zip(&tr.s_sa_branches) {
            assert!(*s >= 0.0 && *s <= bound);
            assert!(row.iter().all(|&b| b >= 0.0 && b <= 2f64.ln() + 1e-9));
        }
    }

    #[test]
    fn rejects_bad_times() {
        let h = TrinaryHamiltonian::zero(dims());
        let st = separable(4);
        assert!(entanglement_trajectory(&h, &st, &[]).is_err());
        assert!(entanglement_trajectory(&h, &st, &[0.1, 0.2]).is_err());
        assert!(entanglement_trajectory(&h, &st, &[0.0, 0.2, 0.1]).is_err());
    }

    #[test]
    fn schedule_trajectory_matches_constant_schedule() {
        let mut rng = stream_rng(5, 0);
        let h = TrinaryHamiltonian::random_measurable(dims(), &mut rng);
        let st = separable(5);
        let times = [0.0, 0.4, 1.2];
        let a = entanglement_trajectory(&h, &st, &times).unwrap();
        let b = schedule_trajectory(&Schedule::constant(h), &st, &times).unwrap();
        for (x, y) in a.s_psa.iter().zip(&b.s_psa) {
            assert!((x - y).abs() < 1e-10);
        }
        assert!(b.factorized);
    }
}
