use super::evolve::{Engine, Propagate};
use super::hamiltonian::{check_pmc, TrinaryHamiltonian};
use super::block::CommutationCheck;
use crate::error::Result;
use crate::hilbert::{swap_factors, Basis, Operator};
use crate::trinary::{TrinaryDims, TrinaryState};

/// The mirrored arrangement in which `S (x) A` programs `P`:
/// `H_SA (x) I + sum_m H_P|SA(f_m) (x) |f_m><f_m|`.
///
/// Stored as an ordinary trinary Hamiltonian with the factors exchanged,
/// so `S (x) A` plays the programming register and `P` the system.
#[derive(Clone, Debug)]
pub struct SaProgrammedHamiltonian {
    dims: TrinaryDims,
    inner: TrinaryHamiltonian,
}

impl SaProgrammedHamiltonian {
    /// `sa_hamiltonian` and `sa_basis` live on `S (x) A`; `blocks[m]` acts on
    /// `P` when `S (x) A` is in `sa_basis[m]`.
    pub fn new(
        dims: TrinaryDims,
        sa_hamiltonian: Operator,
        sa_basis: Basis,
        blocks: Vec<Operator>,
    ) -> Result<Self> {
        let swapped = TrinaryDims::new(dims.programming, 1, dims.sa())?;
        Ok(Self {
            dims,
            inner: TrinaryHamiltonian::new(swapped, sa_hamiltonian, sa_basis, blocks)?,
        })
    }

    pub fn dims(&self) -> TrinaryDims {
        self.dims
    }

    /// The exchanged-role Hamiltonian on `SA (x) P`.
    pub fn transposed(&self) -> &TrinaryHamiltonian {
        &self.inner
    }

    /// The measurability condition with the roles exchanged.
    pub fn check(&self) -> CommutationCheck {
        check_pmc(&self.inner)
    }

    /// Evolves a `P (x) S (x) A` state, factorized when the exchanged
    /// condition holds.
    pub fn evolve(&self, state: &TrinaryState, t: f64) -> Result<TrinaryState> {
        self.dims.ensure_matches(&state.dims())?;
        let (dp, dsa) = (self.dims.programming, self.dims.sa());
        let engine = Engine::new(&self.inner)?;
        let swapped = swap_factors(state.dense().amplitudes(), dp, dsa);
        let out = engine.apply_vec(&swapped, t);
        Ok(TrinaryState::from_dense_unchecked(self.dims, swap_factors(&out, dsa, dp)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::hamiltonian::diagonal_in;
    use crate::hilbert::random::{random_hermitian, random_real_spectrum, random_state, stream_rng};
    use crate::hilbert::{hermitian_propagator, StateVector};

    #[test]
    fn matches_dense_mirrored_hamiltonian() {
        let dims = TrinaryDims::new(2, 2, 3).unwrap();
        let mut rng = stream_rng(11, 0);
        let basis = Basis::random(4, &mut rng);
        let hsa = diagonal_in(&basis, &random_real_spectrum(4, &mut rng));
        let blocks: Vec<Operator> = (0..4).map(|_| random_hermitian(3, &mut rng)).collect();
        let h = SaProgrammedHamiltonian::new(dims, hsa.clone(), basis.clone(), blocks.clone()).unwrap();
        assert!(h.check().satisfied);

        // I_P (x) H_SA + sum_m H_P|SA(f_m) (x) |f_m><f_m| in P (x) SA order
        let mut dense = Operator::identity(3).kron(&hsa);
        for (m, b) in blocks.iter().enumerate() {
            dense = dense.add(&b.kron(&Operator::projector(&basis.vector(m)))).unwrap();
        }
        let psi = random_state(12, &mut rng);
        let st = TrinaryState::from_dense(dims, psi.clone()).unwrap();
        let out = h.evolve(&st, 0.9).unwrap();
        let expect: StateVector = hermitian_propagator(&dense, 0.9).unwrap().apply(&psi).unwrap();
        assert!(out.dense().max_abs_diff(&expect) < 1e-9);
    }
}
