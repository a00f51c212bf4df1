use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{IcqtError, Result};
use crate::hilbert::{commutator_norm, Basis, HermitianPropagator, Operator, StateVector};

/// Commutators at or below this norm count as vanishing.
pub const COMMUTATION_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CommutationCheck {
    pub commutator_norm: f64,
    pub satisfied: bool,
}

impl CommutationCheck {
    pub(crate) fn from_norm(commutator_norm: f64) -> Self {
        Self {
            commutator_norm,
            satisfied: commutator_norm <= COMMUTATION_TOL,
        }
    }
}

/// Second-level structure of one programmed block:
/// `H_SA|P = sum_i |eps_i><eps_i| (x) H_A[i] + H_S|P (x) I`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProgrammedBlockStructure {
    system_basis: Basis,
    apparatus_generators: Vec<Operator>,
    system_hamiltonian: Operator,
}

impl ProgrammedBlockStructure {
    pub fn new(
        system_basis: Basis,
        apparatus_generators: Vec<Operator>,
        system_hamiltonian: Operator,
    ) -> Result<Self> {
        let ds = system_basis.dim();
        if apparatus_generators.len() != ds {
            return Err(IcqtError::DimensionMismatch {
                expected: ds,
                actual: apparatus_generators.len(),
            });
        }
        if system_hamiltonian.dim() != ds {
            return Err(IcqtError::DimensionMismatch {
                expected: ds,
                actual: system_hamiltonian.dim(),
            });
        }
        let da = apparatus_generators[0].dim();
        for g in &apparatus_generators {
            if g.dim() != da {
                return Err(IcqtError::DimensionMismatch {
                    expected: da,
                    actual: g.dim(),
                });
            }
            g.ensure_hermitian()?;
        }
        system_hamiltonian.ensure_hermitian()?;
        Ok(Self {
            system_basis,
            apparatus_generators,
            system_hamiltonian,
        })
    }

    pub fn system_dim(&self) -> usize {
        self.system_basis.dim()
    }

    pub fn apparatus_dim(&self) -> usize {
        self.apparatus_generators[0].dim()
    }

    pub fn system_basis(&self) -> &Basis {
        &self.system_basis
    }

    pub fn apparatus_generators(&self) -> &[Operator] {
        &self.apparatus_generators
    }

    pub fn system_hamiltonian(&self) -> &Operator {
        &self.system_hamiltonian
    }

    /// The conditional part `sum_i |eps_i><eps_i| (x) H_A[i]`.
    fn conditional(&self) -> Operator {
        let ds = self.system_dim();
        let da = self.apparatus_dim();
        let mut m = Operator::zeros(ds * da);
        for (i, g) in self.apparatus_generators.iter().enumerate() {
            let proj = Operator::projector(&self.system_basis.vector(i));
            m = m.add(&proj.kron(g)).expect("same dim");
        }
        m
    }

    /// Dense block operator on `S (x) A`.
    pub fn assemble(&self) -> Operator {
        let id_a = Operator::identity(self.apparatus_dim());
        self.conditional()
            .add(&self.system_hamiltonian.kron(&id_a))
            .expect("same dim")
    }
}

/// `[H_SA|P, H_S|P (x) I] = 0`.
pub fn check_sapmc(block: &ProgrammedBlockStructure) -> CommutationCheck {
    let local = block
        .system_hamiltonian
        .kron(&Operator::identity(block.apparatus_dim()));
    let norm = commutator_norm(&block.assemble(), &local).expect("same dim");
    CommutationCheck::from_norm(norm)
}

/// Propagator for a block satisfying the S|A measurability condition.
///
/// Applies `exp(-i H_A[i] t)` to each `eps_i` component of `S`, then
/// `exp(-i H_S t)` on `S`.
#[derive(Clone, Debug)]
pub struct StructuredBlockPropagator {
    system_basis: DMatrix<Complex64>,
    apparatus: Vec<HermitianPropagator>,
    system: HermitianPropagator,
    apparatus_dim: usize,
}

impl StructuredBlockPropagator {
    pub fn new(block: &ProgrammedBlockStructure) -> Result<Self> {
        let check = check_sapmc(block);
        if !check.satisfied {
            return Err(IcqtError::FactorizationPrecondition {
                condition: "programmed S|A measurability",
                norm: check.commutator_norm,
            });
        }
        Ok(Self {
            system_basis: block.system_basis.matrix().clone(),
            apparatus: block
                .apparatus_generators
                .iter()
                .map(HermitianPropagator::new)
                .collect::<Result<_>>()?,
            system: HermitianPropagator::new(&block.system_hamiltonian)?,
            apparatus_dim: block.apparatus_dim(),
        })
    }

    pub fn apply_vec(&self, v: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        let ds = self.system_basis.nrows();
        let da = self.apparatus_dim;
        let m = DMatrix::from_fn(ds, da, |s, a| v[s * da + a]);
        // rows indexed by eps_i
        let mut in_eps = self.system_basis.adjoint() * m;
        for (i, prop) in self.apparatus.iter().enumerate() {
            let row: DVector<Complex64> = in_eps.row(i).transpose();
            let evolved = prop.apply_vec(&row, t);
            in_eps.set_row(i, &evolved.transpose());
        }
        let back = &self.system_basis * in_eps;
        let mut out = DMatrix::<Complex64>::zeros(ds, da);
        for a in 0..da {
            let col: DVector<Complex64> = back.column(a).into_owned();
            out.set_column(a, &self.system.apply_vec(&col, t));
        }
        DVector::from_fn(ds * da, |k, _| out[(k / da, k % da)])
    }
}

/// Evolves an `S (x) A` state under a structured block through its
/// second-level factorization.
pub fn evolve_programmed_block(
    block: &ProgrammedBlockStructure,
    sa_state: &StateVector,
    t: f64,
) -> Result<StateVector> {
    let n = block.system_dim() * block.apparatus_dim();
    if sa_state.dim() != n {
        return Err(IcqtError::DimensionMismatch {
            expected: n,
            actual: sa_state.dim(),
        });
    }
    let prop = StructuredBlockPropagator::new(block)?;
    Ok(StateVector::from_raw(prop.apply_vec(sa_state.amplitudes(), t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::random::{random_hermitian, random_real_spectrum, random_state, stream_rng};
    use crate::hilbert::{hermitian_propagator, pauli, schmidt_decompose};

    fn diag_in(basis: &Basis, eigenvalues: &[f64]) -> Operator {
        let d: Vec<Complex64> = eigenvalues.iter().map(|&e| Complex64::new(e, 0.0)).collect();
        let b = basis.matrix();
        Operator::new(b * Operator::diagonal(&d).matrix() * b.adjoint()).unwrap()
    }

    #[test]
    fn diagonal_system_hamiltonian_satisfies_sapmc() {
        let mut rng = stream_rng(1, 0);
        let basis = Basis::random(3, &mut rng);
        let gens = (0..3).map(|_| random_hermitian(3, &mut rng)).collect();
        let hs = diag_in(&basis, &random_real_spectrum(3, &mut rng));
        let block = ProgrammedBlockStructure::new(basis, gens, hs).unwrap();
        assert!(check_sapmc(&block).satisfied);
    }

    #[test]
    fn off_diagonal_system_hamiltonian_violates_sapmc() {
        let mut rng = stream_rng(1, 1);
        let gens = vec![random_hermitian(2, &mut rng), random_hermitian(2, &mut rng)];
        let block = ProgrammedBlockStructure::new(Basis::computational(2), gens, pauli::x()).unwrap();
        let check = check_sapmc(&block);
        assert!(!check.satisfied);
        assert!(check.commutator_norm > 1e-3);
        let psi = random_state(4, &mut rng);
        assert!(matches!(
            evolve_programmed_block(&block, &psi, 0.5),
            Err(IcqtError::FactorizationPrecondition { .. })
        ));
    }

    #[test]
    fn equal_generators_satisfy_sapmc_for_any_system_hamiltonian() {
        let mut rng = stream_rng(1, 2);
        let g = random_hermitian(2, &mut rng);
        let hs = random_hermitian(2, &mut rng);
        let block = ProgrammedBlockStructure::new(Basis::computational(2), vec![g.clone(), g], hs).unwrap();
        let check = check_sapmc(&block);
        assert!(check.satisfied, "norm {}", check.commutator_norm);
        let psi = random_state(4, &mut rng);
        let fast = evolve_programmed_block(&block, &psi, 0.8).unwrap();
        let dense = hermitian_propagator(&block.assemble(), 0.8).unwrap().apply(&psi).unwrap();
        assert!(fast.max_abs_diff(&dense) < 1e-9);
    }

    #[test]
    fn zero_generators_leave_apparatus_alone() {
        let mut rng = stream_rng(1, 3);
        let basis = Basis::random(2, &mut rng);
        let hs = diag_in(&basis, &[0.3, -1.1]);
        let block = ProgrammedBlockStructure::new(
            basis,
            vec![Operator::zeros(2), Operator::zeros(2)],
            hs.clone(),
        )
        .unwrap();
        let s = random_state(2, &mut rng);
        let a = random_state(2, &mut rng);
        let out = evolve_programmed_block(&block, &s.tensor(&a), 1.3).unwrap();
        let expect = hermitian_propagator(&hs, 1.3).unwrap().apply(&s).unwrap().tensor(&a);
        assert!(out.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn conditional_generators_create_entanglement() {
        let mut rng = stream_rng(1, 4);
        let gens = vec![random_hermitian(2, &mut rng), random_hermitian(2, &mut rng)];
        let block =
            ProgrammedBlockStructure::new(Basis::computational(2), gens, Operator::zeros(2)).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let s = StateVector::from_amplitudes(vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)]).unwrap();
        let input = s.tensor(&StateVector::basis(2, 0));
        let out = evolve_programmed_block(&block, &input, 1.0).unwrap();
        let dense = hermitian_propagator(&block.assemble(), 1.0).unwrap().apply(&input).unwrap();
        assert!(out.max_abs_diff(&dense) < 1e-9);
        assert!(schmidt_decompose(&out, (2, 2)).unwrap().entropy() > 1e-6);
    }

    #[test]
    fn time_zero_is_identity() {
        let mut rng = stream_rng(1, 5);
        let basis = Basis::random(3, &mut rng);
        let gens = (0..3).map(|_| random_hermitian(3, &mut rng)).collect();
        let hs = diag_in(&basis, &random_real_spectrum(3, &mut rng));
        let block = ProgrammedBlockStructure::new(basis, gens, hs).unwrap();
        let psi = random_state(9, &mut rng);
        assert!(evolve_programmed_block(&block, &psi, 0.0).unwrap().max_abs_diff(&psi) < 1e-12);
    }
}
