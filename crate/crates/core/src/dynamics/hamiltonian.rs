use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::block::{check_sapmc, CommutationCheck, ProgrammedBlockStructure};
use crate::error::{IcqtError, Result};
use crate::hilbert::random::{random_hermitian, random_real_spectrum};
use crate::hilbert::{commutator_norm, Basis, Operator};
use crate::trinary::TrinaryDims;

/// `I_PSA = H_P (x) I + sum_n |e_n><e_n| (x) H_SA|P(e_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrinaryHamiltonian {
    dims: TrinaryDims,
    program: Operator,
    programming_basis: Basis,
    blocks: Vec<Operator>,
    structures: Option<Vec<ProgrammedBlockStructure>>,
}

impl TrinaryHamiltonian {
    pub fn new(
        dims: TrinaryDims,
        program: Operator,
        programming_basis: Basis,
        blocks: Vec<Operator>,
    ) -> Result<Self> {
        if program.dim() != dims.programming {
            return Err(IcqtError::DimensionMismatch {
                expected: dims.programming,
                actual: program.dim(),
            });
        }
        if programming_basis.dim() != dims.programming {
            return Err(IcqtError::DimensionMismatch {
                expected: dims.programming,
                actual: programming_basis.dim(),
            });
        }
        if blocks.len() != dims.programming {
            return Err(IcqtError::ProgramArity {
                expected: dims.programming,
                actual: blocks.len(),
            });
        }
        program.ensure_hermitian()?;
        for b in &blocks {
            if b.dim() != dims.sa() {
                return Err(IcqtError::DimensionMismatch {
                    expected: dims.sa(),
                    actual: b.dim(),
                });
            }
            b.ensure_hermitian()?;
        }
        Ok(Self {
            dims,
            program,
            programming_basis,
            blocks,
            structures: None,
        })
    }

    /// Blocks given in their second-level structured form.
    pub fn from_structures(
        dims: TrinaryDims,
        program: Operator,
        programming_basis: Basis,
        structures: Vec<ProgrammedBlockStructure>,
    ) -> Result<Self> {
        for s in &structures {
            if s.system_dim() != dims.system || s.apparatus_dim() != dims.apparatus {
                return Err(IcqtError::DimensionMismatch {
                    expected: dims.sa(),
                    actual: s.system_dim() * s.apparatus_dim(),
                });
            }
        }
        let blocks = structures.iter().map(ProgrammedBlockStructure::assemble).collect();
        let mut h = Self::new(dims, program, programming_basis, blocks)?;
        h.structures = Some(structures);
        Ok(h)
    }

    pub fn zero(dims: TrinaryDims) -> Self {
        Self {
            dims,
            program: Operator::zeros(dims.programming),
            programming_basis: Basis::computational(dims.programming),
            blocks: vec![Operator::zeros(dims.sa()); dims.programming],
            structures: None,
        }
    }

    pub fn dims(&self) -> TrinaryDims {
        self.dims
    }

    pub fn program_hamiltonian(&self) -> &Operator {
        &self.program
    }

    pub fn programming_basis(&self) -> &Basis {
        &self.programming_basis
    }

    pub fn blocks(&self) -> &[Operator] {
        &self.blocks
    }

    pub fn structures(&self) -> Option<&[ProgrammedBlockStructure]> {
        self.structures.as_deref()
    }

    /// `H_P (x) I_SA`
    pub fn local_program(&self) -> Operator {
        self.program.kron(&Operator::identity(self.dims.sa()))
    }

    /// `H_P(SA) = sum_n |e_n><e_n| (x) H_SA|P(e_n)`
    pub fn interaction(&self) -> Operator {
        let total = self.dims.total();
        let mut m = Operator::zeros(total);
        for (n, b) in self.blocks.iter().enumerate() {
            let proj = Operator::projector(&self.programming_basis.vector(n));
            m = m.add(&proj.kron(b)).expect("same dim");
        }
        m
    }

    /// Dense `I_PSA` on the full space.
    pub fn full(&self) -> Operator {
        self.local_program().add(&self.interaction()).expect("same dim")
    }

    /// Matrix of `H_P` in the programming basis.
    pub(crate) fn program_in_basis(&self) -> DMatrix<Complex64> {
        let e = self.programming_basis.matrix();
        e.adjoint() * self.program.matrix() * e
    }

    /// Random Hamiltonian satisfying the P-SA measurability condition.
    ///
    /// `H_P` is diagonal in a random programming basis; blocks are
    /// independent random Hermitian operators.
    pub fn random_measurable<R: Rng + ?Sized>(dims: TrinaryDims, rng: &mut R) -> Self {
        let basis = Basis::random(dims.programming, rng);
        let program = diagonal_in(&basis, &random_real_spectrum(dims.programming, rng));
        let blocks = (0..dims.programming)
            .map(|_| random_hermitian(dims.sa(), rng))
            .collect();
        Self::new(dims, program, basis, blocks).expect("consistent by construction")
    }

    /// Random measurable Hamiltonian whose programming states share blocks
    /// in groups of `group`, with `H_P` coupling states inside a group.
    ///
    /// `H_P` is then not diagonal in the programming basis but still
    /// commutes with the interaction.
    pub fn random_measurable_grouped<R: Rng + ?Sized>(
        dims: TrinaryDims,
        group: usize,
        rng: &mut R,
    ) -> Self {
        assert!(group >= 1);
        let dp = dims.programming;
        let basis = Basis::random(dp, rng);
        let mut in_basis = DMatrix::<Complex64>::zeros(dp, dp);
        let mut blocks = Vec::with_capacity(dp);
        let mut start = 0;
        while start < dp {
            let len = group.min(dp - start);
            let h = random_hermitian(len, rng);
            in_basis.view_mut((start, start), (len, len)).copy_from(h.matrix());
            let b = random_hermitian(dims.sa(), rng);
            blocks.extend(std::iter::repeat_n(b, len));
            start += len;
        }
        let e = basis.matrix();
        let program = Operator::new(e * in_basis * e.adjoint()).expect("square");
        let program = hermitize(&program);
        Self::new(dims, program, basis, blocks).expect("consistent by construction")
    }

    /// Random Hamiltonian that generically violates the P-SA condition:
    /// `H_P` is a full random Hermitian operator and blocks differ.
    pub fn random_generic<R: Rng + ?Sized>(dims: TrinaryDims, rng: &mut R) -> Self {
        let basis = Basis::random(dims.programming, rng);
        let program = random_hermitian(dims.programming, rng);
        let blocks = (0..dims.programming)
            .map(|_| random_hermitian(dims.sa(), rng))
            .collect();
        Self::new(dims, program, basis, blocks).expect("consistent by construction")
    }
}

/// `B diag(e) B^dag`, symmetrized to exact Hermiticity.
pub fn diagonal_in(basis: &Basis, eigenvalues: &[f64]) -> Operator {
    let d: Vec<Complex64> = eigenvalues.iter().map(|&e| Complex64::new(e, 0.0)).collect();
    let b = basis.matrix();
    let op = Operator::new(b * Operator::diagonal(&d).matrix() * b.adjoint()).expect("square");
    hermitize(&op)
}

fn hermitize(op: &Operator) -> Operator {
    Operator::new((op.matrix() + op.matrix().adjoint()) * Complex64::new(0.5, 0.0)).expect("square")
}

/// `[H_P(SA), H_P (x) I] = 0`.
pub fn check_pmc(h: &TrinaryHamiltonian) -> CommutationCheck {
    let norm = commutator_norm(&h.interaction(), &h.local_program()).expect("same dim");
    CommutationCheck::from_norm(norm)
}

/// S|A measurability of every structured block; `None` for unstructured
/// Hamiltonians.
pub fn check_sapmc_all(h: &TrinaryHamiltonian) -> Option<CommutationCheck> {
    let structures = h.structures()?;
    let worst = structures
        .iter()
        .map(|s| check_sapmc(s).commutator_norm)
        .fold(0.0, f64::max);
    Some(CommutationCheck::from_norm(worst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::random::stream_rng;
    use crate::hilbert::pauli;

    fn dims() -> TrinaryDims {
        TrinaryDims::new(2, 2, 4).unwrap()
    }

    #[test]
    fn full_operator_is_hermitian() {
        let mut rng = stream_rng(3, 0);
        let h = TrinaryHamiltonian::random_generic(dims(), &mut rng);
        assert!(h.full().is_hermitian(1e-12));
        assert_eq!(h.full().dim(), 16);
    }

    #[test]
    fn diagonal_program_hamiltonian_satisfies_pmc() {
        let mut rng = stream_rng(3, 1);
        let h = TrinaryHamiltonian::random_measurable(dims(), &mut rng);
        assert!(check_pmc(&h).satisfied);
    }

    #[test]
    fn coupling_distinct_blocks_violates_pmc() {
        let mut rng = stream_rng(3, 2);
        // X coupling between |e_0> and |e_1>, zero elsewhere
        let mut m = DMatrix::<Complex64>::zeros(4, 4);
        m.view_mut((0, 0), (2, 2)).copy_from(pauli::x().matrix());
        let program = Operator::new(m).unwrap();
        let blocks = (0..4).map(|_| random_hermitian(4, &mut rng)).collect();
        let h = TrinaryHamiltonian::new(dims(), program, Basis::computational(4), blocks).unwrap();
        let c = check_pmc(&h);
        assert!(!c.satisfied);
        assert!(c.commutator_norm > 0.0);
        // dense oracle: the (0,1) programming block is h_01 (B_0 - B_1)
        let dense = h.interaction().commutator(&h.local_program()).unwrap();
        let expect = h.blocks()[0].add(&h.blocks()[1].scale(Complex64::new(-1.0, 0.0))).unwrap();
        let blk = dense.matrix().view((0, 4), (4, 4)).into_owned();
        assert!((blk - expect.matrix()).camax() < 1e-12);
    }

    #[test]
    fn equal_blocks_commute_with_any_program_hamiltonian() {
        let mut rng = stream_rng(3, 3);
        let b = random_hermitian(4, &mut rng);
        let program = random_hermitian(4, &mut rng);
        let h = TrinaryHamiltonian::new(dims(), program, Basis::random(4, &mut rng), vec![b; 4]).unwrap();
        assert!(check_pmc(&h).satisfied);
    }

    #[test]
    fn grouped_generator_is_measurable_but_not_diagonal() {
        let mut rng = stream_rng(3, 4);
        let h = TrinaryHamiltonian::random_measurable_grouped(dims(), 2, &mut rng);
        assert!(check_pmc(&h).satisfied);
        let m = h.program_in_basis();
        assert!(m[(0, 1)].norm() > 1e-3);
    }

    #[test]
    fn rejects_wrong_shapes() {
        let r = TrinaryHamiltonian::new(
            dims(),
            Operator::zeros(3),
            Basis::computational(4),
            vec![Operator::zeros(4); 4],
        );
        assert!(matches!(r, Err(IcqtError::DimensionMismatch { .. })));
        let r = TrinaryHamiltonian::new(
            dims(),
            Operator::zeros(4),
            Basis::computational(4),
            vec![Operator::zeros(4); 3],
        );
        assert!(matches!(r, Err(IcqtError::ProgramArity { .. })));
    }
}
