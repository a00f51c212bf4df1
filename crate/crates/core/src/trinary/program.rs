use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::dims::TrinaryDims;
use super::state::{Branch, TrinaryState};
use crate::error::{IcqtError, Result};
use crate::hilbert::{Basis, Operator, StateVector};

/// Controlled pointer shift `U = sum_j |b_j><b_j| (x) X^j`.
///
/// `X` is the cyclic shift `|k> -> |k+1 mod d_A>` on the apparatus, so
/// `U (|psi> (x) |0>) = sum_j <b_j|psi> |b_j> (x) |j>`.
pub fn build_pointer_measurement(basis: &Basis, apparatus_dim: usize) -> Result<Operator> {
    let ds = basis.dim();
    if apparatus_dim < ds {
        return Err(IcqtError::PointerCapacity {
            system: ds,
            apparatus: apparatus_dim,
        });
    }
    let da = apparatus_dim;
    let b = basis.matrix();
    let mut u = DMatrix::<Complex64>::zeros(ds * da, ds * da);
    for j in 0..ds {
        let col = b.column(j);
        let proj = col * col.adjoint();
        for s in 0..ds {
            for s2 in 0..ds {
                let p = proj[(s, s2)];
                if p == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..da {
                    let shifted = (k + j) % da;
                    u[(s * da + shifted, s2 * da + k)] += p;
                }
            }
        }
    }
    Operator::new(u)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProgramBranch {
    pub index: usize,
    pub unitary: Operator,
    /// Free-form description, for example the measured observable.
    pub label: Option<String>,
}

/// `U_P(SA) = sum_r |r,P><r,P| (x) U_SA(r)`, kept as its blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct ProgrammedUnitary {
    dims: TrinaryDims,
    branches: Vec<ProgramBranch>,
}

impl ProgrammedUnitary {
    pub fn new(dims: TrinaryDims, unitaries: Vec<Operator>) -> Result<Self> {
        if unitaries.len() != dims.programming {
            return Err(IcqtError::ProgramArity {
                expected: dims.programming,
                actual: unitaries.len(),
            });
        }
        let branches = unitaries
            .into_iter()
            .enumerate()
            .map(|(index, unitary)| {
                if unitary.dim() != dims.sa() {
                    return Err(IcqtError::DimensionMismatch {
                        expected: dims.sa(),
                        actual: unitary.dim(),
                    });
                }
                unitary.ensure_unitary()?;
                Ok(ProgramBranch {
                    index,
                    unitary,
                    label: None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dims, branches })
    }

    /// One pointer measurement per programming state.
    pub fn from_bases(dims: TrinaryDims, bases: &[Basis]) -> Result<Self> {
        if bases.len() != dims.programming {
            return Err(IcqtError::ProgramArity {
                expected: dims.programming,
                actual: bases.len(),
            });
        }
        let unitaries = bases
            .iter()
            .map(|b| {
                if b.dim() != dims.system {
                    return Err(IcqtError::DimensionMismatch {
                        expected: dims.system,
                        actual: b.dim(),
                    });
                }
                build_pointer_measurement(b, dims.apparatus)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims, unitaries)
    }

    pub fn with_labels<I, S>(mut self, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        for (b, l) in self.branches.iter_mut().zip(labels) {
            b.label = Some(l.into());
        }
        self
    }

    pub fn dims(&self) -> TrinaryDims {
        self.dims
    }

    pub fn branches(&self) -> &[ProgramBranch] {
        &self.branches
    }

    /// The full `D_P D_S D_A` square matrix. Only for oracles and small dims.
    pub fn densify(&self) -> Operator {
        let n = self.dims.sa();
        let total = self.dims.total();
        let mut m = DMatrix::<Complex64>::zeros(total, total);
        for b in &self.branches {
            let off = b.index * n;
            m.view_mut((off, off), (n, n)).copy_from(b.unitary.matrix());
        }
        Operator::new(m).expect("square")
    }
}

/// Applies the programmed unitary block by block.
///
/// A state whose branch view is indexed by the computational programming
/// basis maps to `(g_r, U_SA(r) |r,SA>)`; any other state is transformed
/// through its dense blocks.
pub fn apply_programmed(pu: &ProgrammedUnitary, state: &TrinaryState) -> Result<TrinaryState> {
    pu.dims.ensure_matches(&state.dims())?;
    if state.branches_are_computational() {
        let branches = state
            .stored_branches()
            .expect("checked above")
            .par_iter()
            .zip(pu.branches.par_iter())
            .map(|(b, pb)| {
                let next = pb.unitary.apply(&b.state)?;
                Ok(Branch {
                    weight: b.weight,
                    program_state: b.program_state.clone(),
                    state: next,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        return TrinaryState::from_branches(pu.dims, branches);
    }

    let n = pu.dims.sa();
    let mut out = state.dense().amplitudes().clone();
    out.as_mut_slice()
        .par_chunks_mut(n)
        .zip(pu.branches.par_iter())
        .for_each(|(chunk, pb)| {
            let v = DVector::from_column_slice(chunk);
            let w = pb.unitary.matrix() * v;
            chunk.copy_from_slice(w.as_slice());
        });
    Ok(TrinaryState::from_dense_unchecked(pu.dims, out))
}

/// Effects `E_k = <probe| U^dag (I (x) |k><k|) U |probe>` on `S` induced by
/// reading the pointer of `unitary` in its computational basis.
pub fn induced_effects(
    unitary: &Operator,
    system_dim: usize,
    probe_apparatus: &StateVector,
) -> Vec<DMatrix<Complex64>> {
    let da = probe_apparatus.dim();
    let probe = probe_apparatus.amplitudes();
    // isometry W = U (I (x) |probe>) : S -> SA
    let embed = DMatrix::from_fn(system_dim * da, system_dim, |row, s| {
        if row / da == s {
            probe[row % da]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let w = unitary.matrix() * embed;
    (0..da)
        .map(|k| {
            let wk = DMatrix::from_fn(system_dim, system_dim, |s, c| w[(s * da + k, c)]);
            wk.adjoint() * wk
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::random::{random_state, stream_rng};
    use crate::hilbert::{schmidt_decompose, NamedBasis};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn named(names: &[NamedBasis], d: usize) -> Vec<Basis> {
        names.iter().map(|n| Basis::named(*n, d)).collect()
    }

    #[test]
    fn computational_pointer_is_cnot() {
        let u = build_pointer_measurement(&Basis::computational(2), 2).unwrap();
        let cnot = Operator::from_rows(
            4,
            &[
                c(1.0), c(0.0), c(0.0), c(0.0),
                c(0.0), c(1.0), c(0.0), c(0.0),
                c(0.0), c(0.0), c(0.0), c(1.0),
                c(0.0), c(0.0), c(1.0), c(0.0),
            ],
        )
        .unwrap();
        assert_eq!(u, cnot);
        let plus = Basis::named(NamedBasis::X, 2).vector(0);
        let out = u.apply(&plus.tensor(&StateVector::basis(2, 0))).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let bell = StateVector::from_amplitudes(vec![c(h), c(0.0), c(0.0), c(h)]).unwrap();
        assert!(out.max_abs_diff(&bell) < 1e-15);
    }

    #[test]
    fn x_pointer_entangles_zero_input() {
        let xb = Basis::named(NamedBasis::X, 2);
        let u = build_pointer_measurement(&xb, 2).unwrap();
        let out = u.apply(&StateVector::basis(4, 0)).unwrap();
        // direct oracle: (|+>|0> + |->|1>)/sqrt2
        let h = 1.0 / 2f64.sqrt();
        let expect = xb
            .vector(0)
            .tensor(&StateVector::basis(2, 0))
            .amplitudes()
            * c(h)
            + xb.vector(1).tensor(&StateVector::basis(2, 1)).amplitudes() * c(h);
        assert!((out.amplitudes() - expect).camax() < 1e-15);
        let d = schmidt_decompose(&out, (2, 2)).unwrap();
        assert!((d.coefficients[0] - h).abs() < 1e-12 && (d.coefficients[1] - h).abs() < 1e-12);
    }

    #[test]
    fn qutrit_shift_by_index() {
        let u = build_pointer_measurement(&Basis::computational(3), 3).unwrap();
        let input = StateVector::basis(3, 2).tensor(&StateVector::basis(3, 0));
        let expect = StateVector::basis(3, 2).tensor(&StateVector::basis(3, 2));
        assert_eq!(u.apply(&input).unwrap(), expect);
    }

    #[test]
    fn pointer_capacity_error() {
        assert!(matches!(
            build_pointer_measurement(&Basis::computational(3), 2),
            Err(IcqtError::PointerCapacity { .. })
        ));
    }

    #[test]
    fn programmed_unitary_construction() {
        use NamedBasis::*;
        let dims = TrinaryDims::new(2, 2, 4).unwrap();
        let pu = ProgrammedUnitary::from_bases(dims, &named(&[Z, X, Y, Z], 2)).unwrap();
        assert_eq!(pu.branches().len(), 4);
        let dense = pu.densify();
        assert!(dense.is_unitary(1e-10));
        // off-diagonal programming blocks are exact zeros
        for r in 0..4 {
            for r2 in 0..4 {
                if r != r2 {
                    let blk = dense.matrix().view((r * 4, r2 * 4), (4, 4));
                    assert!(blk.iter().all(|z| *z == c(0.0)));
                }
            }
        }
        assert!(ProgrammedUnitary::from_bases(dims, &named(&[Z, Z, Z, Z], 2)).is_ok());
        let bad = TrinaryDims::new(2, 2, 4).unwrap();
        assert!(matches!(
            ProgrammedUnitary::from_bases(bad, &named(&[Z, X, Y], 2)),
            Err(IcqtError::ProgramArity { .. })
        ));
    }

    #[test]
    fn blockwise_matches_dense_application() {
        use NamedBasis::*;
        let dims = TrinaryDims::new(2, 2, 4).unwrap();
        let pu = ProgrammedUnitary::from_bases(dims, &named(&[Z, X, Y, Z], 2)).unwrap();
        let mut rng = stream_rng(13, 0);
        let dense_in = TrinaryState::from_dense(dims, random_state(16, &mut rng)).unwrap();
        let out = apply_programmed(&pu, &dense_in).unwrap();
        let oracle = pu.densify().apply(dense_in.dense()).unwrap();
        assert!(out.dense().max_abs_diff(&oracle) < 1e-10);

        let plus = Basis::named(X, 2).vector(0);
        let prod = TrinaryState::product(dims, &StateVector::uniform(4), &plus, &StateVector::basis(2, 0))
            .unwrap();
        let out = apply_programmed(&pu, &prod).unwrap();
        let oracle = pu.densify().apply(prod.dense()).unwrap();
        assert!(out.dense().max_abs_diff(&oracle) < 1e-10);
        let s = out.program_entropy().unwrap();
        let dense_s = crate::hilbert::entanglement_entropy(&oracle, (4, 4)).unwrap();
        assert!((s - dense_s).abs() < 1e-12);
        assert!(s > 0.1);
    }

    #[test]
    fn inert_program_leaves_state_separable() {
        let dims = TrinaryDims::new(2, 2, 4).unwrap();
        let mut unitaries = vec![Operator::identity(4)];
        for _ in 1..4 {
            unitaries.push(build_pointer_measurement(&Basis::computational(2), 2).unwrap());
        }
        let pu = ProgrammedUnitary::new(dims, unitaries).unwrap();
        let plus = Basis::named(NamedBasis::X, 2).vector(0);
        let st = TrinaryState::product(dims, &StateVector::basis(4, 0), &plus, &StateVector::basis(2, 0))
            .unwrap();
        let out = apply_programmed(&pu, &st).unwrap();
        assert!(out.program_entropy().unwrap() < 1e-12);
        let b0 = &out.stored_branches().unwrap()[0];
        assert!(schmidt_decompose(&b0.state, (2, 2)).unwrap().entropy() < 1e-12);
    }

    #[test]
    fn non_unitary_branch_rejected() {
        let dims = TrinaryDims::new(1, 1, 2).unwrap();
        let r = ProgrammedUnitary::new(
            dims,
            vec![Operator::identity(1), Operator::diagonal(&[c(2.0)])],
        );
        assert!(matches!(r, Err(IcqtError::NotUnitary { .. })));
    }
}
