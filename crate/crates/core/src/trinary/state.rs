use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::dims::TrinaryDims;
use crate::error::{IcqtError, Result};
use crate::hilbert::schmidt::decompose_unchecked;
use crate::hilbert::{schmidt_decompose, SchmidtDecomposition, StateVector};

pub const BRANCH_TOL: f64 = 1e-10;

/// One term `g_r |r,P> (x) |r,SA>` of the branch expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub weight: Complex64,
    /// `|r,P>`; the computational basis vector `r` unless the state was
    /// rewritten in Schmidt form.
    pub program_state: StateVector,
    /// `|r,SA>`, normalized.
    pub state: StateVector,
}

/// Pure state of `P (x) S (x) A` with an optional branch view.
#[derive(Clone, Debug, PartialEq)]
pub struct TrinaryState {
    dims: TrinaryDims,
    dense: StateVector,
    branches: Option<Vec<Branch>>,
}

impl TrinaryState {
    pub fn from_dense(dims: TrinaryDims, dense: StateVector) -> Result<Self> {
        if dense.dim() != dims.total() {
            return Err(IcqtError::DimensionMismatch {
                expected: dims.total(),
                actual: dense.dim(),
            });
        }
        if !dense.is_normalized(BRANCH_TOL) {
            return Err(IcqtError::NotNormalized {
                norm_sqr: dense.norm_sqr(),
            });
        }
        Ok(Self {
            dims,
            dense,
            branches: None,
        })
    }

    /// Dense result of a norm-preserving map; skips the normalization check.
    pub(crate) fn from_dense_unchecked(dims: TrinaryDims, dense: DVector<Complex64>) -> Self {
        debug_assert_eq!(dense.len(), dims.total());
        Self {
            dims,
            dense: StateVector::from_raw(dense),
            branches: None,
        }
    }

    /// Assembles `sum_r g_r |r,P> (x) |r,SA>`.
    ///
    /// Requires one branch per programming dimension, orthonormal program
    /// states, normalized branch states and `sum |g_r|^2 = 1`.
    pub fn from_branches(dims: TrinaryDims, branches: Vec<Branch>) -> Result<Self> {
        if branches.len() != dims.programming {
            return Err(IcqtError::ProgramArity {
                expected: dims.programming,
                actual: branches.len(),
            });
        }
        for b in &branches {
            if b.program_state.dim() != dims.programming {
                return Err(IcqtError::DimensionMismatch {
                    expected: dims.programming,
                    actual: b.program_state.dim(),
                });
            }
            if b.state.dim() != dims.sa() {
                return Err(IcqtError::DimensionMismatch {
                    expected: dims.sa(),
                    actual: b.state.dim(),
                });
            }
            if !b.state.is_normalized(BRANCH_TOL) {
                return Err(IcqtError::NotNormalized {
                    norm_sqr: b.state.norm_sqr(),
                });
            }
        }
        for i in 0..branches.len() {
            for j in i..branches.len() {
                let expect = if i == j { 1.0 } else { 0.0 };
                let overlap = branches[i].program_state.inner(&branches[j].program_state);
                if (overlap - Complex64::new(expect, 0.0)).norm() > BRANCH_TOL {
                    return Err(IcqtError::InvalidInput(
                        "branch program states are not orthonormal".into(),
                    ));
                }
            }
        }
        let total: f64 = branches.iter().map(|b| b.weight.norm_sqr()).sum();
        if (total - 1.0).abs() > BRANCH_TOL {
            return Err(IcqtError::NotNormalized { norm_sqr: total });
        }
        let dense = assemble(&branches, dims);
        Ok(Self {
            dims,
            dense: StateVector::from_raw(dense),
            branches: Some(branches),
        })
    }

    /// `|chi,P> (x) |psi,S> (x) |phi,A>`, with branch view `g_r = chi_r`.
    pub fn product(
        dims: TrinaryDims,
        program: &StateVector,
        system: &StateVector,
        apparatus: &StateVector,
    ) -> Result<Self> {
        for (v, d) in [
            (program, dims.programming),
            (system, dims.system),
            (apparatus, dims.apparatus),
        ] {
            if v.dim() != d {
                return Err(IcqtError::DimensionMismatch {
                    expected: d,
                    actual: v.dim(),
                });
            }
            if !v.is_normalized(BRANCH_TOL) {
                return Err(IcqtError::NotNormalized {
                    norm_sqr: v.norm_sqr(),
                });
            }
        }
        let sa = system.tensor(apparatus);
        let branches = (0..dims.programming)
            .map(|r| Branch {
                weight: program[r],
                program_state: StateVector::basis(dims.programming, r),
                state: sa.clone(),
            })
            .collect();
        Self::from_branches(dims, branches)
    }

    pub fn dims(&self) -> TrinaryDims {
        self.dims
    }

    pub fn dense(&self) -> &StateVector {
        &self.dense
    }

    pub fn stored_branches(&self) -> Option<&[Branch]> {
        self.branches.as_deref()
    }

    /// Block `r` of the dense vector: `(<r,P| (x) I) |state>`.
    pub fn block(&self, r: usize) -> &[Complex64] {
        let n = self.dims.sa();
        &self.dense.as_slice()[r * n..(r + 1) * n]
    }

    /// The branch view: stored branches if present, otherwise the
    /// computational-basis blocks with real nonnegative weights.
    pub fn branch_view(&self) -> Vec<Branch> {
        if let Some(b) = &self.branches {
            return b.clone();
        }
        let n = self.dims.sa();
        (0..self.dims.programming)
            .map(|r| {
                let block = DVector::from_column_slice(self.block(r));
                let norm = block.norm();
                let state = if norm > 0.0 {
                    StateVector::from_raw(block / Complex64::new(norm, 0.0))
                } else {
                    StateVector::basis(n, 0)
                };
                Branch {
                    weight: Complex64::new(norm, 0.0),
                    program_state: StateVector::basis(self.dims.programming, r),
                    state,
                }
            })
            .collect()
    }

    /// True when the stored branch view (if any) is indexed by the
    /// computational programming basis.
    pub(crate) fn branches_are_computational(&self) -> bool {
        match &self.branches {
            None => false,
            Some(bs) => bs
                .iter()
                .enumerate()
                .all(|(r, b)| b.program_state == StateVector::basis(self.dims.programming, r)),
        }
    }

    /// Schmidt decomposition across the `P | SA` cut.
    pub fn program_schmidt(&self) -> Result<SchmidtDecomposition> {
        schmidt_decompose(&self.dense, (self.dims.programming, self.dims.sa()))
    }

    /// Entanglement entropy across `P | SA`, in nats.
    pub fn program_entropy(&self) -> Result<f64> {
        Ok(self.program_schmidt()?.entropy())
    }

    pub fn max_abs_diff(&self, other: &TrinaryState) -> f64 {
        self.dense.max_abs_diff(&other.dense)
    }
}

fn assemble(branches: &[Branch], dims: TrinaryDims) -> DVector<Complex64> {
    let mut dense = DVector::zeros(dims.total());
    for b in branches {
        if b.weight.norm() == 0.0 {
            continue;
        }
        dense += b.program_state.amplitudes().kronecker(b.state.amplitudes()) * b.weight;
    }
    dense
}

/// Rewrites the branch view in the `P | SA` Schmidt form: real,
/// nonnegative, descending weights with orthonormal branch states.
///
/// Program states become the Schmidt left vectors. When `D_SA < D_P` the
/// missing program states complete the basis with zero weight.
pub fn to_schmidt_form(state: &TrinaryState) -> TrinaryState {
    let dims = state.dims;
    let (dp, dsa) = (dims.programming, dims.sa());
    let d = decompose_unchecked(state.dense.amplitudes(), dp, dsa);

    let mut program: Vec<DVector<Complex64>> =
        d.left_basis.iter().map(|v| v.amplitudes().clone()).collect();
    complete_basis(&mut program, dp);
    let sa_states = &d.right_basis;

    let branches = (0..dp)
        .map(|k| Branch {
            weight: Complex64::new(d.coefficients.get(k).copied().unwrap_or(0.0), 0.0),
            program_state: StateVector::from_raw(program[k].clone()),
            state: sa_states
                .get(k)
                .cloned()
                .unwrap_or_else(|| StateVector::basis(dsa, 0)),
        })
        .collect();

    TrinaryState {
        dims,
        dense: state.dense.clone(),
        branches: Some(branches),
    }
}

/// Extends an orthonormal family to a basis of `dim` via Gram-Schmidt on
/// the computational vectors.
pub(crate) fn complete_basis(vectors: &mut Vec<DVector<Complex64>>, dim: usize) {
    for e in 0..dim {
        if vectors.len() == dim {
            break;
        }
        let mut v = DVector::<Complex64>::zeros(dim);
        v[e] = Complex64::new(1.0, 0.0);
        for u in vectors.iter() {
            let c = u.dotc(&v);
            v -= u * c;
        }
        let n = v.norm();
        if n > 1e-8 {
            vectors.push(v / Complex64::new(n, 0.0));
        }
    }
}

/// Reduced state of `P` for a pure trinary state.
pub fn program_density(state: &TrinaryState) -> DMatrix<Complex64> {
    let dims = state.dims;
    let a = DMatrix::from_fn(dims.programming, dims.sa(), |i, j| {
        state.dense[i * dims.sa() + j]
    });
    &a * a.adjoint()
}
