//! Kronecker products and partial traces.
//!
//! Composite spaces use the row-major convention: index `i * dim_b + j`
//! addresses `|i> (x) |j>`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::density::DensityMatrix;
use super::operator::Operator;
use super::state::StateVector;
use crate::error::{IcqtError, Result};

/// Either operand of [`tensor_product`].
#[derive(Clone, Debug, PartialEq)]
pub enum HilbertElement {
    State(StateVector),
    Operator(Operator),
}

impl HilbertElement {
    fn kind(&self) -> &'static str {
        match self {
            HilbertElement::State(_) => "state",
            HilbertElement::Operator(_) => "operator",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            HilbertElement::State(s) => s.dim(),
            HilbertElement::Operator(o) => o.dim(),
        }
    }
}

impl From<StateVector> for HilbertElement {
    fn from(s: StateVector) -> Self {
        HilbertElement::State(s)
    }
}

impl From<Operator> for HilbertElement {
    fn from(o: Operator) -> Self {
        HilbertElement::Operator(o)
    }
}

pub fn tensor_product(a: &HilbertElement, b: &HilbertElement) -> Result<HilbertElement> {
    match (a, b) {
        (HilbertElement::State(x), HilbertElement::State(y)) => {
            Ok(HilbertElement::State(x.tensor(y)))
        }
        (HilbertElement::Operator(x), HilbertElement::Operator(y)) => {
            Ok(HilbertElement::Operator(x.kron(y)))
        }
        _ => Err(IcqtError::KindMismatch {
            left: a.kind(),
            right: b.kind(),
        }),
    }
}

/// Which factor of a bipartition survives a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    Left,
    Right,
}

pub fn partial_trace(
    rho: &DensityMatrix,
    dims: (usize, usize),
    keep: Keep,
) -> Result<DensityMatrix> {
    let m = partial_trace_matrix(rho.matrix(), dims, keep)?;
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

pub(crate) fn partial_trace_matrix(
    m: &DMatrix<Complex64>,
    (dl, dr): (usize, usize),
    keep: Keep,
) -> Result<DMatrix<Complex64>> {
    check_factorization(m.nrows(), dl, dr)?;
    Ok(match keep {
        Keep::Left => DMatrix::from_fn(dl, dl, |i, k| {
            (0..dr).map(|j| m[(i * dr + j, k * dr + j)]).sum()
        }),
        Keep::Right => DMatrix::from_fn(dr, dr, |j, l| {
            (0..dl).map(|i| m[(i * dr + j, i * dr + l)]).sum()
        }),
    })
}

/// Reduced density matrix of a pure bipartite state, computed from the
/// amplitude matrix without forming the full projector.
pub fn reduced_from_pure(
    psi: &StateVector,
    (dl, dr): (usize, usize),
    keep: Keep,
) -> Result<DensityMatrix> {
    check_factorization(psi.dim(), dl, dr)?;
    let a = amplitude_matrix(psi.amplitudes(), dl, dr);
    let m = match keep {
        Keep::Left => &a * a.adjoint(),
        Keep::Right => (a.adjoint() * &a).transpose(),
    };
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// Reshapes a bipartite vector into its `dl x dr` coefficient matrix.
pub(crate) fn amplitude_matrix(v: &DVector<Complex64>, dl: usize, dr: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dl, dr, |i, j| v[i * dr + j])
}

/// Reorders `|l> (x) |r>` into `|r> (x) |l>`.
pub fn swap_factors(v: &DVector<Complex64>, dl: usize, dr: usize) -> DVector<Complex64> {
    assert_eq!(v.len(), dl * dr);
    DVector::from_fn(dl * dr, |k, _| {
        let (j, i) = (k / dl, k % dl);
        v[i * dr + j]
    })
}

pub(crate) fn check_factorization(dim: usize, left: usize, right: usize) -> Result<()> {
    if left == 0 || right == 0 || left * right != dim {
        return Err(IcqtError::NonFactorizable { dim, left, right });
    }
    Ok(())
}
