use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::state::StateVector;
use crate::error::{IcqtError, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-10;

/// A linear operator on a `dim`-dimensional space, stored densely.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    m: DMatrix<Complex64>,
}

impl Operator {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(IcqtError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(IcqtError::ZeroDimension);
        }
        Ok(Self { m })
    }

    /// Builds an operator from row-major entries.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(IcqtError::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        Self {
            m: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        }
    }

    /// `|psi><psi|`
    pub fn projector(psi: &StateVector) -> Self {
        let v = psi.amplitudes();
        Self { m: v * v.adjoint() }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.m
    }

    pub fn adjoint(&self) -> Operator {
        Self { m: self.m.adjoint() }
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        max_abs(&(&self.m - self.m.adjoint()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim();
        max_abs(&(self.m.adjoint() * &self.m - DMatrix::<Complex64>::identity(n, n)))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let deviation = self.hermiticity_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(IcqtError::NotHermitian { deviation });
        }
        Ok(())
    }

    pub fn ensure_unitary(&self) -> Result<()> {
        let deviation = self.unitarity_deviation();
        if deviation > UNITARY_TOL {
            return Err(IcqtError::NotUnitary { deviation });
        }
        Ok(())
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(IcqtError::DimensionMismatch {
                expected: self.dim(),
                actual: psi.dim(),
            });
        }
        Ok(StateVector::from_raw(&self.m * psi.amplitudes()))
    }

    /// `self * other`
    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        self.same_dim(other)?;
        Ok(Self {
            m: &self.m * &other.m,
        })
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.same_dim(other)?;
        Ok(Self {
            m: &self.m + &other.m,
        })
    }

    pub fn scale(&self, c: Complex64) -> Operator {
        Self { m: &self.m * c }
    }

    pub fn kron(&self, other: &Operator) -> Operator {
        Self {
            m: self.m.kronecker(&other.m),
        }
    }

    /// `AB - BA`
    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        self.same_dim(other)?;
        Ok(Self {
            m: &self.m * &other.m - &other.m * &self.m,
        })
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim(), other.dim());
        max_abs(&(&self.m - &other.m))
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.m)
    }

    fn same_dim(&self, other: &Operator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(IcqtError::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(())
    }
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max-entry magnitude of `AB - BA`.
pub fn commutator_norm(a: &Operator, b: &Operator) -> Result<f64> {
    Ok(a.commutator(b)?.max_abs())
}

/// Pauli matrices, used throughout tests and named bases.
pub mod pauli {
    use super::Operator;
    use num_complex::Complex64;

    const O: Complex64 = Complex64::new(0.0, 0.0);
    const I1: Complex64 = Complex64::new(1.0, 0.0);
    const IM: Complex64 = Complex64::new(0.0, 1.0);

    pub fn x() -> Operator {
        Operator::from_rows(2, &[O, I1, I1, O]).unwrap()
    }

    pub fn y() -> Operator {
        Operator::from_rows(2, &[O, -IM, IM, O]).unwrap()
    }

    pub fn z() -> Operator {
        Operator::from_rows(2, &[I1, O, O, -I1]).unwrap()
    }
}
