use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::eigh::eigh;
use super::operator::Operator;
use super::state::StateVector;
use crate::error::{IcqtError, Result};

/// Spectral form of a Hermitian generator, reusable across times.
///
/// `exp(-iHt) = V diag(exp(-i e_k t)) V^dag`.
#[derive(Clone, Debug)]
pub struct HermitianPropagator {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl HermitianPropagator {
    pub fn new(h: &Operator) -> Result<Self> {
        h.ensure_hermitian()?;
        let (w, v) = eigh(h.matrix());
        Ok(Self {
            eigenvalues: w.iter().copied().collect(),
            eigenvectors: v,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    fn phases(&self, t: f64) -> DVector<Complex64> {
        DVector::from_iterator(
            self.dim(),
            self.eigenvalues
                .iter()
                .map(|&e| Complex64::from_polar(1.0, -e * t)),
        )
    }

    pub fn at(&self, t: f64) -> Operator {
        let v = &self.eigenvectors;
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            v[(i, j)] * Complex64::from_polar(1.0, -self.eigenvalues[j] * t)
        });
        Operator::new(scaled * v.adjoint()).expect("square by construction")
    }

    pub fn apply_vec(&self, v: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        let coeffs = self.eigenvectors.ad_mul(v).component_mul(&self.phases(t));
        &self.eigenvectors * coeffs
    }

    pub fn apply(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(IcqtError::DimensionMismatch {
                expected: self.dim(),
                actual: psi.dim(),
            });
        }
        Ok(StateVector::from_raw(self.apply_vec(psi.amplitudes(), t)))
    }
}

/// `exp(-iHt)` by eigendecomposition.
pub fn hermitian_propagator(h: &Operator, t: f64) -> Result<Operator> {
    Ok(HermitianPropagator::new(h)?.at(t))
}
