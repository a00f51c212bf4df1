use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{IcqtError, Result};

/// Squared-norm tolerance accepted by [`StateVector::new`].
pub const NORM_TOL: f64 = 1e-12;

/// A pure state (ket) in a finite-dimensional Hilbert space.
///
/// Constructors that take arbitrary amplitudes check normalization;
/// [`StateVector::from_raw`] skips the check for intermediate vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: DVector<Complex64>,
}

impl StateVector {
    pub fn new(amps: DVector<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(IcqtError::ZeroDimension);
        }
        let norm_sqr = amps.norm_squared();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(IcqtError::NotNormalized { norm_sqr });
        }
        Ok(Self { amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        Self::new(DVector::from_vec(amps))
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(amps: DVector<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(IcqtError::ZeroDimension);
        }
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(IcqtError::NotNormalized {
                norm_sqr: norm * norm,
            });
        }
        Ok(Self { amps: amps / Complex64::from(norm) })
    }

    /// Wraps amplitudes without checking normalization.
    pub fn from_raw(amps: DVector<Complex64>) -> Self {
        Self { amps }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut amps = DVector::zeros(dim);
        amps[index] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    /// Equal-weight superposition of all computational basis states.
    pub fn uniform(dim: usize) -> Self {
        assert!(dim > 0);
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            amps: DVector::from_element(dim, a),
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn as_slice(&self) -> &[Complex64] {
        self.amps.as_slice()
    }

    pub fn into_inner(self) -> DVector<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        Self {
            amps: self.amps.kronecker(&other.amps),
        }
    }

    /// Largest entry-wise amplitude difference.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for StateVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.amps[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalized() {
        let v = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert!(matches!(
            StateVector::new(v.clone()),
            Err(IcqtError::NotNormalized { .. })
        ));
        let s = StateVector::normalized(v).unwrap();
        assert!(s.is_normalized(1e-15));
    }

    #[test]
    fn zero_vector_cannot_be_normalized() {
        assert!(StateVector::normalized(DVector::zeros(3)).is_err());
        assert_eq!(
            StateVector::new(DVector::zeros(0)),
            Err(IcqtError::ZeroDimension)
        );
    }

    #[test]
    fn basis_and_uniform() {
        let b = StateVector::basis(4, 2);
        assert_eq!(b[2], Complex64::new(1.0, 0.0));
        let u = StateVector::uniform(16);
        assert!(u.as_slice().iter().all(|a| (a.re - 0.25).abs() < 1e-15));
    }
}
