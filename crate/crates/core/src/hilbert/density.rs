use nalgebra::DMatrix;
use num_complex::Complex64;

use super::operator::max_abs;
use super::state::StateVector;
use crate::error::{IcqtError, Result};

pub const TRACE_TOL: f64 = 1e-12;
pub const EIGEN_FLOOR: f64 = -1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(IcqtError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let deviation = max_abs(&(&m - m.adjoint()));
        if deviation > 1e-12 {
            return Err(IcqtError::NotHermitian { deviation });
        }
        let rho = Self { m };
        let tr = rho.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(IcqtError::InvalidInput(format!(
                "density matrix trace {tr} differs from 1"
            )));
        }
        if let Some(&min) = rho.eigenvalues().last() {
            if min < EIGEN_FLOOR {
                return Err(IcqtError::InvalidInput(format!(
                    "density matrix has negative eigenvalue {min}"
                )));
            }
        }
        Ok(rho)
    }

    pub fn from_matrix_unchecked(m: DMatrix<Complex64>) -> Self {
        Self { m }
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        let v = psi.amplitudes();
        Self { m: v * v.adjoint() }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.m.diagonal().iter().map(|z| z.re).collect()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.m + self.m.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = super::eigh::eigh(&herm).0.iter().copied().collect();
        ev.reverse();
        ev
    }

    /// `-Tr rho ln rho` in nats.
    pub fn von_neumann_entropy(&self) -> f64 {
        super::schmidt::shannon_entropy(&self.eigenvalues())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_state_is_valid() {
        let rho = DensityMatrix::from_pure(&StateVector::uniform(3));
        let checked = DensityMatrix::new(rho.matrix().clone()).unwrap();
        let ev = checked.eigenvalues();
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!(checked.von_neumann_entropy().abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_trace_and_negative_spectrum() {
        let m = DMatrix::from_diagonal_element(2, 2, Complex64::new(1.0, 0.0));
        assert!(DensityMatrix::new(m).is_err());
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.5, 0.0),
            Complex64::new(-0.5, 0.0),
        ]));
        assert!(DensityMatrix::new(m).is_err());
    }
}
