use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::operator::{max_abs, UNITARY_TOL};
use super::random::random_unitary;
use super::state::StateVector;
use crate::error::{IcqtError, Result};

/// Named measurement bases.
///
/// For `d = 2` these are the Pauli eigenbases. For larger `d`, `X` is the
/// eigenbasis of the cyclic shift (discrete Fourier basis) and `Y` the
/// eigenbasis of the shift-times-clock product `XZ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedBasis {
    Z,
    X,
    Y,
}

impl fmt::Display for NamedBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NamedBasis::Z => "Z",
            NamedBasis::X => "X",
            NamedBasis::Y => "Y",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for NamedBasis {
    type Err = IcqtError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Z" | "z" => Ok(NamedBasis::Z),
            "X" | "x" => Ok(NamedBasis::X),
            "Y" | "y" => Ok(NamedBasis::Y),
            other => Err(IcqtError::InvalidInput(format!("unknown basis name {other:?}"))),
        }
    }
}

/// Orthonormal basis stored as the columns of a unitary matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    columns: DMatrix<Complex64>,
}

impl Basis {
    pub fn from_columns(columns: DMatrix<Complex64>) -> Result<Self> {
        if columns.nrows() != columns.ncols() {
            return Err(IcqtError::NotSquare {
                rows: columns.nrows(),
                cols: columns.ncols(),
            });
        }
        if columns.nrows() == 0 {
            return Err(IcqtError::ZeroDimension);
        }
        let n = columns.nrows();
        let deviation = max_abs(&(columns.adjoint() * &columns - DMatrix::identity(n, n)));
        if deviation > UNITARY_TOL {
            return Err(IcqtError::NotUnitary { deviation });
        }
        Ok(Self { columns })
    }

    pub fn from_vectors(vectors: &[StateVector]) -> Result<Self> {
        let dim = vectors.first().map(StateVector::dim).ok_or(IcqtError::ZeroDimension)?;
        if vectors.iter().any(|v| v.dim() != dim) || vectors.len() != dim {
            return Err(IcqtError::DimensionMismatch {
                expected: dim,
                actual: vectors.len(),
            });
        }
        let cols: Vec<_> = vectors.iter().map(|v| v.amplitudes().clone()).collect();
        Self::from_columns(DMatrix::from_columns(&cols))
    }

    pub fn computational(dim: usize) -> Self {
        Self {
            columns: DMatrix::identity(dim, dim),
        }
    }

    pub fn named(name: NamedBasis, dim: usize) -> Self {
        assert!(dim >= 1);
        let d = dim as f64;
        let norm = 1.0 / d.sqrt();
        let columns = match name {
            NamedBasis::Z => DMatrix::identity(dim, dim),
            // |x_k> = d^{-1/2} sum_j w^{-jk} |j>, eigenvectors of |j> -> |j+1>
            NamedBasis::X => DMatrix::from_fn(dim, dim, |j, k| {
                Complex64::from_polar(norm, -2.0 * PI * (j * k) as f64 / d)
            }),
            // eigenvectors of XZ: a_j ~ w^{j(j-1)/2} l^{-j} with l^d = w^{d(d-1)/2}
            NamedBasis::Y => DMatrix::from_fn(dim, dim, |j, k| {
                let (jf, kf) = (j as f64, k as f64);
                let phase = PI * jf * (jf - 1.0) / d - 2.0 * PI * kf * jf / d - PI * (d - 1.0) * jf / d;
                Complex64::from_polar(norm, phase)
            }),
        };
        Self { columns }
    }

    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        Self {
            columns: random_unitary(dim, rng).into_matrix(),
        }
    }

    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn vector(&self, j: usize) -> StateVector {
        StateVector::from_raw(self.columns.column(j).into_owned())
    }

    pub fn vectors(&self) -> Vec<StateVector> {
        (0..self.dim()).map(|j| self.vector(j)).collect()
    }

    /// Columns are the basis vectors.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.columns
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::operator::{pauli, Operator};

    fn assert_eigenbasis(op: &Operator, basis: &Basis) {
        for v in basis.vectors() {
            let w = op.apply(&v).unwrap();
            let lambda = v.inner(&w);
            let resid = StateVector::from_raw(w.amplitudes() - v.amplitudes() * lambda);
            assert!(resid.norm_sqr().sqrt() < 1e-12);
        }
    }

    #[test]
    fn qubit_named_bases_are_pauli_eigenbases() {
        assert_eigenbasis(&pauli::z(), &Basis::named(NamedBasis::Z, 2));
        assert_eigenbasis(&pauli::x(), &Basis::named(NamedBasis::X, 2));
        assert_eigenbasis(&pauli::y(), &Basis::named(NamedBasis::Y, 2));
    }

    #[test]
    fn named_bases_orthonormal_and_unbiased() {
        for d in 2..=5 {
            let z = Basis::named(NamedBasis::Z, d);
            let x = Basis::named(NamedBasis::X, d);
            let y = Basis::named(NamedBasis::Y, d);
            for b in [&x, &y] {
                assert!(Basis::from_columns(b.matrix().clone()).is_ok());
                for v in b.vectors() {
                    for u in z.vectors() {
                        assert!((u.inner(&v).norm_sqr() - 1.0 / d as f64).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn y_basis_diagonalizes_shift_clock_product() {
        for d in [3usize, 4] {
            let w = Complex64::from_polar(1.0, 2.0 * PI / d as f64);
            // (XZ)|j> = w^j |j+1>
            let xz = Operator::new(DMatrix::from_fn(d, d, |i, j| {
                if i == (j + 1) % d {
                    w.powu(j as u32)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }))
            .unwrap();
            assert_eigenbasis(&xz, &Basis::named(NamedBasis::Y, d));
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!("Y".parse::<NamedBasis>().unwrap(), NamedBasis::Y);
        assert!("W".parse::<NamedBasis>().is_err());
    }
}
