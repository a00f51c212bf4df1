use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use super::state::StateVector;
use super::tensor::{amplitude_matrix, check_factorization};
use crate::error::{IcqtError, Result};

/// Coefficients below this are zero for rank counting.
pub const RANK_TOL: f64 = 1e-12;
/// Normalization slack accepted on input states.
pub const INPUT_NORM_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtDecomposition {
    /// Nonnegative, descending; `min(dim_l, dim_r)` entries.
    pub coefficients: Vec<f64>,
    pub left_basis: Vec<StateVector>,
    pub right_basis: Vec<StateVector>,
    pub cut: (usize, usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct SchmidtSummary {
    pub coefficients: Vec<f64>,
    pub rank: usize,
    pub entropy: f64,
}

/// Schmidt decomposition through the SVD of the amplitude matrix.
///
/// Each left vector is rotated so that its largest-magnitude component is
/// real and positive; the compensating phase moves onto the right vector.
pub fn schmidt_decompose(psi: &StateVector, dims: (usize, usize)) -> Result<SchmidtDecomposition> {
    let (dl, dr) = dims;
    check_factorization(psi.dim(), dl, dr)?;
    let norm_sqr = psi.norm_sqr();
    if (norm_sqr - 1.0).abs() > INPUT_NORM_TOL {
        return Err(IcqtError::NotNormalized { norm_sqr });
    }
    Ok(decompose_unchecked(psi.amplitudes(), dl, dr))
}

pub(crate) fn decompose_unchecked(v: &DVector<Complex64>, dl: usize, dr: usize) -> SchmidtDecomposition {
    let a = amplitude_matrix(v, dl, dr);
    let svd = a.svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let k = svd.singular_values.len();

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));

    let mut coefficients = Vec::with_capacity(k);
    let mut left_basis = Vec::with_capacity(k);
    let mut right_basis = Vec::with_capacity(k);
    for idx in order {
        let mut l: DVector<Complex64> = u.column(idx).into_owned();
        // a = U S V^dag, so the right partner of column idx is row idx of V^dag
        let mut r: DVector<Complex64> = v_t.row(idx).transpose();
        let pivot = l
            .iter()
            .copied()
            .max_by(|x, y| x.norm().total_cmp(&y.norm()))
            .unwrap_or(Complex64::new(1.0, 0.0));
        if pivot.norm() > 0.0 {
            let phase = pivot / pivot.norm();
            l *= phase.conj();
            r *= phase;
        }
        coefficients.push(svd.singular_values[idx].max(0.0));
        left_basis.push(StateVector::from_raw(l));
        right_basis.push(StateVector::from_raw(r));
    }

    SchmidtDecomposition {
        coefficients,
        left_basis,
        right_basis,
        cut: (dl, dr),
    }
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.iter().filter(|&&c| c > RANK_TOL).count()
    }

    /// Squared coefficients.
    pub fn probabilities(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c * c).collect()
    }

    pub fn entropy(&self) -> f64 {
        shannon_entropy(&self.probabilities())
    }

    pub fn reconstruct(&self) -> StateVector {
        let (dl, dr) = self.cut;
        let mut out = DVector::<Complex64>::zeros(dl * dr);
        for ((c, l), r) in self
            .coefficients
            .iter()
            .zip(&self.left_basis)
            .zip(&self.right_basis)
        {
            out += l.amplitudes().kronecker(r.amplitudes()) * Complex64::new(*c, 0.0);
        }
        StateVector::from_raw(out)
    }

    /// True when two nonzero coefficients agree within `tol`.
    pub fn is_degenerate(&self, tol: f64) -> bool {
        self.coefficients
            .windows(2)
            .any(|w| w[1] > RANK_TOL && (w[0] - w[1]).abs() <= tol)
    }

    pub fn summary(&self) -> SchmidtSummary {
        SchmidtSummary {
            coefficients: self.coefficients.clone(),
            rank: self.rank(),
            entropy: self.entropy(),
        }
    }
}

/// `-sum p ln p` over strictly positive entries.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    let s: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum();
    s.max(0.0)
}

/// Von Neumann entropy (nats) of either side of a pure bipartite state.
pub fn entanglement_entropy(psi: &StateVector, dims: (usize, usize)) -> Result<f64> {
    Ok(schmidt_decompose(psi, dims)?.entropy())
}
