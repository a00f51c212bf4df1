//! Seeded random states, unitaries and Hermitian operators.
//!
//! Every stream is a ChaCha20 generator keyed by `seed` and positioned on
//! its own `stream` id, so independent consumers of one scenario seed never
//! share draws.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::operator::Operator;
use super::state::StateVector;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

fn gaussian_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    // column-major fill order is part of the reproducibility contract
    DMatrix::from_fn(dim, dim, |_, _| gaussian(rng))
}

/// Normalized complex Gaussian vector (uniform on the unit sphere).
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    assert!(dim >= 1);
    let v = DVector::from_fn(dim, |_, _| gaussian(rng));
    StateVector::normalized(v).expect("gaussian vector is nonzero with probability one")
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal moved onto `Q`.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Operator {
    assert!(dim >= 1);
    let qr = gaussian_matrix(dim, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Operator::new(q).expect("square")
}

/// `(G + G^dag) / 2` for Gaussian `G`; exactly Hermitian.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Operator {
    assert!(dim >= 1);
    let g = gaussian_matrix(dim, rng);
    Operator::new((&g + g.adjoint()) * Complex64::new(0.5, 0.0)).expect("square")
}

/// Standard-normal real eigenvalues.
pub fn random_real_spectrum<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RandomKind {
    State,
    Unitary,
    Hermitian,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RandomObject {
    State(StateVector),
    Operator(Operator),
}

pub fn seeded_random(kind: RandomKind, dim: usize, seed: u64) -> RandomObject {
    let mut rng = stream_rng(seed, 0);
    match kind {
        RandomKind::State => RandomObject::State(random_state(dim, &mut rng)),
        RandomKind::Unitary => RandomObject::Operator(random_unitary(dim, &mut rng)),
        RandomKind::Hermitian => RandomObject::Operator(random_hermitian(dim, &mut rng)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn states_are_reproducible() {
        let a = seeded_random(RandomKind::State, 4, 7);
        let b = seeded_random(RandomKind::State, 4, 7);
        assert_eq!(a, b);
        assert_ne!(a, seeded_random(RandomKind::State, 4, 8));
    }

    #[test]
    fn unitary_is_unitary() {
        match seeded_random(RandomKind::Unitary, 8, 1) {
            RandomObject::Operator(u) => assert!(u.unitarity_deviation() <= 1e-10),
            _ => unreachable!(),
        }
    }

    #[test]
    fn hermitian_is_exact() {
        match seeded_random(RandomKind::Hermitian, 6, 2) {
            RandomObject::Operator(h) => assert_eq!(h.hermiticity_deviation(), 0.0),
            _ => unreachable!(),
        }
    }

    #[test]
    fn streams_are_independent() {
        let mut a = stream_rng(1, 0);
        let mut b = stream_rng(1, 1);
        assert_ne!(random_state(3, &mut a), random_state(3, &mut b));
    }
}
