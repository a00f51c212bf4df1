//! Dense complex linear algebra on finite-dimensional Hilbert spaces.

pub mod basis;
pub mod density;
pub mod eigh;
pub mod operator;
pub mod propagator;
pub mod random;
pub mod schmidt;
pub mod state;
pub mod tensor;

pub use basis::{Basis, NamedBasis};
pub use density::DensityMatrix;
pub use operator::{commutator_norm, pauli, Operator};
pub use propagator::{hermitian_propagator, HermitianPropagator};
pub use random::{
    random_hermitian, random_state, random_unitary, seeded_random, stream_rng, RandomKind,
    RandomObject,
};
pub use schmidt::{
    entanglement_entropy, schmidt_decompose, shannon_entropy, SchmidtDecomposition,
};
pub use state::StateVector;
pub use tensor::{partial_trace, reduced_from_pure, swap_factors, tensor_product, HilbertElement, Keep};
