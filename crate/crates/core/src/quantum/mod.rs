//! Dense finite-dimensional quantum linear algebra.

pub mod linalg;
pub mod matrix;
pub mod ops;
pub mod random;
pub mod states;

pub use linalg::{hermitian_eig, HermitianEig};
pub use matrix::{ComplexMatrix, C64};
pub use ops::{fidelity, partial_trace, purify, reduced_density, tensor, uhlmann_unitary};
pub use random::{derived_rng, sample_haar, HaarKind, HaarSample, SeededRng};
pub use states::{DensityOperator, Povm, Projector, PureState, SplitSystem};
