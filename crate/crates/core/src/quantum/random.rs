//! Seeded Haar sampling.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::{ComplexMatrix, C64};
use super::ops::reduced_density;
use super::states::{DensityOperator, Projector, PureState, SplitSystem};
use crate::error::{Error, Result};

/// The generator type used throughout the crate.
pub type SeededRng = ChaCha8Rng;

/// Generator for `(master seed, stream)`; distinct streams never overlap.
pub fn derived_rng(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// What [`sample_haar`] should produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaarKind {
    PureState,
    Unitary,
    Projector { rank: usize },
}

#[derive(Debug, Clone)]
pub enum HaarSample {
    PureState(PureState),
    Unitary(ComplexMatrix),
    Projector(Projector),
}

pub fn sample_haar<R: Rng + ?Sized>(dim: usize, kind: HaarKind, rng: &mut R) -> Result<HaarSample> {
    if dim == 0 {
        return Err(Error::Precondition("dimension must be positive".into()));
    }
    Ok(match kind {
        HaarKind::PureState => HaarSample::PureState(haar_state(dim, rng)),
        HaarKind::Unitary => HaarSample::Unitary(haar_unitary(dim, rng)),
        HaarKind::Projector { rank } => HaarSample::Projector(haar_projector(dim, rank, rng)?),
    })
}

/// Uniformly random unit vector (normalised complex Gaussian).
pub fn haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

/// Haar unitary: QR of a complex Ginibre matrix with the phases of `R`'s
/// diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut out = ComplexMatrix::from_nalgebra(&q);
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..dim {
            out[(i, j)] *= phase;
        }
    }
    out
}

/// `U diag(1,..,1,0,..,0) U^dagger` with `rank` ones and Haar `U`.
pub fn haar_projector<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<Projector> {
    if rank > dim {
        return Err(Error::RankOutOfRange { rank, dim });
    }
    let u = haar_unitary(dim, rng);
    let cols: Vec<Vec<C64>> = (0..rank).map(|k| u.column(k)).collect();
    Projector::onto(dim, &cols)
}

/// Random density operator of the given rank (reduced state of a Haar
/// pure state on `dim x rank`).
pub fn random_density<R: Rng + ?Sized>(
    dim: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityOperator> {
    if rank == 0 || rank > dim {
        return Err(Error::RankOutOfRange { rank, dim });
    }
    let psi = haar_state(dim * rank, rng);
    reduced_density(&psi, &SplitSystem::bipartite(dim, rank), &[0])
}

/// Random Hermitian matrix with Gaussian entries (GUE-like).
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    g.hermitian_part()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::unitarity_defect;

    #[test]
    fn deterministic_given_seed() {
        let a = haar_state(5, &mut derived_rng(7, 0));
        let b = haar_state(5, &mut derived_rng(7, 0));
        assert_eq!(a, b);
        let c = haar_state(5, &mut derived_rng(7, 1));
        assert_ne!(a, c);
    }

    #[test]
    fn unitary_and_projector() {
        let mut rng = derived_rng(1, 0);
        let u = haar_unitary(6, &mut rng);
        assert!(unitarity_defect(&u) < 1e-12);
        let p = haar_projector(6, 2, &mut rng).unwrap();
        assert_eq!(p.rank(), 2);
        assert!(matches!(
            haar_projector(3, 4, &mut rng),
            Err(Error::RankOutOfRange { rank: 4, dim: 3 })
        ));
    }

    #[test]
    fn qubit_state_is_normalized() {
        let mut rng = derived_rng(3, 0);
        match sample_haar(2, HaarKind::PureState, &mut rng).unwrap() {
            HaarSample::PureState(s) => {
                assert!((super::super::matrix::vec_norm(s.amplitudes()) - 1.0).abs() < 1e-12)
            }
            _ => unreachable!(),
        }
    }
}
