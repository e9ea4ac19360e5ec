//! Random ensembles for sweeps.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::encoding::{EncodingEntry, XorEncoding};
use super::learning::{learn_value_prob, Target};
use crate::error::{Error, Result};
use crate::games::game::make_chsh_n;
use crate::games::reductions::encoding_from_strategy;
use crate::games::strategy::QuantumStrategy;
use crate::quantum::matrix::{ComplexMatrix, C64};
use crate::quantum::random::{haar_state, haar_unitary, random_density};
use crate::quantum::states::{DensityOperator, Povm, PureState, SplitSystem};

/// Point on the probability simplex, uniform (flat Dirichlet).
pub fn random_prior<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..len).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

/// Independent random states of random rank and random priors over all
/// `4^n` pairs. Usually leaks the XOR.
pub fn random_encoding<R: Rng + ?Sized>(n: usize, dim: usize, rng: &mut R) -> Result<XorEncoding> {
    let k = 1usize << n;
    let prior = random_prior(k * k, rng);
    let mut entries = Vec::with_capacity(k * k);
    for x0 in 0..k {
        for x1 in 0..k {
            let rank = rng.random_range(1..=dim);
            entries.push(EncodingEntry {
                x0,
                x1,
                prior: prior[x0 * k + x1],
                state: random_density(dim, rank, rng)?,
            });
        }
    }
    XorEncoding::new(n, entries)
}

/// Projective measurement in a Haar basis with every basis vector sent to a
/// uniformly random outcome.
pub fn random_projective<R: Rng + ?Sized>(
    dim: usize,
    outcomes: usize,
    bits: usize,
    rng: &mut R,
) -> Povm {
    let u = haar_unitary(dim, rng);
    let assignment: Vec<usize> = (0..dim).map(|_| rng.random_range(0..outcomes)).collect();
    Povm::from_basis(&u, &assignment, outcomes, bits)
}

/// Random CHSH_n strategy on `local_dim x local_dim`: Haar state, random
/// projective measurements for Alice, trivial measurements for Bob.
pub fn random_chsh_n_strategy<R: Rng + ?Sized>(
    n: usize,
    local_dim: usize,
    rng: &mut R,
) -> Result<QuantumStrategy> {
    let k = 1usize << n;
    let state = haar_state(local_dim * local_dim, rng);
    let alice = (0..k)
        .map(|_| random_projective(local_dim, k, n, rng))
        .collect();
    let mut trivial = vec![ComplexMatrix::zeros(local_dim, local_dim); k];
    trivial[0] = ComplexMatrix::identity(local_dim);
    let bob_povm = Povm::with_bit_labels(n, trivial)?;
    QuantumStrategy::new(
        state,
        SplitSystem::bipartite(local_dim, local_dim),
        alice,
        vec![bob_povm.clone(), bob_povm],
    )
}

/// XOR-hiding encoding with uniform XOR marginal, obtained by measuring
/// Alice's half of a random CHSH_n strategy. Hiding holds exactly because
/// Bob's reduced state does not depend on Alice's input.
pub fn random_xor_hiding_encoding<R: Rng + ?Sized>(
    n: usize,
    local_dim: usize,
    rng: &mut R,
) -> Result<XorEncoding> {
    let strat = random_chsh_n_strategy(n, local_dim, rng)?;
    encoding_from_strategy(&strat, &make_chsh_n(n))
}

fn qubit_state(bloch: [f64; 3]) -> ComplexMatrix {
    let [x, y, z] = bloch;
    let data = vec![
        C64::new(0.5 * (1.0 + z), 0.0),
        C64::new(0.5 * x, -0.5 * y),
        C64::new(0.5 * x, 0.5 * y),
        C64::new(0.5 * (1.0 - z), 0.0),
    ];
    ComplexMatrix::from_vec(2, 2, data).expect("2x2")
}

/// String encoding built from one qubit per position: bit `a` of `x0`
/// and bit `b` of `x1` set the Bloch vector
/// `((-1)^a cos phi, (-1)^b sin phi, 0)` with `phi` drawn per position.
/// The product is depolarised by a random amount, rotated by a Haar
/// unitary, and redrawn until the average decoding probability is at
/// least one half. Gives up after `attempts` tries.
pub fn random_string_encoding<R: Rng + ?Sized>(
    n: usize,
    attempts: usize,
    rng: &mut R,
) -> Result<XorEncoding> {
    let k = 1usize << n;
    let dim = k;
    for _ in 0..attempts {
        let phis: Vec<f64> = (0..n)
            .map(|_| rng.random_range(0.05..std::f64::consts::FRAC_PI_2 - 0.05))
            .collect();
        let noise = rng.random_range(0.0..0.3);
        let u = haar_unitary(dim, rng);
        let mixed = ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64);
        let enc = XorEncoding::uniform(n, |x0, x1| {
            let mut m = ComplexMatrix::identity(1);
            for (i, phi) in phis.iter().enumerate() {
                let shift = n - 1 - i;
                let a = if (x0 >> shift) & 1 == 1 { -1.0 } else { 1.0 };
                let b = if (x1 >> shift) & 1 == 1 { -1.0 } else { 1.0 };
                m = m.kron(&qubit_state([a * phi.cos(), b * phi.sin(), 0.0]));
            }
            let m = &m.scale_real(1.0 - noise) + &mixed.scale_real(noise);
            DensityOperator::from_unnormalized(u.matmul(&m).matmul(&u.adjoint()))
                .expect("valid by construction")
        })?;
        let p0 = learn_value_prob(&enc, Target::First, 1e-9)?.value;
        let p1 = learn_value_prob(&enc, Target::Second, 1e-9)?.value;
        if 0.5 * (p0 + p1) >= 0.5 {
            return Ok(enc);
        }
    }
    Err(Error::Precondition(format!(
        "no encoding with c >= 1/2 in {attempts} attempts"
    )))
}

/// Random pure-state ensemble, uniform prior.
pub fn random_pure_encoding<R: Rng + ?Sized>(
    n: usize,
    dim: usize,
    rng: &mut R,
) -> Result<XorEncoding> {
    let k = 1usize << n;
    let states: Vec<PureState> = (0..k * k).map(|_| haar_state(dim, rng)).collect();
    XorEncoding::uniform(n, |x0, x1| states[x0 * k + x1].density())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encodings::learning::hides_xor;
    use crate::quantum::random::derived_rng;

    #[test]
    fn hiding_encodings_hide() {
        let mut rng = derived_rng(7, 0);
        for n in 1..=2 {
            for d in [2, 3] {
                let enc = random_xor_hiding_encoding(n, d, &mut rng).unwrap();
                assert!(hides_xor(&enc, 1e-8).unwrap());
                let m = enc.xor_marginal();
                assert!(m.iter().all(|p| (p - 1.0 / m.len() as f64).abs() < 1e-12));
            }
        }
    }

    #[test]
    fn random_encoding_shapes() {
        let mut rng = derived_rng(1, 0);
        let enc = random_encoding(1, 5, &mut rng).unwrap();
        assert_eq!(enc.dim(), 5);
        assert_eq!(enc.entries().len(), 4);
    }

    #[test]
    fn string_encodings_meet_threshold() {
        let mut rng = derived_rng(3, 0);
        let enc = random_string_encoding(2, 50, &mut rng).unwrap();
        assert_eq!(enc.dim(), 4);
        let p0 = learn_value_prob(&enc, Target::First, 1e-9).unwrap().value;
        let p1 = learn_value_prob(&enc, Target::Second, 1e-9).unwrap().value;
        assert!(p0 + p1 >= 1.0);
    }
}
