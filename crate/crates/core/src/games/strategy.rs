use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use super::game::{label_bits, TwoPlayerGame};
use crate::error::{Error, Result};
use crate::quantum::matrix::{gates, ComplexMatrix, C64};
use crate::quantum::ops::{permute_registers, state_matrix};
use crate::quantum::states::{bit_string, Povm, PureState, SplitSystem};

/// Shared pure state plus one POVM per input for each player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumStrategy {
    state: PureState,
    split: SplitSystem,
    alice: Vec<Povm>,
    bob: Vec<Povm>,
}

impl QuantumStrategy {
    pub fn new(
        state: PureState,
        split: SplitSystem,
        alice: Vec<Povm>,
        bob: Vec<Povm>,
    ) -> Result<Self> {
        split.check_dim(state.dim())?;
        if alice.is_empty() || bob.is_empty() {
            return Err(Error::Precondition(
                "each player needs at least one input".into(),
            ));
        }
        let (da, db) = (split.alice_dim(), split.bob_dim());
        for p in &alice {
            if p.dim() != da {
                return Err(Error::DimensionMismatch {
                    expected: da,
                    got: p.dim(),
                });
            }
        }
        for p in &bob {
            if p.dim() != db {
                return Err(Error::DimensionMismatch {
                    expected: db,
                    got: p.dim(),
                });
            }
        }
        Ok(QuantumStrategy {
            state,
            split,
            alice,
            bob,
        })
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn split(&self) -> &SplitSystem {
        &self.split
    }

    pub fn alice(&self) -> &[Povm] {
        &self.alice
    }

    pub fn bob(&self) -> &[Povm] {
        &self.bob
    }

    /// The state as a `d_A x d_B` matrix.
    pub fn state_matrix(&self) -> ComplexMatrix {
        state_matrix(self.state.amplitudes(), &self.split, &self.split.alice)
            .expect("split validated at construction")
    }

    /// Applies `U_A (x) U_B` to the state and conjugates the POVMs so that
    /// all statistics are unchanged.
    pub fn rotate_locally(
        &self,
        ua: &ComplexMatrix,
        ub: &ComplexMatrix,
    ) -> Result<QuantumStrategy> {
        let psi = self.state_matrix();
        let rotated = ua.matmul(&psi).matmul(&ub.transpose());
        let state = PureState::new(rotated.into_data())?;
        let split = SplitSystem::bipartite(self.split.alice_dim(), self.split.bob_dim());
        let ua_dag = ua.adjoint();
        let ub_dag = ub.adjoint();
        QuantumStrategy::new(
            state,
            split,
            self.alice.iter().map(|p| p.conjugate(&ua_dag)).collect(),
            self.bob.iter().map(|p| p.conjugate(&ub_dag)).collect(),
        )
    }
}

pub(crate) fn check_labels(game: &TwoPlayerGame, strat: &QuantumStrategy) -> Result<()> {
    if strat.alice.len() != game.alice_inputs() || strat.bob.len() != game.bob_inputs() {
        return Err(Error::LabelMismatch(format!(
            "strategy has {}x{} inputs, game {}x{}",
            strat.alice.len(),
            strat.bob.len(),
            game.alice_inputs(),
            game.bob_inputs()
        )));
    }
    let (ba, bb) = (
        label_bits(game.alice_outputs()),
        label_bits(game.bob_outputs()),
    );
    let check = |p: &Povm, outputs: usize, bits: usize| -> Result<()> {
        let expected: Vec<String> = (0..outputs).map(|k| bit_string(k, bits)).collect();
        if p.labels() != expected.as_slice() {
            return Err(Error::LabelMismatch(format!(
                "POVM outcomes {:?} do not match {:?}",
                p.labels(),
                expected
            )));
        }
        Ok(())
    };
    for p in &strat.alice {
        check(p, game.alice_outputs(), ba)?;
    }
    for p in &strat.bob {
        check(p, game.bob_outputs(), bb)?;
    }
    Ok(())
}

/// `Psi^dagger A Psi`, Alice's operator pushed to Bob's side (transposed).
fn pushed(psi: &ComplexMatrix, a: &ComplexMatrix) -> ComplexMatrix {
    psi.adjoint().matmul(&a.matmul(psi))
}

/// `sum_{jl} K_{jl} B_{jl}`, i.e. `<psi| A (x) B |psi>` for `K = Psi^dagger A Psi`.
fn pair_expectation(k: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    k.data().iter().zip(b.data()).map(|(k, b)| (k * b).re).sum()
}

/// Joint distribution `p(a, b | x, y)` indexed as `[x][y][a][b]`.
pub fn correlations(strat: &QuantumStrategy) -> Vec<Vec<Vec<Vec<f64>>>> {
    let psi = strat.state_matrix();
    strat
        .alice
        .iter()
        .map(|pa| {
            let ks: Vec<ComplexMatrix> = pa.elements().iter().map(|a| pushed(&psi, a)).collect();
            strat
                .bob
                .iter()
                .map(|pb| {
                    ks.iter()
                        .map(|k| {
                            pb.elements()
                                .iter()
                                .map(|b| pair_expectation(k, b))
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Exact winning probability of `strat` in `game`.
pub fn evaluate(game: &TwoPlayerGame, strat: &QuantumStrategy) -> Result<f64> {
    check_labels(game, strat)?;
    let psi = strat.state_matrix();
    let mut value = 0.0;
    for (x, pa) in strat.alice.iter().enumerate() {
        for (a, ea) in pa.elements().iter().enumerate() {
            let k = pushed(&psi, ea);
            for (y, pb) in strat.bob.iter().enumerate() {
                let w = game.weight(x, y);
                if w == 0.0 {
                    continue;
                }
                for (b, eb) in pb.elements().iter().enumerate() {
                    if game.wins(x, y, a, b) {
                        value += w * pair_expectation(&k, eb);
                    }
                }
            }
        }
    }
    Ok(value)
}

fn plus_projector(observable: &ComplexMatrix) -> ComplexMatrix {
    let mut p = ComplexMatrix::identity(observable.rows());
    p.add_scaled_real(1.0, observable);
    p.scale_real(0.5)
}

/// Two-outcome measurement of a +-1 observable, outcome "0" for +1.
pub fn observable_povm(observable: &ComplexMatrix) -> Povm {
    let p = plus_projector(observable);
    let q = &ComplexMatrix::identity(observable.rows()) - &p;
    Povm::with_bit_labels(1, vec![p, q]).expect("observable has eigenvalues +-1")
}

/// Bell state with Alice measuring Z / X and Bob `(Z +- X)/sqrt 2`.
pub fn canonical_chsh_strategy() -> QuantumStrategy {
    let bell = PureState::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).expect("normalised");
    let z = gates::pauli_z();
    let x = gates::pauli_x();
    let plus = (&z + &x).scale_real(FRAC_1_SQRT_2);
    let minus = (&z - &x).scale_real(FRAC_1_SQRT_2);
    QuantumStrategy::new(
        bell,
        SplitSystem::bipartite(2, 2),
        vec![observable_povm(&z), observable_povm(&x)],
        vec![observable_povm(&plus), observable_povm(&minus)],
    )
    .expect("valid construction")
}

/// Parallel composition: inputs and outputs are concatenated bit strings,
/// first strategy in the most significant position.
pub fn tensor_strategy(s1: &QuantumStrategy, s2: &QuantumStrategy) -> Result<QuantumStrategy> {
    let (a1, b1) = (s1.split.alice_dim(), s1.split.bob_dim());
    let (a2, b2) = (s2.split.alice_dim(), s2.split.bob_dim());
    let joint = s1.state_matrix().into_data();
    let other = s2.state_matrix().into_data();
    let product: Vec<C64> = joint
        .iter()
        .flat_map(|u| other.iter().map(move |v| u * v))
        .collect();
    let amps = permute_registers(&product, &[a1, b1, a2, b2], &[0, 2, 1, 3])?;
    let state = PureState::new(amps)?;
    let combine = |p: &[Povm], q: &[Povm]| -> Vec<Povm> {
        p.iter()
            .flat_map(|u| q.iter().map(move |v| u.tensor(v)))
            .collect()
    };
    QuantumStrategy::new(
        state,
        SplitSystem::new(vec![a1, a2, b1, b2], vec![0, 1])?,
        combine(&s1.alice, &s2.alice),
        combine(&s1.bob, &s2.bob),
    )
}

/// `n`-fold tensor power of a strategy.
pub fn tensor_power(s: &QuantumStrategy, n: usize) -> Result<QuantumStrategy> {
    let mut out = s.clone();
    for _ in 1..n.max(1) {
        out = tensor_strategy(&out, s)?;
    }
    Ok(out)
}

/// Deterministic strategy on one-dimensional local systems: Alice answers
/// `alice[x]`, Bob `bob[y]`.
pub fn deterministic_strategy(
    game: &TwoPlayerGame,
    alice: &[usize],
    bob: &[usize],
) -> Result<QuantumStrategy> {
    let point = |outputs: usize, k: usize| {
        let elements = (0..outputs)
            .map(|j| ComplexMatrix::real_diagonal(&[if j == k { 1.0 } else { 0.0 }]))
            .collect();
        Povm::with_bit_labels(label_bits(outputs), elements)
    };
    QuantumStrategy::new(
        PureState::basis(1, 0),
        SplitSystem::bipartite(1, 1),
        alice
            .iter()
            .map(|&a| point(game.alice_outputs(), a))
            .collect::<Result<_>>()?,
        bob.iter()
            .map(|&b| point(game.bob_outputs(), b))
            .collect::<Result<_>>()?,
    )
}

/// Shared-randomness guessing strategy for CHSH_n: Alice outputs the shared
/// string `r`, Bob outputs `r` on `y = 0` and a guess `g` on `y = 1`. The
/// value is averaged over all `(r, g)`.
pub fn guessing_value(n: usize) -> f64 {
    let game = super::game::make_chsh_n(n);
    let k = 1usize << n;
    let mut total = 0.0;
    for r in 0..k {
        for g in 0..k {
            total += game.deterministic_value(&vec![r; k], &[r, g]);
        }
    }
    total / (k * k) as f64
}
