//! Alternating (see-saw) lower bounds on game values.
//!
//! Each round updates Bob's measurements with Alice and the state fixed,
//! then Alice's, then resets the state to the top eigenvector of the win
//! operator. All measurements are kept projective, stored as an orthonormal
//! basis plus an outcome label per basis vector. Two-outcome updates are
//! exact (Helstrom); with more outcomes the update is a monotone ascent over
//! labels and pairwise rotations started from the previous measurement.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::game::{label_bits, TwoPlayerGame};
use super::strategy::QuantumStrategy;
use crate::error::{Error, Result};
use crate::quantum::linalg::hermitian_eig_unchecked;
use crate::quantum::matrix::{ComplexMatrix, C64};
use crate::quantum::random::{derived_rng, haar_state, haar_unitary};
use crate::quantum::states::{Povm, PureState, SplitSystem};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeesawResult {
    pub strategy: QuantumStrategy,
    pub value: f64,
    /// Index of the winning restart.
    pub restart: usize,
    /// Value after every full round of the winning restart.
    pub history: Vec<f64>,
}

/// A round that improves the value by less than this ends a restart.
pub const STALL: f64 = 1e-10;

/// Local dimension the table uses by default: enough for one qubit per
/// output bit.
pub fn default_local_dim(game: &TwoPlayerGame) -> usize {
    game.alice_outputs()
        .max(game.bob_outputs())
        .next_power_of_two()
        .max(2)
}

#[derive(Debug, Clone)]
struct Measurement {
    basis: ComplexMatrix,
    labels: Vec<usize>,
}

impl Measurement {
    fn random<R: Rng + ?Sized>(dim: usize, outcomes: usize, rng: &mut R) -> Self {
        Measurement {
            basis: haar_unitary(dim, rng),
            labels: (0..dim).map(|_| rng.random_range(0..outcomes)).collect(),
        }
    }

    fn elements(&self, outcomes: usize) -> Vec<ComplexMatrix> {
        let d = self.basis.rows();
        let mut out = vec![ComplexMatrix::zeros(d, d); outcomes];
        for (k, &l) in self.labels.iter().enumerate() {
            let v = self.basis.column(k);
            out[l].add_scaled_real(1.0, &ComplexMatrix::outer(&v, &v));
        }
        out
    }

    fn povm(&self, outcomes: usize) -> Povm {
        Povm::from_basis(&self.basis, &self.labels, outcomes, label_bits(outcomes))
    }
}

fn quad(w: &ComplexMatrix, u: &[C64], v: &[C64]) -> C64 {
    w.sandwich(u, v)
}

fn objective(ops: &[ComplexMatrix], m: &Measurement) -> f64 {
    m.labels
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let v = m.basis.column(k);
            quad(&ops[l], &v, &v).re
        })
        .sum()
}

/// Maximises `sum_b Tr(W_b E_b)` over projective measurements, never
/// returning something worse than `start`.
fn improve(ops: &[ComplexMatrix], start: &Measurement) -> Measurement {
    let d = start.basis.rows();
    if ops.len() == 2 {
        let diff = &ops[0] - &ops[1];
        let eig = hermitian_eig_unchecked(&diff.hermitian_part());
        let labels = eig
            .values
            .iter()
            .map(|&v| if v >= 0.0 { 0 } else { 1 })
            .collect();
        return Measurement {
            basis: eig.vectors,
            labels,
        };
    }
    let mut cols: Vec<Vec<C64>> = (0..d).map(|k| start.basis.column(k)).collect();
    let mut labels = start.labels.clone();
    for _sweep in 0..10 {
        let mut gained = 0.0;
        for (k, col) in cols.iter().enumerate() {
            let vals: Vec<f64> = ops.iter().map(|w| quad(w, col, col).re).collect();
            let mut best = labels[k];
            for (b, &v) in vals.iter().enumerate() {
                if v > vals[best] + 1e-15 {
                    best = b;
                }
            }
            gained += vals[best] - vals[labels[k]];
            labels[k] = best;
        }
        for i in 0..d {
            for j in (i + 1)..d {
                if labels[i] == labels[j] {
                    continue;
                }
                let diff = &ops[labels[i]] - &ops[labels[j]];
                let (ui, uj) = (&cols[i], &cols[j]);
                let m = ComplexMatrix::from_vec(
                    2,
                    2,
                    vec![
                        quad(&diff, ui, ui),
                        quad(&diff, ui, uj),
                        quad(&diff, uj, ui),
                        quad(&diff, uj, uj),
                    ],
                )
                .expect("2x2");
                let eig = hermitian_eig_unchecked(&m.hermitian_part());
                let gain = eig.values[0] - m[(0, 0)].re;
                if gain > 1e-14 {
                    let (c1, c2) = (eig.vectors[(0, 0)], eig.vectors[(1, 0)]);
                    let vi: Vec<C64> = ui.iter().zip(uj).map(|(a, b)| c1 * a + c2 * b).collect();
                    let vj: Vec<C64> = ui
                        .iter()
                        .zip(uj)
                        .map(|(a, b)| -c2.conj() * a + c1.conj() * b)
                        .collect();
                    cols[i] = vi;
                    cols[j] = vj;
                    gained += gain;
                }
            }
        }
        if gained < 1e-13 {
            break;
        }
    }
    let candidate = Measurement {
        basis: ComplexMatrix::from_fn(d, d, |i, j| cols[j][i]),
        labels,
    };
    if objective(ops, &candidate) >= objective(ops, start) {
        candidate
    } else {
        start.clone()
    }
}

struct Run {
    value: f64,
    history: Vec<f64>,
    psi: ComplexMatrix,
    alice: Vec<Measurement>,
    bob: Vec<Measurement>,
}

/// `Psi^T (A_x^a)^T Psi^*` for every Alice outcome: what Bob's side sees.
fn bob_views(psi: &ComplexMatrix, alice: &[Vec<ComplexMatrix>]) -> Vec<Vec<ComplexMatrix>> {
    let psi_t = psi.transpose();
    let psi_conj = psi.conj();
    alice
        .iter()
        .map(|elems| {
            elems
                .iter()
                .map(|e| psi_t.matmul(&e.transpose()).matmul(&psi_conj))
                .collect()
        })
        .collect()
}

/// `Psi (B_y^b)^T Psi^dagger` for every Bob outcome.
fn alice_views(psi: &ComplexMatrix, bob: &[Vec<ComplexMatrix>]) -> Vec<Vec<ComplexMatrix>> {
    let psi_dag = psi.adjoint();
    bob.iter()
        .map(|elems| {
            elems
                .iter()
                .map(|e| psi.matmul(&e.transpose()).matmul(&psi_dag))
                .collect()
        })
        .collect()
}

fn bob_operators(
    game: &TwoPlayerGame,
    views: &[Vec<ComplexMatrix>],
    y: usize,
) -> Vec<ComplexMatrix> {
    let db = views[0][0].rows();
    let mut ops = vec![ComplexMatrix::zeros(db, db); game.bob_outputs()];
    for (x, kx) in views.iter().enumerate() {
        let w = game.weight(x, y);
        if w == 0.0 {
            continue;
        }
        for (a, k) in kx.iter().enumerate() {
            for (b, op) in ops.iter_mut().enumerate() {
                if game.wins(x, y, a, b) {
                    op.add_scaled_real(w, k);
                }
            }
        }
    }
    ops
}

fn alice_operators(
    game: &TwoPlayerGame,
    views: &[Vec<ComplexMatrix>],
    x: usize,
) -> Vec<ComplexMatrix> {
    let da = views[0][0].rows();
    let mut ops = vec![ComplexMatrix::zeros(da, da); game.alice_outputs()];
    for (y, ly) in views.iter().enumerate() {
        let w = game.weight(x, y);
        if w == 0.0 {
            continue;
        }
        for (b, l) in ly.iter().enumerate() {
            for (a, op) in ops.iter_mut().enumerate() {
                if game.wins(x, y, a, b) {
                    op.add_scaled_real(w, l);
                }
            }
        }
    }
    ops
}

/// Dense win operator `sum p(x)p(y) V(x,y,a,b) A_x^a (x) B_y^b`.
pub fn win_operator(
    game: &TwoPlayerGame,
    alice: &[Vec<ComplexMatrix>],
    bob: &[Vec<ComplexMatrix>],
) -> ComplexMatrix {
    let da = alice[0][0].rows();
    let db = bob[0][0].rows();
    let mut w = ComplexMatrix::zeros(da * db, da * db);
    for (x, ax) in alice.iter().enumerate() {
        for (a, ea) in ax.iter().enumerate() {
            let mut m = ComplexMatrix::zeros(db, db);
            let mut any = false;
            for (y, by) in bob.iter().enumerate() {
                let wt = game.weight(x, y);
                for (b, eb) in by.iter().enumerate() {
                    if wt != 0.0 && game.wins(x, y, a, b) {
                        m.add_scaled_real(wt, eb);
                        any = true;
                    }
                }
            }
            if any {
                w.add_scaled_real(1.0, &ea.kron(&m));
            }
        }
    }
    w.hermitian_part()
}

fn expectation(
    psi: &ComplexMatrix,
    alice: &[Vec<ComplexMatrix>],
    bob: &[Vec<ComplexMatrix>],
    game: &TwoPlayerGame,
) -> f64 {
    let w = win_operator(game, alice, bob);
    let v = psi.data();
    w.sandwich(v, v).re
}

fn single_run(game: &TwoPlayerGame, dim: usize, iters: usize, seed: u64, index: usize) -> Run {
    let mut rng = derived_rng(seed, index as u64);
    let psi_vec = haar_state(dim * dim, &mut rng);
    let mut psi = ComplexMatrix::from_vec(dim, dim, psi_vec.into_amplitudes()).expect("square");
    let mut alice: Vec<Measurement> = (0..game.alice_inputs())
        .map(|_| Measurement::random(dim, game.alice_outputs(), &mut rng))
        .collect();
    let mut bob: Vec<Measurement> = (0..game.bob_inputs())
        .map(|_| Measurement::random(dim, game.bob_outputs(), &mut rng))
        .collect();

    let mut history = Vec::with_capacity(iters);
    let mut value = f64::NEG_INFINITY;
    for _ in 0..iters {
        let a_elems: Vec<Vec<ComplexMatrix>> = alice
            .iter()
            .map(|m| m.elements(game.alice_outputs()))
            .collect();
        let views = bob_views(&psi, &a_elems);
        for (y, m) in bob.iter_mut().enumerate() {
            *m = improve(&bob_operators(game, &views, y), m);
        }
        let b_elems: Vec<Vec<ComplexMatrix>> =
            bob.iter().map(|m| m.elements(game.bob_outputs())).collect();
        let views = alice_views(&psi, &b_elems);
        for (x, m) in alice.iter_mut().enumerate() {
            *m = improve(&alice_operators(game, &views, x), m);
        }
        let a_elems: Vec<Vec<ComplexMatrix>> = alice
            .iter()
            .map(|m| m.elements(game.alice_outputs()))
            .collect();
        let w = win_operator(game, &a_elems, &b_elems);
        let eig = hermitian_eig_unchecked(&w);
        let top = eig.vector(0);
        psi = ComplexMatrix::from_vec(dim, dim, top).expect("square");
        let new_value = eig.values[0];
        history.push(new_value);
        let done = new_value - value < STALL;
        value = new_value;
        if done {
            break;
        }
    }
    Run {
        value,
        history,
        psi,
        alice,
        bob,
    }
}

/// Best see-saw strategy over `restarts` independent random starts. Restart
/// `i` draws from `derived_rng(seed, i)`; ties go to the lowest index.
pub fn seesaw(
    game: &TwoPlayerGame,
    local_dim: usize,
    restarts: usize,
    iters: usize,
    seed: u64,
) -> Result<SeesawResult> {
    if local_dim < 2 {
        return Err(Error::Precondition(
            "local dimension must be at least 2".into(),
        ));
    }
    if restarts == 0 || iters == 0 {
        return Err(Error::Precondition(
            "need at least one restart and one round".into(),
        ));
    }
    let runs: Vec<Run> = (0..restarts)
        .into_par_iter()
        .map(|i| single_run(game, local_dim, iters, seed, i))
        .collect();
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = i;
        }
    }
    let run = &runs[best];
    let state = PureState::normalized(run.psi.data().to_vec())?;
    let strategy = QuantumStrategy::new(
        state,
        SplitSystem::bipartite(local_dim, local_dim),
        run.alice
            .iter()
            .map(|m| m.povm(game.alice_outputs()))
            .collect(),
        run.bob.iter().map(|m| m.povm(game.bob_outputs())).collect(),
    )?;
    let a_elems: Vec<Vec<ComplexMatrix>> = run
        .alice
        .iter()
        .map(|m| m.elements(game.alice_outputs()))
        .collect();
    let b_elems: Vec<Vec<ComplexMatrix>> = run
        .bob
        .iter()
        .map(|m| m.elements(game.bob_outputs()))
        .collect();
    let value = expectation(&run.psi, &a_elems, &b_elems, game);
    Ok(SeesawResult {
        strategy,
        value,
        restart: best,
        history: run.history.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::bounds::TSIRELSON;
    use crate::games::game::{make_chsh, make_chsh_n};
    use crate::games::strategy::evaluate;

    #[test]
    fn chsh_reaches_tsirelson() {
        let r = seesaw(&make_chsh(), 2, 8, 200, 1).unwrap();
        assert!(r.value > TSIRELSON - 1e-6, "{}", r.value);
        let v = evaluate(&make_chsh(), &r.strategy).unwrap();
        assert!((v - r.value).abs() < 1e-9);
    }

    #[test]
    fn history_is_monotone() {
        let r = seesaw(&make_chsh_n(2), 4, 3, 60, 5).unwrap();
        for w in r.history.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "{:?}", r.history);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let a = seesaw(&make_chsh(), 2, 4, 30, 9).unwrap();
        let b = seesaw(&make_chsh(), 2, 4, 30, 9).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.restart, b.restart);
    }

    #[test]
    fn multi_outcome_ascent_never_worsens() {
        let mut rng = derived_rng(3, 0);
        let ops: Vec<ComplexMatrix> = (0..4)
            .map(|_| {
                let g = crate::quantum::random::random_hermitian(3, &mut rng);
                g.matmul(&g)
            })
            .collect();
        let start = Measurement::random(3, 4, &mut rng);
        let out = improve(&ops, &start);
        assert!(objective(&ops, &out) >= objective(&ops, &start));
    }
}
