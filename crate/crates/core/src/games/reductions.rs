//! Encodings from CHSH_n strategies and back.

use super::game::{make_chsh_n, TwoPlayerGame};
use super::strategy::{check_labels, QuantumStrategy};
use crate::encodings::encoding::{EncodingEntry, XorEncoding};
use crate::encodings::learning::{optimal_decoder, require_hiding, Decoder, Target};
use crate::error::{Error, Result};
use crate::quantum::matrix::{ComplexMatrix, C64, ZERO};
use crate::quantum::ops::{purify, uhlmann_unitary};
use crate::quantum::states::{DensityOperator, Povm, PureState, SplitSystem};

/// Branches lighter than this are dropped from the ensemble.
pub const BRANCH_CUTOFF: f64 = 1e-14;

/// String length `n` if `game` is CHSH_n.
pub fn chsh_n_length(game: &TwoPlayerGame) -> Option<usize> {
    let k = game.alice_outputs();
    if !k.is_power_of_two() || k < 2 {
        return None;
    }
    let n = k.trailing_zeros() as usize;
    (*game == make_chsh_n(n)).then_some(n)
}

/// Bob's conditional states after Alice measures: outcome `a` on input `x`
/// becomes the pair `(x0, x1) = (a, x xor a)` with prior
/// `p(x) Pr[a | x]`.
///
/// The average decoding probability of the result is at least the value of
/// `strat`, with equality when Bob's measurements are optimal.
pub fn encoding_from_strategy(
    strat: &QuantumStrategy,
    game: &TwoPlayerGame,
) -> Result<XorEncoding> {
    let n = chsh_n_length(game).ok_or_else(|| Error::Precondition("game is not CHSH_n".into()))?;
    check_labels(game, strat)?;
    let psi = strat.state_matrix();
    let psi_t = psi.transpose();
    let psi_conj = psi.conj();
    let mut raw = Vec::new();
    for (x, povm) in strat.alice().iter().enumerate() {
        for (a, ea) in povm.elements().iter().enumerate() {
            let sigma = psi_t
                .matmul(&ea.transpose())
                .matmul(&psi_conj)
                .hermitian_part();
            let weight = sigma.trace().re;
            let prior = game.p_alice()[x] * weight;
            if prior < BRANCH_CUTOFF {
                continue;
            }
            raw.push((a, x ^ a, prior, sigma.scale_real(1.0 / weight)));
        }
    }
    let total: f64 = raw.iter().map(|r| r.2).sum();
    let entries = raw
        .into_iter()
        .map(|(x0, x1, prior, m)| {
            Ok(EncodingEntry {
                x0,
                x1,
                prior: prior / total,
                state: DensityOperator::from_unnormalized(m)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    XorEncoding::new(n, entries)
}

fn decoder_povm(dec: &Decoder, outcomes: usize, bits: usize, dim: usize) -> Result<Povm> {
    let mut elements = vec![ComplexMatrix::zeros(dim, dim); outcomes];
    for (&label, e) in dec.labels.iter().zip(&dec.povm) {
        elements[label].add_scaled_real(1.0, e);
    }
    Povm::with_bit_labels(bits, elements)
}

/// CHSH_n strategy whose value is the average decoding probability of an
/// XOR-hiding encoding.
///
/// The shared state is `|Omega_0>` on registers `(A2, A3, Anc | B)`, where
/// `|Omega_v> ∝ sum_{x0 xor x1 = v} sqrt(pi) |x0>|x1>|psi_{x0,x1}>` and
/// `|psi>` purifies `rho` with the ancilla first. On input `x` Alice
/// applies the Uhlmann unitary taking `|Omega_0>` to `|Omega_x>` and reads
/// out `A2`; Bob decodes `x0` (y = 0) or `x1` (y = 1) optimally. Requires a
/// uniform XOR marginal, which the game's uniform input imposes.
pub fn strategy_from_encoding(enc: &XorEncoding, tol: f64) -> Result<QuantumStrategy> {
    require_hiding(enc, 1e-8)?;
    let n = enc.n();
    let k = 1usize << n;
    let d = enc.dim();
    let marginal = enc.xor_marginal();
    let uniform = 1.0 / k as f64;
    if let Some(bad) = marginal.iter().find(|p| (*p - uniform).abs() > 1e-9) {
        return Err(Error::Precondition(format!(
            "XOR marginal {bad} is not uniform; the game's input is"
        )));
    }

    let dims = vec![k, k, d, d];
    let total = k * k * d * d;
    let purified: Vec<(usize, usize, f64, PureState)> = enc
        .entries()
        .iter()
        .filter(|e| e.prior > 0.0)
        .map(|e| (e.x0, e.x1, e.prior, purify(&e.state)))
        .collect();
    let omega = |v: usize| -> Result<PureState> {
        let mut amps = vec![ZERO; total];
        for (x0, x1, prior, psi) in &purified {
            if x0 ^ x1 != v {
                continue;
            }
            let base = (x0 * k + x1) * d * d;
            let w = C64::new((prior / marginal[v]).sqrt(), 0.0);
            for (i, amp) in psi.amplitudes().iter().enumerate() {
                amps[base + i] += w * amp;
            }
        }
        PureState::normalized(amps)
    };
    let sys = SplitSystem::new(dims, vec![0, 1, 2])?;
    let alice_regs = [0usize, 1, 2];
    let omega0 = omega(0)?;
    let alice_dim = k * k * d;
    let readout: Vec<ComplexMatrix> = (0..k)
        .map(|a| {
            let mut proj = ComplexMatrix::zeros(k, k);
            proj[(a, a)] = C64::new(1.0, 0.0);
            proj.kron(&ComplexMatrix::identity(k * d))
        })
        .collect();
    let mut alice = Vec::with_capacity(k);
    for x in 0..k {
        let u = if x == 0 {
            ComplexMatrix::identity(alice_dim)
        } else {
            uhlmann_unitary(&omega0, &omega(x)?, &sys, &alice_regs)?
        };
        let ud = u.adjoint();
        let elements = readout
            .iter()
            .map(|p| ud.matmul(p).matmul(&u).hermitian_part())
            .collect();
        alice.push(Povm::with_bit_labels(n, elements)?);
    }
    let bob = [Target::First, Target::Second]
        .into_iter()
        .map(|t| decoder_povm(&optimal_decoder(enc, t, tol)?, k, n, d))
        .collect::<Result<Vec<_>>>()?;
    QuantumStrategy::new(omega0, sys, alice, bob)
}
