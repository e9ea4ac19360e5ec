//! Non-interactive oblivious transfer from an XOR-hiding encoding.
//!
//! Alice samples `(x0, x1)`, sends `rho_{x0,x1}` together with a classical
//! mask `(a, d1, d2)`, and outputs
//! `z0 = x_a xor d1`, `z1 = x_{1-a} xor d2`. Bob knows the mask, so every
//! quantity below is an exact average over the `2^{2n+1}` mask values of a
//! learning problem on the unmasked ensemble.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::encodings::encoding::{EncodingEntry, XorEncoding};
use crate::encodings::learning::{learn_value_prob_by, require_hiding, Target};
use crate::error::{Error, Result};
use crate::quantum::matrix::ComplexMatrix;
use crate::quantum::states::DensityOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OtMode {
    /// One bit per side.
    Bit,
    /// Bob picks one of two `n`-bit strings.
    String,
    /// `n` parallel bit transfers: Bob picks an index per position.
    Tensor,
}

/// One value of the classical mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mask {
    pub swap: bool,
    pub d1: usize,
    pub d2: usize,
}

impl Mask {
    /// Alice's outputs for the pair `(x0, x1)`.
    pub fn apply(&self, x0: usize, x1: usize) -> (usize, usize) {
        let (u, v) = if self.swap { (x1, x0) } else { (x0, x1) };
        (u ^ self.d1, v ^ self.d2)
    }

    /// All `2^{2n+1}` masks, in a fixed order.
    pub fn all(n: usize) -> impl Iterator<Item = Mask> {
        let k = 1usize << n;
        (0..2).flat_map(move |a| {
            (0..k).flat_map(move |d1| {
                (0..k).map(move |d2| Mask {
                    swap: a == 1,
                    d1,
                    d2,
                })
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OtInstance {
    pub n: usize,
    pub mode: OtMode,
    pub encoding: XorEncoding,
    /// Number of equally likely mask values.
    pub mask_count: usize,
    /// Honest Bob's success probability, averaged over his choices.
    pub honest_p: f64,
    /// Success probability for each of Bob's choices.
    pub per_choice: Vec<f64>,
    /// Largest deviation of Alice's output distribution from uniform.
    pub output_bias: f64,
}

/// Memoised learning values. Relabelling outcomes bijectively does not
/// change a discrimination problem, so the key is the partition of the
/// entries induced by the labelling.
pub(crate) struct LearnCache<'a> {
    enc: &'a XorEncoding,
    tol: f64,
    memo: HashMap<Vec<usize>, f64>,
}

impl<'a> LearnCache<'a> {
    pub(crate) fn new(enc: &'a XorEncoding, tol: f64) -> Self {
        LearnCache {
            enc,
            tol,
            memo: HashMap::new(),
        }
    }

    pub(crate) fn value(&mut self, label: impl Fn(usize, usize) -> usize) -> Result<f64> {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let key: Vec<usize> = self
            .enc
            .entries()
            .iter()
            .map(|e| {
                let next = seen.len();
                *seen.entry(label(e.x0, e.x1)).or_insert(next)
            })
            .collect();
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let v = learn_value_prob_by(self.enc, label, self.tol)?.value;
        self.memo.insert(key, v);
        Ok(v)
    }

    /// Average over all masks of the best probability of learning
    /// `target(z0, z1)`.
    pub(crate) fn masked(&mut self, target: impl Fn(usize, usize) -> usize) -> Result<f64> {
        let masks: Vec<Mask> = Mask::all(self.enc.n()).collect();
        let mut total = 0.0;
        for m in &masks {
            total += self.value(|x0, x1| {
                let (z0, z1) = m.apply(x0, x1);
                target(z0, z1)
            })?;
        }
        Ok(total / masks.len() as f64)
    }
}

fn choices(mode: OtMode, n: usize) -> Vec<Target> {
    match mode {
        OtMode::Bit | OtMode::String => vec![Target::First, Target::Second],
        OtMode::Tensor => (0..1usize << n).map(Target::Mixed).collect(),
    }
}

/// Builds the masked OT and computes honest Bob's success probabilities.
pub fn ot_from_encoding(enc: &XorEncoding, mode: OtMode, tol: f64) -> Result<OtInstance> {
    let n = enc.n();
    if mode == OtMode::Bit && n != 1 {
        return Err(Error::Precondition(format!(
            "bit OT needs one-bit strings, got n = {n}"
        )));
    }
    require_hiding(enc, 1e-8)?;
    let mut cache = LearnCache::new(enc, tol);
    let mut per_choice = Vec::new();
    for t in choices(mode, n) {
        per_choice.push(cache.masked(|z0, z1| t.label(z0, z1))?);
    }
    let honest_p = per_choice.iter().sum::<f64>() / per_choice.len() as f64;

    let k = 1usize << n;
    let masks: Vec<Mask> = Mask::all(n).collect();
    let mut dist = vec![0.0; k * k];
    for m in &masks {
        for e in enc.entries() {
            let (z0, z1) = m.apply(e.x0, e.x1);
            dist[z0 * k + z1] += e.prior / masks.len() as f64;
        }
    }
    let uniform = 1.0 / (k * k) as f64;
    let output_bias = dist.iter().map(|p| (p - uniform).abs()).fold(0.0, f64::max);
    Ok(OtInstance {
        n,
        mode,
        encoding: enc.clone(),
        mask_count: masks.len(),
        honest_p,
        per_choice,
        output_bias,
    })
}

/// Ensemble Bob receives in the masked protocol, indexed by Alice's outputs
/// `(z0, z1)`: the quantum state together with a classical record of the
/// mask, `rho_{x0,x1} (x) |mask><mask|`.
///
/// Dimension is `d * 2^{2n+1}`, so this is only practical for small `n`.
pub fn encoding_from_ot(ot: &OtInstance) -> Result<XorEncoding> {
    let enc = &ot.encoding;
    let masks: Vec<Mask> = Mask::all(ot.n).collect();
    let m = masks.len();
    let d = enc.dim();
    let mut merged: HashMap<(usize, usize), (f64, ComplexMatrix)> = HashMap::new();
    for (i, mask) in masks.iter().enumerate() {
        let mut flag = ComplexMatrix::zeros(m, m);
        flag[(i, i)] = crate::quantum::matrix::C64::new(1.0, 0.0);
        for e in enc.entries() {
            let w = e.prior / m as f64;
            let slot = merged
                .entry(mask.apply(e.x0, e.x1))
                .or_insert_with(|| (0.0, ComplexMatrix::zeros(d * m, d * m)));
            slot.0 += w;
            slot.1.add_scaled_real(w, &e.state.matrix().kron(&flag));
        }
    }
    let entries = merged
        .into_iter()
        .filter(|(_, (p, _))| *p > 0.0)
        .map(|((z0, z1), (p, op))| {
            Ok(EncodingEntry {
                x0: z0,
                x1: z1,
                prior: p,
                state: DensityOperator::from_unnormalized(op)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    XorEncoding::new(ot.n, entries)
}
