//! Random sweeps of the learning relations.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::learning::{theorem1_check, LearningReport};
use super::random::{random_encoding, random_string_encoding};
use crate::error::Result;
use crate::quantum::random::derived_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningSweepConfig {
    pub seed: u64,
    /// Random single-bit encodings with random priors.
    pub bit_samples: usize,
    pub bit_dims: (usize, usize),
    /// Random string encodings with `c >= 1/2`, spread over `string_lengths`.
    pub string_samples: usize,
    pub string_lengths: Vec<usize>,
    pub tol: f64,
}

impl Default for LearningSweepConfig {
    fn default() -> Self {
        LearningSweepConfig {
            seed: 0,
            bit_samples: 200,
            bit_dims: (2, 8),
            string_samples: 50,
            string_lengths: vec![2, 3],
            tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningRecord {
    pub index: usize,
    pub n: usize,
    pub dim: usize,
    pub report: LearningReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningSweep {
    pub config: LearningSweepConfig,
    pub records: Vec<LearningRecord>,
    pub bit_violations: usize,
    pub string_violations: usize,
    pub pass: bool,
}

const STRING_STREAM: u64 = 1 << 32;

fn bit_sample(config: &LearningSweepConfig, i: usize) -> Result<LearningRecord> {
    let mut rng = derived_rng(config.seed, i as u64);
    let (lo, hi) = config.bit_dims;
    let dim = rng.random_range(lo..=hi);
    let enc = random_encoding(1, dim, &mut rng)?;
    Ok(LearningRecord {
        index: i,
        n: 1,
        dim,
        report: theorem1_check(&enc, config.tol)?,
    })
}

fn string_sample(config: &LearningSweepConfig, i: usize) -> Result<LearningRecord> {
    let mut rng = derived_rng(config.seed, STRING_STREAM + i as u64);
    let n = config.string_lengths[i % config.string_lengths.len()];
    let enc = random_string_encoding(n, 1000, &mut rng)?;
    Ok(LearningRecord {
        index: i,
        n,
        dim: enc.dim(),
        report: theorem1_check(&enc, config.tol)?,
    })
}

pub fn learning_sweep(config: &LearningSweepConfig) -> Result<LearningSweep> {
    let bits = (0..config.bit_samples)
        .into_par_iter()
        .map(|i| bit_sample(config, i))
        .collect::<Result<Vec<_>>>()?;
    let strings = if config.string_lengths.is_empty() {
        Vec::new()
    } else {
        (0..config.string_samples)
            .into_par_iter()
            .map(|i| string_sample(config, i))
            .collect::<Result<Vec<_>>>()?
    };
    let bit_violations = bits.iter().filter(|r| !r.report.theorem1_ok).count();
    let string_violations = strings.iter().filter(|r| !r.report.theorem1_ok).count();
    let mut records = bits;
    records.extend(strings);
    Ok(LearningSweep {
        config: config.clone(),
        records,
        bit_violations,
        string_violations,
        pass: bit_violations == 0 && string_violations == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_sweep() {
        let config = LearningSweepConfig {
            seed: 5,
            bit_samples: 6,
            string_samples: 1,
            string_lengths: vec![2],
            ..LearningSweepConfig::default()
        };
        let s = learning_sweep(&config).unwrap();
        assert_eq!(s.records.len(), 7);
        assert!(s.pass, "{s:?}");
    }
}
