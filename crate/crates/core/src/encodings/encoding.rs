use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::matrix::ComplexMatrix;
use crate::quantum::states::{bit_string, parse_bit_string, DensityOperator};
use crate::schema::{check_schema, SCHEMA};

/// One `(x0, x1)` branch of an encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingEntry {
    pub x0: usize,
    pub x1: usize,
    pub prior: f64,
    pub state: DensityOperator,
}

/// Prior-weighted ensemble `{pi_{x0,x1}, rho_{x0,x1}}` over pairs of
/// `n`-bit strings. Pairs without an entry have prior zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEncoding", into = "RawEncoding")]
pub struct XorEncoding {
    n: usize,
    dim: usize,
    entries: Vec<EncodingEntry>,
}

#[derive(Serialize, Deserialize)]
struct RawEntry {
    x0: String,
    x1: String,
    prior: f64,
    state: DensityOperator,
}

#[derive(Serialize, Deserialize)]
struct RawEncoding {
    schema: String,
    n: usize,
    entries: Vec<RawEntry>,
}

impl TryFrom<RawEncoding> for XorEncoding {
    type Error = Error;

    fn try_from(raw: RawEncoding) -> Result<Self> {
        check_schema(&raw.schema)?;
        let mut entries = Vec::with_capacity(raw.entries.len());
        for e in raw.entries {
            if e.x0.len() != raw.n || e.x1.len() != raw.n {
                return Err(Error::Schema(format!(
                    "strings {:?}, {:?} are not {} bits long",
                    e.x0, e.x1, raw.n
                )));
            }
            entries.push(EncodingEntry {
                x0: parse_bit_string(&e.x0)?,
                x1: parse_bit_string(&e.x1)?,
                prior: e.prior,
                state: e.state,
            });
        }
        XorEncoding::new(raw.n, entries)
    }
}

impl From<XorEncoding> for RawEncoding {
    fn from(enc: XorEncoding) -> Self {
        let n = enc.n;
        RawEncoding {
            schema: SCHEMA.to_string(),
            n,
            entries: enc
                .entries
                .into_iter()
                .map(|e| RawEntry {
                    x0: bit_string(e.x0, n),
                    x1: bit_string(e.x1, n),
                    prior: e.prior,
                    state: e.state,
                })
                .collect(),
        }
    }
}

impl XorEncoding {
    pub fn new(n: usize, mut entries: Vec<EncodingEntry>) -> Result<Self> {
        if n == 0 || n > 16 {
            return Err(Error::Precondition(format!(
                "string length {n} out of range"
            )));
        }
        if entries.is_empty() {
            return Err(Error::Precondition("encoding has no entries".into()));
        }
        let limit = 1usize << n;
        let dim = entries[0].state.dim();
        let mut total = 0.0;
        for e in &entries {
            if e.x0 >= limit || e.x1 >= limit {
                return Err(Error::Precondition(format!(
                    "pair ({}, {}) exceeds {n} bits",
                    e.x0, e.x1
                )));
            }
            if !(e.prior.is_finite() && e.prior >= 0.0) {
                return Err(Error::BadDistribution(e.prior));
            }
            if e.state.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: e.state.dim(),
                });
            }
            total += e.prior;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::BadDistribution(total));
        }
        entries.sort_by_key(|e| (e.x0, e.x1));
        if entries
            .windows(2)
            .any(|w| (w[0].x0, w[0].x1) == (w[1].x0, w[1].x1))
        {
            return Err(Error::Precondition("duplicate (x0, x1) entry".into()));
        }
        Ok(XorEncoding { n, dim, entries })
    }

    /// Uniform prior over all `4^n` pairs.
    pub fn uniform(
        n: usize,
        mut state: impl FnMut(usize, usize) -> DensityOperator,
    ) -> Result<Self> {
        let k = 1usize << n;
        let p = 1.0 / (k * k) as f64;
        let mut entries = Vec::with_capacity(k * k);
        for x0 in 0..k {
            for x1 in 0..k {
                entries.push(EncodingEntry {
                    x0,
                    x1,
                    prior: p,
                    state: state(x0, x1),
                });
            }
        }
        XorEncoding::new(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[EncodingEntry] {
        &self.entries
    }

    pub fn prior(&self, x0: usize, x1: usize) -> f64 {
        self.entries
            .iter()
            .find(|e| e.x0 == x0 && e.x1 == x1)
            .map_or(0.0, |e| e.prior)
    }

    /// Marginal distribution of `x0 xor x1`.
    pub fn xor_marginal(&self) -> Vec<f64> {
        let mut p = vec![0.0; 1 << self.n];
        for e in &self.entries {
            p[e.x0 ^ e.x1] += e.prior;
        }
        p
    }

    /// Average state `sum pi rho`.
    pub fn average_state(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for e in &self.entries {
            m.add_scaled_real(e.prior, e.state.matrix());
        }
        m
    }

    /// Applies `U rho U^dagger` to every state.
    pub fn conjugate(&self, u: &ComplexMatrix) -> XorEncoding {
        XorEncoding {
            n: self.n,
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|e| EncodingEntry {
                    state: e.state.conjugate(u),
                    ..e.clone()
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::states::PureState;

    fn classical() -> XorEncoding {
        XorEncoding::uniform(1, |x0, x1| PureState::basis(4, 2 * x0 + x1).density()).unwrap()
    }

    #[test]
    fn json_layout_and_round_trip() {
        let enc = classical();
        let text = serde_json::to_string(&enc).unwrap();
        assert!(text.starts_with(
            r#"{"schema":"xorlab/v1","n":1,"entries":[{"x0":"0","x1":"0","prior":0.25"#
        ));
        let back: XorEncoding = serde_json::from_str(&text).unwrap();
        assert_eq!(back, enc);
    }

    #[test]
    fn priors_must_sum_to_one() {
        let s = DensityOperator::maximally_mixed(2);
        let entries = vec![EncodingEntry {
            x0: 0,
            x1: 0,
            prior: 0.5,
            state: s,
        }];
        assert!(matches!(
            XorEncoding::new(1, entries),
            Err(Error::BadDistribution(_))
        ));
    }

    #[test]
    fn xor_marginal_of_uniform() {
        assert_eq!(classical().xor_marginal(), vec![0.5, 0.5]);
    }
}
