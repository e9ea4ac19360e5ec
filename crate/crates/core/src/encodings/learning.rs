use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::encoding::XorEncoding;
use crate::error::{Error, Result};
use crate::quantum::linalg::trace_norm_hermitian;
use crate::quantum::matrix::ComplexMatrix;
use crate::quantum::states::Povm;
use crate::sdp::discrimination::{discriminate_weighted, helstrom_projector, helstrom_value};

/// What Bob tries to learn about `(x0, x1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    First,
    Second,
    Xor,
    Pair,
    /// Bit `i` taken from `x1` where `mask` has a one, else from `x0`.
    Mixed(usize),
}

impl Target {
    pub fn label(&self, x0: usize, x1: usize) -> usize {
        match *self {
            Target::First => x0,
            Target::Second => x1,
            Target::Xor => x0 ^ x1,
            Target::Pair => (x0 << 32) | x1,
            Target::Mixed(mask) => (x0 & !mask) | (x1 & mask),
        }
    }
}

/// An optimal (or certified near-optimal) decoder for some labelling.
#[derive(Debug, Clone)]
pub struct Decoder {
    /// Label of each POVM element.
    pub labels: Vec<usize>,
    pub povm: Vec<ComplexMatrix>,
    pub value: f64,
    /// Certified upper bound on the optimum (equal to `value` when exact).
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnValue {
    pub value: f64,
    pub upper: f64,
    /// The label is constant on the support of the prior.
    pub degenerate: bool,
}

/// Prior-weighted operators `sum_{label(x0,x1) = l} pi rho`, by label.
pub fn grouped(
    enc: &XorEncoding,
    label: impl Fn(usize, usize) -> usize,
) -> BTreeMap<usize, ComplexMatrix> {
    let d = enc.dim();
    let mut groups: BTreeMap<usize, ComplexMatrix> = BTreeMap::new();
    for e in enc.entries() {
        if e.prior == 0.0 {
            continue;
        }
        groups
            .entry(label(e.x0, e.x1))
            .or_insert_with(|| ComplexMatrix::zeros(d, d))
            .add_scaled_real(e.prior, e.state.matrix());
    }
    groups
}

/// Best measurement for guessing `label(x0, x1)`.
pub fn optimal_decoder_by(
    enc: &XorEncoding,
    label: impl Fn(usize, usize) -> usize,
    tol: f64,
) -> Result<Decoder> {
    let groups = grouped(enc, label);
    let labels: Vec<usize> = groups.keys().copied().collect();
    let ops: Vec<ComplexMatrix> = groups.into_values().collect();
    let d = enc.dim();
    match ops.len() {
        1 => Ok(Decoder {
            labels,
            povm: vec![ComplexMatrix::identity(d)],
            value: 1.0,
            upper: 1.0,
        }),
        2 => {
            let p = helstrom_projector(&ops[0], &ops[1]);
            let q = &ComplexMatrix::identity(d) - &p;
            let value = helstrom_value(&ops[0], &ops[1]);
            Ok(Decoder {
                labels,
                povm: vec![p, q],
                value,
                upper: value,
            })
        }
        _ => {
            let r = discriminate_weighted(&ops, tol)?;
            Ok(Decoder {
                labels,
                povm: r.povm,
                value: r.value,
                upper: r.upper,
            })
        }
    }
}

pub fn optimal_decoder(enc: &XorEncoding, target: Target, tol: f64) -> Result<Decoder> {
    optimal_decoder_by(enc, |a, b| target.label(a, b), tol)
}

/// Optimal probability of learning `label(x0, x1)` from one copy.
pub fn learn_value_prob_by(
    enc: &XorEncoding,
    label: impl Fn(usize, usize) -> usize,
    tol: f64,
) -> Result<LearnValue> {
    let dec = optimal_decoder_by(enc, label, tol)?;
    Ok(LearnValue {
        value: dec.value,
        upper: dec.upper,
        degenerate: dec.labels.len() == 1,
    })
}

pub fn learn_value_prob(enc: &XorEncoding, target: Target, tol: f64) -> Result<LearnValue> {
    learn_value_prob_by(enc, |a, b| target.label(a, b), tol)
}

/// Largest prior mass of a single XOR value: what guessing achieves.
pub fn xor_baseline(enc: &XorEncoding) -> f64 {
    enc.xor_marginal().into_iter().fold(0.0, f64::max)
}

/// Whether `x0 xor x1` cannot be learned better than guessing (up to `tol`).
pub fn hides_xor(enc: &XorEncoding, tol: f64) -> Result<bool> {
    let baseline = xor_baseline(enc);
    // Cheap certificate: Pr <= max_v P(v) + 1/2 sum_v P(v) ||sigma_v - sigma||_1.
    let groups = grouped(enc, |a, b| a ^ b);
    let avg = enc.average_state();
    let spread: f64 = groups
        .values()
        .map(|w| {
            let pv = w.trace().re;
            trace_norm_hermitian(&(w - &avg.scale_real(pv)))
        })
        .sum();
    if baseline + 0.5 * spread <= baseline + tol {
        return Ok(true);
    }
    let v = learn_value_prob(enc, Target::Xor, tol.min(1e-7))?;
    Ok(v.value <= baseline + tol)
}

/// Error unless the encoding hides the XOR.
pub fn require_hiding(enc: &XorEncoding, tol: f64) -> Result<()> {
    if hides_xor(enc, tol)? {
        return Ok(());
    }
    let v = learn_value_prob(enc, Target::Xor, tol.min(1e-7))?;
    Err(Error::XorLeak {
        value: v.value,
        baseline: xor_baseline(enc),
    })
}

fn projective_pair(p: &Povm) -> Result<[ComplexMatrix; 2]> {
    if p.len() != 2 {
        return Err(Error::LabelMismatch(format!(
            "expected 2 outcomes, got {}",
            p.len()
        )));
    }
    for e in p.elements() {
        let defect = (&e.matmul(e) - e).frobenius_norm();
        if defect > 1e-8 {
            return Err(Error::NotProjector(defect));
        }
    }
    Ok([p.element(0).clone(), p.element(1).clone()])
}

/// Success probability of guessing `x0 xor x1` with the sequential
/// measurement `R_{x0,x1} = Q_{x1} P_{x0} Q_{x1}`, coarse-grained to the
/// parity of the two guesses. Defaults are the Helstrom measurements for
/// `x0` and `x1`.
pub fn sequential_xor_strategy(
    enc: &XorEncoding,
    p_meas: Option<&Povm>,
    q_meas: Option<&Povm>,
) -> Result<f64> {
    if enc.n() != 1 {
        return Err(Error::Unsupported(
            "the sequential strategy is defined for single bits".into(),
        ));
    }
    let d = enc.dim();
    let default = |target: Target| -> Result<[ComplexMatrix; 2]> {
        let groups = grouped(enc, |a, b| target.label(a, b));
        let zero = ComplexMatrix::zeros(d, d);
        let w0 = groups.get(&0).unwrap_or(&zero);
        let w1 = groups.get(&1).unwrap_or(&zero);
        let p = helstrom_projector(w0, w1);
        let q = &ComplexMatrix::identity(d) - &p;
        Ok([p, q])
    };
    let check_dim = |p: &Povm| -> Result<()> {
        if p.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: p.dim(),
            });
        }
        Ok(())
    };
    let p = match p_meas {
        Some(m) => {
            check_dim(m)?;
            if m.len() != 2 {
                return Err(Error::LabelMismatch(format!(
                    "expected 2 outcomes, got {}",
                    m.len()
                )));
            }
            [m.element(0).clone(), m.element(1).clone()]
        }
        None => default(Target::First)?,
    };
    let q = match q_meas {
        Some(m) => {
            check_dim(m)?;
            projective_pair(m)?
        }
        None => default(Target::Second)?,
    };
    let r = |a: usize, b: usize| q[b].matmul(&p[a]).matmul(&q[b]);
    let rs = [[r(0, 0), r(0, 1)], [r(1, 0), r(1, 1)]];
    let mut total = 0.0;
    for e in enc.entries() {
        let (a, b) = (e.x0, e.x1);
        total +=
            e.prior * (e.state.expectation(&rs[a][b]) + e.state.expectation(&rs[1 - a][1 - b]));
    }
    Ok(total)
}

/// One inequality of the learning relations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningReport {
    pub p0: f64,
    pub p1: f64,
    pub c: f64,
    pub p_xor_optimal: f64,
    pub p_xor_sequential: Option<f64>,
    pub p_pair: f64,
    pub checks: Vec<BoundCheck>,
    pub theorem1_ok: bool,
}

const SLACK: f64 = 1e-9;

/// Computes all learning probabilities of `enc` and checks
/// `p_xor >= (2c-1)^2` (bits) and `p_xor >= p_pair >= c(2c-1)^2` (strings,
/// when `c >= 1/2`). Solver values enter through their certified bounds: a
/// check fails only if the bounds prove a violation.
pub fn theorem1_check(enc: &XorEncoding, tol: f64) -> Result<LearningReport> {
    let l0 = learn_value_prob(enc, Target::First, tol)?;
    let l1 = learn_value_prob(enc, Target::Second, tol)?;
    let lx = learn_value_prob(enc, Target::Xor, tol)?;
    let lp = learn_value_prob(enc, Target::Pair, tol)?;
    let c = 0.5 * (l0.value + l1.value);
    let c_lo = c;
    let c_hi = (0.5 * (l0.upper + l1.upper)).min(1.0);
    let bit_bound = |c: f64| (2.0 * c - 1.0).powi(2);
    let string_bound = |c: f64| c * (2.0 * c - 1.0).powi(2);

    let mut checks = Vec::new();
    let mut p_xor_sequential = None;
    if enc.n() == 1 {
        // (2c-1)^2 is increasing for c >= 1/2, and c >= 1/2 always for bits.
        checks.push(BoundCheck {
            name: "p_xor >= (2c-1)^2".into(),
            lhs: lx.value,
            rhs: bit_bound(c_lo),
            ok: lx.upper >= bit_bound(c_lo) - SLACK,
        });
        let seq = sequential_xor_strategy(enc, None, None)?;
        checks.push(BoundCheck {
            name: "p_xor >= p_xor_sequential".into(),
            lhs: lx.value,
            rhs: seq,
            ok: lx.upper >= seq - SLACK,
        });
        p_xor_sequential = Some(seq);
    }
    if c_hi >= 0.5 {
        checks.push(BoundCheck {
            name: "p_xor >= p_pair".into(),
            lhs: lx.value,
            rhs: lp.value,
            ok: lx.upper >= lp.value - SLACK,
        });
        if c_lo >= 0.5 {
            checks.push(BoundCheck {
                name: "p_pair >= c(2c-1)^2".into(),
                lhs: lp.value,
                rhs: string_bound(c_lo),
                ok: lp.upper >= string_bound(c_lo) - SLACK,
            });
        }
    }
    let theorem1_ok = checks.iter().all(|c| c.ok);
    Ok(LearningReport {
        p0: l0.value,
        p1: l1.value,
        c,
        p_xor_optimal: lx.value,
        p_xor_sequential,
        p_pair: lp.value,
        checks,
        theorem1_ok,
    })
}

/// `1/2 + 1/2 sqrt(q^2 + (1-q)^2)`: the largest weighted average
/// `q p0 + (1-q) p1` of an XOR-hiding encoding of bits.
pub fn weighted_decoding_bound(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Precondition(format!("q = {q} outside [0, 1]")));
    }
    Ok(0.5 + 0.5 * (q * q + (1.0 - q) * (1.0 - q)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::states::{DensityOperator, PureState};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn classical() -> XorEncoding {
        XorEncoding::uniform(1, |x0, x1| PureState::basis(4, 2 * x0 + x1).density()).unwrap()
    }

    #[test]
    fn zero_versus_plus() {
        let plus = PureState::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2])
            .unwrap()
            .density();
        let zero = PureState::basis(2, 0).density();
        let enc =
            XorEncoding::uniform(1, |x0, _| if x0 == 0 { zero.clone() } else { plus.clone() })
                .unwrap();
        let v = learn_value_prob(&enc, Target::First, 1e-7).unwrap();
        assert!((v.value - (0.5 + 0.5 * FRAC_1_SQRT_2)).abs() < 1e-12);
        let constant = learn_value_prob_by(&enc, |_, _| 7, 1e-7).unwrap();
        assert!(constant.degenerate && constant.value == 1.0);
    }

    #[test]
    fn classical_encoding_leaks() {
        let enc = classical();
        assert!(!hides_xor(&enc, 1e-6).unwrap());
        let seq = sequential_xor_strategy(&enc, None, None).unwrap();
        assert!((seq - 1.0).abs() < 1e-12);
        let r = theorem1_check(&enc, 1e-7).unwrap();
        assert!((r.c - 1.0).abs() < 1e-12 && (r.p_xor_optimal - 1.0).abs() < 1e-12);
        assert!(r.theorem1_ok);
    }

    #[test]
    fn identical_states_hide_everything() {
        let enc = XorEncoding::uniform(1, |_, _| DensityOperator::maximally_mixed(3)).unwrap();
        assert!(hides_xor(&enc, 1e-9).unwrap());
        let seq = sequential_xor_strategy(&enc, None, None).unwrap();
        assert!((seq - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sequential_needs_bits() {
        let enc = XorEncoding::uniform(2, |_, _| DensityOperator::maximally_mixed(2)).unwrap();
        assert!(matches!(
            sequential_xor_strategy(&enc, None, None),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn mixed_target_picks_bits() {
        assert_eq!(Target::Mixed(0b01).label(0b10, 0b01), 0b11);
        assert_eq!(Target::Mixed(0b00).label(0b10, 0b01), 0b10);
    }

    #[test]
    fn weighted_bound_values() {
        assert!((weighted_decoding_bound(0.5).unwrap() - 0.853_553_390_593_273_7).abs() < 1e-12);
        assert_eq!(weighted_decoding_bound(1.0).unwrap(), 1.0);
        assert!(
            (weighted_decoding_bound(0.25).unwrap() - (0.5 + 10f64.sqrt() / 8.0)).abs() < 1e-12
        );
        assert!(weighted_decoding_bound(-0.1).is_err());
    }
}
