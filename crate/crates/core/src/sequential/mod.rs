//! Two projective measurements applied one after the other.
//!
//! With `cos^2 a = ||C psi||^2` and `cos^2 b = ||D psi||^2`, both at least
//! one half, the probability that `C` then `D` agree,
//! `||C D psi||^2 + ||(1-C)(1-D) psi||^2`, lies in
//! `[cos^2(a+b), cos^2(a-b)]`.

pub mod sweep;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::states::{Projector, PureState};

pub use sweep::{run_sweep, SweepConfig, SweepRecord, SweepSummary};

/// Slack allowed on every bound check.
pub const BOUND_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub alpha: f64,
    pub beta: f64,
    pub observed: f64,
    pub lower: f64,
    pub upper: f64,
    pub margin_low: f64,
    pub margin_high: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaReport {
    pub gamma: f64,
    pub bound: f64,
    pub saturated_positive: bool,
    pub saturated_negative: bool,
    pub pass: bool,
}

/// The raw quantities behind both reports, computed without checking the
/// regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sequential {
    /// `||C psi||^2`.
    pub pc: f64,
    /// `||D psi||^2`.
    pub pd: f64,
    /// `||C D psi||^2 + ||(1-C)(1-D) psi||^2`.
    pub observed: f64,
}

impl Sequential {
    pub fn measure(psi: &PureState, c: &Projector, d: &Projector) -> Result<Self> {
        for p in [c, d] {
            if p.dim() != psi.dim() {
                return Err(Error::DimensionMismatch {
                    expected: psi.dim(),
                    got: p.dim(),
                });
            }
        }
        let (cm, dm) = (c.matrix(), d.matrix());
        let (cc, dc) = (c.complement(), d.complement());
        let amps = psi.amplitudes();
        let both = crate::quantum::matrix::vec_norm(&cm.apply(&dm.apply(amps))).powi(2);
        let neither =
            crate::quantum::matrix::vec_norm(&cc.matrix().apply(&dc.matrix().apply(amps))).powi(2);
        Ok(Sequential {
            pc: psi.weight(cm),
            pd: psi.weight(dm),
            observed: both + neither,
        })
    }

    pub fn in_regime(&self) -> bool {
        self.pc >= 0.5 && self.pd >= 0.5
    }

    pub fn alpha(&self) -> f64 {
        angle(self.pc)
    }

    pub fn beta(&self) -> f64 {
        angle(self.pd)
    }

    pub fn sandwich(&self) -> SandwichReport {
        let (a, b) = (self.alpha(), self.beta());
        let lower = (a + b).cos().powi(2);
        let upper = (a - b).cos().powi(2);
        let margin_low = self.observed - lower;
        let margin_high = upper - self.observed;
        SandwichReport {
            alpha: a,
            beta: b,
            observed: self.observed,
            lower,
            upper,
            margin_low,
            margin_high,
            pass: margin_low >= -BOUND_TOL && margin_high >= -BOUND_TOL,
        }
    }

    pub fn gamma(&self) -> GammaReport {
        let independent = self.pc * self.pd + (1.0 - self.pc) * (1.0 - self.pd);
        let gamma = self.observed - independent;
        let bound = 0.5 * (2.0 * self.alpha()).sin() * (2.0 * self.beta()).sin();
        GammaReport {
            gamma,
            bound,
            saturated_positive: (gamma - bound).abs() <= BOUND_TOL,
            saturated_negative: (gamma + bound).abs() <= BOUND_TOL,
            pass: gamma.abs() <= bound + BOUND_TOL,
        }
    }
}

fn angle(p: f64) -> f64 {
    p.clamp(0.0, 1.0).sqrt().acos()
}

fn regime(s: &Sequential) -> Result<()> {
    if s.in_regime() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "success probabilities {:.6} and {:.6} must both be at least 1/2",
            s.pc, s.pd
        )))
    }
}

/// Checks the two-sided bound on `||CD psi||^2 + ||(1-C)(1-D) psi||^2`.
pub fn sandwich_check(psi: &PureState, c: &Projector, d: &Projector) -> Result<SandwichReport> {
    let s = Sequential::measure(psi, c, d)?;
    regime(&s)?;
    Ok(s.sandwich())
}

/// Deviation of the agreement probability from the product
/// `cos^2 a cos^2 b + sin^2 a sin^2 b` of independent measurements.
pub fn gamma(psi: &PureState, c: &Projector, d: &Projector) -> Result<GammaReport> {
    let s = Sequential::measure(psi, c, d)?;
    regime(&s)?;
    Ok(s.gamma())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::matrix::C64;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn real_state(v: &[f64]) -> PureState {
        PureState::normalized(v.iter().map(|&x| C64::new(x, 0.0)).collect()).unwrap()
    }

    fn qubit_projector(theta: f64) -> Projector {
        Projector::onto(
            2,
            &[vec![C64::new(theta.cos(), 0.0), C64::new(theta.sin(), 0.0)]],
        )
        .unwrap()
    }

    #[test]
    fn equal_projectors_saturate() {
        let psi = real_state(&[0.9, 0.3]);
        let c = qubit_projector(0.2);
        let r = sandwich_check(&psi, &c, &c).unwrap();
        assert!((r.observed - 1.0).abs() < 1e-12);
        assert!((r.upper - 1.0).abs() < 1e-12);
        let g = gamma(&psi, &c, &c).unwrap();
        assert!(g.saturated_positive, "{g:?}");
    }

    #[test]
    fn rotated_second_measurement() {
        let psi = PureState::basis(2, 0);
        let r = sandwich_check(&psi, &qubit_projector(0.0), &qubit_projector(PI / 8.0)).unwrap();
        let expected = (PI / 8.0).cos().powi(2);
        assert!((r.observed - expected).abs() < 1e-12);
        assert!((r.lower - expected).abs() < 1e-12);
        assert!(r.alpha.abs() < 1e-7);
    }

    #[test]
    fn complementary_projectors_at_the_edge() {
        let psi = PureState::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let c = qubit_projector(0.0);
        let g = gamma(&psi, &c, &c.complement()).unwrap();
        assert!(g.saturated_negative, "{g:?}");
        assert!((g.gamma + 0.5).abs() < 1e-12);
    }

    #[test]
    fn product_measurements_are_independent() {
        // C acts on the first qubit, D on the second, state is a product.
        let a = real_state(&[0.95, 0.2]);
        let b = real_state(&[0.8, -0.5]);
        let psi = a.tensor(&b);
        let id = crate::quantum::matrix::ComplexMatrix::identity(2);
        let c = Projector::new(qubit_projector(0.1).matrix().kron(&id)).unwrap();
        let d = Projector::new(id.kron(qubit_projector(-0.3).matrix())).unwrap();
        let g = gamma(&psi, &c, &d).unwrap();
        assert!(g.gamma.abs() < 1e-9, "{g:?}");
    }

    #[test]
    fn below_half_is_rejected() {
        let psi = PureState::basis(2, 1);
        let c = qubit_projector(0.0);
        assert!(matches!(
            sandwich_check(&psi, &c, &c),
            Err(Error::Precondition(_))
        ));
    }
}
