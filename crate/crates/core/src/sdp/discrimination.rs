//! Minimum-error discrimination of a finite ensemble.

use serde::{Deserialize, Serialize};

use super::solver::{solve, Constraint, SdpProblem, Sense, SolveStatus, DEFAULT_MAX_ITER};
use crate::error::{Error, Result};
use crate::quantum::linalg::{
    hermitian_eig_unchecked, max_eigenvalue, psd_part, trace_norm_hermitian,
};
use crate::quantum::matrix::ComplexMatrix;
use crate::quantum::states::DensityOperator;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrimination {
    /// Success probability of `povm`, a valid measurement.
    pub value: f64,
    /// Certified upper bound on the optimum.
    pub upper: f64,
    /// One element per hypothesis.
    pub povm: Vec<ComplexMatrix>,
    pub iterations: usize,
    pub status: SolveStatus,
}

fn check_inputs(states: &[DensityOperator], priors: &[f64]) -> Result<usize> {
    if states.is_empty() || states.len() != priors.len() {
        return Err(Error::LabelMismatch(format!(
            "{} states for {} priors",
            states.len(),
            priors.len()
        )));
    }
    let d = states[0].dim();
    for s in states {
        if s.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: s.dim(),
            });
        }
    }
    let total: f64 = priors.iter().sum();
    if priors.iter().any(|p| !(p.is_finite() && *p >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::BadDistribution(total));
    }
    Ok(d)
}

/// Optimal two-hypothesis success probability `1/2 + 1/2 ||p rho - q sigma||_1`
/// for weighted (unnormalised) operators `p rho` and `q sigma`.
pub fn helstrom_value(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let total = (a.trace() + b.trace()).re;
    0.5 * (total + trace_norm_hermitian(&(a - b)))
}

/// Projector onto the non-negative eigenspace of `a - b`; the kernel goes
/// to the first hypothesis.
pub fn helstrom_projector(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    hermitian_eig_unchecked(&(a - b)).map(|v| if v >= -1e-12 { 1.0 } else { 0.0 })
}

/// Pretty-good measurement `E_i = G^{-1/2} W_i G^{-1/2}` with the kernel of
/// `G` added to the first element.
pub fn pretty_good_measurement(weighted: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let d = weighted[0].rows();
    let mut g = ComplexMatrix::zeros(d, d);
    for w in weighted {
        g.add_scaled_real(1.0, w);
    }
    let eig = hermitian_eig_unchecked(&g);
    let cutoff = 1e-12 * eig.values.first().copied().unwrap_or(0.0).max(1e-300);
    let inv_sqrt = eig.map(|v| if v > cutoff { 1.0 / v.sqrt() } else { 0.0 });
    let kernel = eig.map(|v| if v > cutoff { 0.0 } else { 1.0 });
    let mut out: Vec<ComplexMatrix> = weighted
        .iter()
        .map(|w| inv_sqrt.matmul(w).matmul(&inv_sqrt).hermitian_part())
        .collect();
    out[0].add_scaled_real(1.0, &kernel);
    out
}

fn success(weighted: &[ComplexMatrix], povm: &[ComplexMatrix]) -> f64 {
    weighted.iter().zip(povm).map(|(w, e)| w.inner_re(e)).sum()
}

/// Turns an approximate POVM into an exact one and returns it with a
/// certified upper bound on the optimum.
fn certify(weighted: &[ComplexMatrix], approx: &[ComplexMatrix]) -> (Vec<ComplexMatrix>, f64, f64) {
    let d = weighted[0].rows();
    let clipped: Vec<ComplexMatrix> = approx.iter().map(psd_part).collect();
    let mut g = ComplexMatrix::zeros(d, d);
    for e in &clipped {
        g.add_scaled_real(1.0, e);
    }
    let eig = hermitian_eig_unchecked(&g);
    let inv_sqrt = eig.map(|v| if v > 1e-12 { 1.0 / v.sqrt() } else { 0.0 });
    let kernel = eig.map(|v| if v > 1e-12 { 0.0 } else { 1.0 });
    let mut povm: Vec<ComplexMatrix> = clipped
        .iter()
        .map(|e| inv_sqrt.matmul(e).matmul(&inv_sqrt).hermitian_part())
        .collect();
    povm[0].add_scaled_real(1.0, &kernel);
    let lower = success(weighted, &povm);

    // Dual candidate Y = herm(sum W_i E_i), shifted until Y >= W_i for all i.
    let mut y = ComplexMatrix::zeros(d, d);
    for (w, e) in weighted.iter().zip(&povm) {
        y.add_scaled_real(1.0, &w.matmul(e));
    }
    let y = y.hermitian_part();
    let shift = weighted
        .iter()
        .map(|w| max_eigenvalue(&(w - &y)))
        .fold(0.0_f64, f64::max);
    let upper = y.trace().re + d as f64 * shift;
    (povm, lower, upper.max(lower))
}

/// Optimal success probability `max sum_i p_i Tr(E_i rho_i)` over POVMs.
pub fn discrimination(
    states: &[DensityOperator],
    priors: &[f64],
    tol: f64,
) -> Result<Discrimination> {
    let weighted: Vec<ComplexMatrix> = {
        check_inputs(states, priors)?;
        states
            .iter()
            .zip(priors)
            .map(|(s, &p)| s.matrix().scale_real(p))
            .collect()
    };
    discriminate_weighted(&weighted, tol)
}

/// Same as [`discrimination`] for already-weighted PSD operators whose
/// traces sum to one.
pub fn discriminate_weighted(weighted: &[ComplexMatrix], tol: f64) -> Result<Discrimination> {
    if weighted.is_empty() {
        return Err(Error::LabelMismatch("no hypotheses".into()));
    }
    let d = weighted[0].rows();
    let k = weighted.len();
    let pgm = pretty_good_measurement(weighted);
    let pgm_value = success(weighted, &pgm);
    if k == 1 {
        return Ok(Discrimination {
            value: 1.0,
            upper: 1.0,
            povm: vec![ComplexMatrix::identity(d)],
            iterations: 0,
            status: SolveStatus::Optimal,
        });
    }

    // sum_i E_i = I, entry by entry.
    let mut constraints = Vec::new();
    for r in 0..d {
        for c in r..d {
            let mut re = Constraint::new();
            let mut im = Constraint::new();
            for blk in 0..k {
                re = re.re(blk, r, c, 1.0);
                im = im.im(blk, r, c, 1.0);
            }
            constraints.push(re.eq(if r == c { 1.0 } else { 0.0 }));
            if r != c {
                constraints.push(im.eq(0.0));
            }
        }
    }
    let problem = SdpProblem::new(weighted.to_vec(), constraints, Sense::Maximize)?;

    let mut inner_tol = tol;
    let mut last = None;
    for _ in 0..4 {
        let sol = solve(&problem, inner_tol, DEFAULT_MAX_ITER);
        let (povm, lower, upper) = certify(weighted, &sol.blocks);
        let done = upper - lower <= tol;
        let status = sol.status;
        let iterations = sol.iterations;
        last = Some(Discrimination {
            value: lower,
            upper,
            povm,
            iterations,
            status,
        });
        if done || status == SolveStatus::Infeasible {
            break;
        }
        inner_tol /= 10.0;
    }
    let result = last.expect("at least one solve");
    if result.upper - result.value > tol {
        return Err(Error::Solver {
            status: result.status,
            iterations: result.iterations,
        });
    }
    if result.value < pgm_value - tol {
        return Err(Error::Precondition(format!(
            "discrimination value {} below the pretty-good measurement {}",
            result.value, pgm_value
        )));
    }
    Ok(result)
}
