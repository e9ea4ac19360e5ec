//! Dual ADMM for block-diagonal Hermitian semidefinite programs.
//!
//! Internally the problem is always
//!
//! ```text
//! min <C, X>  s.t.  A(X) = b,  X = diag(X_1, .., X_k) psd
//! ```
//!
//! and the iteration is the alternating direction scheme on the dual
//! (Wen, Goldfarb, Yin): a linear solve for `y`, a PSD projection for `S`,
//! and a multiplier update for `X`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::matrix::{ComplexMatrix, C64};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    MaxIter,
    Infeasible,
}

/// One coefficient of a constraint matrix. A constraint contributes
/// `sum Re(conj(value) * X[block][(row, col)])`, so a Hermitian constraint
/// lists both `(r, c)` and `(c, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: C64,
}

/// `<A, X> = rhs` with `A` given by its nonzero entries.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Constraint {
    pub entries: Vec<Entry>,
    pub rhs: f64,
}

impl Constraint {
    pub fn new() -> Self {
        Self::default()
    }

    /// Constraint `<m, X_block> = rhs` from a dense Hermitian matrix.
    pub fn dense(block: usize, m: &ComplexMatrix, rhs: f64) -> Self {
        let mut entries = Vec::new();
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                let value = m[(r, c)];
                if value != C64::new(0.0, 0.0) {
                    entries.push(Entry {
                        block,
                        row: r,
                        col: c,
                        value,
                    });
                }
            }
        }
        Constraint { entries, rhs }
    }

    /// Adds `coeff * Re X[block][(r, c)]`.
    pub fn re(mut self, block: usize, r: usize, c: usize, coeff: f64) -> Self {
        if r == c {
            self.push(block, r, c, C64::new(coeff, 0.0));
        } else {
            self.push(block, r, c, C64::new(coeff / 2.0, 0.0));
            self.push(block, c, r, C64::new(coeff / 2.0, 0.0));
        }
        self
    }

    /// Adds `coeff * Im X[block][(r, c)]`; diagonal entries have no
    /// imaginary part and are ignored.
    pub fn im(mut self, block: usize, r: usize, c: usize, coeff: f64) -> Self {
        if r != c {
            self.push(block, r, c, C64::new(0.0, coeff / 2.0));
            self.push(block, c, r, C64::new(0.0, -coeff / 2.0));
        }
        self
    }

    pub fn eq(mut self, rhs: f64) -> Self {
        self.rhs = rhs;
        self
    }

    fn push(&mut self, block: usize, row: usize, col: usize, value: C64) {
        self.entries.push(Entry {
            block,
            row,
            col,
            value,
        });
    }

    /// `<A, X>` for a block-diagonal `X`.
    pub fn apply(&self, x: &[ComplexMatrix]) -> f64 {
        self.entries
            .iter()
            .map(|e| (e.value.conj() * x[e.block][(e.row, e.col)]).re)
            .sum()
    }

    fn norm(&self) -> f64 {
        self.merged()
            .values()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn merged(&self) -> HashMap<(usize, usize, usize), C64> {
        let mut out: HashMap<(usize, usize, usize), C64> = HashMap::new();
        for e in &self.entries {
            *out.entry((e.block, e.row, e.col)).or_default() += e.value;
        }
        out
    }
}

/// A block-diagonal SDP over Hermitian matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpProblem {
    blocks: Vec<usize>,
    objective: Vec<ComplexMatrix>,
    constraints: Vec<Constraint>,
    sense: Sense,
}

impl SdpProblem {
    pub fn new(
        objective: Vec<ComplexMatrix>,
        constraints: Vec<Constraint>,
        sense: Sense,
    ) -> Result<Self> {
        let blocks: Vec<usize> = objective.iter().map(|c| c.rows()).collect();
        for c in &objective {
            if !c.is_square() {
                return Err(Error::NotSquare(c.rows(), c.cols()));
            }
            let dev = c.hermitian_deviation();
            if dev > 1e-10 {
                return Err(Error::NotHermitian(dev));
            }
        }
        for con in &constraints {
            if !con.rhs.is_finite() {
                return Err(Error::Precondition("non-finite right-hand side".into()));
            }
            let merged = con.merged();
            for (&(b, r, c), &v) in &merged {
                if b >= blocks.len() || r >= blocks[b] || c >= blocks[b] {
                    return Err(Error::Precondition(format!(
                        "constraint entry ({b}, {r}, {c}) outside the block structure"
                    )));
                }
                let mirror = merged.get(&(b, c, r)).copied().unwrap_or_default();
                let dev = (v - mirror.conj()).norm();
                if dev > 1e-10 {
                    return Err(Error::NotHermitian(dev));
                }
            }
        }
        Ok(SdpProblem {
            blocks,
            objective: objective.iter().map(|c| c.hermitian_part()).collect(),
            constraints,
            sense,
        })
    }

    /// Single-block problem with dense constraint matrices.
    pub fn single(
        objective: ComplexMatrix,
        constraints: &[(ComplexMatrix, f64)],
        sense: Sense,
    ) -> Result<Self> {
        let n = objective.rows();
        for (a, _) in constraints {
            if a.rows() != n || a.cols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: a.rows(),
                });
            }
        }
        let cons = constraints
            .iter()
            .map(|(a, b)| Constraint::dense(0, a, *b))
            .collect();
        SdpProblem::new(vec![objective], cons, sense)
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn objective(&self) -> &[ComplexMatrix] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    /// Objective value `<C, X>` of a candidate point.
    pub fn objective_value(&self, x: &[ComplexMatrix]) -> f64 {
        self.objective
            .iter()
            .zip(x)
            .map(|(c, x)| c.inner_re(x))
            .sum()
    }

    /// `||A(X) - b||_2`.
    pub fn residual(&self, x: &[ComplexMatrix]) -> f64 {
        self.constraints
            .iter()
            .map(|c| (c.apply(x) - c.rhs).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpSolution {
    /// Primal blocks (PSD by construction).
    pub blocks: Vec<ComplexMatrix>,
    /// Dual multipliers, one per constraint.
    pub dual: Vec<f64>,
    /// `<C, X>` in the caller's sense.
    pub value: f64,
    /// `b^T y` in the caller's sense.
    pub dual_value: f64,
    /// Relative primal residual `||A(X) - b|| / (1 + ||b||)`.
    pub primal_residual: f64,
    /// Relative dual residual.
    pub dual_residual: f64,
    /// Relative duality gap.
    pub dual_gap: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    /// Converts a non-optimal status into an error.
    pub fn require_optimal(self) -> Result<Self> {
        if self.is_optimal() {
            Ok(self)
        } else {
            Err(Error::Solver {
                status: self.status,
                iterations: self.iterations,
            })
        }
    }
}

/// Snapshot handed to a monitor callback.
#[derive(Debug, Clone, Copy)]
pub struct Progress {
    pub iteration: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub mu: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub mu: f64,
    /// Iterations between monitor calls.
    pub monitor_every: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            mu: 1.0,
            monitor_every: 25,
        }
    }
}

pub fn solve(p: &SdpProblem, tol: f64, max_iter: usize) -> SdpSolution {
    let opts = SolverOptions {
        tol,
        max_iter,
        ..SolverOptions::default()
    };
    solve_with(p, &opts, None)
}

enum GramSolver {
    Diagonal(Vec<f64>),
    Cholesky(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    Pseudo(DMatrix<f64>),
}

impl GramSolver {
    fn build(rows: &[Constraint]) -> GramSolver {
        let m = rows.len();
        let mut by_entry: HashMap<(usize, usize, usize), Vec<(usize, C64)>> = HashMap::new();
        for (i, row) in rows.iter().enumerate() {
            for (key, v) in row.merged() {
                by_entry.entry(key).or_default().push((i, v));
            }
        }
        let mut gram = DMatrix::<f64>::zeros(m, m);
        for list in by_entry.values() {
            for &(i, a) in list {
                for &(j, b) in list {
                    gram[(i, j)] += (a.conj() * b).re;
                }
            }
        }
        let diagonal = (0..m).all(|i| (0..m).all(|j| i == j || gram[(i, j)].abs() < 1e-14));
        if diagonal {
            return GramSolver::Diagonal((0..m).map(|i| gram[(i, i)]).collect());
        }
        match gram.clone().cholesky() {
            Some(ch) => GramSolver::Cholesky(ch),
            None => GramSolver::Pseudo(pseudo_inverse(&gram)),
        }
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        match self {
            GramSolver::Diagonal(d) => rhs
                .iter()
                .zip(d)
                .map(|(r, d)| if *d > 0.0 { r / d } else { 0.0 })
                .collect(),
            GramSolver::Cholesky(ch) => ch
                .solve(&DVector::from_column_slice(rhs))
                .iter()
                .copied()
                .collect(),
            GramSolver::Pseudo(p) => (p * DVector::from_column_slice(rhs))
                .iter()
                .copied()
                .collect(),
        }
    }
}

fn pseudo_inverse(g: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(g.clone());
    let cutoff = 1e-12 * eig.eigenvalues.amax().max(1.0);
    let n = g.nrows();
    let mut out = DMatrix::zeros(n, n);
    for k in 0..n {
        let lam = eig.eigenvalues[k];
        if lam > cutoff {
            let v = eig.eigenvectors.column(k);
            out += (v * v.transpose()) / lam;
        }
    }
    out
}

fn adjoint_map(rows: &[Constraint], y: &[f64], blocks: &[usize]) -> Vec<ComplexMatrix> {
    let mut out: Vec<ComplexMatrix> = blocks.iter().map(|&n| ComplexMatrix::zeros(n, n)).collect();
    for (row, &yi) in rows.iter().zip(y) {
        if yi == 0.0 {
            continue;
        }
        for e in &row.entries {
            out[e.block][(e.row, e.col)] += e.value * yi;
        }
    }
    out
}

fn block_norm(m: &[ComplexMatrix]) -> f64 {
    m.iter()
        .map(|b| b.frobenius_norm().powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Splits `v` into its positive part and `(-v)_+`.
fn split_psd(v: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = v.rows();
    if n == 0 {
        return (v.clone(), v.clone());
    }
    if v.data().iter().all(|z| z.im == 0.0) {
        return split_psd_real(v);
    }
    let eig = SymmetricEigen::new(v.hermitian_part().to_nalgebra());
    let mut pos = ComplexMatrix::zeros(n, n);
    let mut neg = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let lam = eig.eigenvalues[k];
        if lam == 0.0 {
            continue;
        }
        let target = if lam > 0.0 { &mut pos } else { &mut neg };
        let w = lam.abs();
        for i in 0..n {
            let vi = eig.eigenvectors[(i, k)] * w;
            for j in 0..n {
                target[(i, j)] += vi * eig.eigenvectors[(j, k)].conj();
            }
        }
    }
    (pos, neg)
}

// Real symmetric input: same split with a real eigensolver (several times
// cheaper; all moment-matrix programs here are real).
fn split_psd_real(v: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = v.rows();
    let m = DMatrix::<f64>::from_fn(n, n, |i, j| 0.5 * (v[(i, j)].re + v[(j, i)].re));
    let eig = SymmetricEigen::new(m);
    let mut pos = DMatrix::<f64>::zeros(n, n);
    let mut neg = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let lam = eig.eigenvalues[k];
        let col = eig.eigenvectors.column(k);
        if lam > 0.0 {
            pos.ger(lam, &col, &col, 1.0);
        } else if lam < 0.0 {
            neg.ger(-lam, &col, &col, 1.0);
        }
    }
    let wrap = |m: &DMatrix<f64>| ComplexMatrix::from_fn(n, n, |i, j| C64::new(m[(i, j)], 0.0));
    (wrap(&pos), wrap(&neg))
}

/// Solves `p` with an optional progress callback.
pub fn solve_with(
    p: &SdpProblem,
    opts: &SolverOptions,
    mut monitor: Option<&mut dyn FnMut(&Progress)>,
) -> SdpSolution {
    let blocks = &p.blocks;
    let sign = match p.sense {
        Sense::Maximize => -1.0,
        Sense::Minimize => 1.0,
    };
    let c_norm = block_norm(&p.objective);
    let c_scale = if c_norm > 0.0 { c_norm } else { 1.0 };
    let c: Vec<ComplexMatrix> = p
        .objective
        .iter()
        .map(|m| m.scale_real(sign / c_scale))
        .collect();
    let c_unit_norm = if c_norm > 0.0 { 1.0 } else { 0.0 };

    // Unit-norm rows; all-zero rows are dropped (or make the problem infeasible).
    let mut rows = Vec::new();
    let mut row_index = Vec::new();
    let mut row_scale = Vec::new();
    let mut trivially_infeasible = false;
    for (i, con) in p.constraints.iter().enumerate() {
        let nrm = con.norm();
        if nrm < 1e-300 {
            if con.rhs.abs() > opts.tol {
                trivially_infeasible = true;
            }
            continue;
        }
        rows.push(Constraint {
            entries: con
                .entries
                .iter()
                .map(|e| Entry {
                    value: e.value / nrm,
                    ..*e
                })
                .collect(),
            rhs: con.rhs / nrm,
        });
        row_index.push(i);
        row_scale.push(nrm);
    }
    let b: Vec<f64> = rows.iter().map(|r| r.rhs).collect();
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let gram = GramSolver::build(&rows);

    let m = rows.len();
    let mut x: Vec<ComplexMatrix> = blocks.iter().map(|&n| ComplexMatrix::zeros(n, n)).collect();
    let mut s = x.clone();
    let mut y = vec![0.0; m];
    let mut mu = opts.mu;
    let mut status = SolveStatus::MaxIter;
    let mut iterations = 0;
    let (mut pinf, mut dinf, mut gap) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let (mut pinf_acc, mut dinf_acc) = (0.0, 0.0);
    let mut window_best = f64::INFINITY;
    let mut prev_window_best = f64::INFINITY;
    let mut stalled_windows = 0;

    if trivially_infeasible {
        status = SolveStatus::Infeasible;
    }

    while status == SolveStatus::MaxIter && iterations < opts.max_iter {
        iterations += 1;
        let ax: Vec<f64> = rows.iter().map(|r| r.apply(&x)).collect();
        let s_minus_c: Vec<ComplexMatrix> = s.iter().zip(&c).map(|(s, c)| s - c).collect();
        let rhs: Vec<f64> = rows
            .iter()
            .zip(ax.iter().zip(&b))
            .map(|(r, (ax, b))| mu * (ax - b) + r.apply(&s_minus_c))
            .collect();
        y = gram.solve(&rhs).into_iter().map(|v| -v).collect();
        let aty = adjoint_map(&rows, &y, blocks);

        let mut dx = 0.0;
        for k in 0..blocks.len() {
            let mut v = &c[k] - &aty[k];
            v.add_scaled_real(-mu, &x[k]);
            let (pos, neg) = split_psd(&v);
            let x_new = neg.scale_real(1.0 / mu);
            dx += (&x_new - &x[k]).frobenius_norm().powi(2);
            x[k] = x_new;
            s[k] = pos;
        }

        let resid: f64 = rows
            .iter()
            .zip(&b)
            .map(|(r, b)| (r.apply(&x) - b).powi(2))
            .sum::<f64>()
            .sqrt();
        pinf = resid / (1.0 + b_norm);
        dinf = mu * dx.sqrt() / (1.0 + c_unit_norm);
        let pobj: f64 = c.iter().zip(&x).map(|(c, x)| c.inner_re(x)).sum();
        let dobj: f64 = b.iter().zip(&y).map(|(b, y)| b * y).sum();
        gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());

        if pinf <= opts.tol && dinf <= opts.tol && gap <= opts.tol {
            status = SolveStatus::Optimal;
        }

        if let Some(cb) = monitor.as_deref_mut() {
            if opts.monitor_every > 0 && iterations % opts.monitor_every == 0 {
                cb(&Progress {
                    iteration: iterations,
                    primal_residual: pinf,
                    dual_residual: dinf,
                    gap,
                    mu,
                    objective: sign * c_scale * pobj,
                });
            }
        }

        // Penalty balancing on averaged residuals.
        pinf_acc += pinf;
        dinf_acc += dinf;
        if iterations % 20 == 0 {
            let ratio = pinf_acc / dinf_acc.max(1e-300);
            if ratio > 5.0 {
                mu = (mu * 1.6).min(1e4);
            } else if ratio < 0.2 {
                mu = (mu / 1.6).max(1e-4);
            }
            pinf_acc = 0.0;
            dinf_acc = 0.0;
        }

        // Stall heuristic for infeasibility: the primal residual stops
        // improving while staying large.
        window_best = window_best.min(pinf);
        if iterations % 500 == 0 {
            if iterations >= 3000 && window_best > 0.99 * prev_window_best && window_best > 1e-3 {
                stalled_windows += 1;
            } else {
                stalled_windows = 0;
            }
            prev_window_best = prev_window_best.min(window_best);
            window_best = f64::INFINITY;
            if stalled_windows >= 4 {
                status = SolveStatus::Infeasible;
            }
        }
    }

    let mut dual = vec![0.0; p.constraints.len()];
    for ((&i, &scale), &yi) in row_index.iter().zip(&row_scale).zip(&y) {
        dual[i] = yi / scale * sign * c_scale;
    }
    let value = p.objective_value(&x);
    let dual_value = p
        .constraints
        .iter()
        .zip(&dual)
        .map(|(c, y)| c.rhs * y)
        .sum();
    SdpSolution {
        blocks: x,
        dual,
        value,
        dual_value,
        primal_residual: pinf,
        dual_residual: dinf,
        dual_gap: gap,
        iterations,
        status,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::matrix::gates;

    #[test]
    fn scalar_program() {
        let p = SdpProblem::single(
            ComplexMatrix::identity(1),
            &[(ComplexMatrix::identity(1), 0.7)],
            Sense::Maximize,
        )
        .unwrap();
        let sol = solve(&p, 1e-8, 10_000);
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.value - 0.7).abs() < 1e-7);
    }

    #[test]
    fn top_eigenvalue_program() {
        let p = SdpProblem::single(
            gates::pauli_z(),
            &[(ComplexMatrix::identity(2), 1.0)],
            Sense::Maximize,
        )
        .unwrap();
        let sol = solve(&p, 1e-8, 10_000);
        assert!(sol.is_optimal());
        assert!((sol.value - 1.0).abs() < 1e-6);
        assert!((sol.dual_value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn minimisation_of_trace() {
        // min Tr X  s.t.  X_01 = 1 (real) on 2x2: optimum 2.
        let con = Constraint::new().re(0, 0, 1, 1.0).eq(1.0);
        let p =
            SdpProblem::new(vec![ComplexMatrix::identity(2)], vec![con], Sense::Minimize).unwrap();
        let sol = solve(&p, 1e-8, 20_000);
        assert!(sol.is_optimal(), "{:?}", sol.status);
        assert!((sol.value - 2.0).abs() < 1e-6);
    }

    #[test]
    fn negative_scalar_is_infeasible() {
        let p = SdpProblem::single(
            ComplexMatrix::identity(1),
            &[(ComplexMatrix::identity(1), -1.0)],
            Sense::Maximize,
        )
        .unwrap();
        let sol = solve(&p, 1e-6, 50_000);
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn rejects_non_hermitian_constraint() {
        let con = Constraint {
            entries: vec![Entry {
                block: 0,
                row: 0,
                col: 1,
                value: C64::new(1.0, 0.0),
            }],
            rhs: 0.0,
        };
        let err = SdpProblem::new(vec![ComplexMatrix::identity(2)], vec![con], Sense::Maximize);
        assert!(matches!(err, Err(Error::NotHermitian(_))));
    }

    #[test]
    fn imaginary_constraint_reads_imaginary_part() {
        let x = ComplexMatrix::from_vec(
            2,
            2,
            vec![
                C64::new(1.0, 0.0),
                C64::new(0.3, 0.4),
                C64::new(0.3, -0.4),
                C64::new(1.0, 0.0),
            ],
        )
        .unwrap();
        let re = Constraint::new().re(0, 0, 1, 1.0);
        let im = Constraint::new().im(0, 0, 1, 1.0);
        assert!((re.apply(std::slice::from_ref(&x)) - 0.3).abs() < 1e-15);
        assert!((im.apply(std::slice::from_ref(&x)) - 0.4).abs() < 1e-15);
    }
}
