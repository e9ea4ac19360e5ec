//! Level-1 moment-matrix relaxation of two-player game values.
//!
//! The operator set is `{1} ∪ {A_x^a} ∪ {B_y^b}` with the last outcome of
//! every measurement eliminated through completeness. For XOR-type games
//! (`a xor b = f(x, y)` on `n`-bit outputs) the relaxation decouples over the
//! characters `s` of `Z_2^n`: averaging any feasible moment matrix over the
//! global relabelling `a -> a xor r`, `b -> b xor r` keeps it feasible and
//! keeps the objective, and makes it block diagonal in the Fourier basis.
//! The `s = 0` block is fixed and contributes `2^-n`; every other block is
//! an elliptope program over the `±1` observables `A_x(s)`, `B_y(s)`.

use serde::{Deserialize, Serialize};

use super::solver::{solve, Constraint, SdpProblem, Sense, SolveStatus, DEFAULT_MAX_ITER};
use crate::error::{Error, Result};
use crate::games::game::{LinearForm, TwoPlayerGame};
use crate::quantum::linalg::max_eigenvalue;
use crate::quantum::matrix::{ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Npa1Method {
    /// Character decomposition for XOR-type games.
    Fourier,
    /// The full moment matrix.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Npa1 {
    /// Upper bound on the quantum value.
    pub value: f64,
    /// Objective of the primal iterate.
    pub primal: f64,
    /// Size of the largest moment-matrix block.
    pub matrix_dim: usize,
    pub method: Npa1Method,
    pub iterations: usize,
    pub status: SolveStatus,
}

/// Level-1 upper bound on the quantum value of `game`.
pub fn npa1_value(game: &TwoPlayerGame, tol: f64) -> Result<f64> {
    Ok(npa1(game, tol)?.value)
}

/// Level-1 relaxation, using the character decomposition when the game has
/// XOR structure.
pub fn npa1(game: &TwoPlayerGame, tol: f64) -> Result<Npa1> {
    match game.linear_form() {
        Some(lf) => npa1_fourier(game, &lf, tol),
        None => npa1_full(game, tol),
    }
}

fn parity(v: usize) -> f64 {
    if v.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn npa1_fourier(game: &TwoPlayerGame, lf: &LinearForm, tol: f64) -> Result<Npa1> {
    let (nx, ny) = (game.alice_inputs(), game.bob_inputs());
    let dim = nx + ny;
    let chars = (1usize << lf.bits) - 1;
    let scale = 1.0 / (1usize << lf.bits) as f64;
    let mut objective = Vec::with_capacity(chars);
    let mut constraints = Vec::with_capacity(chars * dim);
    for s in 1..=chars {
        let mut c = ComplexMatrix::zeros(dim, dim);
        for x in 0..nx {
            for y in 0..ny {
                let w = game.weight(x, y) * scale * parity(s & lf.target[x * ny + y]);
                c[(x, nx + y)] = C64::new(w / 2.0, 0.0);
                c[(nx + y, x)] = C64::new(w / 2.0, 0.0);
            }
        }
        objective.push(c);
        for i in 0..dim {
            constraints.push(Constraint::new().re(s - 1, i, i, 1.0).eq(1.0));
        }
    }
    let problem = SdpProblem::new(objective, constraints, Sense::Maximize)?;
    let sol = solve(&problem, tol, DEFAULT_MAX_ITER).require_optimal()?;

    // Dual certificate per block: Diag(y) + lambda I >= C.
    let mut upper = scale;
    for (s, c) in problem.objective().iter().enumerate() {
        let y = &sol.dual[s * dim..(s + 1) * dim];
        let mut slack = c.clone();
        for (i, &yi) in y.iter().enumerate() {
            slack[(i, i)] -= C64::new(yi, 0.0);
        }
        let lambda = max_eigenvalue(&slack).max(0.0);
        upper += y.iter().sum::<f64>() + dim as f64 * lambda;
    }
    Ok(Npa1 {
        value: upper,
        primal: scale + sol.value,
        matrix_dim: dim,
        method: Npa1Method::Fourier,
        iterations: sol.iterations,
        status: sol.status,
    })
}

struct Layout {
    alice: Vec<Vec<usize>>,
    bob: Vec<Vec<usize>>,
    dim: usize,
}

impl Layout {
    fn new(game: &TwoPlayerGame) -> Layout {
        let mut next = 1;
        let mut block = |inputs: usize, outputs: usize| -> Vec<Vec<usize>> {
            (0..inputs)
                .map(|_| {
                    (0..outputs - 1)
                        .map(|_| {
                            next += 1;
                            next - 1
                        })
                        .collect()
                })
                .collect()
        };
        let alice = block(game.alice_inputs(), game.alice_outputs());
        let bob = block(game.bob_inputs(), game.bob_outputs());
        Layout {
            alice,
            bob,
            dim: next,
        }
    }

    /// Coefficients of outcome `k` of a measurement whose explicit outcomes
    /// sit at `indices`.
    fn operator(indices: &[usize], k: usize) -> Vec<(usize, f64)> {
        if k < indices.len() {
            vec![(indices[k], 1.0)]
        } else {
            let mut v = vec![(0, 1.0)];
            v.extend(indices.iter().map(|&i| (i, -1.0)));
            v
        }
    }
}

/// Level-1 relaxation over the full moment matrix.
pub fn npa1_full(game: &TwoPlayerGame, tol: f64) -> Result<Npa1> {
    let layout = Layout::new(game);
    let n = layout.dim;
    let mut c = ComplexMatrix::zeros(n, n);
    for x in 0..game.alice_inputs() {
        for y in 0..game.bob_inputs() {
            let w = game.weight(x, y);
            if w == 0.0 {
                continue;
            }
            for a in 0..game.alice_outputs() {
                let u = Layout::operator(&layout.alice[x], a);
                for b in 0..game.bob_outputs() {
                    if !game.wins(x, y, a, b) {
                        continue;
                    }
                    let v = Layout::operator(&layout.bob[y], b);
                    for &(i, ci) in &u {
                        for &(j, cj) in &v {
                            let t = C64::new(w * ci * cj / 2.0, 0.0);
                            c[(i, j)] += t;
                            c[(j, i)] += t;
                        }
                    }
                }
            }
        }
    }

    let mut cons = vec![Constraint::new().re(0, 0, 0, 1.0).eq(1.0)];
    // Projectors: <P P> = <P>, and <P> real.
    for i in 1..n {
        cons.push(Constraint::new().re(0, i, i, 1.0).re(0, 0, i, -1.0).eq(0.0));
        cons.push(Constraint::new().im(0, 0, i, 1.0).eq(0.0));
    }
    // Orthogonal outcomes of one measurement.
    for group in layout.alice.iter().chain(&layout.bob) {
        for (k, &i) in group.iter().enumerate() {
            for &j in &group[k + 1..] {
                cons.push(Constraint::new().re(0, i, j, 1.0).eq(0.0));
                cons.push(Constraint::new().im(0, i, j, 1.0).eq(0.0));
            }
        }
    }
    // Alice and Bob commute, so their joint moments are real.
    for &i in layout.alice.iter().flatten() {
        for &j in layout.bob.iter().flatten() {
            cons.push(Constraint::new().im(0, i, j, 1.0).eq(0.0));
        }
    }
    let problem = SdpProblem::new(vec![c], cons, Sense::Maximize)?;
    let sol = solve(&problem, tol, DEFAULT_MAX_ITER);
    if !sol.is_optimal() {
        return Err(Error::Solver {
            status: sol.status,
            iterations: sol.iterations,
        });
    }
    Ok(Npa1 {
        value: sol.value.max(sol.dual_value),
        primal: sol.value,
        matrix_dim: n,
        method: Npa1Method::Full,
        iterations: sol.iterations,
        status: sol.status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::bounds::TSIRELSON;
    use crate::games::game::{make_chsh, make_chsh_n, make_weighted_chsh};

    #[test]
    fn chsh_both_paths() {
        let fast = npa1(&make_chsh(), 1e-7).unwrap();
        assert_eq!(fast.method, Npa1Method::Fourier);
        assert!((fast.value - TSIRELSON).abs() < 1e-5, "{}", fast.value);
        let full = npa1_full(&make_chsh(), 1e-7).unwrap();
        assert!((full.value - TSIRELSON).abs() < 1e-5, "{}", full.value);
    }

    #[test]
    fn chsh2_closed_form() {
        let v = npa1_value(&make_chsh_n(2), 1e-7).unwrap();
        let expected = 0.25 * (1.0 + 3.0 * std::f64::consts::FRAC_1_SQRT_2);
        assert!((v - expected).abs() < 1e-5, "{v} vs {expected}");
    }

    #[test]
    fn weighted_chsh_full_agrees() {
        let g = make_weighted_chsh(0.75).unwrap();
        let a = npa1(&g, 1e-7).unwrap();
        let b = npa1_full(&g, 1e-7).unwrap();
        assert!(
            (a.value - b.value).abs() < 1e-4,
            "{} vs {}",
            a.value,
            b.value
        );
    }
}
