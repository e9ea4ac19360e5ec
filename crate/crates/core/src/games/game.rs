use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A two-player non-local game with finite alphabets. The winning predicate
/// is stored as a table indexed by `(x, y, a, b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPlayerGame {
    p_alice: Vec<f64>,
    p_bob: Vec<f64>,
    alice_outputs: usize,
    bob_outputs: usize,
    wins: Vec<bool>,
}

/// `a xor b = f(x, y)` over `n`-bit outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm {
    pub bits: usize,
    /// `f` indexed by `x * |Y| + y`.
    pub target: Vec<usize>,
}

fn check_distribution(p: &[f64]) -> Result<()> {
    let total: f64 = p.iter().sum();
    if p.is_empty()
        || p.iter().any(|v| !(v.is_finite() && *v >= 0.0))
        || (total - 1.0).abs() > 1e-12
    {
        return Err(Error::BadDistribution(total));
    }
    Ok(())
}

/// Number of bits used to label `n` outcomes.
pub fn label_bits(n: usize) -> usize {
    let mut b = 0;
    while (1usize << b) < n {
        b += 1;
    }
    b.max(1)
}

impl TwoPlayerGame {
    pub fn new(
        p_alice: Vec<f64>,
        p_bob: Vec<f64>,
        alice_outputs: usize,
        bob_outputs: usize,
        predicate: impl Fn(usize, usize, usize, usize) -> bool,
    ) -> Result<Self> {
        check_distribution(&p_alice)?;
        check_distribution(&p_bob)?;
        if alice_outputs == 0 || bob_outputs == 0 {
            return Err(Error::Precondition("empty output alphabet".into()));
        }
        let mut wins =
            Vec::with_capacity(p_alice.len() * p_bob.len() * alice_outputs * bob_outputs);
        for x in 0..p_alice.len() {
            for y in 0..p_bob.len() {
                for a in 0..alice_outputs {
                    for b in 0..bob_outputs {
                        wins.push(predicate(x, y, a, b));
                    }
                }
            }
        }
        Ok(TwoPlayerGame {
            p_alice,
            p_bob,
            alice_outputs,
            bob_outputs,
            wins,
        })
    }

    pub fn alice_inputs(&self) -> usize {
        self.p_alice.len()
    }

    pub fn bob_inputs(&self) -> usize {
        self.p_bob.len()
    }

    pub fn alice_outputs(&self) -> usize {
        self.alice_outputs
    }

    pub fn bob_outputs(&self) -> usize {
        self.bob_outputs
    }

    pub fn p_alice(&self) -> &[f64] {
        &self.p_alice
    }

    pub fn p_bob(&self) -> &[f64] {
        &self.p_bob
    }

    /// `p(x) p(y)`.
    pub fn weight(&self, x: usize, y: usize) -> f64 {
        self.p_alice[x] * self.p_bob[y]
    }

    pub fn wins(&self, x: usize, y: usize, a: usize, b: usize) -> bool {
        let idx = ((x * self.bob_inputs() + y) * self.alice_outputs + a) * self.bob_outputs + b;
        self.wins[idx]
    }

    /// Value of the deterministic strategy `a = alice[x]`, `b = bob[y]`.
    pub fn deterministic_value(&self, alice: &[usize], bob: &[usize]) -> f64 {
        let mut v = 0.0;
        for (x, &a) in alice.iter().enumerate() {
            for (y, &b) in bob.iter().enumerate() {
                if self.wins(x, y, a, b) {
                    v += self.weight(x, y);
                }
            }
        }
        v
    }

    /// Detects games of the form `a xor b = f(x, y)` with `2^n` outputs on
    /// both sides.
    pub fn linear_form(&self) -> Option<LinearForm> {
        let k = self.alice_outputs;
        if k != self.bob_outputs || !k.is_power_of_two() || k < 2 {
            return None;
        }
        let mut target = Vec::with_capacity(self.alice_inputs() * self.bob_inputs());
        for x in 0..self.alice_inputs() {
            for y in 0..self.bob_inputs() {
                let winners: Vec<usize> = (0..k).filter(|&b| self.wins(x, y, 0, b)).collect();
                if winners.len() != 1 {
                    return None;
                }
                let f = winners[0];
                for a in 0..k {
                    for b in 0..k {
                        if self.wins(x, y, a, b) != (a ^ b == f) {
                            return None;
                        }
                    }
                }
                target.push(f);
            }
        }
        Some(LinearForm {
            bits: k.trailing_zeros() as usize,
            target,
        })
    }
}

fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

pub fn make_chsh() -> TwoPlayerGame {
    make_chsh_n(1)
}

/// Alice gets `x` in `{0,1}^n`, Bob a bit `y`; they win iff
/// `a_i xor b_i = y x_i` for every `i`.
pub fn make_chsh_n(n: usize) -> TwoPlayerGame {
    assert!(n >= 1, "CHSH_n needs n >= 1");
    let k = 1usize << n;
    TwoPlayerGame::new(uniform(k), uniform(2), k, k, |x, y, a, b| {
        a ^ b == if y == 1 { x } else { 0 }
    })
    .expect("uniform distributions")
}

/// `n` parallel CHSH games, won iff every coordinate is won.
pub fn make_chsh_tensor(n: usize) -> TwoPlayerGame {
    assert!(n >= 1, "CHSH^n needs n >= 1");
    let k = 1usize << n;
    TwoPlayerGame::new(uniform(k), uniform(k), k, k, |x, y, a, b| a ^ b == x & y)
        .expect("uniform distributions")
}

/// CHSH with Bob's input distributed as `(q, 1 - q)`.
pub fn make_weighted_chsh(q: f64) -> Result<TwoPlayerGame> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Precondition(format!("q = {q} outside [0, 1]")));
    }
    TwoPlayerGame::new(uniform(2), vec![q, 1.0 - q], 2, 2, |x, y, a, b| {
        a ^ b == x & y
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn special_cases_coincide() {
        assert_eq!(make_chsh_n(1), make_chsh());
        assert_eq!(make_chsh_tensor(1), make_chsh());
        assert_eq!(make_weighted_chsh(0.5).unwrap(), make_chsh());
        assert_ne!(make_weighted_chsh(0.25).unwrap(), make_chsh());
    }

    #[test]
    fn linear_structure() {
        let g = make_chsh_n(2);
        let lf = g.linear_form().unwrap();
        assert_eq!(lf.bits, 2);
        assert_eq!(lf.target[3 * 2 + 1], 3);
        assert_eq!(lf.target[3 * 2], 0);
        let odd = TwoPlayerGame::new(uniform(2), uniform(2), 2, 2, |_, _, a, b| a == 0 && b == 0)
            .unwrap();
        assert!(odd.linear_form().is_none());
    }

    #[test]
    fn classical_chsh_value() {
        assert_eq!(make_chsh().deterministic_value(&[0, 0], &[0, 0]), 0.75);
    }

    #[test]
    fn bad_weights_rejected() {
        assert!(make_weighted_chsh(1.5).is_err());
    }
}
