//! Bit commitment from string OT, and the resulting cheating tradeoffs.

use serde::{Deserialize, Serialize};

use super::cheats::ot_cheat_probs;
use super::ot::OtInstance;
use crate::error::{Error, Result};
use crate::games::bounds::TSIRELSON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMode {
    Bit,
    String,
}

/// Point on the bit-commitment cheating curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffCurve {
    pub t: f64,
    pub a_bc: f64,
    pub b_bc: f64,
}

impl TradeoffCurve {
    pub fn at(t: f64) -> Self {
        let s = 1.0 - (1.0 - std::f64::consts::FRAC_1_SQRT_2) * t;
        TradeoffCurve {
            t,
            a_bc: 0.5 + t / 2.0,
            b_bc: s * s,
        }
    }
}

/// Lower bound on Bob's OT cheating given his commitment cheating `b`.
pub fn learning_floor(mode: BoundMode, b: f64) -> f64 {
    let s = 2.0 * b - 1.0;
    match mode {
        BoundMode::Bit => s * s,
        BoundMode::String => b * s * s,
    }
}

fn objective(mode: BoundMode, t: f64) -> f64 {
    let c = TradeoffCurve::at(t);
    c.a_bc.max(learning_floor(mode, c.b_bc))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffBound {
    pub mode: BoundMode,
    pub bound: f64,
    pub t_star: f64,
}

/// `min_t max{A(t), g(B(t))}` over `t` in `[0, 1]`.
///
/// The first term increases in `t` and the second decreases, so the
/// objective is unimodal and golden-section search converges to the
/// crossing point.
pub fn ot_tradeoff_bound(mode: BoundMode) -> TradeoffBound {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (objective(mode, x1), objective(mode, x2));
    while hi - lo > 1e-13 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(mode, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(mode, x2);
        }
    }
    let t_star = 0.5 * (lo + hi);
    TradeoffBound {
        mode,
        bound: objective(mode, t_star),
        t_star,
    }
}

/// Same minimax by brute force on a uniform grid.
pub fn ot_tradeoff_grid(mode: BoundMode, step: f64) -> TradeoffBound {
    let steps = (1.0 / step).round() as usize;
    let (mut bound, mut t_star) = (f64::INFINITY, 0.0);
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        let v = objective(mode, t);
        if v < bound {
            bound = v;
            t_star = t;
        }
    }
    TradeoffBound {
        mode,
        bound,
        t_star,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Commitment {
    pub a_bc: f64,
    /// Largest commitment bias for Bob compatible with his OT cheating
    /// probability, i.e. the inverse of the learning floor on `[1/2, 1]`.
    pub b_bc_bound: f64,
}

/// Inverts [`learning_floor`] on `[1/2, 1]` by bisection.
pub fn invert_learning_floor(mode: BoundMode, value: f64) -> f64 {
    if value >= 1.0 {
        return 1.0;
    }
    if value <= 0.0 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.5, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if learning_floor(mode, mid) <= value {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Commit by running the OT with Bob's bit as his choice; reveal by sending
/// `(b, z_b)`. In bit mode Bob's relevant OT attack is learning the XOR, in
/// string mode learning both strings.
pub fn bc_from_ot(ot: &OtInstance, mode: BoundMode, tol: f64) -> Result<Commitment> {
    let r = ot_cheat_probs(ot, tol)?;
    let b = match mode {
        BoundMode::Bit => r.b_ot,
        BoundMode::String => r.b_pair,
    };
    Ok(Commitment {
        a_bc: r.a_ot,
        b_bc_bound: invert_learning_floor(mode, b),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CeilingMode {
    String,
    Tensor,
}

/// `value^n` as `n` left-to-right multiplications. Unlike `powi`, the
/// result does not depend on how the compiler evaluates it.
pub fn tensor_power_value(value: f64, n: usize) -> f64 {
    std::iter::repeat_n(value, n).fold(1.0, |acc, v| acc * v)
}

/// Largest correctness a secure OT can have.
pub fn secure_ot_ceiling(n: usize, mode: CeilingMode) -> Result<f64> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    if n == 1 {
        return Ok(TSIRELSON);
    }
    Ok(match mode {
        CeilingMode::String => 0.5 + 2f64.powf(-((n + 1) as f64) / 2.0),
        CeilingMode::Tensor => tensor_power_value(TSIRELSON, n),
    })
}
