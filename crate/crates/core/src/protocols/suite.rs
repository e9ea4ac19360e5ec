//! Every protocol check in one report.

use serde::{Deserialize, Serialize};

use super::cheats::{coinflip_from_ot, ot_cheat_probs, CheatReport, CoinFlip, CHECK_TOL};
use super::commitment::{
    bc_from_ot, ot_tradeoff_bound, secure_ot_ceiling, tensor_power_value, BoundMode, CeilingMode,
    Commitment, TradeoffBound,
};
use super::ot::{ot_from_encoding, OtInstance, OtMode};
use crate::encodings::canonical_bbbw_encoding;
use crate::encodings::learning::BoundCheck;
use crate::encodings::random::random_xor_hiding_encoding;
use crate::error::Result;
use crate::games::bounds::TSIRELSON;
use crate::quantum::random::derived_rng;

/// Published values of the two tradeoff bounds and how close we must land.
pub const BIT_TRADEOFF: f64 = 0.599;
pub const STRING_TRADEOFF: f64 = 0.5852;
pub const TRADEOFF_TOL: f64 = 5e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ceiling {
    pub n: usize,
    pub string: f64,
    pub tensor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub index: usize,
    pub local_dim: usize,
    pub honest_p: f64,
    pub cheats: CheatReport,
    pub coinflip: CoinFlip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OtSuite {
    pub seed: u64,
    pub bbbw: OtInstance,
    pub cheats: CheatReport,
    pub coinflip: CoinFlip,
    pub commitment: Commitment,
    pub bit_bound: TradeoffBound,
    pub string_bound: TradeoffBound,
    pub ceilings: Vec<Ceiling>,
    pub instances: Vec<InstanceReport>,
    pub checks: Vec<BoundCheck>,
    pub pass: bool,
}

fn at_most(name: impl Into<String>, lhs: f64, rhs: f64) -> BoundCheck {
    BoundCheck {
        name: name.into(),
        lhs,
        rhs,
        ok: lhs <= rhs + CHECK_TOL,
    }
}

fn near(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> BoundCheck {
    BoundCheck {
        name: name.into(),
        lhs,
        rhs,
        ok: (lhs - rhs).abs() <= tol,
    }
}

/// BBBW transfer, its coin flip and commitment, both tradeoff bounds,
/// ceilings for `n = 1..=5`, and `instances` bit transfers built from
/// random XOR-hiding encodings drawn from `seed`.
pub fn ot_suite(seed: u64, instances: usize, tol: f64) -> Result<OtSuite> {
    let bbbw = ot_from_encoding(&canonical_bbbw_encoding(), OtMode::Bit, tol)?;
    let cheats = ot_cheat_probs(&bbbw, tol)?;
    let coinflip = coinflip_from_ot(&bbbw, tol)?;
    let commitment = bc_from_ot(&bbbw, BoundMode::Bit, tol)?;
    let bit_bound = ot_tradeoff_bound(BoundMode::Bit);
    let string_bound = ot_tradeoff_bound(BoundMode::String);
    let ceilings = (1..=5)
        .map(|n| {
            Ok(Ceiling {
                n,
                string: secure_ot_ceiling(n, CeilingMode::String)?,
                tensor: secure_ot_ceiling(n, CeilingMode::Tensor)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut checks = vec![
        near(
            "bbbw honest_p = cos^2(pi/8)",
            bbbw.honest_p,
            TSIRELSON,
            1e-9,
        ),
        at_most(
            "bbbw honest_p <= a_ot (sqrt(b_ot) + 1)",
            bbbw.honest_p,
            cheats.a_ot * (cheats.b_ot.sqrt() + 1.0),
        ),
        at_most(
            "bbbw p/2 <= a_cf b_cf",
            bbbw.honest_p / 2.0,
            coinflip.product,
        ),
        near(
            "bit tradeoff bound",
            bit_bound.bound,
            BIT_TRADEOFF,
            TRADEOFF_TOL,
        ),
        near(
            "string tradeoff bound",
            string_bound.bound,
            STRING_TRADEOFF,
            TRADEOFF_TOL,
        ),
        near(
            "ceiling(1) = cos^2(pi/8)",
            ceilings[0].string,
            TSIRELSON,
            1e-12,
        ),
    ];
    for c in &ceilings {
        checks.push(near(
            format!("tensor ceiling({}) = ceiling(1)^{}", c.n, c.n),
            c.tensor,
            tensor_power_value(TSIRELSON, c.n),
            0.0,
        ));
    }

    let mut reports = Vec::with_capacity(instances);
    for i in 0..instances {
        let mut rng = derived_rng(seed, i as u64);
        let local_dim = 2 + i % 3;
        let enc = random_xor_hiding_encoding(1, local_dim, &mut rng)?;
        let ot = ot_from_encoding(&enc, OtMode::Bit, tol)?;
        let cheats = ot_cheat_probs(&ot, tol)?;
        let coinflip = coinflip_from_ot(&ot, tol)?;
        checks.push(at_most(
            format!("instance {i}: honest_p <= a_ot (sqrt(b_ot) + 1)"),
            ot.honest_p,
            cheats.a_ot * (cheats.b_ot.sqrt() + 1.0),
        ));
        checks.push(at_most(
            format!("instance {i}: p/2 <= a_cf b_cf"),
            ot.honest_p / 2.0,
            coinflip.product,
        ));
        reports.push(InstanceReport {
            index: i,
            local_dim,
            honest_p: ot.honest_p,
            cheats,
            coinflip,
        });
    }
    let pass = checks.iter().all(|c| c.ok);
    Ok(OtSuite {
        seed,
        bbbw,
        cheats,
        coinflip,
        commitment,
        bit_bound,
        string_bound,
        ceilings,
        instances: reports,
        checks,
        pass,
    })
}
