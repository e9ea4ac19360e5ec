//! Cheating probabilities for the masked OT and the coin flip built on it.

use serde::{Deserialize, Serialize};

use super::ot::{LearnCache, OtInstance, OtMode};
use crate::error::{Error, Result};

/// Slack on the inequality checks.
pub const CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheatReport {
    /// Alice learns Bob's choice. Exactly one half: Bob never speaks.
    pub a_ot: f64,
    /// Bob learns `z0 xor z1`.
    pub b_ot: f64,
    /// Bob learns both outputs.
    pub b_pair: f64,
    /// `a_ot * (sqrt(b_ot) + 1) / 2`, the coin-flip cheating product.
    pub kitaev_product: f64,
    /// `honest_p <= a_ot (sqrt(b_ot) + 1)`. Only meaningful for bit OT.
    pub theorem2_ok: Option<bool>,
}

pub fn ot_cheat_probs(ot: &OtInstance, tol: f64) -> Result<CheatReport> {
    let mut cache = LearnCache::new(&ot.encoding, tol);
    let a_ot = 0.5;
    let b_ot = cache.masked(|z0, z1| z0 ^ z1)?;
    let b_pair = cache.masked(|z0, z1| (z0 << 32) | z1)?;
    let b_cf = b_cf_ceiling(b_ot);
    let theorem2_ok =
        (ot.mode == OtMode::Bit).then(|| ot.honest_p <= a_ot * (b_ot.sqrt() + 1.0) + CHECK_TOL);
    Ok(CheatReport {
        a_ot,
        b_ot,
        b_pair,
        kitaev_product: a_ot * b_cf,
        theorem2_ok,
    })
}

fn b_cf_ceiling(b_ot: f64) -> f64 {
    ((b_ot.sqrt() + 1.0) / 2.0).min(1.0)
}

/// Coin flip: run the OT, Alice announces a random bit `d`, Bob reveals
/// `(b, z_b)`, and the coin is `b xor d` unless Alice catches an
/// inconsistency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoinFlip {
    pub honest_abort: f64,
    pub a_cf: f64,
    /// Ceiling `(sqrt(b_ot) + 1) / 2` on Bob's bias, not an explicit attack.
    pub b_cf: f64,
    pub product: f64,
    /// `a_cf * b_cf >= honest_p / 2`.
    pub kitaev_ok: bool,
}

pub fn coinflip_from_ot(ot: &OtInstance, tol: f64) -> Result<CoinFlip> {
    if ot.mode != OtMode::Bit {
        return Err(Error::Unsupported(format!(
            "coin flipping from {:?} OT",
            ot.mode
        )));
    }
    let cheats = ot_cheat_probs(ot, tol)?;
    let a_cf = cheats.a_ot;
    let b_cf = b_cf_ceiling(cheats.b_ot);
    let product = a_cf * b_cf;
    Ok(CoinFlip {
        honest_abort: 1.0 - ot.honest_p,
        a_cf,
        b_cf,
        product,
        kitaev_ok: product >= ot.honest_p / 2.0 - CHECK_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encodings::canonical_bbbw_encoding;
    use crate::encodings::encoding::XorEncoding;
    use crate::games::bounds::TSIRELSON;
    use crate::protocols::ot::ot_from_encoding;
    use crate::quantum::states::DensityOperator;

    #[test]
    fn bbbw_is_tight() {
        let ot = ot_from_encoding(&canonical_bbbw_encoding(), OtMode::Bit, 1e-8).unwrap();
        let r = ot_cheat_probs(&ot, 1e-8).unwrap();
        assert_eq!(r.a_ot, 0.5);
        assert!((r.b_ot - 0.5).abs() < 1e-9);
        assert_eq!(r.theorem2_ok, Some(true));
        assert!((0.5 * (0.5f64.sqrt() + 1.0) - TSIRELSON).abs() < 1e-15);
        let cf = coinflip_from_ot(&ot, 1e-8).unwrap();
        assert!((cf.b_cf - TSIRELSON).abs() < 1e-9);
        assert!((cf.product - TSIRELSON / 2.0).abs() < 1e-9);
        assert!(cf.kitaev_ok);
    }

    #[test]
    fn uninformative_encoding_has_slack() {
        let enc = XorEncoding::uniform(1, |_, _| DensityOperator::maximally_mixed(2)).unwrap();
        let ot = ot_from_encoding(&enc, OtMode::Bit, 1e-8).unwrap();
        assert!((ot.honest_p - 0.5).abs() < 1e-12);
        let cf = coinflip_from_ot(&ot, 1e-8).unwrap();
        assert!((cf.honest_abort - 0.5).abs() < 1e-12);
        assert!(cf.product > ot.honest_p / 2.0);
        let r = ot_cheat_probs(&ot, 1e-8).unwrap();
        assert!((r.b_pair - 0.25).abs() < 1e-9);
    }

    #[test]
    fn string_mode_has_no_coin_flip() {
        let enc = XorEncoding::uniform(2, |_, _| DensityOperator::maximally_mixed(2)).unwrap();
        let ot = ot_from_encoding(&enc, OtMode::String, 1e-8).unwrap();
        assert!(matches!(
            coinflip_from_ot(&ot, 1e-8),
            Err(Error::Unsupported(_))
        ));
        assert_eq!(ot_cheat_probs(&ot, 1e-8).unwrap().theorem2_ok, None);
    }
}
