//! Oblivious transfer, coin flipping and bit commitment built from
//! encodings, with their cheating probabilities.

pub mod cheats;
pub mod commitment;
pub mod ot;
pub mod suite;

pub use cheats::{coinflip_from_ot, ot_cheat_probs, CheatReport, CoinFlip};
pub use commitment::{
    bc_from_ot, ot_tradeoff_bound, ot_tradeoff_grid, secure_ot_ceiling, tensor_power_value,
    BoundMode, CeilingMode, Commitment, TradeoffBound, TradeoffCurve,
};
pub use ot::{encoding_from_ot, ot_from_encoding, Mask, OtInstance, OtMode};
pub use suite::{ot_suite, OtSuite};
