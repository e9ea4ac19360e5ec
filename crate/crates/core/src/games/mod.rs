//! CHSH-family non-local games, strategies and see-saw optimisation.

pub mod bounds;
pub mod game;
pub mod reductions;
pub mod seesaw;
pub mod strategy;

pub use bounds::{
    conjectured_value_chsh_n, guessing_lower_bound, parallel_repetition_value, upper_bound_chsh_n,
    TSIRELSON,
};
pub use game::{make_chsh, make_chsh_n, make_chsh_tensor, make_weighted_chsh, TwoPlayerGame};
pub use reductions::{encoding_from_strategy, strategy_from_encoding};
pub use seesaw::{seesaw, SeesawResult};
pub use strategy::{
    canonical_chsh_strategy, evaluate, tensor_power, tensor_strategy, QuantumStrategy,
};
