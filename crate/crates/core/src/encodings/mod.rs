//! Quantum encodings of bit and string pairs and what can be learned from them.

pub mod encoding;
pub mod learning;
pub mod random;
pub mod sweep;

pub use encoding::{EncodingEntry, XorEncoding};
pub use learning::{
    hides_xor, learn_value_prob, optimal_decoder, require_hiding, sequential_xor_strategy,
    theorem1_check, weighted_decoding_bound, BoundCheck, Decoder, LearnValue, LearningReport,
    Target,
};
pub use sweep::{learning_sweep, LearningSweep, LearningSweepConfig};

use crate::games::game::make_chsh;
use crate::games::reductions::encoding_from_strategy;
use crate::games::strategy::canonical_chsh_strategy;

/// The four qubit states Bob holds after Alice measures her half of the
/// canonical CHSH strategy. Hides the XOR and decodes either bit with
/// probability `cos^2(pi/8)`.
pub fn canonical_bbbw_encoding() -> XorEncoding {
    encoding_from_strategy(&canonical_chsh_strategy(), &make_chsh())
        .expect("canonical strategy is valid")
}
