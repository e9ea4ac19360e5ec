//! Numerical laboratory for XOR-hiding quantum encodings, CHSH-family
//! non-local games and oblivious-transfer cheating bounds.

pub mod encodings;
pub mod error;
pub mod games;
pub mod protocols;
pub mod quantum;
pub mod schema;
pub mod sdp;
pub mod sequential;
pub mod table;

pub use encodings::{canonical_bbbw_encoding, XorEncoding};
pub use error::{Error, Result};
pub use games::{QuantumStrategy, TwoPlayerGame};
pub use protocols::{OtInstance, OtMode};
pub use quantum::{ComplexMatrix, DensityOperator, Povm, Projector, PureState, SplitSystem, C64};
pub use schema::SCHEMA;
