//! Outer BCH layer for bit-exact recovery of binary messages.

pub mod code;
pub mod gf;
pub mod perm;
pub mod pipeline;

pub use code::{BchCode, DEFAULT_PRIMITIVE_POLY_M7};
pub use gf::GfContext;
pub use perm::Permutation;
pub use pipeline::{
    failure_prob, inject_flips, post_decode, post_decode_detailed, pre_encode, DecodeReport, FailureModel, FlipPattern,
    PipelineParams,
};
