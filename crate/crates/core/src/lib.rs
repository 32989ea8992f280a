//! Polar code toolkit built around one shared successive-cancellation core.
//!
//! The crate provides code construction ([`code`]), decode-tree partitioning
//! into sub-processes ([`tree`]), the fixed-point SC kernel ([`kernel`]),
//! serial list decoding with CRC selection ([`list`]), sequential stack
//! decoding with threshold retracing ([`fano`]) and a reproducible AWGN
//! simulation harness with a cycle-cost model ([`sim`]).

pub mod code;
pub mod fano;
pub mod kernel;
pub mod list;
pub mod outcome;
pub mod sim;
pub mod tree;

pub use code::{CodeSpec, CrcSpec};
pub use outcome::{DecodeMetrics, DecodeOutcome, StageTag};
