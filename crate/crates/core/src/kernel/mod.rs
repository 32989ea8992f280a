//! Fixed-point decoding kernel: quantized soft values, pooled path
//! memory, multi-bit node decisions, and the sub-process executor.
//!
//! # Example
//!
//! ```
//! use polar_core::kernel::{f_minus, f_plus, QLlr};
//!
//! let a = QLlr::from_llr(1.0);
//! let b = QLlr::from_llr(-2.5);
//! assert_eq!(f_minus(a, b).to_llr(), -1.0);
//! assert_eq!(f_plus(a, b, false).to_llr(), -1.5);
//! ```

pub mod exec;
pub mod memory;
pub mod multibit;
pub mod qllr;

pub use exec::{run_sc, run_sc_with, DecodePath, DecodeTrace, ReplayError, SpExecutor};
pub use memory::{llr_banked, MemPool, MemSnapshot, PathMem};
pub use multibit::{
    disagreement_cost, enumerate_candidates, multibit_decide, Candidate, Decision,
};
pub use qllr::{combine_beta, f_minus, f_plus, pm_update, LengthMismatch, Pm, QLlr};
