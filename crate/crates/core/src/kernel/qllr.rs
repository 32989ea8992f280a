//! Saturating fixed-point log-likelihood arithmetic.
//!
//! Soft values are 6-bit sign-magnitude LLRs with one fractional bit: step
//! 0.5, range [−15.5, +15.5].  Internally a [`QLlr`] stores the value in
//! half-LLR units as an `i8` in [−31, 31].  All arithmetic saturates and
//! never wraps.  Path metrics ([`Pm`]) accumulate magnitudes of soft values
//! that a decision disagrees with, in the same half-unit scale.
//!
//! # Example
//! ```
//! use polar_core::kernel::{f_minus, f_plus, QLlr};
//!
//! let a = QLlr::from_llr(4.0);
//! let b = QLlr::from_llr(-3.0);
//! assert_eq!(f_minus(a, b).to_llr(), -3.0);
//! assert_eq!(f_plus(a, b, false).to_llr(), 1.0);
//! ```

/// A quantized LLR: half-unit steps, saturating at ±15.5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Hash)]
pub struct QLlr(i8);

impl QLlr {
    /// Largest representable raw magnitude (I.e. LLR +15.5).
    pub const MAX_RAW: i8 = 31;
    pub const ZERO: QLlr = QLlr(0);
    pub const MAX: QLlr = QLlr(Self::MAX_RAW);
    pub const MIN: QLlr = QLlr(-Self::MAX_RAW);

    /// Quantizes a real-valued LLR: round to the nearest half step, ties
    /// away from zero, then saturate.
    pub fn from_llr(llr: f64) -> QLlr {
        let scaled = (llr * 2.0).round();
        QLlr(scaled.clamp(-(Self::MAX_RAW as f64), Self::MAX_RAW as f64) as i8)
    }

    /// Builds from a raw half-unit count, saturating out-of-range values.
    pub fn from_raw(raw: i32) -> QLlr {
        QLlr(raw.clamp(-(Self::MAX_RAW as i32), Self::MAX_RAW as i32) as i8)
    }

    /// Raw value in half-LLR units.
    pub fn raw(self) -> i8 {
        self.0
    }

    pub fn to_llr(self) -> f64 {
        self.0 as f64 * 0.5
    }

    /// Hard decision: 1 for negative soft values, 0 otherwise (ties to 0).
    pub fn hard(self) -> bool {
        self.0 < 0
    }

    /// Magnitude in half-LLR units.
    pub fn magnitude(self) -> u8 {
        self.0.unsigned_abs()
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn negate(self) -> QLlr {
        QLlr(-self.0)
    }
}

/// Check-node combination: sign-magnitude min of the two operands, the
/// min-sum stand-in for the exact soft-XOR rule (`sign(0)` counts as `+`).
pub fn f_minus(a: QLlr, b: QLlr) -> QLlr {
    let mag = a.magnitude().min(b.magnitude()) as i8;
    if (a.raw() < 0) != (b.raw() < 0) {
        QLlr(-mag)
    } else {
        QLlr(mag)
    }
}

/// Variable-node combination: `b + a` when the fed-back bit is 0, `b − a`
/// when it is 1, saturating at the representable range.
pub fn f_plus(a: QLlr, b: QLlr, beta: bool) -> QLlr {
    let a = a.raw() as i32;
    let b = b.raw() as i32;
    QLlr::from_raw(if beta { b - a } else { b + a })
}

/// Rebuilds a parent partial-sum vector from its two halves: the first half
/// is the elementwise XOR, the second half copies the right operand.
///
/// # Example
/// ```
/// use polar_core::kernel::combine_beta;
/// let out = combine_beta(&[true, false], &[false, true]).unwrap();
/// assert_eq!(out, vec![true, true, false, true]);
/// ```
pub fn combine_beta(left: &[bool], right: &[bool]) -> Result<Vec<bool>, LengthMismatch> {
    if left.len() != right.len() {
        return Err(LengthMismatch { left: left.len(), right: right.len() });
    }
    let mut out = Vec::with_capacity(left.len() * 2);
    out.extend(left.iter().zip(right).map(|(&l, &r)| l ^ r));
    out.extend_from_slice(right);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("partial-sum halves differ in length: {left} vs {right}")]
pub struct LengthMismatch {
    pub left: usize,
    pub right: usize,
}

/// Accumulated path-metric penalty in half-LLR units; lower is better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Hash)]
pub struct Pm(u64);

impl Pm {
    pub const ZERO: Pm = Pm(0);

    /// Converts an LLR-unit threshold or penalty to the internal scale,
    /// rounding to the nearest half unit (ties away from zero).
    pub fn from_llr(llr: f64) -> Pm {
        Pm((llr.max(0.0) * 2.0).round() as u64)
    }

    pub fn from_raw(raw: u64) -> Pm {
        Pm(raw)
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn to_llr(self) -> f64 {
        self.0 as f64 * 0.5
    }

    /// Adds the magnitude of a disagreeing soft value.
    pub fn penalized(self, alpha: QLlr) -> Pm {
        Pm(self.0 + alpha.magnitude() as u64)
    }

    pub fn add(self, other: Pm) -> Pm {
        Pm(self.0 + other.0)
    }
}

/// Penalty a decision pays at one position: the soft value's magnitude if
/// the decided bit disagrees with its hard decision, zero otherwise.
pub fn pm_update(pm: Pm, alpha: QLlr, decided: bool) -> Pm {
    if decided != alpha.hard() {
        pm.penalized(alpha)
    } else {
        pm
    }
}
