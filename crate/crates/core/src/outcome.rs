//! Decode results and the per-decode effort metrics.

/// Which engine produced the final answer of a (possibly staged) decode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageTag {
    /// Plain successive cancellation.
    Sc,
    /// List decoding (directly, or as the fallback stage).
    Scl,
    /// Stack-based sequential decoding.
    Fano,
}

/// Effort counters accumulated over one decode call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeMetrics {
    /// Sub-processes executed (per path set, not per path).
    pub sp_count: u64,
    /// Estimated hardware cycles for the whole call.
    pub cycles: u64,
    /// Threshold-exceeded roll-back events (sequential decoding only).
    pub retraces: u64,
    /// Final candidate paths submitted to the CRC check.
    pub paths_checked: u64,
    /// Stack entries evicted because the candidate stack was full.
    pub stack_drops: u64,
    /// Stage that produced the returned payload.
    pub stage: StageTag,
}

impl DecodeMetrics {
    pub fn new(stage: StageTag) -> Self {
        DecodeMetrics {
            sp_count: 0,
            cycles: 0,
            retraces: 0,
            paths_checked: 0,
            stack_drops: 0,
            stage,
        }
    }
}

/// The result of decoding one frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    /// Recovered payload (information bits with any checksum stripped).
    pub payload: Vec<bool>,
    /// Whether the checksum of the returned path verified (vacuously true
    /// for codes without one).
    pub crc_ok: bool,
    /// Set by the simulation harness when `payload` differs from the
    /// transmitted payload; decoders themselves leave it false.
    pub block_error: bool,
    /// The full decided input vector, frozen positions included.
    pub u: Vec<bool>,
    pub metrics: DecodeMetrics,
}
