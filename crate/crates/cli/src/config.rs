//! Run configuration: the TOML-file form of every command-line option.
//!
//! A config file can stand in for the flags of any subcommand; explicit
//! flags override file values field by field. Parsing and serialization
//! round-trip losslessly, so a saved configuration reproduces a run
//! exactly.

use serde::{Deserialize, Serialize};

/// One fully specified run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// construct | encode | decode | sweep.
    pub command: String,
    pub code: CodeParams,
    pub decoder: DecoderParams,
    pub channel: ChannelParams,
    pub files: FileParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: String::new(),
            code: CodeParams::default(),
            decoder: DecoderParams::default(),
            channel: ChannelParams::default(),
            files: FileParams::default(),
        }
    }
}

/// Code construction parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CodeParams {
    /// Block length (power of two).
    pub n: usize,
    /// Payload bits per block, excluding any CRC.
    pub k: usize,
    /// CRC length in bits: 0 or 8.
    pub crc: usize,
    /// Information positions marked good; `None` picks a quarter of the
    /// information set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub good_count: Option<usize>,
}

impl Default for CodeParams {
    fn default() -> Self {
        CodeParams { n: 256, k: 120, crc: 8, good_count: None }
    }
}

impl CodeParams {
    /// Information bits including the CRC.
    pub fn k_total(&self) -> usize {
        self.k + self.crc
    }

    /// The good-bit count actually used.
    pub fn effective_good_count(&self) -> usize {
        self.good_count.unwrap_or(self.k_total() / 4)
    }
}

/// Decoder selection plus its tuning knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecoderParams {
    /// sc | scl | adaptive | fano.
    pub kind: String,
    /// Surviving paths `L` for list decoding.
    pub list: usize,
    /// CRC-checked final candidates `b`.
    pub checks: usize,
    /// Retrace cap for the sequential decoder; absent means unlimited.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mrt: Option<u64>,
    /// Starting threshold for the sequential decoder.
    pub t0: f64,
    /// Threshold step for the sequential decoder.
    pub delta: f64,
    /// Smallest multi-bit node stage.
    pub smin: usize,
    /// Largest multi-bit node stage.
    pub smax: usize,
}

impl Default for DecoderParams {
    fn default() -> Self {
        DecoderParams {
            kind: "sc".into(),
            list: 8,
            checks: 8,
            mrt: None,
            t0: 8.0,
            delta: 8.0,
            smin: 2,
            smax: 4,
        }
    }
}

/// Channel and stop-rule parameters for sweeps and noisy decodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelParams {
    /// Es/N0 list as `start:stop:step` or a single value.
    pub snr: String,
    pub seed: u64,
    /// Stop a sweep point after this many block errors…
    pub min_errors: u64,
    /// …or this many frames, whichever comes first.
    pub max_frames: u64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams { snr: "2.0".into(), seed: 1, min_errors: 100, max_frames: 100_000 }
    }
}

/// Input/output locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct FileParams {
    /// Frame file to read (encode/decode).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    /// Where results go: frames, a code file, or CSV.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// Existing code description to load instead of constructing one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code_file: Option<String>,
}

/// Expands `start:stop:step` (inclusive) or a single value.
pub fn parse_snr_list(text: &str) -> Result<Vec<f64>, String> {
    let bad = |why: &str| format!("malformed SNR list '{text}': {why}");
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    match parts.as_slice() {
        [single] => Ok(vec![num(single)?]),
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step <= 0.0 {
                return Err(bad("step must be positive"));
            }
            if stop < start {
                return Err(bad("stop is below start"));
            }
            let mut list = Vec::new();
            let mut i = 0u32;
            loop {
                let v = start + f64::from(i) * step;
                if v > stop + 1e-9 {
                    break;
                }
                list.push(v);
                i += 1;
            }
            Ok(list)
        }
        _ => Err(bad("expected start:stop:step")),
    }
}

/// Parses a retrace cap: a number, or `inf` for unlimited.
pub fn parse_mrt(text: &str) -> Result<Option<u64>, String> {
    match text.trim() {
        "inf" | "unlimited" => Ok(None),
        n => n
            .parse::<u64>()
            .map(Some)
            .map_err(|_| format!("malformed retrace cap '{text}': expected a count or 'inf'")),
    }
}
