//! Channel simulation and the Monte-Carlo block-error-rate engine.
//!
//! Frames are BPSK symbols over an AWGN channel: a codeword bit `x`
//! becomes `y = (1 - 2x) + n` with noise variance `σ² = 10^(-EsN0/10)`,
//! and the receiver forms `llr = 2y/σ²` before quantization. Every frame
//! draws its payload and its noise from counter-keyed generators, so any
//! frame of any sweep can be reproduced in isolation from `(seed,
//! frame_index)` alone. [`run_bler`] drives one decoder across an SNR
//! list until a stop rule is met and aggregates per-SNR statistics;
//! [`to_csv`] renders them with pinned formatting so reruns are
//! byte-identical. [`cycle_estimate`] replays a decode's effort counters
//! against a processing-element model: an f/g operation over `w` soft
//! values costs one cycle while `w` fits the narrow elements, otherwise
//! `ceil(w / pe_wide)`; decisions and sorter insertions cost one cycle
//! each.
//!
//! # Example
//!
//! ```
//! use polar_core::{CodeSpec, CrcSpec};
//! use polar_core::sim::{run_bler, DecoderConfig, DecoderKind, StopRule};
//!
//! let spec = CodeSpec::build(64, 24, CrcSpec::crc8(), 0).unwrap();
//! let decoder = DecoderConfig { kind: DecoderKind::Sc, smin: 2, smax: 4 };
//! let stop = StopRule { min_errors: 10, max_frames: 200 };
//! let stats = run_bler(&spec, &decoder, &[4.0], &stop, 7).unwrap();
//! assert_eq!(stats[0].esn0_db, 4.0);
//! assert!(stats[0].frames <= 200);
//! ```

use crate::code::CodeSpec;
use crate::fano::{FanoConfig, FanoDecoder, FanoError};
use crate::kernel::{run_sc_with, DecodeTrace, QLlr, SpExecutor};
use crate::list::{AdaptiveDecoder, ListConfig, ListError, ScListDecoder};
use crate::outcome::{DecodeOutcome, StageTag};
use crate::tree::TreeError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

/// Symbol mapping used on the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Modulation {
    #[default]
    Bpsk,
}

/// One simulated channel: an Es/N0 operating point and an RNG seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub esn0_db: f64,
    pub seed: u64,
    pub modulation: Modulation,
}

impl ChannelConfig {
    pub fn new(esn0_db: f64, seed: u64) -> Self {
        ChannelConfig { esn0_db, seed, modulation: Modulation::Bpsk }
    }

    /// Noise variance for unit symbol energy.
    pub fn noise_variance(&self) -> f64 {
        10f64.powf(-self.esn0_db / 10.0)
    }
}

const PAYLOAD_LANE: u64 = 0;
const NOISE_LANE: u64 = 1;

/// Counter-keyed generator: `lane` separates independent uses of the
/// same frame (payload draw vs. noise draw), `frame_index` selects the
/// stream, so frames are reproducible in any evaluation order.
fn frame_rng(seed: u64, lane: u64, frame_index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ lane.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(frame_index);
    rng
}

/// Rounds a real soft value to the receiver grid: nearest multiple of
/// 0.5, ties away from zero, saturated to ±15.5.
pub fn quantize(llr: f64) -> QLlr {
    QLlr::from_llr(llr)
}

/// Draws the random payload transmitted in frame `frame_index`.
pub fn random_payload(k: usize, channel: &ChannelConfig, frame_index: u64) -> Vec<bool> {
    let mut rng = frame_rng(channel.seed, PAYLOAD_LANE, frame_index);
    (0..k).map(|_| rng.gen()).collect()
}

/// Sends one codeword through the BPSK/AWGN channel and returns the
/// quantized soft values seen by the decoder.
pub fn transmit(codeword: &[bool], channel: &ChannelConfig, frame_index: u64) -> Vec<QLlr> {
    let Modulation::Bpsk = channel.modulation;
    let variance = channel.noise_variance();
    let noise = Normal::new(0.0, variance.sqrt()).expect("finite standard deviation");
    let mut rng = frame_rng(channel.seed, NOISE_LANE, frame_index);
    codeword
        .iter()
        .map(|&bit| {
            let symbol = if bit { -1.0 } else { 1.0 };
            let y = symbol + noise.sample(&mut rng);
            quantize(2.0 * y / variance)
        })
        .collect()
}

/// Processing-element counts behind the cycle estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleModel {
    /// Lanes of the wide soft-value unit.
    pub pe_wide: u64,
    /// Lanes of the narrow unit that absorbs the smallest node widths.
    pub pe_narrow: u64,
}

impl Default for CycleModel {
    fn default() -> Self {
        CycleModel { pe_wide: 8, pe_narrow: 4 }
    }
}

/// Prices a decode's effort counters under `model`.
pub fn cycle_estimate(trace: &DecodeTrace, model: &CycleModel) -> u64 {
    let mut cycles = 0u64;
    for (stage, &ops) in trace.traversal_ops.iter().enumerate() {
        if ops == 0 {
            continue;
        }
        let width = 1u64 << (stage - 1);
        let per_op =
            if width <= model.pe_narrow { 1 } else { width.div_ceil(model.pe_wide) };
        cycles += ops * per_op;
    }
    cycles + trace.decisions + trace.sort_candidates
}

/// Which decoder a sweep runs.
#[derive(Debug, Clone, PartialEq)]
pub enum DecoderKind {
    Sc,
    Scl { list_size: usize, crc_checks: usize },
    Adaptive { list_size: usize, crc_checks: usize },
    Fano(FanoConfig),
}

/// A decoder plus the node-size window used to partition the tree.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoderConfig {
    pub kind: DecoderKind,
    pub smin: usize,
    pub smax: usize,
}

impl DecoderConfig {
    /// The name written to the CSV `decoder` column.
    pub fn name(&self) -> String {
        match &self.kind {
            DecoderKind::Sc => "sc".into(),
            DecoderKind::Scl { list_size, crc_checks } => {
                format!("scl{list_size}t{crc_checks}")
            }
            DecoderKind::Adaptive { .. } => "adaptive".into(),
            DecoderKind::Fano(cfg) => match cfg.max_retraces {
                Some(m) => format!("fano_mrt{m}"),
                None => "fano_mrtinf".into(),
            },
        }
    }
}

/// When to stop hammering one SNR point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    /// Stop once this many block errors were observed…
    pub min_errors: u64,
    /// …or this many frames were decoded, whichever comes first.
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule { min_errors: 100, max_frames: 100_000 }
    }
}

/// Aggregated results for one SNR point.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrStats {
    pub esn0_db: f64,
    pub frames: u64,
    pub errors: u64,
    pub bler: f64,
    pub mean_cycles: f64,
    pub max_cycles: u64,
    pub mean_retraces: f64,
    pub max_retraces: u64,
    pub mean_sp: f64,
    pub max_sp: u64,
    /// Correctly recovered payload bits per spent cycle (energy proxy).
    pub correct_bits_per_cycle: f64,
    /// Fraction of frames settled by the first, single-path stage.
    pub stage_sc_fraction: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    List(#[from] ListError),
    #[error(transparent)]
    Fano(#[from] FanoError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Any configured decoder behind one `decode` call.
pub enum Driver {
    Sc(SpExecutor),
    Scl(ScListDecoder),
    Adaptive(AdaptiveDecoder),
    Fano(FanoDecoder),
}

impl Driver {
    pub fn build(spec: &CodeSpec, dc: &DecoderConfig) -> Result<Self, SimError> {
        Ok(match &dc.kind {
            DecoderKind::Sc => Driver::Sc(SpExecutor::new(spec, dc.smin, dc.smax)?),
            DecoderKind::Scl { list_size, crc_checks } => {
                let cfg = ListConfig::new(*list_size, *crc_checks)?;
                Driver::Scl(ScListDecoder::new(spec, &cfg, dc.smin, dc.smax)?)
            }
            DecoderKind::Adaptive { list_size, crc_checks } => {
                let cfg = ListConfig::new(*list_size, *crc_checks)?;
                Driver::Adaptive(AdaptiveDecoder::with_config(spec, &cfg, dc.smin, dc.smax)?)
            }
            DecoderKind::Fano(cfg) => Driver::Fano(FanoDecoder::new(spec, cfg, dc.smin, dc.smax)?),
        })
    }

    pub fn decode(&mut self, llr: &[QLlr]) -> DecodeOutcome {
        match self {
            Driver::Sc(exec) => run_sc_with(exec, llr),
            Driver::Scl(dec) => dec.decode(llr),
            Driver::Adaptive(dec) => dec.decode(llr),
            Driver::Fano(dec) => dec.decode(llr),
        }
    }
}

/// Monte-Carlo BLER sweep: decodes frames at every SNR in `snrs` until
/// `stop` is satisfied, returning one statistics row per SNR. Frame `i`
/// uses the same payload and noise realization at every SNR point.
pub fn run_bler(
    spec: &CodeSpec,
    dc: &DecoderConfig,
    snrs: &[f64],
    stop: &StopRule,
    seed: u64,
) -> Result<Vec<SnrStats>, SimError> {
    let mut driver = Driver::build(spec, dc)?;
    let k = spec.k_payload();
    let mut table = Vec::with_capacity(snrs.len());
    for &esn0_db in snrs {
        let channel = ChannelConfig::new(esn0_db, seed);
        let mut frames = 0u64;
        let mut errors = 0u64;
        let mut sum_cycles = 0u64;
        let mut max_cycles = 0u64;
        let mut sum_retraces = 0u64;
        let mut max_retraces = 0u64;
        let mut sum_sp = 0u64;
        let mut max_sp = 0u64;
        let mut correct_bits = 0u64;
        let mut sc_stage_frames = 0u64;
        while frames < stop.max_frames && errors < stop.min_errors {
            let payload = random_payload(k, &channel, frames);
            let word = spec.encode(&payload).expect("payload sized to the code");
            let llr = transmit(&word, &channel, frames);
            let mut out = driver.decode(&llr);
            out.block_error = out.payload != payload;

            frames += 1;
            errors += u64::from(out.block_error);
            sum_cycles += out.metrics.cycles;
            max_cycles = max_cycles.max(out.metrics.cycles);
            sum_retraces += out.metrics.retraces;
            max_retraces = max_retraces.max(out.metrics.retraces);
            sum_sp += out.metrics.sp_count;
            max_sp = max_sp.max(out.metrics.sp_count);
            correct_bits +=
                payload.iter().zip(&out.payload).filter(|(a, b)| a == b).count() as u64;
            sc_stage_frames += u64::from(out.metrics.stage == StageTag::Sc);
        }
        let nf = frames.max(1) as f64;
        table.push(SnrStats {
            esn0_db,
            frames,
            errors,
            bler: errors as f64 / nf,
            mean_cycles: sum_cycles as f64 / nf,
            max_cycles,
            mean_retraces: sum_retraces as f64 / nf,
            max_retraces,
            mean_sp: sum_sp as f64 / nf,
            max_sp,
            correct_bits_per_cycle: if sum_cycles == 0 {
                0.0
            } else {
                correct_bits as f64 / sum_cycles as f64
            },
            stage_sc_fraction: sc_stage_frames as f64 / nf,
        });
    }
    Ok(table)
}

/// Renders a sweep as CSV with pinned column order and number
/// formatting, so identical runs produce byte-identical files.
pub fn to_csv(decoder: &str, stats: &[SnrStats]) -> String {
    let mut csv = String::from(
        "esn0_db,decoder,frames,errors,bler,mean_cycles,max_cycles,\
         mean_retraces,max_retraces,mean_sp,stage_sc_fraction\n",
    );
    for s in stats {
        csv.push_str(&format!(
            "{:.2},{},{},{},{:.6},{:.3},{},{:.3},{},{:.3},{:.4}\n",
            s.esn0_db,
            decoder,
            s.frames,
            s.errors,
            s.bler,
            s.mean_cycles,
            s.max_cycles,
            s.mean_retraces,
            s.max_retraces,
            s.mean_sp,
            s.stage_sc_fraction,
        ));
    }
    csv
}
