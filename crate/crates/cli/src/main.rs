//! Command-line front end for the polar code toolkit.
//!
//! Four subcommands cover the batch workflow: `construct` writes a code
//! description file, `encode` and `decode` translate hex frame files,
//! and `sweep` runs a Monte-Carlo BLER sweep to CSV. Every option can
//! also come from a TOML config file (`--config`); explicit flags win
//! field by field. Errors exit nonzero with a single-line diagnostic
//! that names the offending field.

mod config;
mod frames;

use clap::{Args, Parser, Subcommand};
use config::{parse_mrt, parse_snr_list, RunConfig};
use polar_core::fano::FanoConfig;
use polar_core::kernel::QLlr;
use polar_core::sim::{
    to_csv, ChannelConfig, DecoderConfig, DecoderKind, Driver, StopRule,
};
use polar_core::{CodeSpec, CrcSpec};
use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "polar", about = "Polar code construction, codecs and BLER sweeps")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct a code and write its description file.
    Construct {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Encode payload frames (hex, one per line) into codewords.
    Encode {
        #[command(flatten)]
        common: CommonOpts,
        /// Payload frame file to read.
        #[arg(long, short)]
        input: Option<PathBuf>,
    },
    /// Decode codeword frames back into payloads.
    Decode {
        #[command(flatten)]
        common: CommonOpts,
        /// Codeword frame file to read.
        #[arg(long, short)]
        input: Option<PathBuf>,
        #[command(flatten)]
        decoder: DecoderOpts,
        /// Pass frames through the AWGN channel at this Es/N0 (dB)
        /// instead of treating the bits as noise-free.
        #[arg(long)]
        esn0: Option<f64>,
        /// Channel seed for --esn0.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a BLER sweep and write the statistics CSV.
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        decoder: DecoderOpts,
        /// Es/N0 grid: start:stop:step or a single value.
        #[arg(long)]
        snr: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Stop a point after this many block errors.
        #[arg(long)]
        min_errors: Option<u64>,
        /// Hard frame cap per point.
        #[arg(long)]
        max_frames: Option<u64>,
    },
}

/// Options every subcommand understands.
#[derive(Args, Default)]
struct CommonOpts {
    /// TOML config file supplying defaults for all options.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Block length (power of two).
    #[arg(long)]
    n: Option<usize>,
    /// Payload bits per block (CRC not included).
    #[arg(long)]
    k: Option<usize>,
    /// CRC length: 0 or 8.
    #[arg(long)]
    crc: Option<usize>,
    /// Information positions marked good (default: a quarter).
    #[arg(long)]
    good_count: Option<usize>,
    /// Load this code description instead of constructing one.
    #[arg(long)]
    code: Option<PathBuf>,
    /// Output file (default: stdout; construct requires it).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

/// Decoder selection shared by decode and sweep.
#[derive(Args, Default)]
struct DecoderOpts {
    /// sc | scl | adaptive | fano.
    #[arg(long)]
    decoder: Option<String>,
    /// List size L.
    #[arg(long)]
    list: Option<usize>,
    /// CRC-checked final candidates b.
    #[arg(long)]
    checks: Option<usize>,
    /// Sequential retrace cap: a count or 'inf'.
    #[arg(long)]
    mrt: Option<String>,
    /// Sequential starting threshold.
    #[arg(long)]
    t0: Option<f64>,
    /// Sequential threshold step.
    #[arg(long)]
    delta: Option<f64>,
    /// Smallest multi-bit node stage.
    #[arg(long)]
    smin: Option<usize>,
    /// Largest multi-bit node stage.
    #[arg(long)]
    smax: Option<usize>,
}

/// A diagnostic naming the field that caused the failure.
struct CliError {
    field: &'static str,
    msg: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error: {}: {}", self.field, self.msg)
    }
}

fn fail(field: &'static str, msg: impl Into<String>) -> CliError {
    CliError { field, msg: msg.into() }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Construct { common } => {
            let cfg = resolve(&common, "construct")?;
            let spec = build_code(&cfg)?;
            let out = cfg
                .files
                .output
                .as_deref()
                .ok_or_else(|| fail("output", "construct requires --out"))?;
            write_text(out, &spec.to_text())
        }
        Cmd::Encode { common, input } => {
            let mut cfg = resolve(&common, "encode")?;
            if let Some(p) = input {
                cfg.files.input = Some(p.display().to_string());
            }
            let spec = build_code(&cfg)?;
            let payloads = read_frames(&cfg, spec.k_payload())?;
            let words: Vec<Vec<bool>> = payloads
                .iter()
                .map(|p| spec.encode(p).expect("frame parser enforces the length"))
                .collect();
            write_out(&cfg, &frames::render_frames(&words))
        }
        Cmd::Decode { common, input, decoder, esn0, seed } => {
            let mut cfg = resolve(&common, "decode")?;
            if let Some(p) = input {
                cfg.files.input = Some(p.display().to_string());
            }
            apply_decoder_opts(&mut cfg, &decoder)?;
            if let Some(s) = seed {
                cfg.channel.seed = s;
            }
            let spec = build_code(&cfg)?;
            let words = read_frames(&cfg, spec.n())?;
            let mut driver = build_driver(&spec, &cfg)?;
            let channel = esn0.map(|db| ChannelConfig::new(db, cfg.channel.seed));
            let mut payloads = Vec::with_capacity(words.len());
            for (idx, word) in words.iter().enumerate() {
                let llr: Vec<QLlr> = match &channel {
                    Some(ch) => polar_core::sim::transmit(word, ch, idx as u64),
                    None => word
                        .iter()
                        .map(|&b| if b { QLlr::MIN } else { QLlr::MAX })
                        .collect(),
                };
                payloads.push(driver.decode(&llr).payload);
            }
            write_out(&cfg, &frames::render_frames(&payloads))
        }
        Cmd::Sweep { common, decoder, snr, seed, min_errors, max_frames } => {
            let mut cfg = resolve(&common, "sweep")?;
            apply_decoder_opts(&mut cfg, &decoder)?;
            if let Some(s) = snr {
                cfg.channel.snr = s;
            }
            if let Some(s) = seed {
                cfg.channel.seed = s;
            }
            if let Some(e) = min_errors {
                cfg.channel.min_errors = e;
            }
            if let Some(f) = max_frames {
                cfg.channel.max_frames = f;
            }
            let spec = build_code(&cfg)?;
            let dc = decoder_config(&cfg)?;
            let snrs = parse_snr_list(&cfg.channel.snr).map_err(|e| fail("snr", e))?;
            let stop = StopRule {
                min_errors: cfg.channel.min_errors,
                max_frames: cfg.channel.max_frames,
            };
            let stats = polar_core::sim::run_bler(&spec, &dc, &snrs, &stop, cfg.channel.seed)
                .map_err(|e| fail("decoder", e.to_string()))?;
            write_out(&cfg, &to_csv(&dc.name(), &stats))
        }
    }
}

/// Loads the config file (when given) and lays CLI flags over it.
fn resolve(common: &CommonOpts, command: &str) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| fail("config", format!("cannot read '{}': {e}", path.display())))?;
            toml::from_str::<RunConfig>(&text).map_err(|e| {
                let first = e.message().lines().next().unwrap_or("invalid TOML").to_string();
                fail("config", format!("'{}': {first}", path.display()))
            })?
        }
        None => RunConfig::default(),
    };
    cfg.command = command.into();
    if let Some(n) = common.n {
        cfg.code.n = n;
    }
    if let Some(k) = common.k {
        cfg.code.k = k;
    }
    if let Some(c) = common.crc {
        cfg.code.crc = c;
    }
    if let Some(g) = common.good_count {
        cfg.code.good_count = Some(g);
    }
    if let Some(p) = &common.code {
        cfg.files.code_file = Some(p.display().to_string());
    }
    if let Some(p) = &common.out {
        cfg.files.output = Some(p.display().to_string());
    }
    Ok(cfg)
}

fn apply_decoder_opts(cfg: &mut RunConfig, opts: &DecoderOpts) -> Result<(), CliError> {
    if let Some(d) = &opts.decoder {
        cfg.decoder.kind = d.clone();
    }
    if let Some(l) = opts.list {
        cfg.decoder.list = l;
    }
    if let Some(b) = opts.checks {
        cfg.decoder.checks = b;
    }
    if let Some(m) = &opts.mrt {
        cfg.decoder.mrt = parse_mrt(m).map_err(|e| fail("mrt", e))?;
    }
    if let Some(t) = opts.t0 {
        cfg.decoder.t0 = t;
    }
    if let Some(d) = opts.delta {
        cfg.decoder.delta = d;
    }
    if let Some(s) = opts.smin {
        cfg.decoder.smin = s;
    }
    if let Some(s) = opts.smax {
        cfg.decoder.smax = s;
    }
    Ok(())
}

/// Loads the code description file or constructs the code from params.
fn build_code(cfg: &RunConfig) -> Result<CodeSpec, CliError> {
    if let Some(path) = &cfg.files.code_file {
        let text = fs::read_to_string(path)
            .map_err(|e| fail("code", format!("cannot read '{path}': {e}")))?;
        return CodeSpec::from_text(&text)
            .map_err(|e| fail("code", format!("'{path}': {e}")));
    }
    let crc = match cfg.code.crc {
        0 => CrcSpec::none(),
        8 => CrcSpec::crc8(),
        other => return Err(fail("crc", format!("unsupported CRC length {other} (0 or 8)"))),
    };
    CodeSpec::build(cfg.code.n, cfg.code.k, crc, cfg.code.effective_good_count())
        .map_err(|e| fail("code", e.to_string()))
}

fn decoder_config(cfg: &RunConfig) -> Result<DecoderConfig, CliError> {
    let d = &cfg.decoder;
    let kind = match d.kind.as_str() {
        "sc" => DecoderKind::Sc,
        "scl" => DecoderKind::Scl {
            list_size: d.list,
            crc_checks: d.checks.min(d.list),
        },
        "adaptive" => DecoderKind::Adaptive {
            list_size: d.list,
            crc_checks: d.checks.min(d.list),
        },
        "fano" => DecoderKind::Fano(FanoConfig {
            t0: d.t0,
            delta: d.delta,
            max_retraces: d.mrt,
            check_times: d.checks,
            ..FanoConfig::default()
        }),
        other => {
            return Err(fail(
                "decoder",
                format!("unknown decoder '{other}' (expected sc, scl, adaptive, fano)"),
            ))
        }
    };
    Ok(DecoderConfig { kind, smin: d.smin, smax: d.smax })
}

fn build_driver(spec: &CodeSpec, cfg: &RunConfig) -> Result<Driver, CliError> {
    Driver::build(spec, &decoder_config(cfg)?).map_err(|e| fail("decoder", e.to_string()))
}

fn read_frames(cfg: &RunConfig, bits: usize) -> Result<Vec<Vec<bool>>, CliError> {
    let path = cfg
        .files
        .input
        .as_deref()
        .ok_or_else(|| fail("input", "this command requires --input <frame file>"))?;
    let text = fs::read_to_string(path)
        .map_err(|e| fail("input", format!("cannot read '{path}': {e}")))?;
    frames::parse_frames(&text, bits).map_err(|e| fail("input", format!("'{path}': {e}")))
}

/// Writes to the configured output file, or stdout when none is set.
fn write_out(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match cfg.files.output.as_deref() {
        Some(path) => write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_text(path: &str, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| fail("output", format!("cannot write '{path}': {e}")))
}
