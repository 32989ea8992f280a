//! Serial list decoding with CRC-aided selection.
//!
//! Paths are processed one at a time through the shared sub-process
//! executor: an SP that ends at a skipped (good or forced) node simply
//! extends every live path in place, while a forking SP enumerates
//! candidate decisions per path and pushes them through a serial sorter
//! that keeps the `L` best. After the last SP the surviving paths are
//! ranked by penalty and the first `b` are checked against the CRC; the
//! first pass wins, otherwise the most reliable path is returned with a
//! failed verdict.
//!
//! # Example
//!
//! ```
//! use polar_core::{CodeSpec, CrcSpec};
//! use polar_core::kernel::QLlr;
//! use polar_core::list::{run_scl, ListConfig};
//!
//! let spec = CodeSpec::build(8, 4, CrcSpec::none(), 0).unwrap();
//! let llr: Vec<QLlr> = [1.0, -2.5, 3.0, -0.5, 2.0, 1.5, -1.0, 0.5]
//!     .iter().map(|&x| QLlr::from_llr(x)).collect();
//! let cfg = ListConfig::new(4, 4).unwrap();
//! let out = run_scl(&spec, &cfg, &llr, 2, 4).unwrap();
//! assert_eq!(out.payload.len(), 4);
//! ```

use std::io;

use crate::code::CodeSpec;
use crate::kernel::{run_sc_with, Pm, QLlr, SpExecutor};
use crate::outcome::{DecodeOutcome, StageTag};
use crate::tree::TreeError;

/// List-decoder settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListConfig {
    /// Maximum surviving paths `L`; a power of two.
    pub list_size: usize,
    /// How many of the best paths are CRC-checked at the end (`b`).
    pub crc_checks: usize,
    /// Cap on candidate decisions enumerated per path at a forking node.
    pub candidates_per_path: usize,
    /// Decide good-bit nodes in place instead of forking the search.
    pub skip_good_bits: bool,
    /// Deep-copy path memory on every fork instead of sharing banks
    /// copy-on-write; reference mode for equivalence tests.
    pub eager_clone: bool,
}

/// Largest accepted list size.
pub const MAX_LIST_SIZE: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ListError {
    #[error("list size {0} is not a power of two in 1..={MAX_LIST_SIZE}")]
    BadListSize(usize),
    #[error("crc check count {checks} outside 1..=list size {list}")]
    BadCheckCount { checks: usize, list: usize },
    #[error("candidate cap {0} below 2")]
    BadCandidateCap(usize),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

impl ListConfig {
    /// A config with the given list size and check count and default
    /// extension settings.
    pub fn new(list_size: usize, crc_checks: usize) -> Result<Self, ListError> {
        let cfg = ListConfig {
            list_size,
            crc_checks,
            candidates_per_path: 8,
            skip_good_bits: true,
            eager_clone: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ListError> {
        if !self.list_size.is_power_of_two() || self.list_size > MAX_LIST_SIZE {
            return Err(ListError::BadListSize(self.list_size));
        }
        if self.crc_checks < 1 || self.crc_checks > self.list_size {
            return Err(ListError::BadCheckCount {
                checks: self.crc_checks,
                list: self.list_size,
            });
        }
        if self.candidates_per_path < 2 {
            return Err(ListError::BadCandidateCap(self.candidates_per_path));
        }
        Ok(())
    }
}

/// One proposed path extension awaiting selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    /// Index of the path being extended.
    pub parent: usize,
    /// Rank of this candidate within its parent's enumeration.
    pub ordinal: usize,
    /// Total penalty of the extended path.
    pub pm: Pm,
    /// Penalty added by this candidate alone.
    pub added: Pm,
    /// The candidate subtree decision.
    pub beta: Vec<bool>,
}

impl Extension {
    fn key(&self) -> (Pm, usize, usize) {
        (self.pm, self.parent, self.ordinal)
    }
}

/// Keeps the `l` best extensions by inserting candidates one at a time
/// into a sorted survivor list, exactly as a serial hardware sorter would;
/// ties break toward the lower parent index, then the lower ordinal.
/// Survivors come back in ascending order.
pub fn serial_sort_select(candidates: Vec<Extension>, l: usize) -> Vec<Extension> {
    let mut survivors: Vec<Extension> = Vec::with_capacity(l + 1);
    for cand in candidates {
        let at = survivors.partition_point(|s| s.key() <= cand.key());
        if at < l {
            survivors.insert(at, cand);
            survivors.truncate(l);
        }
    }
    survivors
}

/// A reusable serial list decoder over one code.
#[derive(Debug)]
pub struct ScListDecoder {
    exec: SpExecutor,
    cfg: ListConfig,
}

impl ScListDecoder {
    pub fn new(
        spec: &CodeSpec,
        cfg: &ListConfig,
        smin: usize,
        smax: usize,
    ) -> Result<Self, ListError> {
        cfg.validate()?;
        // With skipping off, good bits are demoted to ordinary
        // information bits before the decode tree is partitioned, so
        // their nodes fork the search like any other.
        let effective = if cfg.skip_good_bits { spec.clone() } else { spec.without_good_bits() };
        Ok(ScListDecoder { exec: SpExecutor::new(&effective, smin, smax)?, cfg: cfg.clone() })
    }

    pub fn config(&self) -> &ListConfig {
        &self.cfg
    }

    pub fn executor(&mut self) -> &mut SpExecutor {
        &mut self.exec
    }

    /// Decodes one block.
    pub fn decode(&mut self, llr: &[QLlr]) -> DecodeOutcome {
        self.exec.trace_mut().clear();
        self.run(llr, None::<&mut io::Sink>).expect("no sink, no write errors")
    }

    /// Decodes one block, writing one line per SP — its index, whether it
    /// forked, and the surviving penalties — to `sink`.
    pub fn decode_traced<W: io::Write>(
        &mut self,
        llr: &[QLlr],
        sink: &mut W,
    ) -> io::Result<DecodeOutcome> {
        self.exec.trace_mut().clear();
        self.run(llr, Some(sink))
    }

    fn run<W: io::Write>(
        &mut self,
        llr: &[QLlr],
        mut sink: Option<&mut W>,
    ) -> io::Result<DecodeOutcome> {
        let exec = &mut self.exec;
        let mut paths = vec![exec.begin(llr)];
        for sp_index in 0..exec.part().len() {
            let forks = exec.part().sps()[sp_index].is_fsp();
            for p in &mut paths {
                exec.run_actions(p, sp_index);
            }
            if forks {
                let mut proposals = Vec::new();
                for (pi, p) in paths.iter().enumerate() {
                    let cands = exec.candidates(p, sp_index, self.cfg.candidates_per_path);
                    for (ci, c) in cands.into_iter().enumerate() {
                        proposals.push(Extension {
                            parent: pi,
                            ordinal: ci,
                            pm: p.pm.add(c.penalty),
                            added: c.penalty,
                            beta: c.beta,
                        });
                    }
                }
                exec.trace_mut().sort_candidates += proposals.len() as u64;
                let survivors = serial_sort_select(proposals, self.cfg.list_size);
                let mut next = Vec::with_capacity(survivors.len());
                for s in &survivors {
                    let mut child = exec.fork(&paths[s.parent], self.cfg.eager_clone);
                    exec.apply_decision(&mut child, sp_index, &s.beta, s.added);
                    next.push(child);
                }
                for old in paths.drain(..) {
                    exec.release(old);
                }
                paths = next;
            } else {
                for p in &mut paths {
                    exec.plain_decide(p, sp_index);
                }
            }
            for p in &mut paths {
                exec.run_post(p, sp_index);
            }
            if let Some(w) = sink.as_mut() {
                writeln!(
                    w,
                    "sp {:>4} {} pms {}",
                    sp_index,
                    if forks { "FSP" } else { "SSP" },
                    paths.iter().map(|p| p.pm.raw().to_string()).collect::<Vec<_>>().join(" "),
                )?;
            }
        }

        // Rank by penalty and CRC-check the head of the list.
        let mut order: Vec<usize> = (0..paths.len()).collect();
        order.sort_by_key(|&i| (paths[i].pm, i));
        let mut chosen = order[0];
        let mut checked = 0u64;
        for &i in order.iter().take(self.cfg.crc_checks) {
            checked += 1;
            if exec.spec().extract_payload(&paths[i].u).1 {
                chosen = i;
                break;
            }
        }

        let mut winner = None;
        for (i, p) in paths.drain(..).enumerate() {
            if i == chosen {
                winner = Some(p);
            } else {
                exec.release(p);
            }
        }
        let mut winner = winner.expect("selected path exists");
        winner.leaves_decided = exec.spec().n();
        Ok(exec.finish(winner, StageTag::Scl, checked))
    }
}

/// One-shot serial list decode.
pub fn run_scl(
    spec: &CodeSpec,
    cfg: &ListConfig,
    llr: &[QLlr],
    smin: usize,
    smax: usize,
) -> Result<DecodeOutcome, ListError> {
    Ok(ScListDecoder::new(spec, cfg, smin, smax)?.decode(llr))
}

/// Two-stage decoder: plain successive cancellation first, and only on a
/// CRC miss the full list decoder with `L = b = 8`.
#[derive(Debug)]
pub struct AdaptiveDecoder {
    list: ScListDecoder,
}

impl AdaptiveDecoder {
    pub fn new(spec: &CodeSpec, smin: usize, smax: usize) -> Result<Self, ListError> {
        let cfg = ListConfig::new(8, 8)?;
        Self::with_config(spec, &cfg, smin, smax)
    }

    /// Builds the fallback list stage with explicit settings.
    pub fn with_config(
        spec: &CodeSpec,
        cfg: &ListConfig,
        smin: usize,
        smax: usize,
    ) -> Result<Self, ListError> {
        Ok(AdaptiveDecoder { list: ScListDecoder::new(spec, cfg, smin, smax)? })
    }

    pub fn decode(&mut self, llr: &[QLlr]) -> DecodeOutcome {
        let first = run_sc_with(self.list.executor(), llr);
        if first.crc_ok {
            return first;
        }
        let mut out = self.list.decode(llr);
        out.metrics.cycles += first.metrics.cycles;
        out.metrics.paths_checked += first.metrics.paths_checked;
        out
    }
}

/// One-shot adaptive decode.
pub fn run_adaptive(
    spec: &CodeSpec,
    llr: &[QLlr],
    smin: usize,
    smax: usize,
) -> Result<DecodeOutcome, ListError> {
    Ok(AdaptiveDecoder::new(spec, smin, smax)?.decode(llr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::CrcSpec;
    use crate::kernel::run_sc;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn random_llr(rng: &mut ChaCha12Rng, n: usize) -> Vec<QLlr> {
        (0..n).map(|_| QLlr::from_raw(rng.gen_range(-31..=31))).collect()
    }

    #[test]
    fn config_validation() {
        assert!(ListConfig::new(8, 8).is_ok());
        assert!(ListConfig::new(1, 1).is_ok());
        assert!(matches!(ListConfig::new(3, 1), Err(ListError::BadListSize(3))));
        assert!(matches!(ListConfig::new(2048, 1), Err(ListError::BadListSize(2048))));
        assert!(matches!(
            ListConfig::new(8, 9),
            Err(ListError::BadCheckCount { checks: 9, list: 8 })
        ));
        assert!(matches!(ListConfig::new(8, 0), Err(ListError::BadCheckCount { .. })));
        let mut cfg = ListConfig::new(8, 8).unwrap();
        cfg.candidates_per_path = 1;
        assert!(matches!(cfg.validate(), Err(ListError::BadCandidateCap(1))));
    }

    #[test]
    fn serial_sorter_keeps_the_smallest() {
        let mk = |pms: &[u64]| -> Vec<Extension> {
            pms.iter()
                .enumerate()
                .map(|(i, &pm)| Extension {
                    parent: i,
                    ordinal: 0,
                    pm: Pm::from_raw(pm),
                    added: Pm::ZERO,
                    beta: vec![],
                })
                .collect()
        };
        let out = serial_sort_select(mk(&[1, 5, 3, 2]), 2);
        let pms: Vec<u64> = out.iter().map(|e| e.pm.raw()).collect();
        assert_eq!(pms, vec![1, 2]);

        // All-equal penalties: arrival order (parent, ordinal) decides.
        let out = serial_sort_select(mk(&[7, 7, 7, 7]), 3);
        let parents: Vec<usize> = out.iter().map(|e| e.parent).collect();
        assert_eq!(parents, vec![0, 1, 2]);
    }

    #[test]
    fn serial_sorter_matches_full_sort_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        for _ in 0..10_000 {
            let n = rng.gen_range(1..=24);
            let l = rng.gen_range(1..=12);
            let cands: Vec<Extension> = (0..n)
                .map(|i| Extension {
                    parent: i / 3,
                    ordinal: i % 3,
                    pm: Pm::from_raw(rng.gen_range(0..6)),
                    added: Pm::ZERO,
                    beta: vec![rng.gen()],
                })
                .collect();
            let mut oracle = cands.clone();
            oracle.sort_by_key(|e| e.key());
            oracle.truncate(l);
            assert_eq!(serial_sort_select(cands, l), oracle);
        }
    }

    #[test]
    fn single_path_list_is_bit_exact_to_sc() {
        let mut rng = ChaCha12Rng::seed_from_u64(32);
        let cfg = ListConfig::new(1, 1).unwrap();
        for n in [16usize, 64] {
            let spec = CodeSpec::build(n, n / 2, CrcSpec::none(), 0).unwrap();
            let mut list = ScListDecoder::new(&spec, &cfg, 2, 4).unwrap();
            for _ in 0..300 {
                let llr = random_llr(&mut rng, n);
                let a = list.decode(&llr);
                let b = run_sc(&spec, &llr, 2, 4).unwrap();
                assert_eq!(a.u, b.u);
                assert_eq!(a.payload, b.payload);
            }
        }
    }

    #[test]
    fn noiseless_blocks_pass_on_the_first_check() {
        let mut rng = ChaCha12Rng::seed_from_u64(33);
        let spec = CodeSpec::build(64, 24, CrcSpec::crc8(), 0).unwrap();
        let cfg = ListConfig::new(8, 8).unwrap();
        let mut dec = ScListDecoder::new(&spec, &cfg, 2, 4).unwrap();
        for _ in 0..50 {
            let payload: Vec<bool> = (0..24).map(|_| rng.gen()).collect();
            let word = spec.encode(&payload).unwrap();
            let llr: Vec<QLlr> =
                word.iter().map(|&b| if b { QLlr::MIN } else { QLlr::MAX }).collect();
            let out = dec.decode(&llr);
            assert!(out.crc_ok);
            assert_eq!(out.payload, payload);
            assert_eq!(out.metrics.paths_checked, 1);
            assert_eq!(out.metrics.sp_count, dec.exec.part().len() as u64);
        }
    }

    #[test]
    fn list_recovers_blocks_sc_loses() {
        let mut rng = ChaCha12Rng::seed_from_u64(34);
        let spec = CodeSpec::build(64, 24, CrcSpec::crc8(), 0).unwrap();
        let cfg = ListConfig::new(8, 8).unwrap();
        let mut dec = ScListDecoder::new(&spec, &cfg, 2, 4).unwrap();
        let mut sc_errs = 0u32;
        let mut scl_errs = 0u32;
        for _ in 0..400 {
            let payload: Vec<bool> = (0..24).map(|_| rng.gen()).collect();
            let word = spec.encode(&payload).unwrap();
            // Mid-SNR noise, strong enough that plain SC misses some blocks.
            let llr: Vec<QLlr> = word
                .iter()
                .map(|&b| {
                    let mean = if b { -2.2 } else { 2.2 };
                    QLlr::from_llr(mean + 2.0 * rng.gen_range(-1.5..1.5))
                })
                .collect();
            sc_errs += u32::from(run_sc(&spec, &llr, 2, 4).unwrap().payload != payload);
            scl_errs += u32::from(dec.decode(&llr).payload != payload);
        }
        assert!(sc_errs > 0, "noise level should defeat SC sometimes");
        assert!(scl_errs < sc_errs, "list decode should beat SC: {scl_errs} vs {sc_errs}");
    }

    #[test]
    fn lazy_and_eager_clone_modes_agree() {
        let mut rng = ChaCha12Rng::seed_from_u64(35);
        let spec = CodeSpec::build(32, 12, CrcSpec::crc8(), 0).unwrap();
        let lazy_cfg = ListConfig::new(8, 8).unwrap();
        let eager_cfg = ListConfig { eager_clone: true, ..lazy_cfg.clone() };
        let mut lazy = ScListDecoder::new(&spec, &lazy_cfg, 2, 4).unwrap();
        let mut eager = ScListDecoder::new(&spec, &eager_cfg, 2, 4).unwrap();
        for _ in 0..200 {
            let llr = random_llr(&mut rng, 32);
            let a = lazy.decode(&llr);
            let b = eager.decode(&llr);
            assert_eq!(a.u, b.u);
            assert_eq!(a.payload, b.payload);
            assert_eq!(a.metrics.cycles, b.metrics.cycles);
        }
        assert_eq!(lazy.exec.pool().live_banks(), 0);
    }

    #[test]
    fn good_bit_skipping_off_matches_on_when_no_good_bits() {
        let mut rng = ChaCha12Rng::seed_from_u64(36);
        let spec = CodeSpec::build(32, 16, CrcSpec::none(), 0).unwrap();
        let on = ListConfig::new(4, 4).unwrap();
        let off = ListConfig { skip_good_bits: false, ..on.clone() };
        let mut dec_on = ScListDecoder::new(&spec, &on, 2, 4).unwrap();
        let mut dec_off = ScListDecoder::new(&spec, &off, 2, 4).unwrap();
        for _ in 0..200 {
            let llr = random_llr(&mut rng, 32);
            let a = dec_on.decode(&llr);
            let b = dec_off.decode(&llr);
            assert_eq!(a.u, b.u);
            assert_eq!(a.metrics.cycles, b.metrics.cycles);
        }
    }

    #[test]
    fn good_bits_shrink_the_forking_work() {
        // An aligned all-good span classifies as one skippable node; with
        // skipping off the same span forks the search as a rate-1 node.
        let frozen: Vec<bool> = (0..32).map(|i| i < 18 || i == 20).collect();
        let good: Vec<bool> = (0..32).map(|i| i >= 24).collect();
        let spec = CodeSpec::from_parts(32, CrcSpec::none(), frozen, good).unwrap();
        assert_eq!(spec.good_count(), 8);
        let cfg = ListConfig::new(8, 8).unwrap();
        let mut skip = ScListDecoder::new(&spec, &cfg, 2, 4).unwrap();
        let no_skip =
            ScListDecoder::new(&spec, &ListConfig { skip_good_bits: false, ..cfg.clone() }, 2, 4)
                .unwrap();
        let skipped_fsp = skip.exec.part().sps().iter().filter(|sp| sp.is_fsp()).count();
        let full_fsp = no_skip.exec.part().sps().iter().filter(|sp| sp.is_fsp()).count();
        assert_eq!(skip.exec.part().len(), no_skip.exec.part().len());
        assert_eq!(
            skipped_fsp + 1,
            full_fsp,
            "the good span should stop forking: {skipped_fsp} vs {full_fsp}"
        );

        // And the skipping decoder still recovers noiseless frames.
        let payload: Vec<bool> = (0..spec.k_payload()).map(|i| i % 3 == 0).collect();
        let word = spec.encode(&payload).unwrap();
        let llr: Vec<QLlr> =
            word.iter().map(|&b| if b { QLlr::MIN } else { QLlr::MAX }).collect();
        let out = skip.decode(&llr);
        assert_eq!(out.payload, payload);
    }

    #[test]
    fn small_block_list_matches_exhaustive_ml_when_margin_is_clear() {
        // Every codeword of an (16, 8) code, correlated directly against
        // the soft values; the list decoder must find the same word
        // whenever the best correlation leads by a clear margin.
        let spec = CodeSpec::build(16, 8, CrcSpec::none(), 0).unwrap();
        let mut words = Vec::new();
        for m in 0..256u32 {
            let mut u = vec![false; 16];
            for (j, pos) in spec.info_positions().iter().enumerate() {
                u[*pos] = m >> j & 1 == 1;
            }
            let mut x = u.clone();
            crate::code::polar_transform(&mut x);
            words.push(x);
        }
        let cfg = ListConfig::new(256, 1).unwrap();
        let mut dec = ScListDecoder::new(&spec, &cfg, 2, 4).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(37);
        let mut checked = 0;
        for _ in 0..400 {
            // Magnitudes ≤ 7 keep every variable-node sum inside the
            // representable range, so accumulated penalties rank paths
            // exactly by correlation.
            let llr: Vec<QLlr> =
                (0..16).map(|_| QLlr::from_raw(rng.gen_range(-7..=7))).collect();
            let corr = |w: &[bool]| -> i64 {
                w.iter()
                    .zip(&llr)
                    .map(|(&b, a)| if b { -(a.raw() as i64) } else { a.raw() as i64 })
                    .sum()
            };
            let scores: Vec<i64> = words.iter().map(|w| corr(w)).collect();
            let mut best = 0usize;
            for i in 1..scores.len() {
                if scores[i] > scores[best] {
                    best = i;
                }
            }
            let runner = scores
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != best)
                .map(|(_, &c)| c)
                .max()
                .unwrap();
            // Correlation counts raw half-units; a margin of 2 raw PM units
            // (1.0 in penalty terms) maps to a correlation gap of 4.
            if scores[best] - runner <= 4 {
                continue;
            }
            checked += 1;
            let out = dec.decode(&llr);
            let mut rewrapped = out.u.clone();
            crate::code::polar_transform(&mut rewrapped);
            assert_eq!(rewrapped, words[best], "list decode must match ML");
        }
        assert!(checked > 100, "margin filter left too few trials: {checked}");
    }

    #[test]
    fn adaptive_matches_sc_when_crc_passes_and_list_when_not() {
        let mut rng = ChaCha12Rng::seed_from_u64(38);
        let spec = CodeSpec::build(64, 24, CrcSpec::crc8(), 0).unwrap();
        let mut adaptive = AdaptiveDecoder::new(&spec, 2, 4).unwrap();
        let cfg = ListConfig::new(8, 8).unwrap();
        let mut list = ScListDecoder::new(&spec, &cfg, 2, 4).unwrap();
        let mut saw_sc = false;
        let mut saw_scl = false;
        for _ in 0..300 {
            let payload: Vec<bool> = (0..24).map(|_| rng.gen()).collect();
            let word = spec.encode(&payload).unwrap();
            let llr: Vec<QLlr> = word
                .iter()
                .map(|&b| {
                    let mean = if b { -2.0 } else { 2.0 };
                    QLlr::from_llr(mean + 2.0 * rng.gen_range(-1.6..1.6))
                })
                .collect();
            let sc = run_sc(&spec, &llr, 2, 4).unwrap();
            let out = adaptive.decode(&llr);
            if sc.crc_ok {
                saw_sc = true;
                assert_eq!(out.metrics.stage, StageTag::Sc);
                assert_eq!(out.u, sc.u);
            } else {
                saw_scl = true;
                let fallback = list.decode(&llr);
                assert_eq!(out.metrics.stage, StageTag::Scl);
                assert_eq!(out.u, fallback.u);
                assert_eq!(
                    out.metrics.cycles,
                    sc.metrics.cycles + fallback.metrics.cycles,
                    "both stages are paid for"
                );
            }
        }
        assert!(saw_sc && saw_scl, "noise level should exercise both stages");
    }

    #[test]
    fn trace_stream_lists_every_sp() {
        let spec = CodeSpec::build(16, 8, CrcSpec::none(), 0).unwrap();
        let cfg = ListConfig::new(2, 1).unwrap();
        let mut dec = ScListDecoder::new(&spec, &cfg, 2, 4).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(39);
        let llr = random_llr(&mut rng, 16);
        let mut sink = Vec::new();
        let out = dec.decode_traced(&llr, &mut sink).unwrap();
        let text = String::from_utf8(sink).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len() as u64, out.metrics.sp_count);
        for (i, line) in lines.iter().enumerate() {
            assert!(line.starts_with(&format!("sp {i:>4} ")), "line {i}: {line}");
            assert!(line.contains(" pms "), "line {i}: {line}");
            assert!(line.contains("FSP") || line.contains("SSP"));
        }
    }

    #[test]
    fn penalties_never_decrease_along_a_decode() {
        let spec = CodeSpec::build(32, 16, CrcSpec::none(), 0).unwrap();
        let cfg = ListConfig::new(4, 1).unwrap();
        let mut dec = ScListDecoder::new(&spec, &cfg, 2, 4).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(40);
        for _ in 0..100 {
            let llr = random_llr(&mut rng, 32);
            let mut sink = Vec::new();
            dec.decode_traced(&llr, &mut sink).unwrap();
            let text = String::from_utf8(sink).unwrap();
            let mut prev_min = 0u64;
            for line in text.lines() {
                let pms: Vec<u64> = line
                    .split(" pms ")
                    .nth(1)
                    .unwrap()
                    .split_whitespace()
                    .map(|t| t.parse().unwrap())
                    .collect();
                let min = *pms.iter().min().unwrap();
                assert!(min >= prev_min, "best penalty shrank: {line}");
                prev_min = min;
            }
        }
    }
}
