//! Depth-first sequential decoding with threshold retracing.
//!
//! The decoder extends a single path and keeps rejected alternatives as
//! bit prefixes in a LIFO stack. At every forking SP it enumerates a few
//! candidate decisions: the best one is extended if its penalty stays
//! within the running threshold, the rest are stacked. When the best
//! candidate breaches the threshold the whole frontier is stacked too, so
//! the rejected continuation stays reachable; then — as after a completed
//! path fails its CRC — the decoder *retraces*: it scans the stack
//! top-down for an affordable entry, removes just that entry, and
//! rebuilds its state by replaying the stored bits from the root.
//! Entries scanned over stay put for re-examination later, and a scan
//! that finds nothing raises the threshold by a fixed increment and
//! rescans. Retraces are counted and can be capped; at the cap the
//! decoder returns the best completed path, finishing the current one
//! greedily if none ever completed — with a cap of zero it degenerates to
//! plain successive cancellation.
//!
//! # Example
//!
//! ```
//! use polar_core::{CodeSpec, CrcSpec};
//! use polar_core::fano::{run_fano, FanoConfig};
//! use polar_core::kernel::QLlr;
//!
//! let spec = CodeSpec::build(8, 4, CrcSpec::none(), 0).unwrap();
//! let word = spec.encode(&[true, false, true, false]).unwrap();
//! let llr: Vec<QLlr> =
//!     word.iter().map(|&b| if b { QLlr::MIN } else { QLlr::MAX }).collect();
//! let out = run_fano(&spec, &FanoConfig::default(), &llr, 2, 4).unwrap();
//! assert_eq!(out.payload, vec![true, false, true, false]);
//! assert_eq!(out.metrics.retraces, 0);
//! ```

use crate::code::{polar_transform, CodeSpec};
use crate::kernel::{DecodePath, Pm, QLlr, SpExecutor};
use crate::outcome::{DecodeMetrics, DecodeOutcome, StageTag};
use crate::tree::TreeError;

/// Sequential-decoder settings.
#[derive(Debug, Clone, PartialEq)]
pub struct FanoConfig {
    /// Initial penalty threshold, in the same units as soft values.
    pub t0: f64,
    /// Threshold increment applied when nothing is affordable.
    pub delta: f64,
    /// Retrace cap; `None` never stops retracing.
    pub max_retraces: Option<u64>,
    /// How many completed paths may fail the CRC before giving up (`b`).
    pub check_times: usize,
    /// Stored alternatives beyond which the worst entry is dropped.
    pub stack_capacity: usize,
    /// Candidates enumerated per forking node, between 2 and 6.
    pub candidates_per_extension: usize,
}

impl Default for FanoConfig {
    fn default() -> Self {
        FanoConfig {
            t0: 8.0,
            delta: 8.0,
            max_retraces: None,
            check_times: 8,
            stack_capacity: 64,
            candidates_per_extension: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FanoError {
    #[error("threshold increment must be positive")]
    BadDelta,
    #[error("check count must be at least 1")]
    BadCheckTimes,
    #[error("candidates per extension {0} outside 2..=6")]
    BadCandidateCount(usize),
    #[error("stack capacity must be at least 1")]
    BadStackCapacity,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

impl FanoConfig {
    pub fn validate(&self) -> Result<(), FanoError> {
        if !(self.delta > 0.0) {
            return Err(FanoError::BadDelta);
        }
        if self.check_times < 1 {
            return Err(FanoError::BadCheckTimes);
        }
        if !(2..=6).contains(&self.candidates_per_extension) {
            return Err(FanoError::BadCandidateCount(self.candidates_per_extension));
        }
        if self.stack_capacity < 1 {
            return Err(FanoError::BadStackCapacity);
        }
        Ok(())
    }
}

/// A stacked alternative: the decided bits up to and including its SP,
/// its penalty, and the SP to resume at after recovery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StackEntry {
    pub prefix: Vec<bool>,
    pub pm: Pm,
    pub resume_sp: usize,
}

/// What a retrace-trace callback is told.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FanoEventKind {
    /// The best forward candidate breached the threshold.
    Reject,
    /// A completed path failed the CRC.
    CrcFail,
    /// A stack scan found nothing affordable; the threshold was raised.
    Raise,
    /// A stacked alternative was recovered by replay.
    Recover,
    /// The stack was full and an entry was dropped.
    StackDrop,
}

/// One entry of the retrace trace stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FanoEvent {
    pub kind: FanoEventKind,
    pub sp_index: usize,
    pub pm: Pm,
    pub threshold: Pm,
}

/// Rebuilds the decoder state a forward pass would have reached after
/// deciding exactly `prefix`; returns the path and the next SP index.
///
/// The prefix must end on an SP boundary and keep frozen positions zero.
pub fn recover_path(
    exec: &mut SpExecutor,
    llr: &[QLlr],
    prefix: &[bool],
) -> Result<(DecodePath, usize), crate::kernel::ReplayError> {
    let path = exec.begin(llr);
    exec.replay(path, prefix)
}

enum Recovery {
    Entry(StackEntry),
    Nothing,
}

/// A reusable sequential decoder over one code.
#[derive(Debug)]
pub struct FanoDecoder {
    exec: SpExecutor,
    cfg: FanoConfig,
    stack: Vec<StackEntry>,
}

impl FanoDecoder {
    pub fn new(
        spec: &CodeSpec,
        cfg: &FanoConfig,
        smin: usize,
        smax: usize,
    ) -> Result<Self, FanoError> {
        cfg.validate()?;
        Ok(FanoDecoder {
            exec: SpExecutor::new(spec, smin, smax)?,
            cfg: cfg.clone(),
            stack: Vec::new(),
        })
    }

    pub fn config(&self) -> &FanoConfig {
        &self.cfg
    }

    pub fn executor(&mut self) -> &mut SpExecutor {
        &mut self.exec
    }

    /// Decodes one block.
    pub fn decode(&mut self, llr: &[QLlr]) -> DecodeOutcome {
        self.decode_traced(llr, &mut |_| {})
    }

    /// Decodes one block, reporting every retrace-related event.
    pub fn decode_traced(
        &mut self,
        llr: &[QLlr],
        on_event: &mut dyn FnMut(&FanoEvent),
    ) -> DecodeOutcome {
        self.exec.trace_mut().clear();
        self.stack.clear();
        let exec = &mut self.exec;
        let n_sp = exec.part().len();

        let mut threshold = Pm::from_llr(self.cfg.t0);
        let delta = Pm::from_llr(self.cfg.delta);
        let mut retraces = 0u64;
        let mut stack_drops = 0u64;
        let mut paths_checked = 0u64;
        let mut best_complete: Option<(Pm, Vec<bool>)> = None;
        // Past the retrace cap with nothing completed, the current path is
        // finished without threshold tests or stack bookkeeping.
        let mut greedy = false;

        let mut path = exec.begin(llr);
        let mut sp = 0usize;
        let outcome = loop {
            if sp == n_sp {
                // Path complete: verify and either return or retrace.
                paths_checked += 1;
                let crc_ok = exec.spec().extract_payload(&path.u).1;
                if crc_ok {
                    break Complete::Current(path);
                }
                if best_complete.as_ref().map_or(true, |(pm, _)| path.pm < *pm) {
                    best_complete = Some((path.pm, path.u.clone()));
                }
                if greedy {
                    // Past the cap the failure ends the decode quietly.
                    exec.release(path);
                    break Complete::Best;
                }
                on_event(&FanoEvent {
                    kind: FanoEventKind::CrcFail,
                    sp_index: n_sp,
                    pm: path.pm,
                    threshold,
                });
                retraces += 1;
                if paths_checked >= self.cfg.check_times as u64
                    || self.cfg.max_retraces.is_some_and(|m| retraces > m)
                {
                    exec.release(path);
                    break Complete::Best;
                }
                match Self::retrace(
                    &mut self.stack,
                    &mut threshold,
                    delta,
                    path.pm,
                    n_sp,
                    on_event,
                ) {
                    Recovery::Entry(entry) => {
                        let fresh = exec.begin_like(&path);
                        exec.release(path);
                        let (replayed, next) =
                            exec.replay(fresh, &entry.prefix).expect("stacked prefixes replay");
                        debug_assert_eq!(next, entry.resume_sp);
                        path = replayed;
                        sp = entry.resume_sp;
                        continue;
                    }
                    Recovery::Nothing => {
                        exec.release(path);
                        break Complete::Best;
                    }
                }
            }

            exec.run_actions(&mut path, sp);
            if !exec.part().sps()[sp].is_fsp() {
                exec.plain_decide(&mut path, sp);
                exec.run_post(&mut path, sp);
                sp += 1;
                continue;
            }

            let cands = exec.candidates(&path, sp, self.cfg.candidates_per_extension);
            let best_pm = path.pm.add(cands[0].penalty);
            if !greedy && best_pm > threshold {
                on_event(&FanoEvent {
                    kind: FanoEventKind::Reject,
                    sp_index: sp,
                    pm: best_pm,
                    threshold,
                });
                retraces += 1;
                if self.cfg.max_retraces.is_some_and(|m| retraces > m) {
                    if best_complete.is_some() {
                        exec.release(path);
                        break Complete::Best;
                    }
                    greedy = true;
                } else {
                    // The whole frontier joins the stack so the rejected
                    // continuation stays reachable once the threshold has
                    // risen enough to afford it.
                    for c in cands.iter().rev() {
                        let entry = StackEntry {
                            prefix: prefix_with(&path, &c.beta, sp, exec),
                            pm: path.pm.add(c.penalty),
                            resume_sp: sp + 1,
                        };
                        Self::push_bounded(
                            &mut self.stack,
                            entry,
                            self.cfg.stack_capacity,
                            &mut stack_drops,
                            threshold,
                            on_event,
                        );
                    }
                    match Self::retrace(
                        &mut self.stack,
                        &mut threshold,
                        delta,
                        best_pm,
                        sp,
                        on_event,
                    ) {
                        Recovery::Entry(entry) => {
                            let fresh = exec.begin_like(&path);
                            exec.release(path);
                            let (replayed, next) = exec
                                .replay(fresh, &entry.prefix)
                                .expect("stacked prefixes replay");
                            debug_assert_eq!(next, entry.resume_sp);
                            path = replayed;
                            sp = entry.resume_sp;
                            continue;
                        }
                        Recovery::Nothing => {
                            unreachable!("the rejected frontier was just stacked")
                        }
                    }
                }
            }

            if !greedy {
                // Stack the alternatives, cheapest on top.
                for c in cands[1..].iter().rev() {
                    let entry = StackEntry {
                        prefix: prefix_with(&path, &c.beta, sp, exec),
                        pm: path.pm.add(c.penalty),
                        resume_sp: sp + 1,
                    };
                    Self::push_bounded(
                        &mut self.stack,
                        entry,
                        self.cfg.stack_capacity,
                        &mut stack_drops,
                        threshold,
                        on_event,
                    );
                }
            }
            let best = &cands[0];
            let (beta, penalty) = (best.beta.clone(), best.penalty);
            exec.apply_decision(&mut path, sp, &beta, penalty);
            exec.run_post(&mut path, sp);
            sp += 1;
        };

        let mut out = match outcome {
            Complete::Current(mut path) => {
                path.leaves_decided = exec.spec().n();
                exec.finish(path, StageTag::Fano, paths_checked)
            }
            Complete::Best => {
                let (_, u) = best_complete.expect("a completed path was recorded");
                let (payload, crc_ok) = exec.spec().extract_payload(&u);
                let mut metrics = DecodeMetrics::new(StageTag::Fano);
                metrics.sp_count = exec.part().len() as u64;
                metrics.cycles = exec.trace().cycles();
                metrics.paths_checked = paths_checked;
                DecodeOutcome { payload, crc_ok, block_error: false, u, metrics }
            }
        };
        out.metrics.retraces = retraces;
        out.metrics.stack_drops = stack_drops;
        self.stack.clear();
        out
    }

    /// One retrace: scan the stack top-down for an affordable entry and
    /// remove just that entry; everything scanned over stays put for
    /// re-examination later. When nothing qualifies the threshold rises
    /// by `delta` and the scan repeats; an empty stack ends the search.
    /// `probe_pm` is the penalty that triggered the retrace, reported
    /// with each threshold raise.
    fn retrace(
        stack: &mut Vec<StackEntry>,
        threshold: &mut Pm,
        delta: Pm,
        probe_pm: Pm,
        sp_index: usize,
        on_event: &mut dyn FnMut(&FanoEvent),
    ) -> Recovery {
        loop {
            if let Some(found) = stack.iter().rposition(|e| e.pm <= *threshold) {
                let entry = stack.remove(found);
                on_event(&FanoEvent {
                    kind: FanoEventKind::Recover,
                    sp_index: entry.resume_sp,
                    pm: entry.pm,
                    threshold: *threshold,
                });
                return Recovery::Entry(entry);
            }
            if stack.is_empty() {
                return Recovery::Nothing;
            }
            *threshold = threshold.add(delta);
            on_event(&FanoEvent {
                kind: FanoEventKind::Raise,
                sp_index,
                pm: probe_pm,
                threshold: *threshold,
            });
        }
    }

    /// Pushes an entry, dropping the worst one when the stack is full.
    fn push_bounded(
        stack: &mut Vec<StackEntry>,
        entry: StackEntry,
        capacity: usize,
        drops: &mut u64,
        threshold: Pm,
        on_event: &mut dyn FnMut(&FanoEvent),
    ) {
        if stack.len() < capacity {
            stack.push(entry);
            return;
        }
        *drops += 1;
        let worst = stack
            .iter()
            .enumerate()
            .max_by_key(|(i, e)| (e.pm, *i))
            .map(|(i, e)| (i, e.pm))
            .expect("capacity is at least 1");
        if entry.pm >= worst.1 {
            // The incoming entry is the worst; drop it instead.
            on_event(&FanoEvent {
                kind: FanoEventKind::StackDrop,
                sp_index: entry.resume_sp,
                pm: entry.pm,
                threshold,
            });
            return;
        }
        let dropped = stack.remove(worst.0);
        on_event(&FanoEvent {
            kind: FanoEventKind::StackDrop,
            sp_index: dropped.resume_sp,
            pm: dropped.pm,
            threshold,
        });
        stack.push(entry);
    }
}

enum Complete {
    Current(DecodePath),
    Best,
}

/// The decided bits of `path` up to `sp`'s node, extended with the
/// candidate decision `beta` pushed back through the transform.
fn prefix_with(path: &DecodePath, beta: &[bool], sp: usize, exec: &SpExecutor) -> Vec<bool> {
    let node = exec.part().sps()[sp].node;
    let first = node.first_leaf();
    let mut prefix = path.u[..first].to_vec();
    let mut span = beta.to_vec();
    polar_transform(&mut span);
    prefix.extend_from_slice(&span);
    prefix
}

/// One-shot sequential decode.
pub fn run_fano(
    spec: &CodeSpec,
    cfg: &FanoConfig,
    llr: &[QLlr],
    smin: usize,
    smax: usize,
) -> Result<DecodeOutcome, FanoError> {
    Ok(FanoDecoder::new(spec, cfg, smin, smax)?.decode(llr))
}
