//! The sub-process executor: one state machine shared by every decoder.
//!
//! A decode walks the SP schedule in order.  For each SP the executor runs
//! the edge-traversal actions (soft-value ops, absorbed frozen spans,
//! partial-sum rebuilds), then the caller decides the ending node — either
//! by the plain one-step decision or by choosing among enumerated
//! candidates — and the executor applies the chosen bits.  Decisions can
//! also be *replayed* from a recorded bit prefix, rebuilding buffers and
//! penalties identical to the original forward pass; stack-based decoding
//! uses this to recover abandoned paths, and tests use it to prove the
//! traversal self-consistent.
//!
//! Every executed soft-value op and decision is tallied in a
//! [`DecodeTrace`], the input to cycle-cost accounting.

use crate::code::{polar_transform, CodeSpec};
use crate::outcome::{DecodeMetrics, DecodeOutcome, StageTag};
use crate::tree::{NodeClass, NodeRef, SpAction, SpPartition, TreeError};

use super::memory::{MemPool, MemSnapshot, PathMem};
use super::multibit::{disagreement_cost, enumerate_candidates, multibit_decide, Candidate};
use super::qllr::{f_minus, f_plus, Pm, QLlr};

/// Lanes of the wide processing rank: soft-value ops move eight values per
/// cycle, with a narrow rank absorbing the small stages in the same pass.
pub const WIDE_LANES: u64 = 8;

/// Cycles one soft-value op at a node of `stage` takes: output span over
/// the lane count, never less than one cycle.
pub fn traversal_cycle_cost(stage: usize, wide_lanes: u64) -> u64 {
    let outputs = 1u64 << (stage - 1);
    outputs.div_ceil(wide_lanes).max(1)
}

/// Counters of everything a decode executed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeTrace {
    /// Soft-value ops per node stage (index = stage of the operated node).
    pub traversal_ops: Vec<u64>,
    /// Bit decisions applied (per path: a list decode counts each path's).
    pub decisions: u64,
    /// Candidates pushed through the serial sorter, one cycle each.
    pub sort_candidates: u64,
}

impl DecodeTrace {
    pub fn new(root_stage: usize) -> Self {
        DecodeTrace {
            traversal_ops: vec![0; root_stage + 1],
            decisions: 0,
            sort_candidates: 0,
        }
    }

    pub fn clear(&mut self) {
        self.traversal_ops.fill(0);
        self.decisions = 0;
        self.sort_candidates = 0;
    }

    /// Total cycles under the default cost model: per-stage op costs plus
    /// one cycle per decision and per sorted candidate.
    pub fn cycles(&self) -> u64 {
        let ops: u64 = self
            .traversal_ops
            .iter()
            .enumerate()
            .skip(1)
            .map(|(stage, &n)| n * traversal_cycle_cost(stage, WIDE_LANES))
            .sum();
        ops + self.decisions + self.sort_candidates
    }
}

/// One candidate decode: its memory view, penalty, and decided bits.
#[derive(Debug)]
pub struct DecodePath {
    pub mem: PathMem,
    pub pm: Pm,
    /// Decided input bits; positions at or past `leaves_decided` are
    /// not yet meaningful.
    pub u: Vec<bool>,
    pub leaves_decided: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("bit prefix longer than the block ({got} > {n})")]
    PrefixTooLong { got: usize, n: usize },
    #[error("bit prefix sets frozen position {pos}")]
    FrozenViolation { pos: usize },
    #[error("bit prefix length {got} does not end on a decision boundary")]
    Misaligned { got: usize },
}

/// Executes sub-processes against pooled path memory.
#[derive(Debug)]
pub struct SpExecutor {
    spec: CodeSpec,
    part: SpPartition,
    pool: MemPool,
    trace: DecodeTrace,
    gather: Vec<QLlr>,
    opbuf: Vec<QLlr>,
    bitbuf: Vec<bool>,
}

impl SpExecutor {
    pub fn new(spec: &CodeSpec, smin: usize, smax: usize) -> Result<Self, TreeError> {
        let part = SpPartition::build(spec, smin, smax)?;
        let root_stage = spec.stages();
        Ok(SpExecutor {
            spec: spec.clone(),
            part,
            pool: MemPool::new(root_stage),
            trace: DecodeTrace::new(root_stage),
            gather: Vec::new(),
            opbuf: Vec::new(),
            bitbuf: Vec::new(),
        })
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn part(&self) -> &SpPartition {
        &self.part
    }

    pub fn pool(&self) -> &MemPool {
        &self.pool
    }

    pub fn trace(&self) -> &DecodeTrace {
        &self.trace
    }

    pub fn trace_mut(&mut self) -> &mut DecodeTrace {
        &mut self.trace
    }

    /// Starts a fresh path over the given channel soft values.
    ///
    /// # Panics
    /// If `llr` is not exactly the block length.
    pub fn begin(&mut self, llr: &[QLlr]) -> DecodePath {
        DecodePath {
            mem: self.pool.new_path(llr),
            pm: Pm::ZERO,
            u: vec![false; self.spec.n()],
            leaves_decided: 0,
        }
    }

    /// Starts a fresh path over the same channel values as `other`.
    pub fn begin_like(&mut self, other: &DecodePath) -> DecodePath {
        DecodePath {
            mem: self.pool.path_from_root(&other.mem),
            pm: Pm::ZERO,
            u: vec![false; self.spec.n()],
            leaves_decided: 0,
        }
    }

    /// Duplicates a path; lazily (sharing banks) unless `eager`.
    pub fn fork(&mut self, parent: &DecodePath, eager: bool) -> DecodePath {
        DecodePath {
            mem: if eager {
                self.pool.clone_eager(&parent.mem)
            } else {
                self.pool.clone_lazy(&parent.mem)
            },
            pm: parent.pm,
            u: parent.u.clone(),
            leaves_decided: parent.leaves_decided,
        }
    }

    pub fn release(&mut self, path: DecodePath) {
        self.pool.release(path.mem);
    }

    /// Deep copy of the path's memory, for state-equality assertions.
    pub fn snapshot(&self, path: &DecodePath) -> MemSnapshot {
        self.pool.materialize(&path.mem)
    }

    /// Soft values of `node` under `path`, recomputing stages that hold no
    /// bank from the stage above.
    fn gather_node(
        pool: &MemPool,
        mem: &PathMem,
        node: NodeRef,
        out: &mut Vec<QLlr>,
    ) {
        let stage = node.stage as usize;
        out.clear();
        if pool.llr_banked(stage) {
            out.extend_from_slice(pool.llr_bank(mem, stage).expect("soft values computed"));
            return;
        }
        // Recompute through the parent (always banked: the skipped stages
        // are odd, their parents even or the root).
        let parent = pool.llr_bank(mem, stage + 1).expect("parent soft values computed");
        let half = 1usize << stage;
        if node.is_right_child() {
            let beta = pool.bit_bank(mem, stage, 0).expect("sibling partial sums present");
            out.extend((0..half).map(|i| f_plus(parent[i], parent[i + half], beta[i])));
        } else {
            out.extend((0..half).map(|i| f_minus(parent[i], parent[i + half])));
        }
    }

    /// Runs one edge-traversal action for one path.
    pub fn exec_action(&mut self, path: &mut DecodePath, action: SpAction) {
        match action {
            SpAction::FMinus(v) => {
                let stage = v.stage as usize;
                Self::gather_node(&self.pool, &path.mem, v, &mut self.gather);
                let half = 1usize << (stage - 1);
                self.opbuf.clear();
                self.opbuf
                    .extend((0..half).map(|i| f_minus(self.gather[i], self.gather[i + half])));
                self.trace.traversal_ops[stage] += 1;
                if self.pool.llr_banked(stage - 1) {
                    self.pool
                        .llr_bank_mut(&mut path.mem, stage - 1)
                        .copy_from_slice(&self.opbuf);
                }
            }
            SpAction::FPlus(v) => {
                let stage = v.stage as usize;
                Self::gather_node(&self.pool, &path.mem, v, &mut self.gather);
                let half = 1usize << (stage - 1);
                self.opbuf.clear();
                {
                    let beta = self
                        .pool
                        .bit_bank(&path.mem, stage - 1, 0)
                        .expect("left partial sums present");
                    self.opbuf.extend(
                        (0..half).map(|i| f_plus(self.gather[i], self.gather[i + half], beta[i])),
                    );
                }
                self.trace.traversal_ops[stage] += 1;
                if self.pool.llr_banked(stage - 1) {
                    self.pool
                        .llr_bank_mut(&mut path.mem, stage - 1)
                        .copy_from_slice(&self.opbuf);
                }
            }
            SpAction::Combine(v) => {
                let stage = v.stage as usize;
                self.bitbuf.clear();
                {
                    let left = self
                        .pool
                        .bit_bank(&path.mem, stage - 1, 0)
                        .expect("left partial sums present");
                    let right = self
                        .pool
                        .bit_bank(&path.mem, stage - 1, 1)
                        .expect("right partial sums present");
                    self.bitbuf.extend(left.iter().zip(right).map(|(&l, &r)| l ^ r));
                    self.bitbuf.extend_from_slice(right);
                }
                let side = (v.offset & 1) as usize;
                self.pool
                    .bit_bank_mut(&mut path.mem, stage, side)
                    .copy_from_slice(&self.bitbuf);
                // Partial-sum rebuilds ride along with the ops; no cycles.
            }
            SpAction::FrozenBeta(v) => {
                let stage = v.stage as usize;
                debug_assert_eq!(v.first_leaf(), path.leaves_decided, "in-order schedule");
                Self::gather_node(&self.pool, &path.mem, v, &mut self.gather);
                let d = multibit_decide(NodeClass::Rate0, &self.gather);
                path.pm = path.pm.add(d.cost);
                let side = (v.offset & 1) as usize;
                self.pool.bit_bank_mut(&mut path.mem, stage, side).fill(false);
                path.leaves_decided += v.span();
                // Forced zeros are wired, not decided; no cycles.
            }
        }
    }

    /// Runs all pre-decision actions of one SP for one path.
    pub fn run_actions(&mut self, path: &mut DecodePath, sp_index: usize) {
        for i in 0..self.part.sps()[sp_index].actions.len() {
            let action = self.part.sps()[sp_index].actions[i];
            self.exec_action(path, action);
        }
    }

    /// Runs the trailing actions of one SP (only the last SP has any).
    pub fn run_post(&mut self, path: &mut DecodePath, sp_index: usize) {
        for i in 0..self.part.sps()[sp_index].post_actions.len() {
            let action = self.part.sps()[sp_index].post_actions[i];
            self.exec_action(path, action);
        }
    }

    /// Applies the plain one-step decision at an SP's ending node.
    pub fn plain_decide(&mut self, path: &mut DecodePath, sp_index: usize) {
        let sp = &self.part.sps()[sp_index];
        let (node, class) = (sp.node, sp.class);
        Self::gather_node(&self.pool, &path.mem, node, &mut self.gather);
        let d = multibit_decide(class, &self.gather);
        self.commit_decision(path, node, &d.beta, d.cost);
    }

    /// Enumerates up to `max` candidate decisions at an SP's ending node,
    /// ascending by added penalty, plain decision first.
    pub fn candidates(&mut self, path: &DecodePath, sp_index: usize, max: usize) -> Vec<Candidate> {
        let sp = &self.part.sps()[sp_index];
        Self::gather_node(&self.pool, &path.mem, sp.node, &mut self.gather);
        enumerate_candidates(sp.class, &self.gather, max)
    }

    /// Applies one chosen decision (from [`Self::candidates`]) to a path.
    pub fn apply_decision(
        &mut self,
        path: &mut DecodePath,
        sp_index: usize,
        beta: &[bool],
        penalty: Pm,
    ) {
        let node = self.part.sps()[sp_index].node;
        self.commit_decision(path, node, beta, penalty);
    }

    fn commit_decision(&mut self, path: &mut DecodePath, node: NodeRef, beta: &[bool], penalty: Pm) {
        let stage = node.stage as usize;
        let side = (node.offset & 1) as usize;
        let first = node.first_leaf();
        debug_assert_eq!(first, path.leaves_decided, "in-order schedule");
        self.pool.bit_bank_mut(&mut path.mem, stage, side).copy_from_slice(beta);
        let span = node.span();
        let u = &mut path.u[first..first + span];
        u.copy_from_slice(beta);
        polar_transform(u);
        path.pm = path.pm.add(penalty);
        path.leaves_decided = first + span;
        self.trace.decisions += 1;
    }

    /// Rebuilds a path that made exactly the decisions recorded in
    /// `prefix`, charging the same penalties the forward pass would have.
    /// Returns the path and the index of the next SP to process.
    ///
    /// The prefix must end on a decision boundary and keep every frozen
    /// position zero.
    pub fn replay(
        &mut self,
        mut path: DecodePath,
        prefix: &[bool],
    ) -> Result<(DecodePath, usize), ReplayError> {
        let n = self.spec.n();
        if prefix.len() > n {
            self.release(path);
            return Err(ReplayError::PrefixTooLong { got: prefix.len(), n });
        }
        for (pos, &bit) in prefix.iter().enumerate() {
            if bit && self.spec.is_frozen(pos) {
                self.release(path);
                return Err(ReplayError::FrozenViolation { pos });
            }
        }
        let mut next_sp = 0;
        for sp_index in 0..self.part.len() {
            let (node, end) = {
                let sp = &self.part.sps()[sp_index];
                (sp.node, sp.node.first_leaf() + sp.node.span())
            };
            if end > prefix.len() {
                break;
            }
            self.run_actions(&mut path, sp_index);
            // Forced decision: the subtree bits are the prefix span pushed
            // back through the (self-inverse) transform.
            let first = node.first_leaf();
            self.bitbuf.clear();
            self.bitbuf.extend_from_slice(&prefix[first..end]);
            polar_transform(&mut self.bitbuf);
            let beta = std::mem::take(&mut self.bitbuf);
            Self::gather_node(&self.pool, &path.mem, node, &mut self.gather);
            let penalty = disagreement_cost(&self.gather, &beta);
            self.commit_decision(&mut path, node, &beta, penalty);
            self.bitbuf = beta;
            self.run_post(&mut path, sp_index);
            next_sp = sp_index + 1;
        }
        if path.leaves_decided != prefix.len() {
            self.release(path);
            return Err(ReplayError::Misaligned { got: prefix.len() });
        }
        Ok((path, next_sp))
    }

    /// Wraps up a finished path into a decode outcome.
    pub fn finish(&mut self, path: DecodePath, stage: StageTag, paths_checked: u64) -> DecodeOutcome {
        debug_assert_eq!(path.leaves_decided, self.spec.n());
        let (payload, crc_ok) = self.spec.extract_payload(&path.u);
        let mut metrics = DecodeMetrics::new(stage);
        metrics.sp_count = self.part.len() as u64;
        metrics.cycles = self.trace.cycles();
        metrics.paths_checked = paths_checked;
        let u = path.u.clone();
        self.release(path);
        DecodeOutcome { payload, crc_ok, block_error: false, u, metrics }
    }
}

/// Plain successive cancellation over a prepared executor.
pub fn run_sc_with(exec: &mut SpExecutor, llr: &[QLlr]) -> DecodeOutcome {
    exec.trace_mut().clear();
    let mut path = exec.begin(llr);
    for sp_index in 0..exec.part().len() {
        exec.run_actions(&mut path, sp_index);
        exec.plain_decide(&mut path, sp_index);
        exec.run_post(&mut path, sp_index);
    }
    // A code with no information bits decodes to the all-zero word.
    path.leaves_decided = exec.spec().n();
    let checked = u64::from(exec.spec().crc().len > 0);
    exec.finish(path, StageTag::Sc, checked)
}

/// One-shot successive cancellation decode.
///
/// Multi-bit decisions are taken at stages `smin..=smax`; `smin = smax = 0`
/// decides leaf by leaf.
pub fn run_sc(
    spec: &CodeSpec,
    llr: &[QLlr],
    smin: usize,
    smax: usize,
) -> Result<DecodeOutcome, TreeError> {
    let mut exec = SpExecutor::new(spec, smin, smax)?;
    Ok(run_sc_with(&mut exec, llr))
}
