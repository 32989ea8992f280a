//! One-step decisions for whole subtrees and candidate enumeration.
//!
//! A bit-decision node decides all leaves under it at once from its soft
//! values.  Constituent decoders are chosen so that, wherever the
//! node structure permits, the decision reproduces what plain bit-by-bit
//! successive cancellation would have produced on the same span — including
//! saturation behaviour, which is why repetition spans fold pairwise
//! instead of summing wide.  Parity-constrained spans use hard decisions
//! plus syndrome repair.
//!
//! For list and stack search, [`enumerate_candidates`] lists alternative
//! decisions in ascending penalty order; candidate 0 is always the plain
//! decision so that a list of size one degenerates exactly to SC.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::qllr::{f_minus, f_plus, Pm, QLlr};
use crate::tree::NodeClass;

/// A decided subtree: its codeword bits and the disagreement penalty paid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub beta: Vec<bool>,
    pub cost: Pm,
}

/// One alternative decision for path extension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub beta: Vec<bool>,
    pub penalty: Pm,
}

/// Sum of |soft| over positions where `beta` disagrees with the hard
/// decision — the uniform disagreement penalty.
pub fn disagreement_cost(alpha: &[QLlr], beta: &[bool]) -> Pm {
    let mut pm = Pm::ZERO;
    for (&a, &b) in alpha.iter().zip(beta) {
        if b != a.hard() {
            pm = pm.penalized(a);
        }
    }
    pm
}

fn hard_word(alpha: &[QLlr]) -> Vec<bool> {
    alpha.iter().map(|a| a.hard()).collect()
}

/// Plain bit-by-bit SC over an all-information span, used when hard
/// decisions are ambiguous (erased soft values present).
fn span_sc(alpha: &[QLlr]) -> Vec<bool> {
    if alpha.len() == 1 {
        return vec![alpha[0].hard()];
    }
    let half = alpha.len() / 2;
    let left: Vec<QLlr> = (0..half).map(|i| f_minus(alpha[i], alpha[i + half])).collect();
    let beta_l = span_sc(&left);
    let right: Vec<QLlr> =
        (0..half).map(|i| f_plus(alpha[i], alpha[i + half], beta_l[i])).collect();
    let beta_r = span_sc(&right);
    let mut out = Vec::with_capacity(alpha.len());
    out.extend(beta_l.iter().zip(&beta_r).map(|(&l, &r)| l ^ r));
    out.extend_from_slice(&beta_r);
    out
}

/// All-information decision: elementwise hard unless erasures force the
/// bit-by-bit tie-breaking order to matter.
fn decide_rate1(alpha: &[QLlr]) -> Vec<bool> {
    if alpha.iter().any(|a| a.is_zero()) {
        span_sc(alpha)
    } else {
        hard_word(alpha)
    }
}

/// Folds the span pairwise (saturating) down to `target` values — the same
/// additions bit-by-bit SC would perform across the frozen prefix.
fn fold_to(alpha: &[QLlr], target: usize) -> Vec<QLlr> {
    let mut v = alpha.to_vec();
    while v.len() > target {
        let half = v.len() / 2;
        for i in 0..half {
            v[i] = f_plus(v[i], v[i + half], false);
        }
        v.truncate(half);
    }
    v
}

/// Positions of the per-check subsets for interleaved parity spans:
/// residues of the position index modulo `classes`.
fn residue_class(i: usize, classes: usize) -> usize {
    i & (classes - 1)
}

/// Repairs interleaved single-parity checks: each residue class must reach
/// `target` parity; a violated class flips its least-reliable position.
fn parity_repair(alpha: &[QLlr], beta: &mut [bool], classes: usize, target: bool) -> Pm {
    let mut cost = Pm::ZERO;
    for r in 0..classes {
        let mut parity = false;
        let mut argmin = None;
        for i in (r..alpha.len()).step_by(classes) {
            parity ^= beta[i];
            let better = match argmin {
                None => true,
                Some(j) => alpha[i].magnitude() < alpha[j as usize].magnitude(),
            };
            if better {
                argmin = Some(i as u32);
            }
        }
        if parity != target {
            let j = argmin.expect("non-empty class") as usize;
            beta[j] = !beta[j];
            cost = cost.penalized(alpha[j]);
        }
    }
    cost
}

/// Minimum |soft| over one residue class.
fn class_min(alpha: &[QLlr], classes: usize, r: usize) -> u64 {
    (r..alpha.len())
        .step_by(classes)
        .map(|i| alpha[i].magnitude() as u64)
        .min()
        .expect("non-empty class")
}

/// Codewords of a span whose only free bits are the last `k` positions of
/// the polar transform input, as (word, index) pairs.
fn tail_codewords(span: usize, k: usize) -> Vec<Vec<bool>> {
    (0..1usize << k)
        .map(|m| {
            let mut u = vec![false; span];
            for (j, slot) in (0..k).rev().zip(span - k..span) {
                u[slot] = (m >> j) & 1 == 1;
            }
            crate::code::polar_transform(&mut u);
            u
        })
        .collect()
}

fn correlation(alpha: &[QLlr], word: &[bool]) -> i64 {
    alpha
        .iter()
        .zip(word)
        .map(|(&a, &b)| if b { -(a.raw() as i64) } else { a.raw() as i64 })
        .sum()
}

/// Decides a whole subtree in one step.
///
/// # Panics
/// If `class` is not a bit-decision class or `alpha` is empty.
pub fn multibit_decide(class: NodeClass, alpha: &[QLlr]) -> Decision {
    assert!(!alpha.is_empty());
    let beta = match class {
        NodeClass::Rate0 => vec![false; alpha.len()],
        NodeClass::Rate1 | NodeClass::Good | NodeClass::InfoLeaf => decide_rate1(alpha),
        NodeClass::Rep => {
            let folded = fold_to(alpha, 1)[0];
            vec![folded.hard(); alpha.len()]
        }
        NodeClass::Rep2 => {
            let pair = fold_to(alpha, 2);
            let bits = decide_rate1(&pair);
            (0..alpha.len()).map(|i| bits[i & 1]).collect()
        }
        NodeClass::Spc => {
            let mut beta = hard_word(alpha);
            parity_repair(alpha, &mut beta, 1, false);
            beta
        }
        NodeClass::Spc2 => {
            let mut beta = hard_word(alpha);
            parity_repair(alpha, &mut beta, 2, false);
            beta
        }
        NodeClass::Rpc => {
            let mut beta = hard_word(alpha);
            // All four interleaved parities must agree on a common value;
            // pick the cheaper one to repair toward.
            let mut repair = [0u64; 2];
            for r in 0..4 {
                let parity = (r..alpha.len()).step_by(4).fold(false, |p, i| p ^ beta[i]);
                repair[usize::from(!parity)] += class_min(alpha, 4, r);
            }
            let target = repair[1] < repair[0];
            parity_repair(alpha, &mut beta, 4, target);
            beta
        }
        NodeClass::Pcr => {
            let mut best: Option<(i64, Vec<bool>)> = None;
            for w in tail_codewords(alpha.len(), 3) {
                let c = correlation(alpha, &w);
                // Strict comparison keeps the first (lowest-index) word on ties.
                if best.as_ref().map_or(true, |(bc, _)| c > *bc) {
                    best = Some((c, w));
                }
            }
            best.expect("eight candidate words").1
        }
        NodeClass::Internal => panic!("internal nodes make no decision"),
    };
    let cost = disagreement_cost(alpha, &beta);
    Decision { beta, cost }
}

/// Emits flip sets (as masks over positions sorted by ascending magnitude)
/// in nondecreasing flip-magnitude-sum order.
struct FlipSets {
    /// (magnitude, original position), ascending.
    order: Vec<(u64, usize)>,
    heap: BinaryHeap<Reverse<(u64, u32, u32)>>,
}

impl FlipSets {
    fn new(alpha: &[QLlr]) -> Self {
        let mut order: Vec<(u64, usize)> =
            alpha.iter().enumerate().map(|(i, a)| (a.magnitude() as u64, i)).collect();
        order.sort();
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((0, 0, 0)));
        FlipSets { order, heap }
    }

    /// Next flip set and its penalty; masks index into the sorted order.
    fn next(&mut self) -> Option<(u64, u32)> {
        let Reverse((sum, mask, last1)) = self.heap.pop()?;
        let next = last1 as usize; // index of the next position to bring in
        if next < self.order.len() {
            let grow = sum + self.order[next].0;
            self.heap.push(Reverse((grow, mask | 1 << next, last1 + 1)));
            if last1 > 0 {
                let swap = grow - self.order[next - 1].0;
                let swapped = (mask & !(1 << (next - 1))) | 1 << next;
                self.heap.push(Reverse((swap, swapped, last1 + 1)));
            }
        }
        Some((sum, mask))
    }

    fn positions(&self, mask: u32) -> impl Iterator<Item = usize> + '_ {
        self.order
            .iter()
            .enumerate()
            .filter(move |(j, _)| mask >> j & 1 == 1)
            .map(|(_, &(_, i))| i)
    }
}

/// Whether flipping `mask` keeps any word of the node's constituent code
/// inside the code — i.e. the flip set is neutral to the node's checks.
fn flips_neutral(class: NodeClass, sets: &FlipSets, mask: u32) -> bool {
    let mut fp = [false; 4];
    for i in sets.positions(mask) {
        fp[residue_class(i, 4)] ^= true;
    }
    match class {
        NodeClass::Rate1 | NodeClass::InfoLeaf | NodeClass::Good => true,
        // One global check: the flip count must be even.
        NodeClass::Spc => !(fp[0] ^ fp[1] ^ fp[2] ^ fp[3]),
        // Two interleaved checks over even and odd positions.
        NodeClass::Spc2 => !(fp[0] ^ fp[2]) && !(fp[1] ^ fp[3]),
        // Four interleaved checks sharing one parity value: flipping all
        // four classes together just switches that shared value.
        NodeClass::Rpc => fp[0] == fp[1] && fp[1] == fp[2] && fp[2] == fp[3],
        _ => unreachable!("enumerated directly"),
    }
}

/// Lists up to `max` decisions for an extensible node: the plain decision
/// first, then alternatives ascending by penalty.
///
/// Every candidate is priced by the soft magnitudes it contradicts: the sum
/// of |alpha| over positions where its word disagrees with the elementwise
/// hard decisions, floored at the plain decision's own cost. The plain
/// decision minimizes that sum for every class except the repetition
/// variants — whose saturating folds can pick the dearer word in rare
/// clipping corners — and the floor keeps it unoutranked there too, so a
/// single-path search stays exactly the plain decoder. Small fixed codes
/// (repetition variants, tail-generated spans) are listed exhaustively;
/// parity-constrained and unconstrained spans are generated lazily in
/// flip-magnitude order and re-ranked by penalty, stopping once no later
/// flip set can undercut the kept alternatives.
pub fn enumerate_candidates(class: NodeClass, alpha: &[QLlr], max: usize) -> Vec<Candidate> {
    assert!(max >= 1);
    let decide = multibit_decide(class, alpha);
    let need = max - 1;
    let price = |w: &[bool]| disagreement_cost(alpha, w).max(decide.cost);

    let mut rest: Vec<Candidate> = Vec::new();
    match class {
        NodeClass::Rep => {
            rest = vec![vec![false; alpha.len()], vec![true; alpha.len()]]
                .into_iter()
                .filter(|w| *w != decide.beta)
                .map(|w| Candidate { penalty: price(&w), beta: w })
                .collect();
        }
        NodeClass::Rep2 => {
            rest = (0..4usize)
                .map(|m| (0..alpha.len()).map(|i| (m >> (i & 1)) & 1 == 1).collect::<Vec<_>>())
                .filter(|w| *w != decide.beta)
                .map(|w| Candidate { penalty: price(&w), beta: w })
                .collect();
        }
        NodeClass::Pcr => {
            rest = tail_codewords(alpha.len(), 3)
                .into_iter()
                .filter(|w| *w != decide.beta)
                .map(|w| Candidate { penalty: price(&w), beta: w })
                .collect();
        }
        NodeClass::Rate1 | NodeClass::InfoLeaf | NodeClass::Good
        | NodeClass::Spc | NodeClass::Spc2 | NodeClass::Rpc => {
            // A word overriding the decision on flip set S pays
            //   decide.cost + sum(S) - 2 * overlap(S, repaired positions),
            // so its penalty is at least sum(S) - decide.cost: once that
            // bound exceeds the worst kept alternative, no later set (sums
            // are nondecreasing) can improve the selection. The iteration
            // cap only guards degenerate tie floods.
            let mut sets = FlipSets::new(alpha);
            let dec_raw = decide.cost.raw();
            let mut examined = 0usize;
            while need > 0 && examined < 4096 {
                examined += 1;
                let Some((flip_sum, mask)) = sets.next() else { break };
                if rest.len() >= need {
                    let mut raws: Vec<u64> = rest.iter().map(|c| c.penalty.raw()).collect();
                    raws.sort_unstable();
                    if flip_sum.saturating_sub(dec_raw) > raws[need - 1] {
                        break;
                    }
                }
                // Mask 0 is the unmodified decision, already listed.
                if mask == 0 || !flips_neutral(class, &sets, mask) {
                    continue;
                }
                let mut beta = decide.beta.clone();
                for i in sets.positions(mask) {
                    beta[i] = !beta[i];
                }
                rest.push(Candidate { penalty: price(&beta), beta });
            }
        }
        NodeClass::Rate0 | NodeClass::Internal => {
            panic!("node class {class:?} never extends a search")
        }
    }
    rest.sort_by(|a, b| a.penalty.cmp(&b.penalty).then_with(|| a.beta.cmp(&b.beta)));
    rest.truncate(need);

    let mut out = vec![Candidate { beta: decide.beta.clone(), penalty: decide.cost }];
    out.extend(rest);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn q(llr: f64) -> QLlr {
        QLlr::from_llr(llr)
    }

    fn qv(llrs: &[f64]) -> Vec<QLlr> {
        llrs.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn rate1_takes_elementwise_signs() {
        let d = multibit_decide(NodeClass::Rate1, &qv(&[1.0, -2.0, 3.0, -0.5]));
        assert_eq!(d.beta, vec![false, true, false, true]);
        assert_eq!(d.cost, Pm::ZERO);
    }

    #[test]
    fn rep_decides_by_folded_sign() {
        let d = multibit_decide(NodeClass::Rep, &qv(&[1.0, 1.0, 1.0, -4.0]));
        assert_eq!(d.beta, vec![true; 4]);
        assert_eq!(d.cost.to_llr(), 3.0);
        let d = multibit_decide(NodeClass::Rep, &qv(&[1.0, 1.0, 1.0, -2.0]));
        assert_eq!(d.beta, vec![false; 4]);
        assert_eq!(d.cost.to_llr(), 2.0);
    }

    #[test]
    fn rate0_charges_negative_positions() {
        let d = multibit_decide(NodeClass::Rate0, &qv(&[1.0, -2.5, 0.0, -1.0]));
        assert_eq!(d.beta, vec![false; 4]);
        assert_eq!(d.cost.to_llr(), 3.5);
    }

    #[test]
    fn spc_repairs_odd_parity_at_the_weakest_position() {
        // Hard word (0,1,0,0) has odd parity; |−0.5| is the weakest.
        let d = multibit_decide(NodeClass::Spc, &qv(&[1.0, -2.0, 3.0, 0.5]));
        assert_eq!(d.beta, vec![false, true, false, true]);
        assert_eq!(d.cost.to_llr(), 0.5);
        // Even parity needs no repair.
        let d = multibit_decide(NodeClass::Spc, &qv(&[1.0, -2.0, -3.0, 0.5]));
        assert_eq!(d.beta, vec![false, true, true, false]);
        assert_eq!(d.cost, Pm::ZERO);
    }

    #[test]
    fn spc2_repairs_each_interleaved_check() {
        // Even positions (0,2): hard (0,1) → odd parity, weakest is 1.0 at 0.
        // Odd positions (1,3): hard (1,0) → odd parity, weakest is 2.0 at 1.
        let d = multibit_decide(NodeClass::Spc2, &qv(&[1.0, -2.0, -3.0, 4.0]));
        assert_eq!(d.beta, vec![true, false, true, false]);
        assert_eq!(d.cost.to_llr(), 3.0);
    }

    /// Brute-force maximum-correlation decision over a constituent code.
    fn ml_oracle(valid: impl Iterator<Item = Vec<bool>>, alpha: &[QLlr]) -> (Vec<bool>, i64) {
        valid
            .map(|w| {
                let c = correlation(alpha, &w);
                (w, c)
            })
            .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)))
            .unwrap()
    }

    /// All codewords of the constituent code at `span` for `class`.
    fn constituent_code(class: NodeClass, span: usize) -> Vec<Vec<bool>> {
        let frozen = |i: usize| match class {
            NodeClass::Rate0 => true,
            NodeClass::Rate1 | NodeClass::Good => false,
            NodeClass::Rep => i < span - 1,
            NodeClass::Rep2 => i < span - 2,
            NodeClass::Pcr => i < span - 3,
            NodeClass::Spc => i < 1,
            NodeClass::Spc2 => i < 2,
            NodeClass::Rpc => i < 3,
            _ => unreachable!(),
        };
        let free: Vec<usize> = (0..span).filter(|&i| !frozen(i)).collect();
        (0..1usize << free.len())
            .map(|m| {
                let mut u = vec![false; span];
                for (j, &pos) in free.iter().enumerate() {
                    u[pos] = m >> j & 1 == 1;
                }
                crate::code::polar_transform(&mut u);
                u
            })
            .collect()
    }

    #[test]
    fn parity_decisions_match_brute_force_ml() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for class in [NodeClass::Spc, NodeClass::Spc2, NodeClass::Rpc, NodeClass::Pcr] {
            let span = 8;
            let words = constituent_code(class, span);
            for _ in 0..300 {
                // Bounded magnitudes keep the comparison away from
                // saturation-induced ties being broken differently.
                let alpha: Vec<QLlr> =
                    (0..span).map(|_| QLlr::from_raw(rng.gen_range(-14..=14))).collect();
                let d = multibit_decide(class, &alpha);
                let (ml, ml_corr) = ml_oracle(words.iter().cloned(), &alpha);
                let got_corr = correlation(&alpha, &d.beta);
                assert!(
                    got_corr == ml_corr,
                    "{class:?}: decision correlation {got_corr} < ML {ml_corr}\n\
                     alpha {alpha:?}\n got {:?}\n ml  {ml:?}",
                    d.beta
                );
            }
        }
    }

    #[test]
    fn rate1_candidate_penalties_match_exhaustive_enumeration() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        for _ in 0..200 {
            let alpha: Vec<QLlr> =
                (0..4).map(|_| QLlr::from_raw(rng.gen_range(-31..=31))).collect();
            if alpha.iter().any(|a| a.is_zero()) {
                continue;
            }
            let cands = enumerate_candidates(NodeClass::Rate1, &alpha, 4);
            let mut oracle: Vec<u64> = (0..16u32)
                .map(|m| {
                    (0..4)
                        .filter(|&i| m >> i & 1 == 1)
                        .map(|i| alpha[i].magnitude() as u64)
                        .sum()
                })
                .collect();
            oracle.sort();
            let got: Vec<u64> = cands.iter().map(|c| c.penalty.raw()).collect();
            assert_eq!(got, oracle[..4].to_vec(), "alpha {alpha:?}");
        }
    }

    #[test]
    fn rate1_four_candidates_cover_the_two_weakest_flips() {
        let alpha = qv(&[4.0, 1.0, 3.0, 2.0]);
        let cands = enumerate_candidates(NodeClass::Rate1, &alpha, 4);
        let penalties: Vec<f64> = cands.iter().map(|c| c.penalty.to_llr()).collect();
        assert_eq!(penalties, vec![0.0, 1.0, 2.0, 3.0]); // 0, m1, m2, m1+m2
        assert_eq!(cands[0].beta, vec![false; 4]);
        assert_eq!(cands[1].beta, vec![false, true, false, false]);
    }

    #[test]
    fn candidate_zero_is_the_plain_decision_for_every_class() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let classes = [
            NodeClass::Rate1,
            NodeClass::Rep,
            NodeClass::Spc,
            NodeClass::Rep2,
            NodeClass::Pcr,
            NodeClass::Spc2,
            NodeClass::Rpc,
        ];
        for class in classes {
            for _ in 0..100 {
                let alpha: Vec<QLlr> =
                    (0..8).map(|_| QLlr::from_raw(rng.gen_range(-31..=31))).collect();
                let d = multibit_decide(class, &alpha);
                let cands = enumerate_candidates(class, &alpha, 6);
                assert_eq!(cands[0].beta, d.beta, "{class:?}");
                assert_eq!(cands[0].penalty, d.cost, "{class:?}");
                // All alternatives stay inside the constituent code.
                let words = constituent_code(class, 8);
                for c in &cands {
                    assert!(words.contains(&c.beta), "{class:?} candidate outside code");
                }
                // Penalties ascend after the leading plain decision.
                for pair in cands[1..].windows(2) {
                    assert!(pair[0].penalty <= pair[1].penalty, "{class:?}");
                }
            }
        }
    }

    #[test]
    fn spc_candidates_keep_parity_and_ascend() {
        let alpha = qv(&[3.0, -1.0, 2.0, 4.0]);
        // Hard word (0,1,0,0): odd parity → decision flips the −1.0.
        let cands = enumerate_candidates(NodeClass::Spc, &alpha, 4);
        assert_eq!(cands[0].beta, vec![false, false, false, false]);
        assert_eq!(cands[0].penalty.to_llr(), 1.0);
        for c in &cands {
            let parity = c.beta.iter().fold(false, |p, &b| p ^ b);
            assert!(!parity, "candidate violates the parity check");
        }
        // Each even-parity word pays the magnitudes it contradicts in the
        // hard word: repairing at position 2 instead of 1 costs 2.0, the
        // pair {0,1} costs 3.0, and {1,3} costs 4.0.
        let penalties: Vec<f64> = cands.iter().map(|c| c.penalty.to_llr()).collect();
        assert_eq!(penalties, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(cands[1].beta, vec![false, true, true, false]);
    }

    #[test]
    fn flip_set_enumerator_matches_sorted_subset_sums() {
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        for _ in 0..50 {
            let n = rng.gen_range(1..=6);
            let alpha: Vec<QLlr> =
                (0..n).map(|_| QLlr::from_raw(rng.gen_range(-31..=31))).collect();
            let mut sets = FlipSets::new(&alpha);
            let mut got = Vec::new();
            while let Some((sum, _)) = sets.next() {
                got.push(sum);
            }
            let mut oracle: Vec<u64> = (0..1u32 << n)
                .map(|m| {
                    (0..n)
                        .filter(|&i| m >> i & 1 == 1)
                        .map(|i| alpha[i].magnitude() as u64)
                        .sum()
                })
                .collect();
            oracle.sort();
            assert_eq!(got, oracle);
        }
    }

    #[test]
    fn erased_positions_fall_back_to_bit_by_bit_order() {
        // With an erased first value the bit-by-bit walk decides 0 there
        // only if the feedback keeps it so; the point is determinism and
        // zero cost, not a particular word.
        let alpha = qv(&[0.0, 3.0, -2.0, 1.0]);
        let d = multibit_decide(NodeClass::Rate1, &alpha);
        assert_eq!(d.cost, Pm::ZERO);
        assert_eq!(d.beta, span_sc(&alpha));
    }
}
