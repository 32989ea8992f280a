//! Reference-counted per-stage memory banks with lazy copy-on-write.
//!
//! Every candidate path holds per-stage bank indices instead of owning
//! buffers.  Cloning a path merely bumps reference counts; the first write
//! to a shared bank allocates a fresh one (writes always cover a whole
//! bank, so nothing is copied).  Soft-value banks exist for every stage
//! except {3, 5, 7}, whose values are recomputed from the stage above when
//! read — mirroring a two-rank processing-element pipeline that never
//! stores its intermediate rank.  Partial-sum banks exist at every stage
//! and come in two sides, indexed by the parity of the producing node's
//! offset, so a node and its left sibling can coexist.

use super::qllr::QLlr;

/// Stages whose soft values are never stored (recomputed on read); the
/// root stage always keeps its bank since it holds the channel values.
pub fn llr_banked(stage: usize, root_stage: usize) -> bool {
    stage == root_stage || !matches!(stage, 3 | 5 | 7)
}

#[derive(Debug, Default)]
struct Arena<T> {
    data: Vec<Vec<T>>,
    refs: Vec<u32>,
    /// Free bank indices, grouped by stage so sizes always match.
    free: Vec<Vec<usize>>,
}

impl<T: Clone + Default> Arena<T> {
    fn with_stages(stages: usize) -> Self {
        Arena { data: Vec::new(), refs: Vec::new(), free: vec![Vec::new(); stages] }
    }

    fn alloc(&mut self, stage: usize) -> usize {
        if let Some(id) = self.free[stage].pop() {
            debug_assert_eq!(self.refs[id], 0);
            self.refs[id] = 1;
            self.data[id].fill(T::default());
            id
        } else {
            self.data.push(vec![T::default(); 1 << stage]);
            self.refs.push(1);
            self.data.len() - 1
        }
    }

    fn retain(&mut self, id: usize) {
        self.refs[id] += 1;
    }

    fn release(&mut self, id: usize, stage: usize) {
        debug_assert!(self.refs[id] > 0);
        self.refs[id] -= 1;
        if self.refs[id] == 0 {
            self.free[stage].push(id);
        }
    }

    fn live(&self) -> usize {
        self.refs.iter().filter(|&&r| r > 0).count()
    }
}

/// Shared bank storage for all paths of one decode.
#[derive(Debug)]
pub struct MemPool {
    root_stage: usize,
    llr: Arena<QLlr>,
    bits: Arena<bool>,
}

/// One path's view into the pool: per-stage soft-value banks plus
/// two-sided partial-sum banks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathMem {
    llr: Vec<Option<usize>>,
    bits: Vec<[Option<usize>; 2]>,
}

/// Deep copy of one path's visible state, for equivalence checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemSnapshot {
    pub llr: Vec<Option<Vec<QLlr>>>,
    pub bits: Vec<[Option<Vec<bool>>; 2]>,
}

impl MemPool {
    pub fn new(root_stage: usize) -> Self {
        let stages = root_stage + 1;
        MemPool {
            root_stage,
            llr: Arena::with_stages(stages),
            bits: Arena::with_stages(stages),
        }
    }

    pub fn root_stage(&self) -> usize {
        self.root_stage
    }

    pub fn llr_banked(&self, stage: usize) -> bool {
        llr_banked(stage, self.root_stage)
    }

    /// Creates the first path of a decode, loading the channel soft values
    /// into the root bank.
    pub fn new_path(&mut self, channel: &[QLlr]) -> PathMem {
        assert_eq!(channel.len(), 1 << self.root_stage, "channel length");
        let mut path = self.empty_path();
        let id = self.llr.alloc(self.root_stage);
        self.llr.data[id].copy_from_slice(channel);
        path.llr[self.root_stage] = Some(id);
        path
    }

    /// A fresh path sharing `other`'s root bank and nothing else; used to
    /// restart a decode over the same channel values.
    pub fn path_from_root(&mut self, other: &PathMem) -> PathMem {
        let mut path = self.empty_path();
        let id = other.llr[self.root_stage].expect("root bank present");
        self.llr.retain(id);
        path.llr[self.root_stage] = Some(id);
        path
    }

    fn empty_path(&self) -> PathMem {
        PathMem {
            llr: vec![None; self.root_stage + 1],
            bits: vec![[None, None]; self.root_stage + 1],
        }
    }

    /// Clones by reference: both paths now share every bank.
    pub fn clone_lazy(&mut self, path: &PathMem) -> PathMem {
        for slot in path.llr.iter() {
            if let Some(id) = *slot {
                self.llr.retain(id);
            }
        }
        for sides in path.bits.iter() {
            for slot in sides {
                if let Some(id) = *slot {
                    self.bits.retain(id);
                }
            }
        }
        path.clone()
    }

    /// Clones by value: every bank is duplicated immediately.  Exists so
    /// tests can prove the lazy scheme equivalent to plain deep copies.
    pub fn clone_eager(&mut self, path: &PathMem) -> PathMem {
        let mut out = self.empty_path();
        for stage in 0..=self.root_stage {
            if let Some(id) = path.llr[stage] {
                let src = self.llr.data[id].clone();
                let fresh = self.llr.alloc(stage);
                self.llr.data[fresh].copy_from_slice(&src);
                out.llr[stage] = Some(fresh);
            }
            for side in 0..2 {
                if let Some(id) = path.bits[stage][side] {
                    let src = self.bits.data[id].clone();
                    let fresh = self.bits.alloc(stage);
                    self.bits.data[fresh].copy_from_slice(&src);
                    out.bits[stage][side] = Some(fresh);
                }
            }
        }
        out
    }

    /// Returns every bank the path references to the pool.
    pub fn release(&mut self, path: PathMem) {
        for (stage, slot) in path.llr.iter().enumerate() {
            if let Some(id) = *slot {
                self.llr.release(id, stage);
            }
        }
        for (stage, sides) in path.bits.iter().enumerate() {
            for slot in sides {
                if let Some(id) = *slot {
                    self.bits.release(id, stage);
                }
            }
        }
    }

    /// Soft-value bank contents at a banked stage, if ever written.
    pub fn llr_bank<'a>(&'a self, path: &PathMem, stage: usize) -> Option<&'a [QLlr]> {
        path.llr[stage].map(|id| self.llr.data[id].as_slice())
    }

    /// Write access to the whole soft-value bank at `stage`, detaching from
    /// any sharing first.  The caller must overwrite the full bank.
    pub fn llr_bank_mut<'a>(&'a mut self, path: &mut PathMem, stage: usize) -> &'a mut [QLlr] {
        assert!(self.llr_banked(stage), "stage {stage} holds no soft-value bank");
        let fresh_needed = match path.llr[stage] {
            None => true,
            Some(id) => self.llr.refs[id] > 1,
        };
        if fresh_needed {
            if let Some(id) = path.llr[stage].take() {
                self.llr.release(id, stage);
            }
            path.llr[stage] = Some(self.llr.alloc(stage));
        }
        let id = path.llr[stage].unwrap();
        self.llr.data[id].as_mut_slice()
    }

    /// Partial-sum bank contents for one side of a stage, if ever written.
    pub fn bit_bank<'a>(&'a self, path: &PathMem, stage: usize, side: usize) -> Option<&'a [bool]> {
        path.bits[stage][side].map(|id| self.bits.data[id].as_slice())
    }

    /// Write access to a whole partial-sum side bank, detaching first.
    pub fn bit_bank_mut<'a>(
        &'a mut self,
        path: &mut PathMem,
        stage: usize,
        side: usize,
    ) -> &'a mut [bool] {
        let fresh_needed = match path.bits[stage][side] {
            None => true,
            Some(id) => self.bits.refs[id] > 1,
        };
        if fresh_needed {
            if let Some(id) = path.bits[stage][side].take() {
                self.bits.release(id, stage);
            }
            path.bits[stage][side] = Some(self.bits.alloc(stage));
        }
        let id = path.bits[stage][side].unwrap();
        self.bits.data[id].as_mut_slice()
    }

    /// Number of banks currently referenced by any path.
    pub fn live_banks(&self) -> usize {
        self.llr.live() + self.bits.live()
    }

    /// Deep copy of everything visible through `path`.
    pub fn materialize(&self, path: &PathMem) -> MemSnapshot {
        MemSnapshot {
            llr: path
                .llr
                .iter()
                .map(|slot| slot.map(|id| self.llr.data[id].clone()))
                .collect(),
            bits: path
                .bits
                .iter()
                .map(|sides| {
                    [
                        sides[0].map(|id| self.bits.data[id].clone()),
                        sides[1].map(|id| self.bits.data[id].clone()),
                    ]
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn channel(n: usize) -> Vec<QLlr> {
        (0..n).map(|i| QLlr::from_raw(i as i32 % 5 - 2)).collect()
    }

    #[test]
    fn banked_stages_skip_three_five_seven() {
        assert!(llr_banked(0, 8));
        assert!(llr_banked(2, 8));
        assert!(!llr_banked(3, 8));
        assert!(llr_banked(4, 8));
        assert!(!llr_banked(5, 8));
        assert!(!llr_banked(7, 8));
        assert!(llr_banked(8, 8));
        // The root always keeps the channel values, whatever its stage.
        assert!(llr_banked(3, 3));
        assert!(llr_banked(5, 5));
        assert!(llr_banked(7, 7));
    }

    #[test]
    fn lazy_clone_shares_until_written() {
        let mut pool = MemPool::new(3);
        let mut a = pool.new_path(&channel(8));
        pool.bit_bank_mut(&mut a, 1, 0).copy_from_slice(&[true, false]);
        let before = pool.live_banks();
        let mut b = pool.clone_lazy(&a);
        assert_eq!(pool.live_banks(), before, "clone allocates nothing");

        // Writing through one path must not disturb the other.
        pool.bit_bank_mut(&mut b, 1, 0).copy_from_slice(&[false, true]);
        assert_eq!(pool.bit_bank(&a, 1, 0).unwrap(), &[true, false]);
        assert_eq!(pool.bit_bank(&b, 1, 0).unwrap(), &[false, true]);
        assert_eq!(pool.bit_bank(&a, 1, 1), None);

        pool.release(a);
        pool.release(b);
        assert_eq!(pool.live_banks(), 0);
    }

    #[test]
    fn eager_clone_matches_lazy_snapshot() {
        let mut pool = MemPool::new(2);
        let mut a = pool.new_path(&channel(4));
        pool.llr_bank_mut(&mut a, 1).copy_from_slice(&[QLlr::from_raw(7), QLlr::from_raw(-7)]);
        pool.bit_bank_mut(&mut a, 0, 1).copy_from_slice(&[true]);

        let lazy = pool.clone_lazy(&a);
        let eager = pool.clone_eager(&a);
        assert_eq!(pool.materialize(&lazy), pool.materialize(&eager));
        assert_eq!(pool.materialize(&lazy), pool.materialize(&a));

        pool.release(a);
        pool.release(lazy);
        pool.release(eager);
        assert_eq!(pool.live_banks(), 0);
    }

    #[test]
    fn freed_banks_are_reused() {
        let mut pool = MemPool::new(2);
        let mut a = pool.new_path(&channel(4));
        pool.llr_bank_mut(&mut a, 1)[0] = QLlr::from_raw(9);
        pool.release(a);

        let mut b = pool.new_path(&channel(4));
        let bank = pool.llr_bank_mut(&mut b, 1);
        // Recycled banks come back zeroed, not with stale contents.
        assert!(bank.iter().all(|v| v.is_zero()));
        pool.release(b);
    }

    #[test]
    fn sides_are_independent() {
        let mut pool = MemPool::new(1);
        let mut a = pool.new_path(&channel(2));
        pool.bit_bank_mut(&mut a, 0, 0).copy_from_slice(&[true]);
        pool.bit_bank_mut(&mut a, 0, 1).copy_from_slice(&[false]);
        assert_eq!(pool.bit_bank(&a, 0, 0).unwrap(), &[true]);
        assert_eq!(pool.bit_bank(&a, 0, 1).unwrap(), &[false]);
        pool.release(a);
    }

    #[test]
    fn path_from_root_shares_only_the_channel() {
        let mut pool = MemPool::new(2);
        let mut a = pool.new_path(&channel(4));
        pool.llr_bank_mut(&mut a, 1)[0] = QLlr::from_raw(3);
        let b = pool.path_from_root(&a);
        assert_eq!(pool.llr_bank(&b, 2), pool.llr_bank(&a, 2));
        assert_eq!(pool.llr_bank(&b, 1), None);
        pool.release(a);
        pool.release(b);
        assert_eq!(pool.live_banks(), 0);
    }

    #[test]
    #[should_panic(expected = "holds no soft-value bank")]
    fn writing_a_bankless_stage_is_rejected() {
        let mut pool = MemPool::new(4);
        let mut a = pool.new_path(&channel(16));
        let _ = pool.llr_bank_mut(&mut a, 3);
    }
}
