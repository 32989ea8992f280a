//! Decode-tree partitioning into sub-processes.
//!
//! Successive cancellation walks the code tree depth first.  This module cuts
//! that walk into *sub-processes* (SPs): each SP is the run of edge-traversal
//! actions from one bit-decision node (exclusive) to the next (inclusive).
//! Decision nodes are classified into multi-bit constituent-code classes so a
//! whole subtree can be decided in one step, pure-frozen subtrees are
//! absorbed into the following SP with their partial sums forced to zero, and
//! all-good subtrees end *static* sub-processes that never fork a search.
//!
//! # Example
//! ```
//! use polar_core::code::{CodeSpec, CrcSpec};
//! use polar_core::tree::{NodeClass, SpPartition};
//!
//! let spec = CodeSpec::build(8, 4, CrcSpec::none(), 0).unwrap();
//! let part = SpPartition::build(&spec, 2, 4).unwrap();
//! let classes: Vec<NodeClass> = part.sps().iter().map(|sp| sp.class).collect();
//! assert_eq!(classes, vec![NodeClass::Rep, NodeClass::Spc]);
//! ```

use crate::code::CodeSpec;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("stage bounds ({smin}, {smax}) invalid: need smin=smax=0 or 2 <= smin <= smax <= 4")]
    BadStageBounds { smin: usize, smax: usize },
}

/// A node of the code tree: `stage` is the subtree height (leaves are stage
/// 0) and `offset` counts nodes left to right within the stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeRef {
    pub stage: u8,
    pub offset: u32,
}

impl NodeRef {
    pub fn new(stage: usize, offset: usize) -> Self {
        NodeRef { stage: stage as u8, offset: offset as u32 }
    }

    /// Number of leaves under this node.
    pub fn span(&self) -> usize {
        1usize << self.stage
    }

    /// First leaf index covered by this node.
    pub fn first_leaf(&self) -> usize {
        (self.offset as usize) << self.stage
    }

    pub fn left_child(&self) -> NodeRef {
        debug_assert!(self.stage > 0);
        NodeRef { stage: self.stage - 1, offset: self.offset * 2 }
    }

    pub fn right_child(&self) -> NodeRef {
        debug_assert!(self.stage > 0);
        NodeRef { stage: self.stage - 1, offset: self.offset * 2 + 1 }
    }

    /// True when this node is the right child of its parent.
    pub fn is_right_child(&self) -> bool {
        self.offset & 1 == 1
    }
}

/// Classification of a subtree by its frozen/good leaf pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    /// Every leaf frozen; absorbed into the next SP with zero partial sums.
    Rate0,
    /// Every leaf an information bit.
    Rate1,
    /// All leaves frozen except the last.
    Rep,
    /// All leaves information except the first.
    Spc,
    /// All leaves frozen except the last two.
    Rep2,
    /// All leaves frozen except the last three.
    Pcr,
    /// All leaves information except the first two.
    Spc2,
    /// All leaves information except the first three.
    Rpc,
    /// Every leaf is a good (skippable) information bit.
    Good,
    /// Single ordinary information leaf.
    InfoLeaf,
    /// No terminal class applies; the walk descends.
    Internal,
}

impl NodeClass {
    /// True for classes that end a sub-process with a bit decision.
    pub fn is_decision(self) -> bool {
        !matches!(self, NodeClass::Rate0 | NodeClass::Internal)
    }

    /// True when the decision may fork a list/stack search (an FSP ending).
    /// Good nodes end static sub-processes instead.
    pub fn forks_search(self) -> bool {
        self.is_decision() && !matches!(self, NodeClass::Good)
    }
}

/// One scheduled step of the shared SC traversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpAction {
    /// Compute the left-child soft values of `node` (check combination).
    FMinus(NodeRef),
    /// Compute the right-child soft values of `node` (variable combination).
    FPlus(NodeRef),
    /// Rebuild the partial sums of `node` from both children.
    Combine(NodeRef),
    /// Force the all-zero partial sums of an absorbed pure-frozen subtree,
    /// charging the path metric for any soft values that disagree.
    FrozenBeta(NodeRef),
}

/// One sub-process: edge traversal actions followed by a bit decision.
#[derive(Debug, Clone, PartialEq)]
pub struct SpDescriptor {
    pub sp_index: usize,
    /// Actions executed before the decision, in schedule order.
    pub actions: Vec<SpAction>,
    /// The bit-decision node ending this SP.
    pub node: NodeRef,
    pub class: NodeClass,
    /// Trailing combine actions after the final decision (last SP only).
    pub post_actions: Vec<SpAction>,
}

impl SpDescriptor {
    /// True when this SP extends candidate paths (FSP); false for static SPs.
    pub fn is_fsp(&self) -> bool {
        self.class.forks_search()
    }
}

/// Classifies `node` against the frozen/good pattern of `spec`.
///
/// Pure-frozen and pure-good subtrees classify at any stage (they end or are
/// absorbed into static sub-processes); multi-bit constituent classes apply
/// only for `smin <= stage <= smax`, and `smax = 0` disables both so every
/// surviving decision is a single leaf.
pub fn classify_node(node: NodeRef, spec: &CodeSpec, smin: usize, smax: usize) -> NodeClass {
    let first = node.first_leaf();
    let span = node.span();
    let stage = node.stage as usize;
    let frozen: Vec<bool> = (first..first + span).map(|i| spec.is_frozen(i)).collect();
    let n_frozen = frozen.iter().filter(|&&f| f).count();
    if n_frozen == span {
        return NodeClass::Rate0;
    }
    if (first..first + span).all(|i| spec.is_good(i)) {
        if stage == 0 || smax >= 1 {
            return NodeClass::Good;
        }
        return NodeClass::Internal;
    }
    if stage == 0 {
        return NodeClass::InfoLeaf;
    }
    if stage < smin || stage > smax {
        return NodeClass::Internal;
    }
    let frozen_prefix = frozen.iter().take_while(|&&f| f).count();
    let info_suffix = span - frozen_prefix;
    let prefix_only = frozen_prefix == n_frozen;
    if n_frozen == 0 {
        NodeClass::Rate1
    } else if prefix_only && info_suffix == 1 {
        NodeClass::Rep
    } else if prefix_only && frozen_prefix == 1 {
        NodeClass::Spc
    } else if prefix_only && info_suffix == 2 {
        NodeClass::Rep2
    } else if prefix_only && info_suffix == 3 {
        NodeClass::Pcr
    } else if prefix_only && frozen_prefix == 2 {
        NodeClass::Spc2
    } else if prefix_only && frozen_prefix == 3 {
        NodeClass::Rpc
    } else {
        NodeClass::Internal
    }
}

/// An entire decode schedule: the ordered list of sub-processes.
#[derive(Debug, Clone, PartialEq)]
pub struct SpPartition {
    n: usize,
    root_stage: usize,
    smin: usize,
    smax: usize,
    sps: Vec<SpDescriptor>,
}

impl SpPartition {
    /// Builds the schedule for `spec` with multi-bit decisions allowed at
    /// stages `smin..=smax` (or none at all for `smin = smax = 0`).
    pub fn build(spec: &CodeSpec, smin: usize, smax: usize) -> Result<Self, TreeError> {
        let oracle_mode = smin == 0 && smax == 0;
        if !oracle_mode && !(2 <= smin && smin <= smax && smax <= 4) {
            return Err(TreeError::BadStageBounds { smin, smax });
        }
        let root_stage = spec.stages();
        let mut builder = Builder { spec, smin, smax, pending: Vec::new(), sps: Vec::new() };
        builder.walk(NodeRef::new(root_stage, 0));
        let pending = std::mem::take(&mut builder.pending);
        let mut sps = builder.sps;
        if let Some(last) = sps.last_mut() {
            last.post_actions = pending;
        }
        Ok(SpPartition { n: spec.n(), root_stage, smin, smax, sps })
    }

    pub fn sps(&self) -> &[SpDescriptor] {
        &self.sps
    }

    pub fn len(&self) -> usize {
        self.sps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sps.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root_stage(&self) -> usize {
        self.root_stage
    }

    pub fn smin(&self) -> usize {
        self.smin
    }

    pub fn smax(&self) -> usize {
        self.smax
    }

    /// Index of the SP whose decision covers leaf `leaf`, if any.
    pub fn sp_covering_leaf(&self, leaf: usize) -> Option<usize> {
        self.sps.iter().position(|sp| {
            let first = sp.node.first_leaf();
            (first..first + sp.node.span()).contains(&leaf)
        })
    }

    /// One line per SP: index, node, class, action count.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for sp in &self.sps {
            let kind = if sp.is_fsp() { "FSP" } else { "SSP" };
            out.push_str(&format!(
                "sp {:>4} {} node s{}@{} span [{},{}) class {:?} actions {}\n",
                sp.sp_index,
                kind,
                sp.node.stage,
                sp.node.offset,
                sp.node.first_leaf(),
                sp.node.first_leaf() + sp.node.span(),
                sp.class,
                sp.actions.len() + sp.post_actions.len(),
            ));
        }
        out
    }
}

struct Builder<'a> {
    spec: &'a CodeSpec,
    smin: usize,
    smax: usize,
    pending: Vec<SpAction>,
    sps: Vec<SpDescriptor>,
}

impl Builder<'_> {
    fn walk(&mut self, node: NodeRef) {
        let class = classify_node(node, self.spec, self.smin, self.smax);
        match class {
            NodeClass::Rate0 => {
                // Absorbed: the next SP forces zero partial sums here.
                self.pending.push(SpAction::FrozenBeta(node));
            }
            NodeClass::Internal => {
                self.pending.push(SpAction::FMinus(node));
                self.walk(node.left_child());
                self.pending.push(SpAction::FPlus(node));
                self.walk(node.right_child());
                self.pending.push(SpAction::Combine(node));
            }
            _ => {
                let actions = std::mem::take(&mut self.pending);
                self.sps.push(SpDescriptor {
                    sp_index: self.sps.len(),
                    actions,
                    node,
                    class,
                    post_actions: Vec::new(),
                });
            }
        }
    }
}
