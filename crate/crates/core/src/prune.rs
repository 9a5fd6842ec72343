//! Exact tree pruning: one bottom-up pass computes, for every integer
//! length budget simultaneously, the best parent-closed retained set.
//!
//! Per node, children solution lists are combined by max-plus convolution
//! (sibling subtrees are independent), then the node itself is incorporated:
//! below its own length the solution is empty, at or above it the node joins
//! together with the best children split — so no descendant is ever kept
//! without its ancestors. Values must be non-negative; virtual nodes enter
//! the objective with value 0 so they act as free connectors.
//!
//! Ties are broken deterministically: a merge gives the newly merged subtree
//! the smallest budget share that attains the maximum, and a node whose
//! inclusion adds nothing is left out. Solution lists store backpointers
//! (split per merge stage, remainder per node) and retained sets are
//! reconstructed on demand.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::tree::{GlobalTree, NodeId};

#[derive(Debug, Clone, PartialEq)]
pub enum PruneError {
    RatioOutOfRange(f64),
}

impl core::fmt::Display for PruneError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PruneError::RatioOutOfRange(r) => {
                write!(f, "compression ratio {r} outside (0, 1)")
            }
        }
    }
}

impl core::error::Error for PruneError {}

/// One budget entry of an explicit solution list: best value and the
/// retained node set achieving it.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionEntry {
    pub value: f64,
    pub nodes: BTreeSet<NodeId>,
}

impl SolutionEntry {
    pub fn empty() -> Self {
        SolutionEntry { value: 0.0, nodes: BTreeSet::new() }
    }
}

/// Max-plus convolution of two sibling solution lists. Entry `l` of the
/// result holds the best split of budget `l` between `q` and `p`; at equal
/// value the smallest share for `p` wins.
pub fn merge_solutions(q: &[SolutionEntry], p: &[SolutionEntry]) -> Vec<SolutionEntry> {
    if q.is_empty() {
        return p.to_vec();
    }
    if p.is_empty() {
        return q.to_vec();
    }
    let merged_len = q.len() + p.len() - 1;
    let mut out = Vec::with_capacity(merged_len);
    for l in 0..merged_len {
        let lo = l.saturating_sub(q.len() - 1);
        let hi = l.min(p.len() - 1);
        let mut best_j = lo;
        let mut best = f64::NEG_INFINITY;
        for j in lo..=hi {
            let v = q[l - j].value + p[j].value;
            if v > best {
                best = v;
                best_j = j;
            }
        }
        let mut nodes = q[l - best_j].nodes.clone();
        nodes.extend(p[best_j].nodes.iter().copied());
        out.push(SolutionEntry { value: best, nodes });
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct MergeCell {
    value: f64,
    /// Budget granted to the newly merged child at this entry.
    child_budget: u32,
}

#[derive(Debug, Clone, Copy)]
struct IncCell {
    value: f64,
    /// Budget passed to the merged children when the node is included;
    /// `EXCLUDED` when the entry keeps nothing.
    rem: u32,
}

const EXCLUDED: u32 = u32::MAX;

#[derive(Debug, Clone, Default)]
struct NodeSolution {
    /// One merge stage per child, in child order.
    stages: Vec<Vec<MergeCell>>,
    /// Final list after incorporating the node itself.
    complete: Vec<IncCell>,
}

/// Optimal (value, retained set) per integer budget for one subtree,
/// reconstructable for any budget from stored backpointers.
#[derive(Debug, Clone)]
pub struct BudgetSolutionList {
    scope: NodeId,
    children: Vec<Vec<NodeId>>,
    solutions: Vec<NodeSolution>,
}

impl BudgetSolutionList {
    pub fn scope(&self) -> NodeId {
        self.scope
    }

    /// Number of entries (total subtree length + 1).
    pub fn len(&self) -> usize {
        self.solutions[self.scope].complete.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn max_budget(&self) -> usize {
        self.len() - 1
    }

    /// Best value within budget `l` (clamped at the maximum).
    pub fn value(&self, budget: usize) -> f64 {
        let list = &self.solutions[self.scope].complete;
        list[budget.min(list.len() - 1)].value
    }

    /// All values in budget order.
    pub fn values(&self) -> Vec<f64> {
        self.solutions[self.scope]
            .complete
            .iter()
            .map(|c| c.value)
            .collect()
    }

    /// Reconstructs the retained node set for `budget`.
    pub fn retained(&self, budget: usize) -> BTreeSet<NodeId> {
        let mut out = BTreeSet::new();
        let top = budget.min(self.max_budget());
        let mut stack: Vec<(NodeId, usize)> = alloc::vec![(self.scope, top)];
        while let Some((v, l)) = stack.pop() {
            let sol = &self.solutions[v];
            let cell = sol.complete[l.min(sol.complete.len() - 1)];
            if cell.rem == EXCLUDED {
                continue;
            }
            out.insert(v);
            let mut rem = cell.rem as usize;
            for (i, stage) in sol.stages.iter().enumerate().rev() {
                let mc = stage[rem];
                let child_budget = mc.child_budget as usize;
                stack.push((self.children[v][i], child_budget));
                rem -= child_budget;
            }
            debug_assert_eq!(rem, 0);
        }
        out
    }

    /// Explicit (value, set) entries; mainly for small-scale inspection.
    pub fn entries(&self) -> Vec<SolutionEntry> {
        (0..self.len())
            .map(|l| SolutionEntry {
                value: self.value(l),
                nodes: self.retained(l),
            })
            .collect()
    }
}

fn dp_value(tree: &GlobalTree, v: NodeId) -> f64 {
    if tree.nodes[v].kind.is_virtual() {
        0.0
    } else {
        tree.nodes[v].e_adjusted
    }
}

/// Bottom-up solve of the subtree rooted at `scope`: every budget at once.
/// Node values are read from `e_adjusted` (0 for virtual nodes) and must be
/// non-negative.
pub fn calculate_solution(tree: &GlobalTree, scope: NodeId) -> BudgetSolutionList {
    let mut solutions: Vec<NodeSolution> = alloc::vec![NodeSolution::default(); tree.len()];
    let mut children: Vec<Vec<NodeId>> = alloc::vec![Vec::new(); tree.len()];

    for v in tree.post_order(scope) {
        children[v] = tree.nodes[v].children.clone();
        let mut acc: Vec<f64> = alloc::vec![0.0];
        let mut stages: Vec<Vec<MergeCell>> = Vec::with_capacity(children[v].len());
        for &c in &children[v] {
            let child = &solutions[c].complete;
            let merged_len = acc.len() + child.len() - 1;
            let mut stage = Vec::with_capacity(merged_len);
            for l in 0..merged_len {
                let lo = l.saturating_sub(acc.len() - 1);
                let hi = l.min(child.len() - 1);
                let mut best = f64::NEG_INFINITY;
                let mut best_j = lo;
                for j in lo..=hi {
                    let val = acc[l - j] + child[j].value;
                    if val > best {
                        best = val;
                        best_j = j;
                    }
                }
                stage.push(MergeCell { value: best, child_budget: best_j as u32 });
            }
            acc = stage.iter().map(|c| c.value).collect();
            stages.push(stage);
        }

        let value = dp_value(tree, v);
        debug_assert!(value >= 0.0, "node {v} has negative value {value}");
        let cost = tree.nodes[v].length;
        let mut complete = Vec::with_capacity(acc.len() + cost);
        for l in 0..acc.len() + cost {
            if l < cost {
                complete.push(IncCell { value: 0.0, rem: EXCLUDED });
            } else {
                let inc = value + acc[l - cost];
                if inc > 0.0 {
                    complete.push(IncCell { value: inc, rem: (l - cost) as u32 });
                } else {
                    complete.push(IncCell { value: 0.0, rem: EXCLUDED });
                }
            }
        }
        solutions[v] = NodeSolution { stages, complete };
    }

    BudgetSolutionList { scope, children, solutions }
}

/// One compressed output: the retained nodes, realized size, objective
/// value, and the detokenized text.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressionResult {
    pub ratio: f64,
    pub budget: usize,
    pub retained: BTreeSet<NodeId>,
    pub realized_length: usize,
    pub realized_ratio: f64,
    pub objective_value: f64,
    pub compressed_text: String,
}

/// Integer budget for a ratio: floor with a tiny guard against binary
/// representation of decimal ratios (0.3 * 10 must give 3, not 2).
pub(crate) fn budget_for(ratio: f64, total: usize) -> usize {
    let raw = libm::floor(ratio * total as f64 + 1e-9);
    if raw <= 0.0 {
        0
    } else {
        (raw as usize).min(total)
    }
}

/// Prunes the tree at every requested ratio from a single solve. Every
/// ratio must lie strictly inside (0, 1).
pub fn compress(tree: &GlobalTree, ratios: &[f64]) -> Result<Vec<CompressionResult>, PruneError> {
    for &r in ratios {
        if !(r > 0.0 && r < 1.0) || !r.is_finite() {
            return Err(PruneError::RatioOutOfRange(r));
        }
    }
    let total = tree.total_length();
    let q = calculate_solution(tree, tree.root);
    let mut out = Vec::with_capacity(ratios.len());
    for &ratio in ratios {
        let budget = budget_for(ratio, total);
        let retained = q.retained(budget);
        let realized_length: usize = retained.iter().map(|&id| tree.nodes[id].length).sum();
        let realized_ratio = if total == 0 {
            0.0
        } else {
            realized_length as f64 / total as f64
        };
        out.push(CompressionResult {
            ratio,
            budget,
            objective_value: q.value(budget),
            compressed_text: detokenize(tree, &retained),
            retained,
            realized_length,
            realized_ratio,
        });
    }
    Ok(out)
}

const CLOSING_PUNCT: &[char] = &[
    '.', ',', ';', ':', '!', '?', ')', ']', '}', '%', '\u{2026}', '\u{00bb}', '\u{201d}',
    '\u{2019}',
];

fn glues_to_predecessor(token: &str) -> bool {
    let mut chars = token.chars();
    match chars.next() {
        None => true,
        Some(first) => {
            if first == '\'' || first == '\u{2019}' {
                return true;
            }
            chars.next().is_none() && CLOSING_PUNCT.contains(&first)
        }
    }
}

/// Emits retained actual tokens in document order: closing punctuation and
/// apostrophe-initial forms glue to their predecessor, everything else is
/// joined with a single space.
pub fn detokenize(tree: &GlobalTree, retained: &BTreeSet<NodeId>) -> String {
    let mut out = String::new();
    for &id in retained {
        let node = &tree.nodes[id];
        let Some(text) = &node.token_text else { continue };
        if !out.is_empty() && !glues_to_predecessor(text) {
            out.push(' ');
        }
        out.push_str(text);
    }
    out
}
