//! Node value adjustment over the global tree.
//!
//! Root-ward propagation fills every virtual node with the recursive mean of
//! its segment (actual values are read but never modified). Leaf-ward
//! propagation then walks down carrying a multiplier M (initially 1): every
//! virtual node multiplies M by its own adjusted value, first children
//! additionally by `a2`, and every actual node becomes
//! `e_aligned + M^a1`. M passes through actual nodes unchanged, so all
//! tokens of one sentence receive the same additive shift.

use alloc::vec::Vec;

use crate::tree::{GlobalTree, NodeId};

#[derive(Debug, Clone, PartialEq)]
pub enum AdjustError {
    ParamOutOfRange { name: &'static str, value: f64 },
    Overflow { node: NodeId, multiplier: f64, exponent: f64 },
}

impl core::fmt::Display for AdjustError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AdjustError::ParamOutOfRange { name, value } => {
                write!(f, "{name} = {value} outside its typical range (pass --unsafe-params to override)")
            }
            AdjustError::Overflow { node, multiplier, exponent } => write!(
                f,
                "M^a1 overflowed at node {node} (M = {multiplier}, a1 = {exponent})"
            ),
        }
    }
}

impl core::error::Error for AdjustError {}

/// Hyper-parameters: `a1` sharpens the propagated request, `a2` emphasizes
/// first children at each hierarchy level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjustmentParams {
    pub a1: f64,
    pub a2: f64,
}

impl Default for AdjustmentParams {
    fn default() -> Self {
        AdjustmentParams { a1: 4.0, a2: 100.0 }
    }
}

impl AdjustmentParams {
    pub fn new(a1: f64, a2: f64) -> Self {
        AdjustmentParams { a1, a2 }
    }

    /// Enforces the typical ranges 0 <= a1 <= 5 and 1 <= a2 <= 1000 unless
    /// explicitly overridden.
    pub fn validate(&self, allow_unsafe: bool) -> Result<(), AdjustError> {
        if allow_unsafe {
            return Ok(());
        }
        if !self.a1.is_finite() || self.a1 < 0.0 || self.a1 > 5.0 {
            return Err(AdjustError::ParamOutOfRange { name: "a1", value: self.a1 });
        }
        if !self.a2.is_finite() || self.a2 < 1.0 || self.a2 > 1000.0 {
            return Err(AdjustError::ParamOutOfRange { name: "a2", value: self.a2 });
        }
        Ok(())
    }
}

/// Fills `e_adjusted` on virtual nodes with the recursive mean of their
/// subtree values; actual nodes are left untouched. The mean of a childless
/// virtual node is 0.
pub fn rootward(tree: &mut GlobalTree) {
    let mut returned = alloc::vec![0.0f64; tree.len()];
    for v in tree.post_order(tree.root) {
        let node = &tree.nodes[v];
        let mut sum = 0.0;
        let mut count = 0usize;
        for &c in &node.children {
            sum += returned[c];
            count += 1;
        }
        let n = if node.kind.is_virtual() {
            let n = if count == 0 { 0.0 } else { sum / count as f64 };
            tree.nodes[v].e_adjusted = n;
            n
        } else {
            sum += node.e_aligned;
            count += 1;
            sum / count as f64
        };
        returned[v] = n;
    }
}

/// Rewrites `e_adjusted` on actual nodes as `e_aligned + M^a1`, carrying M
/// down from the root. Requires `rootward` to have run.
pub fn leafward(tree: &mut GlobalTree, params: &AdjustmentParams) -> Result<(), AdjustError> {
    let mut stack: Vec<(NodeId, f64)> = alloc::vec![(tree.root, 1.0)];
    while let Some((v, mut m)) = stack.pop() {
        let node = &tree.nodes[v];
        if node.kind.is_virtual() {
            m *= node.e_adjusted;
            if tree.is_first_child(v) {
                m *= params.a2;
            }
        } else {
            let boost = libm::pow(m, params.a1);
            if !boost.is_finite() {
                return Err(AdjustError::Overflow {
                    node: v,
                    multiplier: m,
                    exponent: params.a1,
                });
            }
            tree.nodes[v].e_adjusted = tree.nodes[v].e_aligned + boost;
        }
        for &c in tree.nodes[v].children.iter().rev() {
            stack.push((c, m));
        }
    }
    Ok(())
}

/// Root-ward then leaf-ward, in that order.
pub fn adjust(tree: &mut GlobalTree, params: &AdjustmentParams) -> Result<(), AdjustError> {
    rootward(tree);
    leafward(tree, params)
}

/// The pass-through used when adjustment is disabled: every actual node's
/// adjusted value is its aligned value, virtual nodes stay at zero.
pub fn copy_aligned(tree: &mut GlobalTree) {
    for node in tree.nodes.iter_mut() {
        node.e_adjusted = if node.kind.is_virtual() { 0.0 } else { node.e_aligned };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{GlobalTree, NodeKind, TreeNode};

    // doc root -> two sentence nodes -> two tokens each
    fn toy_tree(values: [f64; 4]) -> GlobalTree {
        let nodes = alloc::vec![
            node(0, NodeKind::VirtualDocument, None, alloc::vec![1, 4], 0.0),
            node(1, NodeKind::VirtualSentence, Some(0), alloc::vec![2, 3], 0.0),
            node(2, NodeKind::Actual, Some(1), alloc::vec![], values[0]),
            node(3, NodeKind::Actual, Some(1), alloc::vec![], values[1]),
            node(4, NodeKind::VirtualSentence, Some(0), alloc::vec![5, 6], 0.0),
            node(5, NodeKind::Actual, Some(4), alloc::vec![], values[2]),
            node(6, NodeKind::Actual, Some(4), alloc::vec![], values[3]),
        ];
        GlobalTree { nodes, root: 0 }
    }

    fn node(
        id: usize,
        kind: NodeKind,
        parent: Option<usize>,
        children: Vec<usize>,
        e: f64,
    ) -> TreeNode {
        TreeNode {
            id,
            kind,
            parent,
            children,
            token_text: None,
            sentence_index: None,
            token_index: None,
            length: if kind == NodeKind::Actual { 1 } else { 0 },
            e_aligned: e,
            e_adjusted: 0.0,
        }
    }

    #[test]
    fn rootward_averages_recursively() {
        // sentences average to 3 and 8, document to 5.5
        let mut tree = toy_tree([2.0, 4.0, 6.0, 10.0]);
        rootward(&mut tree);
        assert_eq!(tree.nodes[1].e_adjusted, 3.0);
        assert_eq!(tree.nodes[4].e_adjusted, 8.0);
        assert_eq!(tree.nodes[0].e_adjusted, 5.5);
        // actual nodes untouched by this pass
        assert_eq!(tree.nodes[2].e_adjusted, 0.0);
    }

    #[test]
    fn rootward_actual_node_with_children() {
        // actual leaf returns its own value; an actual parent averages
        // children returns with its own value appended
        let mut tree = toy_tree([2.0, 4.0, 6.0, 10.0]);
        // re-parent node 3 under node 2 (token chain)
        tree.nodes[1].children = alloc::vec![2];
        tree.nodes[2].children = alloc::vec![3];
        tree.nodes[3].parent = Some(2);
        rootward(&mut tree);
        // node 2 returns avg([4, 2]) = 3, sentence gets 3
        assert_eq!(tree.nodes[1].e_adjusted, 3.0);
    }

    #[test]
    fn leafward_formula_direct() {
        // e_aligned 5, inherited M = 2, a1 = 3 -> 5 + 8
        let mut tree = toy_tree([5.0, 5.0, 5.0, 5.0]);
        rootward(&mut tree);
        // force sentence and document values so M at tokens is exactly 2
        tree.nodes[0].e_adjusted = 2.0;
        tree.nodes[1].e_adjusted = 1.0;
        tree.nodes[4].e_adjusted = 1.0;
        leafward(&mut tree, &AdjustmentParams::new(3.0, 1.0)).unwrap();
        assert_eq!(tree.nodes[2].e_adjusted, 5.0 + 8.0);
        assert_eq!(tree.nodes[5].e_adjusted, 5.0 + 8.0);
    }

    #[test]
    fn a1_zero_shifts_uniformly() {
        let mut tree = toy_tree([2.0, 4.0, 6.0, 10.0]);
        adjust(&mut tree, &AdjustmentParams::new(0.0, 1.0)).unwrap();
        for id in [2, 3, 5, 6] {
            assert!((tree.nodes[id].e_adjusted - (tree.nodes[id].e_aligned + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn hand_evaluated_fixture() {
        // a1 = 1, a2 = 1: tokens get e_aligned + E_doc * E_sentence
        let mut tree = toy_tree([2.0, 4.0, 6.0, 10.0]);
        adjust(&mut tree, &AdjustmentParams::new(1.0, 1.0)).unwrap();
        assert!((tree.nodes[2].e_adjusted - (2.0 + 5.5 * 3.0)).abs() < 1e-12);
        assert!((tree.nodes[3].e_adjusted - (4.0 + 5.5 * 3.0)).abs() < 1e-12);
        assert!((tree.nodes[5].e_adjusted - (6.0 + 5.5 * 8.0)).abs() < 1e-12);
        assert!((tree.nodes[6].e_adjusted - (10.0 + 5.5 * 8.0)).abs() < 1e-12);
    }

    #[test]
    fn first_child_emphasis() {
        // with a2 = 10 the first sentence's tokens see M scaled once more
        let mut tree = toy_tree([2.0, 4.0, 6.0, 10.0]);
        adjust(&mut tree, &AdjustmentParams::new(1.0, 10.0)).unwrap();
        assert!((tree.nodes[2].e_adjusted - (2.0 + 5.5 * 3.0 * 10.0)).abs() < 1e-12);
        // second sentence is not a first child: unchanged emphasis
        assert!((tree.nodes[5].e_adjusted - (6.0 + 5.5 * 8.0)).abs() < 1e-12);
    }

    #[test]
    fn within_sentence_ranking_preserved() {
        let mut tree = toy_tree([2.0, 4.0, 6.0, 10.0]);
        adjust(&mut tree, &AdjustmentParams::new(2.0, 100.0)).unwrap();
        // same additive shift within a sentence keeps the order
        assert!(tree.nodes[2].e_adjusted < tree.nodes[3].e_adjusted);
        assert!(tree.nodes[5].e_adjusted < tree.nodes[6].e_adjusted);
    }

    #[test]
    fn overflow_is_reported() {
        let mut tree = toy_tree([1e300, 1e300, 1e300, 1e300]);
        let err = adjust(&mut tree, &AdjustmentParams::new(5.0, 1000.0));
        assert!(matches!(err, Err(AdjustError::Overflow { .. })));
    }

    #[test]
    fn param_ranges_enforced() {
        assert!(AdjustmentParams::new(6.0, 100.0).validate(false).is_err());
        assert!(AdjustmentParams::new(4.0, 0.5).validate(false).is_err());
        assert!(AdjustmentParams::new(4.0, 2000.0).validate(false).is_err());
        assert!(AdjustmentParams::new(6.0, 2000.0).validate(true).is_ok());
        assert!(AdjustmentParams::default().validate(false).is_ok());
    }

    #[test]
    fn copy_aligned_passes_values_through() {
        let mut tree = toy_tree([2.0, 4.0, 6.0, 10.0]);
        copy_aligned(&mut tree);
        assert_eq!(tree.nodes[2].e_adjusted, 2.0);
        assert_eq!(tree.nodes[0].e_adjusted, 0.0);
    }
}
