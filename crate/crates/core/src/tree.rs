//! The merged document tree: actual token nodes under virtual sentence,
//! paragraph, section, and document nodes.
//!
//! Node ids are assigned in a deterministic pre-order over the structure,
//! with actual nodes in token order, so ascending actual ids reproduce the
//! original token sequence. Virtual nodes carry zero length and zero initial
//! value. Ablation shapes (single virtual root, flat token list, bare local
//! tree) are separate builders; only the hierarchical shape enforces the
//! parent-kind constraint.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::parse::LocalParseTree;
use crate::segment::SegmentedDocument;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeError {
    CountMismatch { sentences: usize, parses: usize },
    UnknownNode(NodeId),
    Invalid { detail: String },
}

impl core::fmt::Display for TreeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TreeError::CountMismatch { sentences, parses } => {
                write!(f, "{sentences} sentences but {parses} parse trees")
            }
            TreeError::UnknownNode(id) => write!(f, "unknown node id {id}"),
            TreeError::Invalid { detail } => write!(f, "invalid tree: {detail}"),
        }
    }
}

impl core::error::Error for TreeError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Actual,
    VirtualSentence,
    VirtualParagraph,
    VirtualSection,
    VirtualDocument,
}

impl NodeKind {
    pub fn is_virtual(self) -> bool {
        !matches!(self, NodeKind::Actual)
    }

    pub fn label(self) -> &'static str {
        match self {
            NodeKind::Actual => "token",
            NodeKind::VirtualSentence => "sentence",
            NodeKind::VirtualParagraph => "paragraph",
            NodeKind::VirtualSection => "section",
            NodeKind::VirtualDocument => "document",
        }
    }
}

/// One tree node. `length` is C(v) in scorer-token units and `e_aligned` /
/// `e_adjusted` are the aligned and adjusted values in nats; virtual nodes
/// keep length 0 and e_aligned 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub id: NodeId,
    pub kind: NodeKind,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub token_text: Option<String>,
    pub sentence_index: Option<usize>,
    /// 1-based parse ordinal within the sentence (actual nodes).
    pub token_index: Option<usize>,
    pub length: usize,
    pub e_aligned: f64,
    pub e_adjusted: f64,
}

impl TreeNode {
    fn virtual_node(id: NodeId, kind: NodeKind, parent: Option<NodeId>) -> TreeNode {
        TreeNode {
            id,
            kind,
            parent,
            children: Vec::new(),
            token_text: None,
            sentence_index: None,
            token_index: None,
            length: 0,
            e_aligned: 0.0,
            e_adjusted: 0.0,
        }
    }

    fn actual_node(
        id: NodeId,
        parent: NodeId,
        text: String,
        sentence: usize,
        ordinal: usize,
    ) -> TreeNode {
        TreeNode {
            id,
            kind: NodeKind::Actual,
            parent: Some(parent),
            children: Vec::new(),
            token_text: Some(text),
            sentence_index: Some(sentence),
            token_index: Some(ordinal),
            length: 1,
            e_aligned: 0.0,
            e_adjusted: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalTree {
    pub nodes: Vec<TreeNode>,
    pub root: NodeId,
}

impl GlobalTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Total length C(V) in scorer-token units.
    pub fn total_length(&self) -> usize {
        self.nodes.iter().map(|n| n.length).sum()
    }

    /// True when `id` is the first entry of its parent's child list.
    pub fn is_first_child(&self, id: NodeId) -> bool {
        match self.nodes[id].parent {
            Some(p) => self.nodes[p].children.first() == Some(&id),
            None => false,
        }
    }

    /// Actual node ids per sentence, indexed by token ordinal minus one.
    pub fn actual_ids_by_sentence(&self) -> BTreeMap<usize, Vec<NodeId>> {
        let mut out: BTreeMap<usize, Vec<(usize, NodeId)>> = BTreeMap::new();
        for n in &self.nodes {
            if n.kind == NodeKind::Actual {
                out.entry(n.sentence_index.unwrap_or(0))
                    .or_default()
                    .push((n.token_index.unwrap_or(0), n.id));
            }
        }
        out.into_iter()
            .map(|(s, mut v)| {
                v.sort_unstable();
                (s, v.into_iter().map(|(_, id)| id).collect())
            })
            .collect()
    }

    /// Children-before-parent order over the subtree rooted at `from`.
    pub fn post_order(&self, from: NodeId) -> Vec<NodeId> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = alloc::vec![from];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(self.nodes[v].children.iter().copied());
        }
        order.reverse();
        order
    }

    /// Actual node ids in document order.
    pub fn actual_ids(&self) -> Vec<NodeId> {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Actual)
            .map(|n| n.id)
            .collect()
    }

    /// Checks the hierarchical-shape invariants: one document root,
    /// parent-kind constraints on every edge, sibling order by id.
    pub fn validate_hierarchy(&self) -> Result<(), TreeError> {
        let doc_roots = self
            .nodes
            .iter()
            .filter(|n| n.kind == NodeKind::VirtualDocument)
            .count();
        if doc_roots != 1 || self.nodes[self.root].kind != NodeKind::VirtualDocument {
            return Err(TreeError::Invalid {
                detail: "exactly one virtual document node must be the root".to_string(),
            });
        }
        for n in &self.nodes {
            if let Some(p) = n.parent {
                let pk = self.nodes[p].kind;
                let ok = match n.kind {
                    NodeKind::Actual => {
                        matches!(pk, NodeKind::Actual | NodeKind::VirtualSentence)
                    }
                    NodeKind::VirtualSentence => pk == NodeKind::VirtualParagraph,
                    NodeKind::VirtualParagraph => pk == NodeKind::VirtualSection,
                    NodeKind::VirtualSection => pk == NodeKind::VirtualDocument,
                    NodeKind::VirtualDocument => false,
                };
                if !ok {
                    return Err(TreeError::Invalid {
                        detail: alloc::format!(
                            "node {} ({}) under parent of kind {}",
                            n.id,
                            n.kind.label(),
                            pk.label()
                        ),
                    });
                }
            } else if n.id != self.root {
                return Err(TreeError::Invalid {
                    detail: alloc::format!("node {} has no parent but is not the root", n.id),
                });
            }
            if n.kind.is_virtual() && (n.length != 0 || n.e_aligned != 0.0) {
                return Err(TreeError::Invalid {
                    detail: alloc::format!("virtual node {} carries length or value", n.id),
                });
            }
        }
        Ok(())
    }

    /// Indented text dump, one node per line.
    pub fn dump_text(&self) -> String {
        let mut out = String::new();
        let mut stack: Vec<(NodeId, usize)> = alloc::vec![(self.root, 0)];
        while let Some((id, depth)) = stack.pop() {
            let n = &self.nodes[id];
            for _ in 0..depth {
                out.push_str("  ");
            }
            match &n.token_text {
                Some(t) => out.push_str(&alloc::format!(
                    "{} {} {:?} len={} e={:.6} adj={:.6}\n",
                    n.id,
                    n.kind.label(),
                    t,
                    n.length,
                    n.e_aligned,
                    n.e_adjusted
                )),
                None => out.push_str(&alloc::format!(
                    "{} {} adj={:.6}\n",
                    n.id,
                    n.kind.label(),
                    n.e_adjusted
                )),
            }
            for &c in n.children.iter().rev() {
                stack.push((c, depth + 1));
            }
        }
        out
    }

    /// GraphViz DOT dump.
    pub fn dump_dot(&self) -> String {
        let mut out = String::from("digraph prompt {\n  rankdir=TB;\n");
        for n in &self.nodes {
            let label = match &n.token_text {
                Some(t) => alloc::format!("{}\\n{}", t.replace('"', "'"), n.length),
                None => n.kind.label().to_string(),
            };
            let shape = if n.kind.is_virtual() { "ellipse" } else { "box" };
            out.push_str(&alloc::format!(
                "  n{} [label=\"{}\", shape={}];\n",
                n.id,
                label,
                shape
            ));
        }
        for n in &self.nodes {
            for &c in &n.children {
                out.push_str(&alloc::format!("  n{} -> n{};\n", n.id, c));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Builds the four-level hierarchical tree: tokens under sentence nodes,
/// under paragraph nodes, under section nodes, under one document root.
pub fn build_global_tree(
    doc: &SegmentedDocument,
    parses: &[LocalParseTree],
) -> Result<GlobalTree, TreeError> {
    check_counts(doc, parses)?;
    let mut nodes: Vec<TreeNode> =
        alloc::vec![TreeNode::virtual_node(0, NodeKind::VirtualDocument, None)];
    let mut cur_section: Option<(usize, NodeId)> = None;
    let mut cur_paragraph: Option<(usize, NodeId)> = None;

    for (j, sentence) in doc.sentences.iter().enumerate() {
        if cur_section.map(|(sid, _)| sid) != Some(sentence.section_id) {
            let id = nodes.len();
            nodes.push(TreeNode::virtual_node(id, NodeKind::VirtualSection, Some(0)));
            nodes[0].children.push(id);
            cur_section = Some((sentence.section_id, id));
            cur_paragraph = None;
        }
        let section_node = cur_section.unwrap().1;
        if cur_paragraph.map(|(pid, _)| pid) != Some(sentence.paragraph_id) {
            let id = nodes.len();
            nodes.push(TreeNode::virtual_node(
                id,
                NodeKind::VirtualParagraph,
                Some(section_node),
            ));
            nodes[section_node].children.push(id);
            cur_paragraph = Some((sentence.paragraph_id, id));
        }
        let paragraph_node = cur_paragraph.unwrap().1;
        let sentence_node = nodes.len();
        let mut sn = TreeNode::virtual_node(
            sentence_node,
            NodeKind::VirtualSentence,
            Some(paragraph_node),
        );
        sn.sentence_index = Some(j);
        nodes.push(sn);
        nodes[paragraph_node].children.push(sentence_node);
        attach_parse(&mut nodes, &parses[j], j, sentence_node);
    }
    Ok(GlobalTree { nodes, root: 0 })
}

/// Ablation shape: one virtual root with every local parse tree attached
/// directly under it (no sentence/paragraph/section level).
pub fn build_single_root_tree(
    doc: &SegmentedDocument,
    parses: &[LocalParseTree],
) -> Result<GlobalTree, TreeError> {
    check_counts(doc, parses)?;
    let mut nodes: Vec<TreeNode> =
        alloc::vec![TreeNode::virtual_node(0, NodeKind::VirtualDocument, None)];
    for (j, parse) in parses.iter().enumerate() {
        attach_parse(&mut nodes, parse, j, 0);
    }
    Ok(GlobalTree { nodes, root: 0 })
}

/// Ablation shape: one virtual root with every token as a direct child, in
/// document order; parse structure is ignored.
pub fn build_flat_tree(
    doc: &SegmentedDocument,
    parses: &[LocalParseTree],
) -> Result<GlobalTree, TreeError> {
    check_counts(doc, parses)?;
    let mut nodes: Vec<TreeNode> =
        alloc::vec![TreeNode::virtual_node(0, NodeKind::VirtualDocument, None)];
    for (j, parse) in parses.iter().enumerate() {
        for t in &parse.tokens {
            let id = nodes.len();
            nodes.push(TreeNode::actual_node(id, 0, t.text.clone(), j, t.index));
            nodes[0].children.push(id);
        }
    }
    Ok(GlobalTree { nodes, root: 0 })
}

/// A single sentence's dependency tree as a standalone prunable tree (the
/// per-sentence ablation); the root is the parse root, an actual node.
pub fn build_local_tree(parse: &LocalParseTree) -> GlobalTree {
    let n = parse.tokens.len();
    let mut nodes: Vec<TreeNode> = Vec::with_capacity(n);
    for t in &parse.tokens {
        let id = t.index - 1;
        let parent = if t.head == 0 { None } else { Some(t.head - 1) };
        nodes.push(TreeNode {
            id,
            kind: NodeKind::Actual,
            parent,
            children: Vec::new(),
            token_text: Some(t.text.clone()),
            sentence_index: Some(parse.sentence_index),
            token_index: Some(t.index),
            length: 1,
            e_aligned: 0.0,
            e_adjusted: 0.0,
        });
    }
    for t in &parse.tokens {
        if t.head != 0 {
            let child = t.index - 1;
            nodes[t.head - 1].children.push(child);
        }
    }
    GlobalTree {
        nodes,
        root: parse.root - 1,
    }
}

fn check_counts(doc: &SegmentedDocument, parses: &[LocalParseTree]) -> Result<(), TreeError> {
    if doc.sentences.len() != parses.len() {
        return Err(TreeError::CountMismatch {
            sentences: doc.sentences.len(),
            parses: parses.len(),
        });
    }
    Ok(())
}

/// Adds a sentence's tokens under `sentence_node`, local root re-parented to
/// it; node ids follow token order.
fn attach_parse(nodes: &mut Vec<TreeNode>, parse: &LocalParseTree, sentence: usize, sentence_node: NodeId) {
    let base = nodes.len();
    for t in &parse.tokens {
        let id = base + t.index - 1;
        let parent = if t.head == 0 {
            sentence_node
        } else {
            base + t.head - 1
        };
        nodes.push(TreeNode::actual_node(
            id,
            parent,
            t.text.clone(),
            sentence,
            t.index,
        ));
    }
    for t in &parse.tokens {
        let id = base + t.index - 1;
        let parent = nodes[id].parent.unwrap();
        nodes[parent].children.push(id);
    }
}

/// The node plus all its descendants.
pub fn subtree_nodes(tree: &GlobalTree, id: NodeId) -> Result<BTreeSet<NodeId>, TreeError> {
    if id >= tree.nodes.len() {
        return Err(TreeError::UnknownNode(id));
    }
    let mut out = BTreeSet::new();
    let mut stack = alloc::vec![id];
    while let Some(v) = stack.pop() {
        if out.insert(v) {
            stack.extend(tree.nodes[v].children.iter().copied());
        }
    }
    Ok(out)
}
