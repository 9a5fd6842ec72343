//! Selective prompt compression guided by dependency parse trees.
//!
//! The engine turns a document into a hierarchical tree (token nodes under
//! virtual sentence, paragraph, section, and document nodes), scores tokens
//! with per-sentence information entropy, adjusts node values by root-ward
//! and leaf-ward propagation, and prunes the tree with an exact multi-budget
//! dynamic program to produce compressed prompts at requested ratios.
//!
//! The crate is `no_std` + `alloc`; IO, file formats, the remote scorer, and
//! the CLI live in the companion `promptshear-cli` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adjust;
pub mod align;
pub mod metrics;
pub mod ngram;
pub mod parse;
pub mod pipeline;
pub mod prune;
pub mod score;
pub mod segment;
pub mod tokenize;
pub mod tree;

pub use adjust::{adjust, copy_aligned, leafward, rootward, AdjustError, AdjustmentParams};
pub use align::{align, AlignError, Alignment};
pub use metrics::{
    bleu, compression_stats, rouge, BleuScore, MetricError, MetricReport, RougeScore,
};
pub use ngram::{train_ngram, NGramError, NGramModel};
pub use parse::{fallback_parse, read_conllu, LocalParseTree, ParseError, ParseToken};
pub use pipeline::{
    run_document, select_variant, DocumentRun, PipelineError, PipelineOptions, ScoreSource,
    VariantMode, Warning,
};
pub use prune::{
    calculate_solution, compress, detokenize, merge_solutions, BudgetSolutionList,
    CompressionResult, PruneError, SolutionEntry,
};
pub use score::{parse_sidecar, validate_scored, EntropyProvider, ScoreError, ScoredToken};
pub use segment::{
    segment, segment_with, SegmentError, SegmentedDocument, SegmenterConfig, SentencePart,
    SentenceRecord,
};
pub use tree::{
    build_flat_tree, build_global_tree, build_local_tree, build_single_root_tree, subtree_nodes,
    GlobalTree, NodeId, NodeKind, TreeError, TreeNode,
};
