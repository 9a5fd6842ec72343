//! End-to-end wiring: parse, score, align, build, adjust, compress.
//!
//! The pipeline owns variant selection. `Full` runs the hierarchical tree
//! with value adjustment; `NoAdjust` drops adjustment and degenerates the
//! hierarchy to a single virtual root; `Local` prunes each sentence tree
//! independently with a budget proportional to its length; `Flat` reduces to
//! a plain knapsack over aligned tokens; `ParseOnly` replaces every aligned
//! value with 1.0 so only structure matters.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::adjust::{adjust, copy_aligned, AdjustError, AdjustmentParams};
use crate::align::{align, AlignError, Alignment};
use crate::parse::{fallback_parse, LocalParseTree, ParseError};
use crate::prune::{
    budget_for, calculate_solution, compress, detokenize, CompressionResult, PruneError,
};
use crate::score::{validate_scored, EntropyProvider, ScoreError, ScoredToken};
use crate::segment::SegmentedDocument;
use crate::tree::{
    build_flat_tree, build_global_tree, build_local_tree, build_single_root_tree, GlobalTree,
    TreeError,
};

#[derive(Debug, Clone, PartialEq)]
pub enum PipelineError {
    NoRatios,
    UnknownVariant(String),
    Parse(ParseError),
    Score { sentence: Option<usize>, source: ScoreError },
    Align { sentence: usize, source: AlignError },
    Tree(TreeError),
    Adjust(AdjustError),
    Prune(PruneError),
}

impl core::fmt::Display for PipelineError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PipelineError::NoRatios => write!(f, "config: at least one compression ratio required"),
            PipelineError::UnknownVariant(v) => write!(f, "config: unknown variant {v:?}"),
            PipelineError::Parse(e) => write!(f, "parse: {e}"),
            PipelineError::Score { sentence: Some(s), source } => {
                write!(f, "scoring: sentence {s}: {source}")
            }
            PipelineError::Score { sentence: None, source } => write!(f, "scoring: {source}"),
            PipelineError::Align { sentence, source } => {
                write!(f, "alignment: sentence {sentence}: {source}")
            }
            PipelineError::Tree(e) => write!(f, "tree: {e}"),
            PipelineError::Adjust(e) => write!(f, "adjustment: {e}"),
            PipelineError::Prune(e) => write!(f, "pruning: {e}"),
        }
    }
}

impl core::error::Error for PipelineError {}

impl From<ParseError> for PipelineError {
    fn from(e: ParseError) -> Self {
        PipelineError::Parse(e)
    }
}

impl From<TreeError> for PipelineError {
    fn from(e: TreeError) -> Self {
        PipelineError::Tree(e)
    }
}

impl From<AdjustError> for PipelineError {
    fn from(e: AdjustError) -> Self {
        PipelineError::Adjust(e)
    }
}

impl From<PruneError> for PipelineError {
    fn from(e: PruneError) -> Self {
        PipelineError::Prune(e)
    }
}

/// Selection strategy for the ablation switchboard.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantMode {
    /// Hierarchical tree, aligned values, adjustment on.
    Full,
    /// Single virtual root over local trees, no adjustment.
    NoAdjust,
    /// Each sentence tree pruned independently, budgets proportional to
    /// sentence length.
    Local,
    /// One virtual root over bare tokens: a flat knapsack.
    Flat,
    /// Hierarchical tree with every aligned value replaced by 1.0.
    ParseOnly,
}

impl VariantMode {
    pub fn name(self) -> &'static str {
        match self {
            VariantMode::Full => "full",
            VariantMode::NoAdjust => "no-adjust",
            VariantMode::Local => "local",
            VariantMode::Flat => "flat",
            VariantMode::ParseOnly => "parse-only",
        }
    }
}

/// Parses a variant name as accepted on the command line.
pub fn select_variant(name: &str) -> Result<VariantMode, PipelineError> {
    match name {
        "full" => Ok(VariantMode::Full),
        "no-adjust" => Ok(VariantMode::NoAdjust),
        "local" => Ok(VariantMode::Local),
        "flat" => Ok(VariantMode::Flat),
        "parse-only" => Ok(VariantMode::ParseOnly),
        other => Err(PipelineError::UnknownVariant(other.to_string())),
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub ratios: Vec<f64>,
    pub params: AdjustmentParams,
    pub variant: VariantMode,
    /// Adjustment switch; ignored (off) for variants without a hierarchy.
    pub adjust_enabled: bool,
    pub unsafe_params: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            ratios: alloc::vec![0.5],
            params: AdjustmentParams::default(),
            variant: VariantMode::Full,
            adjust_enabled: true,
            unsafe_params: false,
        }
    }
}

/// Where per-sentence entropies come from.
pub enum ScoreSource<'a> {
    Provider(&'a dyn EntropyProvider),
    /// One list per sentence, e.g. from an entropy sidecar.
    Precomputed(Vec<Vec<ScoredToken>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub module: &'static str,
    pub sentence: Option<usize>,
    pub message: String,
}

/// Everything a run produces: the (possibly reduced) document, the filled
/// tree, one result per ratio, and any warnings.
#[derive(Debug, Clone)]
pub struct DocumentRun {
    pub doc: SegmentedDocument,
    pub tree: GlobalTree,
    pub results: Vec<CompressionResult>,
    pub warnings: Vec<Warning>,
}

/// Runs the pipeline on a segmented document. `parses` comes from a CoNLL-U
/// sidecar when present; otherwise the fallback parser is used and
/// unparseable sentences are dropped with a warning.
pub fn run_document(
    doc: SegmentedDocument,
    parses: Option<Vec<LocalParseTree>>,
    scores: ScoreSource<'_>,
    opts: &PipelineOptions,
) -> Result<DocumentRun, PipelineError> {
    if opts.ratios.is_empty() {
        return Err(PipelineError::NoRatios);
    }
    let mut warnings = Vec::new();

    // Parses: sidecar trees must already match the document; the fallback
    // path may drop sentences it cannot tokenize.
    let (doc, parses, dropped) = match parses {
        Some(p) => {
            if p.len() != doc.sentences.len() {
                return Err(PipelineError::Parse(ParseError::SentenceCountMismatch {
                    expected: doc.sentences.len(),
                    found: p.len(),
                }));
            }
            (doc, p, Vec::new())
        }
        None => {
            let mut dropped = Vec::new();
            for s in &doc.sentences {
                if fallback_parse(s).is_err() {
                    warnings.push(Warning {
                        module: "parse",
                        sentence: Some(s.index),
                        message: alloc::format!("sentence {} has no tokens, dropped", s.index),
                    });
                    dropped.push(s.index);
                }
            }
            let doc = if dropped.is_empty() { doc } else { doc.drop_sentences(&dropped) };
            let parses: Vec<LocalParseTree> = doc
                .sentences
                .iter()
                .map(fallback_parse)
                .collect::<Result<_, _>>()?;
            (doc, parses, dropped)
        }
    };

    // Scores, one list per sentence, validated against the sentence text.
    let scored: Vec<Vec<ScoredToken>> = match scores {
        ScoreSource::Provider(provider) => {
            let mut lists = Vec::with_capacity(doc.sentences.len());
            for s in &doc.sentences {
                let list = provider.score_sentence(&s.text).map_err(|source| {
                    PipelineError::Score { sentence: Some(s.index), source }
                })?;
                lists.push(list);
            }
            lists
        }
        ScoreSource::Precomputed(mut lists) => {
            // drop lists of dropped sentences, highest index first
            for &d in dropped.iter().rev() {
                if d < lists.len() {
                    lists.remove(d);
                }
            }
            if lists.len() != doc.sentences.len() {
                return Err(PipelineError::Score {
                    sentence: None,
                    source: ScoreError::Provider {
                        detail: alloc::format!(
                            "{} score lists for {} sentences",
                            lists.len(),
                            doc.sentences.len()
                        ),
                    },
                });
            }
            lists
        }
    };
    for (s, list) in doc.sentences.iter().zip(&scored) {
        validate_scored(s.index, &s.text, list)
            .map_err(|source| PipelineError::Score { sentence: Some(s.index), source })?;
    }

    // Alignment fills (value, length) per parse token.
    let mut alignments: Vec<Alignment> = Vec::with_capacity(parses.len());
    for (j, parse) in parses.iter().enumerate() {
        let a = align(parse, &scored[j])
            .map_err(|source| PipelineError::Align { sentence: j, source })?;
        alignments.push(a);
    }

    // Tree shape by variant.
    let mut tree = match opts.variant {
        VariantMode::Full | VariantMode::ParseOnly | VariantMode::Local => {
            build_global_tree(&doc, &parses)?
        }
        VariantMode::NoAdjust => build_single_root_tree(&doc, &parses)?,
        VariantMode::Flat => build_flat_tree(&doc, &parses)?,
    };
    fill_values(&mut tree, &alignments, opts.variant == VariantMode::ParseOnly);

    // Adjustment only makes sense over the hierarchy.
    let adjusting = opts.adjust_enabled
        && matches!(opts.variant, VariantMode::Full | VariantMode::ParseOnly);
    if adjusting {
        opts.params.validate(opts.unsafe_params)?;
        adjust(&mut tree, &opts.params)?;
    } else {
        copy_aligned(&mut tree);
    }

    let results = match opts.variant {
        VariantMode::Local => compress_per_sentence(&tree, &parses, &alignments, &opts.ratios)?,
        _ => compress(&tree, &opts.ratios)?,
    };
    for r in &results {
        if r.budget == 0 {
            warnings.push(Warning {
                module: "pruning",
                sentence: None,
                message: alloc::format!(
                    "ratio {} gives budget 0: compressed output is empty",
                    r.ratio
                ),
            });
        }
    }

    Ok(DocumentRun { doc, tree, results, warnings })
}

fn fill_values(tree: &mut GlobalTree, alignments: &[Alignment], unit_values: bool) {
    let by_sentence = tree.actual_ids_by_sentence();
    for (j, a) in alignments.iter().enumerate() {
        if let Some(ids) = by_sentence.get(&j) {
            for (i, &id) in ids.iter().enumerate() {
                tree.nodes[id].length = a.length[i];
                tree.nodes[id].e_aligned = if unit_values { 1.0 } else { a.entropy[i] };
            }
        }
    }
}

/// The per-sentence variant: every local tree is solved once, each ratio
/// reconstructs with the sentence's own budget, and the retained sets are
/// mapped back to the global tree for reporting.
fn compress_per_sentence(
    tree: &GlobalTree,
    parses: &[LocalParseTree],
    alignments: &[Alignment],
    ratios: &[f64],
) -> Result<Vec<CompressionResult>, PipelineError> {
    for &r in ratios {
        if !(r > 0.0 && r < 1.0) || !r.is_finite() {
            return Err(PipelineError::Prune(PruneError::RatioOutOfRange(r)));
        }
    }
    let by_sentence = tree.actual_ids_by_sentence();
    let total = tree.total_length();

    let mut locals = Vec::with_capacity(parses.len());
    for (j, parse) in parses.iter().enumerate() {
        let mut local = build_local_tree(parse);
        let a = &alignments[j];
        for id in 0..local.nodes.len() {
            local.nodes[id].length = a.length[id];
            local.nodes[id].e_aligned = a.entropy[id];
            local.nodes[id].e_adjusted = a.entropy[id];
        }
        let solution = calculate_solution(&local, local.root);
        locals.push((local, solution));
    }

    let mut out = Vec::with_capacity(ratios.len());
    for &ratio in ratios {
        let mut retained = alloc::collections::BTreeSet::new();
        let mut objective = 0.0;
        for (j, (local, solution)) in locals.iter().enumerate() {
            let sentence_budget = budget_for(ratio, local.total_length());
            objective += solution.value(sentence_budget);
            let ids = &by_sentence[&j];
            for local_id in solution.retained(sentence_budget) {
                retained.insert(ids[local_id]);
            }
        }
        let realized_length: usize = retained.iter().map(|&id| tree.nodes[id].length).sum();
        out.push(CompressionResult {
            ratio,
            budget: budget_for(ratio, total),
            objective_value: objective,
            compressed_text: detokenize(tree, &retained),
            realized_length,
            realized_ratio: if total == 0 {
                0.0
            } else {
                realized_length as f64 / total as f64
            },
            retained,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ngram::train_ngram;
    use crate::segment::segment;

    fn options(ratios: &[f64]) -> PipelineOptions {
        PipelineOptions { ratios: ratios.to_vec(), ..PipelineOptions::default() }
    }

    #[test]
    fn full_pipeline_on_ngram_self_scoring() {
        let doc = segment("# News\n\nThe cat sat on the mat. The dog sat on the log.\n\nBirds fly south in winter.");
        let model = train_ngram(&doc.source_text).unwrap();
        let run = run_document(
            doc,
            None,
            ScoreSource::Provider(&model),
            &options(&[0.3, 0.6]),
        )
        .unwrap();
        assert_eq!(run.results.len(), 2);
        for r in &run.results {
            assert!(r.realized_length <= r.budget);
            // subsequence check: compressed tokens appear in order
            assert!(r.realized_ratio <= r.ratio + 1e-12);
        }
        assert!(run.results[0].objective_value <= run.results[1].objective_value);
    }

    #[test]
    fn no_ratios_rejected() {
        let doc = segment("Some text.");
        let model = train_ngram("some corpus text").unwrap();
        let err = run_document(doc, None, ScoreSource::Provider(&model), &options(&[]));
        assert!(matches!(err, Err(PipelineError::NoRatios)));
    }

    #[test]
    fn variant_names_round_trip() {
        for v in [
            VariantMode::Full,
            VariantMode::NoAdjust,
            VariantMode::Local,
            VariantMode::Flat,
            VariantMode::ParseOnly,
        ] {
            assert_eq!(select_variant(v.name()).unwrap(), v);
        }
        assert!(matches!(
            select_variant("bogus"),
            Err(PipelineError::UnknownVariant(_))
        ));
    }

    #[test]
    fn local_variant_respects_global_budget() {
        let doc = segment("Alpha beta gamma delta. Epsilon zeta eta theta. Iota kappa lambda mu.");
        let model = train_ngram(&doc.source_text).unwrap();
        let mut opts = options(&[0.5]);
        opts.variant = VariantMode::Local;
        let run = run_document(doc, None, ScoreSource::Provider(&model), &opts).unwrap();
        let r = &run.results[0];
        assert!(r.realized_length <= r.budget);
        assert!(!r.compressed_text.is_empty());
    }

    #[test]
    fn parse_only_uses_unit_values() {
        let doc = segment("one two three. four five six.");
        let model = train_ngram(&doc.source_text).unwrap();
        let mut opts = options(&[0.5]);
        opts.variant = VariantMode::ParseOnly;
        opts.adjust_enabled = false;
        let run = run_document(doc, None, ScoreSource::Provider(&model), &opts).unwrap();
        for id in run.tree.actual_ids() {
            assert_eq!(run.tree.nodes[id].e_aligned, 1.0);
        }
    }

    #[test]
    fn precomputed_scores_must_match_sentence_count() {
        let doc = segment("One. Two.");
        let err = run_document(
            doc,
            None,
            ScoreSource::Precomputed(alloc::vec![Vec::new()]),
            &options(&[0.5]),
        );
        assert!(matches!(err, Err(PipelineError::Score { .. })));
    }

    #[test]
    fn multi_ratio_matches_single_ratio_runs() {
        let text = "# H\n\nSome words make sentences. Sentences make paragraphs here.\n\nMore text follows now.";
        let model = train_ngram("external corpus for scoring words and sentences").unwrap();
        let ratios = [0.2, 0.4, 0.7];
        let joint = run_document(
            segment(text),
            None,
            ScoreSource::Provider(&model),
            &options(&ratios),
        )
        .unwrap();
        for (i, &r) in ratios.iter().enumerate() {
            let single = run_document(
                segment(text),
                None,
                ScoreSource::Provider(&model),
                &options(&[r]),
            )
            .unwrap();
            assert_eq!(single.results[0], joint.results[i]);
        }
    }
}
