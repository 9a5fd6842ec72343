//! On-disk formats: the pre-segmented document JSON and the per-run report.

use std::path::Path;

use anyhow::{Context, Result};
use promptshear_core::{MetricReport, SegmentedDocument, SentencePart};
use serde::{Deserialize, Serialize};

/// Pre-segmented input: `{"sentences": [{"text", "paragraph", "section"}]}`
/// with optional `source_text` and per-sentence `span` for lossless
/// round-trips.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentedFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_text: Option<String>,
    pub sentences: Vec<SegmentedSentence>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentedSentence {
    pub text: String,
    pub paragraph: usize,
    pub section: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<(usize, usize)>,
}

pub fn read_segmented(path: &Path) -> Result<SegmentedDocument> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading segmented input {}", path.display()))?;
    parse_segmented(&text).with_context(|| format!("loading {}", path.display()))
}

pub fn parse_segmented(json: &str) -> Result<SegmentedDocument> {
    let file: SegmentedFile = serde_json::from_str(json).context("parsing segmented JSON")?;
    let parts: Vec<SentencePart> = file
        .sentences
        .into_iter()
        .map(|s| SentencePart {
            text: s.text,
            paragraph: s.paragraph,
            section: s.section,
            span: s.span,
        })
        .collect();
    SegmentedDocument::from_parts(parts, file.source_text)
        .map_err(|e| anyhow::anyhow!("segmented input invalid: {e}"))
}

pub fn write_segmented(doc: &SegmentedDocument) -> String {
    let file = SegmentedFile {
        source_text: Some(doc.source_text.clone()),
        sentences: doc
            .to_parts()
            .into_iter()
            .map(|p| SegmentedSentence {
                text: p.text,
                paragraph: p.paragraph,
                section: p.section,
                span: p.span,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("segmented document serializes")
}

/// One report object per ratio.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioRecord {
    pub ratio: f64,
    pub budget: usize,
    pub realized_length: usize,
    pub realized_ratio: f64,
    pub objective_value: f64,
    pub retained_token_count: usize,
    pub retained_node_ids: Vec<usize>,
    pub output_path: Option<String>,
    pub compressed_text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub bleu_1gram: f64,
    pub bleu_2gram: f64,
    pub bleu_3gram: f64,
    pub bleu_4gram: f64,
    pub bleu: f64,
    pub rouge1: f64,
    pub rouge2: f64,
    pub rouge_l: f64,
    pub tokens: usize,
    pub inv_ratio: f64,
}

impl From<MetricReport> for MetricsRecord {
    fn from(m: MetricReport) -> Self {
        MetricsRecord {
            bleu_1gram: m.bleu_ngrams[0],
            bleu_2gram: m.bleu_ngrams[1],
            bleu_3gram: m.bleu_ngrams[2],
            bleu_4gram: m.bleu_ngrams[3],
            bleu: m.bleu,
            rouge1: m.rouge1,
            rouge2: m.rouge2,
            rouge_l: m.rouge_l,
            tokens: m.tokens,
            inv_ratio: m.inv_ratio,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub input: String,
    pub variant: String,
    pub a1: f64,
    pub a2: f64,
    pub total_length: usize,
    pub sentence_count: usize,
    pub warnings: Vec<String>,
    pub results: Vec<RatioRecord>,
}

/// File name for one ratio's compressed output, e.g. `compressed_0.3.txt`.
pub fn compressed_file_name(ratio: f64) -> String {
    format!("compressed_{ratio}.txt")
}
