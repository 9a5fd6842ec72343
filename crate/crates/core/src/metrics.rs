//! Lexical compressed-vs-reference metrics: BLEU n-gram precisions with a
//! brevity penalty, ROUGE-1/2/L F-measures, and compression statistics.
//!
//! Tokenization is lowercased whitespace splitting. BLEU uses add-epsilon
//! smoothing on both sides of each precision, so an n-gram order the
//! hypothesis is too short to produce counts as a perfect 1 rather than
//! dragging the geometric mean to zero. All scores are percentages.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::prune::CompressionResult;
use crate::tree::GlobalTree;

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricError {
    EmptyReference,
    ZeroLengthCompression,
}

impl core::fmt::Display for MetricError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            MetricError::EmptyReference => write!(f, "reference text has no tokens"),
            MetricError::ZeroLengthCompression => {
                write!(f, "compression retained zero tokens")
            }
        }
    }
}

impl core::error::Error for MetricError {}

#[derive(Debug, Clone, PartialEq)]
pub struct BleuScore {
    /// 1- to 4-gram modified precisions, percent.
    pub precisions: [f64; 4],
    /// Brevity penalty times the geometric mean of the four precisions,
    /// percent.
    pub composite: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RougeScore {
    pub rouge1: f64,
    pub rouge2: f64,
    pub rouge_l: f64,
}

/// Per-ratio evaluation record.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub bleu_ngrams: [f64; 4],
    pub bleu: f64,
    pub rouge1: f64,
    pub rouge2: f64,
    pub rouge_l: f64,
    pub tokens: usize,
    pub inv_ratio: f64,
}

impl MetricReport {
    /// Scores a compression result against a reference text.
    pub fn compute(
        hypothesis: &str,
        reference: &str,
        result: &CompressionResult,
        tree: &GlobalTree,
    ) -> Result<MetricReport, MetricError> {
        let b = bleu(hypothesis, reference)?;
        let r = rouge(hypothesis, reference)?;
        let (tokens, inv_ratio) = compression_stats(result, tree)?;
        Ok(MetricReport {
            bleu_ngrams: b.precisions,
            bleu: b.composite,
            rouge1: r.rouge1,
            rouge2: r.rouge2,
            rouge_l: r.rouge_l,
            tokens,
            inv_ratio,
        })
    }
}

fn words(text: &str) -> Vec<String> {
    text.split_whitespace().map(|w| w.to_lowercase()).collect()
}

fn ngram_counts(tokens: &[String], n: usize) -> BTreeMap<&[String], usize> {
    let mut counts: BTreeMap<&[String], usize> = BTreeMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

/// Modified n-gram precisions with clipping, composed with the brevity
/// penalty. Returns all-zero scores for an empty hypothesis.
pub fn bleu(hypothesis: &str, reference: &str) -> Result<BleuScore, MetricError> {
    let r = words(reference);
    if r.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    let h = words(hypothesis);
    if h.is_empty() {
        return Ok(BleuScore { precisions: [0.0; 4], composite: 0.0 });
    }
    let mut raw = [0.0f64; 4];
    for n in 1..=4 {
        let hyp_counts = ngram_counts(&h, n);
        let ref_counts = ngram_counts(&r, n);
        let total: usize = hyp_counts.values().sum();
        let clipped: usize = hyp_counts
            .iter()
            .map(|(g, c)| (*c).min(ref_counts.get(g).copied().unwrap_or(0)))
            .sum();
        raw[n - 1] = (clipped as f64 + EPS) / (total as f64 + EPS);
    }
    let brevity = if h.len() >= r.len() {
        1.0
    } else {
        libm::exp(1.0 - r.len() as f64 / h.len() as f64)
    };
    let log_mean = raw.iter().map(|&p| libm::log(p)).sum::<f64>() / 4.0;
    let composite = brevity * libm::exp(log_mean) * 100.0;
    Ok(BleuScore {
        precisions: [raw[0] * 100.0, raw[1] * 100.0, raw[2] * 100.0, raw[3] * 100.0],
        composite,
    })
}

fn overlap_f1(h: &[String], r: &[String], n: usize) -> f64 {
    let hc = ngram_counts(h, n);
    let rc = ngram_counts(r, n);
    let h_total: usize = hc.values().sum();
    let r_total: usize = rc.values().sum();
    if h_total == 0 || r_total == 0 {
        return 0.0;
    }
    let matches: usize = hc
        .iter()
        .map(|(g, c)| (*c).min(rc.get(g).copied().unwrap_or(0)))
        .sum();
    let precision = matches as f64 / h_total as f64;
    let recall = matches as f64 / r_total as f64;
    f1(precision, recall)
}

fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        200.0 * precision * recall / (precision + recall)
    }
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = alloc::vec![0usize; b.len() + 1];
    let mut cur = alloc::vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Unigram/bigram overlap F1 plus longest-common-subsequence F1.
pub fn rouge(hypothesis: &str, reference: &str) -> Result<RougeScore, MetricError> {
    let r = words(reference);
    if r.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    let h = words(hypothesis);
    if h.is_empty() {
        return Ok(RougeScore { rouge1: 0.0, rouge2: 0.0, rouge_l: 0.0 });
    }
    let lcs = lcs_len(&h, &r);
    let rouge_l = f1(lcs as f64 / h.len() as f64, lcs as f64 / r.len() as f64);
    Ok(RougeScore {
        rouge1: overlap_f1(&h, &r, 1),
        rouge2: overlap_f1(&h, &r, 2),
        rouge_l,
    })
}

/// Report fields: retained scorer-token count and the inverse realized
/// ratio C(V) / realized.
pub fn compression_stats(
    result: &CompressionResult,
    tree: &GlobalTree,
) -> Result<(usize, f64), MetricError> {
    if result.realized_length == 0 {
        return Err(MetricError::ZeroLengthCompression);
    }
    let total = tree.total_length();
    Ok((
        result.realized_length,
        total as f64 / result.realized_length as f64,
    ))
}
