//! Entropy providers and the precomputed-sidecar reader.
//!
//! A provider scores exactly one sentence per call: earlier sentences of the
//! document are structurally invisible, which is what makes per-sentence
//! scoring independent of the rest of the prompt.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::segment::SegmentedDocument;
use crate::tokenize::char_len;

#[derive(Debug, Clone, PartialEq)]
pub enum ScoreError {
    BadRow { line: usize, detail: String },
    SentenceOutOfRange { line: usize, index: usize },
    SentenceGap { index: usize },
    NegativeEntropy { line: usize },
    TokenMismatch { sentence: usize, token: String },
    SpanMismatch { sentence: usize, detail: String },
    Provider { detail: String },
}

impl core::fmt::Display for ScoreError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ScoreError::BadRow { line, detail } => write!(f, "line {line}: {detail}"),
            ScoreError::SentenceOutOfRange { line, index } => {
                write!(f, "line {line}: sentence index {index} out of range")
            }
            ScoreError::SentenceGap { index } => {
                write!(f, "no entropy rows for sentence {index}")
            }
            ScoreError::NegativeEntropy { line } => {
                write!(f, "line {line}: negative entropy")
            }
            ScoreError::TokenMismatch { sentence, token } => {
                write!(f, "sentence {sentence}: token {token:?} not found in sentence text")
            }
            ScoreError::SpanMismatch { sentence, detail } => {
                write!(f, "sentence {sentence}: {detail}")
            }
            ScoreError::Provider { detail } => write!(f, "scorer failed: {detail}"),
        }
    }
}

impl core::error::Error for ScoreError {}

/// One scorer token: surface form, char span into the sentence, and its
/// information entropy in nats (`-ln p`, so never negative).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredToken {
    pub text: String,
    pub span: (usize, usize),
    pub entropy: f64,
}

/// Scores one sentence at a time. Implementations must not look at any text
/// outside the given sentence.
pub trait EntropyProvider {
    fn score_sentence(&self, sentence: &str) -> Result<Vec<ScoredToken>, ScoreError>;
}

/// Validates scorer output against the sentence it claims to describe:
/// spans in bounds, non-empty, strictly increasing without overlap, text
/// matching the span slice, entropies finite and non-negative.
pub fn validate_scored(
    sentence_index: usize,
    sentence: &str,
    tokens: &[ScoredToken],
) -> Result<(), ScoreError> {
    let len = char_len(sentence);
    let chars: Vec<char> = sentence.chars().collect();
    let mut prev_end = 0usize;
    for t in tokens {
        let (s, e) = t.span;
        if s >= e || e > len {
            return Err(ScoreError::SpanMismatch {
                sentence: sentence_index,
                detail: alloc::format!("span ({s}, {e}) out of bounds for length {len}"),
            });
        }
        if s < prev_end {
            return Err(ScoreError::SpanMismatch {
                sentence: sentence_index,
                detail: alloc::format!("span ({s}, {e}) overlaps an earlier token"),
            });
        }
        let slice: String = chars[s..e].iter().collect();
        if slice != t.text {
            return Err(ScoreError::SpanMismatch {
                sentence: sentence_index,
                detail: alloc::format!("token {:?} does not match text {slice:?}", t.text),
            });
        }
        if !t.entropy.is_finite() || t.entropy < 0.0 {
            return Err(ScoreError::SpanMismatch {
                sentence: sentence_index,
                detail: alloc::format!("token {:?} has invalid entropy {}", t.text, t.entropy),
            });
        }
        prev_end = e;
    }
    Ok(())
}

/// Reads an entropy sidecar: tab-separated `sentence_index  token  entropy`
/// rows in sentence order, `#` comments allowed. Token spans are recovered
/// by greedy left-to-right matching against the sentence text. Every
/// sentence must have at least one row.
pub fn parse_sidecar(
    source: &str,
    doc: &SegmentedDocument,
) -> Result<Vec<Vec<ScoredToken>>, ScoreError> {
    let m = doc.sentences.len();
    let mut out: Vec<Vec<ScoredToken>> = alloc::vec![Vec::new(); m];
    // per-sentence greedy cursor over chars
    let chars: Vec<Vec<char>> = doc
        .sentences
        .iter()
        .map(|s| s.text.chars().collect())
        .collect();
    let mut cursors = alloc::vec![0usize; m];
    let mut last_index: Option<usize> = None;

    for (lineno, line) in source.lines().enumerate() {
        let line_no = lineno + 1;
        let trimmed = line.trim_end_matches(['\r']);
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = trimmed.split('\t').collect();
        if cols.len() != 3 {
            return Err(ScoreError::BadRow {
                line: line_no,
                detail: alloc::format!("expected 3 tab-separated columns, found {}", cols.len()),
            });
        }
        let index: usize = cols[0].parse().map_err(|_| ScoreError::BadRow {
            line: line_no,
            detail: alloc::format!("unparseable sentence index {:?}", cols[0]),
        })?;
        if index >= m {
            return Err(ScoreError::SentenceOutOfRange { line: line_no, index });
        }
        if let Some(last) = last_index {
            if index < last {
                return Err(ScoreError::BadRow {
                    line: line_no,
                    detail: alloc::format!("sentence index {index} after {last}: rows must be in order"),
                });
            }
        }
        last_index = Some(index);
        let entropy: f64 = cols[2].parse().map_err(|_| ScoreError::BadRow {
            line: line_no,
            detail: alloc::format!("unparseable entropy {:?}", cols[2]),
        })?;
        if !entropy.is_finite() || entropy < 0.0 {
            return Err(ScoreError::NegativeEntropy { line: line_no });
        }
        let token = cols[1];
        let span = locate(&chars[index], &mut cursors[index], token).ok_or_else(|| {
            ScoreError::TokenMismatch {
                sentence: index,
                token: token.to_string(),
            }
        })?;
        out[index].push(ScoredToken {
            text: token.to_string(),
            span,
            entropy,
        });
    }

    for (i, rows) in out.iter().enumerate() {
        if rows.is_empty() {
            return Err(ScoreError::SentenceGap { index: i });
        }
    }
    Ok(out)
}

fn locate(chars: &[char], cursor: &mut usize, token: &str) -> Option<(usize, usize)> {
    while *cursor < chars.len() && chars[*cursor].is_whitespace() {
        *cursor += 1;
    }
    let start = *cursor;
    let mut pos = start;
    for tc in token.chars() {
        if pos >= chars.len() || chars[pos] != tc {
            return None;
        }
        pos += 1;
    }
    *cursor = pos;
    Some((start, pos))
}
