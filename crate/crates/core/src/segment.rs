//! Document segmentation into sections, paragraphs, and sentences.
//!
//! Sections open on heading lines (a line starting with `#`, or an ALL-CAPS
//! line of at most a configurable word count). Paragraphs split on blank
//! lines. Sentences split on `.`, `!`, `?` followed by whitespace or end of
//! text, guarded by an abbreviation list. Heading lines are structure
//! markers, not sentences.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::tokenize::char_slice;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegmentError {
    /// Structure ids must start at (0, 0) and grow densely.
    StructureOrder { index: usize, detail: String },
    /// Provided spans overlap or run backwards.
    SpanOverlap { index: usize },
    /// A provided span does not reproduce the sentence text.
    SpanMismatch { index: usize },
    /// source_text was given but a sentence has no span.
    MissingSpan { index: usize },
    /// A sentence record with empty text.
    EmptySentence { index: usize },
}

impl core::fmt::Display for SegmentError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SegmentError::StructureOrder { index, detail } => {
                write!(f, "sentence {index}: {detail}")
            }
            SegmentError::SpanOverlap { index } => {
                write!(f, "sentence {index}: span overlaps or precedes an earlier span")
            }
            SegmentError::SpanMismatch { index } => {
                write!(f, "sentence {index}: span does not match source text")
            }
            SegmentError::MissingSpan { index } => {
                write!(f, "sentence {index}: span required when source text is given")
            }
            SegmentError::EmptySentence { index } => {
                write!(f, "sentence {index}: empty text")
            }
        }
    }
}

impl core::error::Error for SegmentError {}

/// One sentence with its position in the document structure.
///
/// `span` is `(start, end)` in Unicode scalar offsets into the source text.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceRecord {
    pub index: usize,
    pub text: String,
    pub span: (usize, usize),
    pub paragraph_id: usize,
    pub section_id: usize,
}

/// Ordered sentences plus the original text they were sliced from.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SegmentedDocument {
    pub sentences: Vec<SentenceRecord>,
    pub source_text: String,
}

/// One sentence of a pre-segmented input record.
#[derive(Debug, Clone, PartialEq)]
pub struct SentencePart {
    pub text: String,
    pub paragraph: usize,
    pub section: usize,
    pub span: Option<(usize, usize)>,
}

/// Heading and sentence-splitting rules.
#[derive(Debug, Clone)]
pub struct SegmenterConfig {
    /// Treat lines starting with `#` as section headings.
    pub hash_headings: bool,
    /// Treat short ALL-CAPS lines as section headings.
    pub allcaps_headings: bool,
    /// Word limit for the ALL-CAPS heading rule.
    pub allcaps_max_words: usize,
    /// A `.` directly after one of these strings does not end a sentence.
    pub abbreviations: Vec<String>,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        SegmenterConfig {
            hash_headings: true,
            allcaps_headings: true,
            allcaps_max_words: 8,
            abbreviations: ["e.g.", "i.e.", "Dr.", "Mr.", "Ms.", "Fig.", "Eq.", "et al."]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

impl SegmenterConfig {
    fn is_heading(&self, line: &str) -> bool {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            return false;
        }
        if self.hash_headings && trimmed.starts_with('#') {
            return true;
        }
        if self.allcaps_headings {
            let words = trimmed.split_whitespace().count();
            let has_alpha = trimmed.chars().any(|c| c.is_alphabetic());
            let no_lower = !trimmed.chars().any(|c| c.is_lowercase());
            if has_alpha && no_lower && words <= self.allcaps_max_words {
                return true;
            }
        }
        false
    }
}

/// Segments raw text with the default rules.
pub fn segment(text: &str) -> SegmentedDocument {
    segment_with(text, &SegmenterConfig::default())
}

/// Segments raw text: headings open sections, blank lines split paragraphs,
/// terminal punctuation splits sentences. Deterministic for identical input.
pub fn segment_with(text: &str, config: &SegmenterConfig) -> SegmentedDocument {
    // Lines as (start, end) char offsets, excluding the newline itself.
    let mut lines: Vec<(usize, usize)> = Vec::new();
    let mut line_start = 0usize;
    let mut pos = 0usize;
    for c in text.chars() {
        pos += 1;
        if c == '\n' {
            lines.push((line_start, pos - 1));
            line_start = pos;
        }
    }
    if line_start < pos {
        lines.push((line_start, pos));
    }

    let mut sentences = Vec::new();
    let mut section_id = 0usize;
    let mut section_has_content = false;
    let mut paragraph_id = 0usize;
    let mut paragraph_open = false;
    // Contiguous content lines forming the current paragraph block.
    let mut block: Option<(usize, usize)> = None;

    let flush_block = |block: &mut Option<(usize, usize)>,
                           sentences: &mut Vec<SentenceRecord>,
                           paragraph_id: usize,
                           section_id: usize| {
        if let Some((start, end)) = block.take() {
            split_sentences(text, start, end, config, sentences, paragraph_id, section_id);
        }
    };

    for &(start, end) in &lines {
        let line = char_slice(text, start, end);
        if line.trim().is_empty() {
            flush_block(&mut block, &mut sentences, paragraph_id, section_id);
            if paragraph_open {
                paragraph_id += 1;
                paragraph_open = false;
            }
        } else if config.is_heading(&line) {
            flush_block(&mut block, &mut sentences, paragraph_id, section_id);
            if paragraph_open {
                paragraph_id += 1;
                paragraph_open = false;
            }
            if section_has_content {
                section_id += 1;
                section_has_content = false;
            }
        } else {
            if block.is_none() {
                block = Some((start, end));
            } else if let Some((bs, _)) = block {
                block = Some((bs, end));
            }
            paragraph_open = true;
            section_has_content = true;
        }
    }
    flush_block(&mut block, &mut sentences, paragraph_id, section_id);

    normalize_ids(&mut sentences);
    SegmentedDocument {
        sentences,
        source_text: text.to_string(),
    }
}

/// Splits one paragraph block `[start, end)` into sentences.
fn split_sentences(
    text: &str,
    start: usize,
    end: usize,
    config: &SegmenterConfig,
    out: &mut Vec<SentenceRecord>,
    paragraph_id: usize,
    section_id: usize,
) {
    let chars: Vec<char> = text.chars().skip(start).take(end - start).collect();
    let mut sent_start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        let terminal = c == '.' || c == '!' || c == '?';
        if terminal {
            let at_end = i + 1 >= chars.len();
            let before_space = !at_end && chars[i + 1].is_whitespace();
            if at_end || before_space {
                let guarded = c == '.' && ends_with_abbreviation(&chars[sent_start..=i], config);
                if !guarded {
                    push_sentence(text, start, &chars, sent_start, i + 1, out, paragraph_id, section_id);
                    sent_start = i + 1;
                }
            }
        }
        i += 1;
    }
    push_sentence(text, start, &chars, sent_start, chars.len(), out, paragraph_id, section_id);
}

fn ends_with_abbreviation(sentence: &[char], config: &SegmenterConfig) -> bool {
    for abbr in &config.abbreviations {
        let abbr_chars: Vec<char> = abbr.chars().collect();
        let n = abbr_chars.len();
        if n == 0 || n > sentence.len() {
            continue;
        }
        if sentence[sentence.len() - n..] == abbr_chars[..] {
            let before = sentence.len() - n;
            if before == 0 || sentence[before - 1].is_whitespace() {
                return true;
            }
        }
    }
    false
}

#[allow(clippy::too_many_arguments)]
fn push_sentence(
    text: &str,
    block_start: usize,
    chars: &[char],
    from: usize,
    to: usize,
    out: &mut Vec<SentenceRecord>,
    paragraph_id: usize,
    section_id: usize,
) {
    let mut s = from;
    let mut e = to;
    while s < e && chars[s].is_whitespace() {
        s += 1;
    }
    while e > s && chars[e - 1].is_whitespace() {
        e -= 1;
    }
    if s == e {
        return;
    }
    let span = (block_start + s, block_start + e);
    out.push(SentenceRecord {
        index: out.len(),
        text: char_slice(text, span.0, span.1),
        span,
        paragraph_id,
        section_id,
    });
}

/// Re-numbers paragraph/section ids densely from 0 (empty units collapse).
fn normalize_ids(sentences: &mut [SentenceRecord]) {
    let mut next_para = 0usize;
    let mut next_sec = 0usize;
    let mut last: Option<(usize, usize)> = None;
    for (i, s) in sentences.iter_mut().enumerate() {
        if let Some((lp, ls)) = last {
            if s.section_id != ls {
                next_sec += 1;
                next_para += 1;
            } else if s.paragraph_id != lp {
                next_para += 1;
            }
        }
        last = Some((s.paragraph_id, s.section_id));
        s.paragraph_id = next_para;
        s.section_id = next_sec;
        s.index = i;
    }
}

impl SegmentedDocument {
    /// Validates a pre-segmented record and builds the document, bypassing
    /// the segmentation heuristics.
    ///
    /// When `source_text` is given every part must carry a span that
    /// reproduces its text; otherwise a canonical source is synthesized
    /// (sentences joined with a space, paragraphs and sections with blank
    /// lines).
    pub fn from_parts(
        parts: Vec<SentencePart>,
        source_text: Option<String>,
    ) -> Result<SegmentedDocument, SegmentError> {
        if parts.is_empty() {
            return Ok(SegmentedDocument {
                sentences: Vec::new(),
                source_text: source_text.unwrap_or_default(),
            });
        }
        for (i, p) in parts.iter().enumerate() {
            if p.text.trim().is_empty() {
                return Err(SegmentError::EmptySentence { index: i });
            }
        }
        if parts[0].paragraph != 0 || parts[0].section != 0 {
            return Err(SegmentError::StructureOrder {
                index: 0,
                detail: "first sentence must open paragraph 0 and section 0".to_string(),
            });
        }
        for i in 1..parts.len() {
            let (ps, pp) = (parts[i - 1].section, parts[i - 1].paragraph);
            let (cs, cp) = (parts[i].section, parts[i].paragraph);
            let ok = if cs == ps {
                cp == pp || cp == pp + 1
            } else if cs == ps + 1 {
                cp == pp + 1
            } else {
                false
            };
            if !ok {
                return Err(SegmentError::StructureOrder {
                    index: i,
                    detail: alloc::format!(
                        "ids (paragraph {cp}, section {cs}) do not follow \
                         (paragraph {pp}, section {ps}) densely"
                    ),
                });
            }
        }

        let (source, spans) = match source_text {
            Some(src) => {
                let mut spans = Vec::with_capacity(parts.len());
                let mut prev_end = 0usize;
                for (i, p) in parts.iter().enumerate() {
                    let span = p.span.ok_or(SegmentError::MissingSpan { index: i })?;
                    if span.0 < prev_end || span.1 <= span.0 {
                        return Err(SegmentError::SpanOverlap { index: i });
                    }
                    if char_slice(&src, span.0, span.1) != p.text {
                        return Err(SegmentError::SpanMismatch { index: i });
                    }
                    prev_end = span.1;
                    spans.push(span);
                }
                (src, spans)
            }
            None => synthesize_source(&parts),
        };

        let sentences = parts
            .into_iter()
            .enumerate()
            .map(|(i, p)| SentenceRecord {
                index: i,
                text: p.text,
                span: spans[i],
                paragraph_id: p.paragraph,
                section_id: p.section,
            })
            .collect();
        Ok(SegmentedDocument {
            sentences,
            source_text: source,
        })
    }

    /// The serializable view of this document: one part per sentence, spans
    /// included so `from_parts` round-trips exactly.
    pub fn to_parts(&self) -> Vec<SentencePart> {
        self.sentences
            .iter()
            .map(|s| SentencePart {
                text: s.text.clone(),
                paragraph: s.paragraph_id,
                section: s.section_id,
                span: Some(s.span),
            })
            .collect()
    }

    /// Drops the listed sentences and re-numbers indices and structure ids
    /// densely. Used when a sentence cannot be parsed.
    pub fn drop_sentences(&self, drop: &[usize]) -> SegmentedDocument {
        let mut sentences: Vec<SentenceRecord> = self
            .sentences
            .iter()
            .filter(|s| !drop.contains(&s.index))
            .cloned()
            .collect();
        normalize_ids(&mut sentences);
        SegmentedDocument {
            sentences,
            source_text: self.source_text.clone(),
        }
    }
}

fn synthesize_source(parts: &[SentencePart]) -> (String, Vec<(usize, usize)>) {
    let mut source = String::new();
    let mut spans = Vec::with_capacity(parts.len());
    let mut pos = 0usize;
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            let sep = if p.paragraph != parts[i - 1].paragraph {
                "\n\n"
            } else {
                " "
            };
            source.push_str(sep);
            pos += sep.chars().count();
        }
        let len = p.text.chars().count();
        source.push_str(&p.text);
        spans.push((pos, pos + len));
        pos += len;
    }
    (source, spans)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn empty_text_yields_empty_document() {
        let doc = segment("");
        assert!(doc.sentences.is_empty());
        assert_eq!(doc.source_text, "");
    }

    #[test]
    fn sentences_paragraphs_and_default_section() {
        let doc = segment("A cat. A dog.\n\nA bird.");
        let texts: Vec<&str> = doc.sentences.iter().map(|s| s.text.as_str()).collect();
        assert_eq!(texts, vec!["A cat.", "A dog.", "A bird."]);
        let paras: Vec<usize> = doc.sentences.iter().map(|s| s.paragraph_id).collect();
        let secs: Vec<usize> = doc.sentences.iter().map(|s| s.section_id).collect();
        assert_eq!(paras, vec![0, 0, 1]);
        assert_eq!(secs, vec![0, 0, 0]);
    }

    // Golden segmentation of a three-section fixture, hand-derived once:
    // one sentence per paragraph, two paragraphs per section.
    #[test]
    fn golden_three_sections() {
        let text = "# Alpha\n\nA cat sat.\n\nA dog ran.\n\n# Beta\n\nBirds fly south.\n\n\
                    Fish swim deep.\n\n# Gamma\n\nStars shine bright.\n\nWinds blow cold.\n";
        let doc = segment(text);
        assert_eq!(doc.sentences.len(), 6);
        let paras: Vec<usize> = doc.sentences.iter().map(|s| s.paragraph_id).collect();
        let secs: Vec<usize> = doc.sentences.iter().map(|s| s.section_id).collect();
        assert_eq!(paras, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(secs, vec![0, 0, 1, 1, 2, 2]);
        for s in &doc.sentences {
            assert_eq!(char_slice(text, s.span.0, s.span.1), s.text);
        }
    }

    #[test]
    fn allcaps_heading_opens_section() {
        let doc = segment("Intro text here.\n\nMETHODS AND DATA\n\nWe did things.");
        assert_eq!(doc.sentences.len(), 2);
        assert_eq!(doc.sentences[0].section_id, 0);
        assert_eq!(doc.sentences[1].section_id, 1);
    }

    #[test]
    fn allcaps_line_too_long_is_content() {
        let long = "ONE TWO THREE FOUR FIVE SIX SEVEN EIGHT NINE.";
        let doc = segment(long);
        assert_eq!(doc.sentences.len(), 1);
    }

    #[test]
    fn abbreviations_do_not_split() {
        let doc = segment("See Fig. 3 for details. Dr. Smith agreed.");
        let texts: Vec<&str> = doc.sentences.iter().map(|s| s.text.as_str()).collect();
        assert_eq!(texts, vec!["See Fig. 3 for details.", "Dr. Smith agreed."]);
    }

    #[test]
    fn spans_do_not_overlap_and_increase() {
        let doc = segment("One. Two! Three? Four.\n\nFive.");
        let mut prev_end = 0;
        for s in &doc.sentences {
            assert!(s.span.0 >= prev_end);
            assert!(s.span.1 > s.span.0);
            prev_end = s.span.1;
        }
    }

    #[test]
    fn from_parts_accepts_valid_record() {
        let parts = vec![
            SentencePart { text: "A cat.".into(), paragraph: 0, section: 0, span: None },
            SentencePart { text: "A dog.".into(), paragraph: 1, section: 0, span: None },
        ];
        let doc = SegmentedDocument::from_parts(parts, None).unwrap();
        assert_eq!(doc.sentences.len(), 2);
        assert_eq!(doc.sentences[1].paragraph_id, 1);
        assert_eq!(doc.source_text, "A cat.\n\nA dog.");
    }

    #[test]
    fn from_parts_rejects_decreasing_ids() {
        let parts = vec![
            SentencePart { text: "A.".into(), paragraph: 1, section: 0, span: None },
            SentencePart { text: "B.".into(), paragraph: 0, section: 0, span: None },
        ];
        let err = SegmentedDocument::from_parts(parts, None).unwrap_err();
        assert!(matches!(err, SegmentError::StructureOrder { index: 0, .. }));
    }

    #[test]
    fn from_parts_rejects_gapped_ids() {
        let parts = vec![
            SentencePart { text: "A.".into(), paragraph: 0, section: 0, span: None },
            SentencePart { text: "B.".into(), paragraph: 2, section: 0, span: None },
        ];
        let err = SegmentedDocument::from_parts(parts, None).unwrap_err();
        assert!(matches!(err, SegmentError::StructureOrder { index: 1, .. }));
    }

    #[test]
    fn from_parts_rejects_overlapping_spans() {
        let parts = vec![
            SentencePart { text: "A cat.".into(), paragraph: 0, section: 0, span: Some((0, 6)) },
            SentencePart { text: "cat.".into(), paragraph: 0, section: 0, span: Some((2, 6)) },
        ];
        let err = SegmentedDocument::from_parts(parts, Some("A cat.".into())).unwrap_err();
        assert!(matches!(err, SegmentError::SpanOverlap { index: 1 }));
    }

    #[test]
    fn round_trip_identity() {
        let text = "# Alpha\n\nA cat sat. A dog ran.\n\nBirds fly.\n\n# Beta\n\nFish swim.";
        let doc = segment(text);
        let rebuilt =
            SegmentedDocument::from_parts(doc.to_parts(), Some(doc.source_text.clone())).unwrap();
        assert_eq!(rebuilt, doc);
    }

    #[test]
    fn drop_sentences_renumbers_densely() {
        let text = "# Alpha\n\nA cat sat.\n\nA dog ran.\n\n# Beta\n\nBirds fly south.";
        let doc = segment(text);
        let dropped = doc.drop_sentences(&[1]);
        assert_eq!(dropped.sentences.len(), 2);
        let paras: Vec<usize> = dropped.sentences.iter().map(|s| s.paragraph_id).collect();
        let secs: Vec<usize> = dropped.sentences.iter().map(|s| s.section_id).collect();
        assert_eq!(paras, vec![0, 1]);
        assert_eq!(secs, vec![0, 1]);
        assert_eq!(dropped.sentences[1].index, 1);
    }
}
