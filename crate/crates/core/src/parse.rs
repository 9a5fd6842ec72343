//! Per-sentence dependency trees, read from CoNLL-U text or built by a flat
//! fallback parser.
//!
//! CoNLL-U blocks must match the segmented sentences one-to-one and in
//! order. Token spans are recovered by greedy left-to-right matching of the
//! FORM column against the sentence text; a form that cannot be located is a
//! hard error rather than a guess.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::segment::{SegmentedDocument, SentenceRecord};
use crate::tokenize::tokenize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    SentenceCountMismatch { expected: usize, found: usize },
    MalformedRow { line: usize, detail: String },
    RootCount { sentence: usize, count: usize },
    HeadOutOfRange { sentence: usize, token: usize, head: usize },
    Cycle { sentence: usize },
    FormMismatch { sentence: usize, token: usize, form: String },
    EmptySentence { sentence: usize },
    NonDenseIds { sentence: usize },
}

impl core::fmt::Display for ParseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ParseError::SentenceCountMismatch { expected, found } => write!(
                f,
                "expected one parse block per sentence ({expected}), found {found}"
            ),
            ParseError::MalformedRow { line, detail } => {
                write!(f, "line {line}: {detail}")
            }
            ParseError::RootCount { sentence, count } => {
                write!(f, "sentence {sentence}: {count} tokens with head 0, expected exactly 1")
            }
            ParseError::HeadOutOfRange { sentence, token, head } => {
                write!(f, "sentence {sentence}: token {token} points to missing head {head}")
            }
            ParseError::Cycle { sentence } => {
                write!(f, "sentence {sentence}: head links form a cycle")
            }
            ParseError::FormMismatch { sentence, token, form } => write!(
                f,
                "sentence {sentence}: form {form:?} of token {token} not found in sentence text"
            ),
            ParseError::EmptySentence { sentence } => {
                write!(f, "sentence {sentence}: no tokens")
            }
            ParseError::NonDenseIds { sentence } => {
                write!(f, "sentence {sentence}: token ids are not dense from 1")
            }
        }
    }
}

impl core::error::Error for ParseError {}

/// One parse token. `index` is the 1-based ordinal within the sentence,
/// `head` the ordinal of the parent (0 means sentence root), and `span` the
/// char offsets into the sentence text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseToken {
    pub index: usize,
    pub text: String,
    pub head: usize,
    pub span: (usize, usize),
}

/// Dependency tree of one sentence; tokens stay in sentence order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalParseTree {
    pub sentence_index: usize,
    pub tokens: Vec<ParseToken>,
    pub root: usize,
}

impl LocalParseTree {
    /// Total parse tokens.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    fn validate(sentence: usize, tokens: &[ParseToken]) -> Result<usize, ParseError> {
        let n = tokens.len();
        if n == 0 {
            return Err(ParseError::EmptySentence { sentence });
        }
        for t in tokens {
            if t.head != 0 && (t.head > n || t.head == t.index) {
                return Err(ParseError::HeadOutOfRange {
                    sentence,
                    token: t.index,
                    head: t.head,
                });
            }
        }
        // Every token must reach head 0 in at most n steps.
        for t in tokens {
            let mut cur = t.index;
            let mut steps = 0;
            while cur != 0 {
                cur = tokens[cur - 1].head;
                steps += 1;
                if steps > n {
                    return Err(ParseError::Cycle { sentence });
                }
            }
        }
        let roots: Vec<usize> = tokens.iter().filter(|t| t.head == 0).map(|t| t.index).collect();
        if roots.len() != 1 {
            return Err(ParseError::RootCount {
                sentence,
                count: roots.len(),
            });
        }
        Ok(roots[0])
    }
}

/// Reads CoNLL-U text into one tree per sentence of `doc`.
///
/// Multiword-token ranges (`3-4`) and empty nodes (`5.1`) are skipped in
/// favor of their parts; `#` comment lines are ignored.
pub fn read_conllu(
    source: &str,
    doc: &SegmentedDocument,
) -> Result<Vec<LocalParseTree>, ParseError> {
    struct Row {
        line: usize,
        id: usize,
        form: String,
        head: usize,
    }

    let mut blocks: Vec<Vec<Row>> = Vec::new();
    let mut current: Vec<Row> = Vec::new();
    for (lineno, line) in source.lines().enumerate() {
        let line_no = lineno + 1;
        if line.trim().is_empty() {
            if !current.is_empty() {
                blocks.push(core::mem::take(&mut current));
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(ParseError::MalformedRow {
                line: line_no,
                detail: alloc::format!("expected 10 tab-separated columns, found {}", cols.len()),
            });
        }
        let id_col = cols[0];
        if id_col.contains('-') || id_col.contains('.') {
            // multiword range or empty node: parts carry the tree
            continue;
        }
        let id: usize = id_col.parse().map_err(|_| ParseError::MalformedRow {
            line: line_no,
            detail: alloc::format!("unparseable token id {id_col:?}"),
        })?;
        let head: usize = cols[6].parse().map_err(|_| ParseError::MalformedRow {
            line: line_no,
            detail: alloc::format!("unparseable head {:?}", cols[6]),
        })?;
        current.push(Row {
            line: line_no,
            id,
            form: cols[1].to_string(),
            head,
        });
    }
    if !current.is_empty() {
        blocks.push(current);
    }

    if blocks.len() != doc.sentences.len() {
        return Err(ParseError::SentenceCountMismatch {
            expected: doc.sentences.len(),
            found: blocks.len(),
        });
    }

    let mut trees = Vec::with_capacity(blocks.len());
    for (sentence, block) in blocks.into_iter().enumerate() {
        let record = &doc.sentences[sentence];
        let chars: Vec<char> = record.text.chars().collect();
        let mut cursor = 0usize;
        let mut tokens = Vec::with_capacity(block.len());
        for (i, row) in block.iter().enumerate() {
            if row.id != i + 1 {
                return Err(ParseError::NonDenseIds { sentence });
            }
            let _ = row.line;
            let span = locate_form(&chars, &mut cursor, &row.form).ok_or_else(|| {
                ParseError::FormMismatch {
                    sentence,
                    token: row.id,
                    form: row.form.clone(),
                }
            })?;
            tokens.push(ParseToken {
                index: row.id,
                text: row.form.clone(),
                head: row.head,
                span,
            });
        }
        let root = LocalParseTree::validate(sentence, &tokens)?;
        trees.push(LocalParseTree {
            sentence_index: sentence,
            tokens,
            root,
        });
    }
    Ok(trees)
}

/// Greedy left-to-right match of `form` in the sentence, skipping whitespace
/// before the token. Returns the char span or None.
fn locate_form(chars: &[char], cursor: &mut usize, form: &str) -> Option<(usize, usize)> {
    while *cursor < chars.len() && chars[*cursor].is_whitespace() {
        *cursor += 1;
    }
    let start = *cursor;
    let mut pos = start;
    for fc in form.chars() {
        if pos >= chars.len() || chars[pos] != fc {
            return None;
        }
        pos += 1;
    }
    *cursor = pos;
    Some((start, pos))
}

/// Deterministic fallback when no parse sidecar exists: whitespace and
/// punctuation tokenization, first token as root, all others its children.
pub fn fallback_parse(sentence: &SentenceRecord) -> Result<LocalParseTree, ParseError> {
    let raw = tokenize(&sentence.text);
    if raw.is_empty() {
        return Err(ParseError::EmptySentence {
            sentence: sentence.index,
        });
    }
    let tokens: Vec<ParseToken> = raw
        .into_iter()
        .enumerate()
        .map(|(i, t)| ParseToken {
            index: i + 1,
            text: t.text,
            head: if i == 0 { 0 } else { 1 },
            span: t.span,
        })
        .collect();
    Ok(LocalParseTree {
        sentence_index: sentence.index,
        tokens,
        root: 1,
    })
}
