//! Shared word/punctuation tokenizer over Unicode scalar offsets.
//!
//! Every span in this crate counts Unicode scalar values (`char`s), never
//! bytes, so sentence slicing, parse-token recovery, and scorer alignment all
//! agree on one offset space.

use alloc::string::String;
use alloc::vec::Vec;

/// A token with its half-open `(start, end)` char span into the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawToken {
    pub text: String,
    pub span: (usize, usize),
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\'' || c == '\u{2019}'
}

/// Splits text into tokens: maximal runs of alphanumeric/apostrophe chars,
/// or single punctuation chars. Whitespace separates and is never emitted.
pub fn tokenize(text: &str) -> Vec<RawToken> {
    let mut tokens = Vec::new();
    let mut run_start: Option<usize> = None;
    let mut run = String::new();
    for (idx, c) in text.chars().enumerate() {
        if c.is_whitespace() {
            if let Some(start) = run_start.take() {
                tokens.push(RawToken {
                    text: core::mem::take(&mut run),
                    span: (start, idx),
                });
            }
        } else if is_word_char(c) {
            if run_start.is_none() {
                run_start = Some(idx);
            }
            run.push(c);
        } else {
            if let Some(start) = run_start.take() {
                tokens.push(RawToken {
                    text: core::mem::take(&mut run),
                    span: (start, idx),
                });
            }
            let mut text = String::new();
            text.push(c);
            tokens.push(RawToken {
                text,
                span: (idx, idx + 1),
            });
        }
    }
    if let Some(start) = run_start {
        let end = start + run.chars().count();
        tokens.push(RawToken { text: run, span: (start, end) });
    }
    tokens
}

/// Number of Unicode scalar values in `text`.
pub fn char_len(text: &str) -> usize {
    text.chars().count()
}

/// Slice by char offsets; clamps to the text length.
pub fn char_slice(text: &str, start: usize, end: usize) -> String {
    text.chars().skip(start).take(end.saturating_sub(start)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn words_and_punctuation() {
        let toks = tokenize("the cat sat.");
        let texts: Vec<&str> = toks.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(texts, vec!["the", "cat", "sat", "."]);
        assert_eq!(toks[0].span, (0, 3));
        assert_eq!(toks[3].span, (11, 12));
    }

    #[test]
    fn apostrophes_stay_in_word() {
        let toks = tokenize("don't stop");
        let texts: Vec<&str> = toks.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(texts, vec!["don't", "stop"]);
    }

    #[test]
    fn spans_are_char_offsets() {
        // "é" is one scalar value; spans must count chars, not bytes.
        let toks = tokenize("café au lait");
        assert_eq!(toks[0].span, (0, 4));
        assert_eq!(toks[1].span, (5, 7));
    }

    #[test]
    fn empty_and_whitespace() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("   \n\t").is_empty());
    }

    #[test]
    fn char_slice_clamps() {
        assert_eq!(char_slice("hello", 1, 3), "el");
        assert_eq!(char_slice("hello", 3, 99), "lo");
        assert_eq!(char_slice("hello", 4, 2), "");
    }
}
