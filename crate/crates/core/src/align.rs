//! Aligns scorer tokens onto parse tokens, accumulating entropy and length.
//!
//! Each scorer token is assigned to the parse token whose span contains its
//! first character; the parse token's value is the sum of assigned entropies
//! and its length the count of assigned scorer tokens. A parse token that
//! received nothing (a single scorer token spans several parse tokens) gets
//! length 1 and a character-weighted share of the spanning token's entropy,
//! the residual staying with the owner of the spanning token's first
//! character. Total entropy is conserved.

use alloc::string::String;
use alloc::vec::Vec;

use crate::parse::LocalParseTree;
use crate::score::ScoredToken;

#[derive(Debug, Clone, PartialEq)]
pub enum AlignError {
    /// A scorer token starts outside every parse token (the two tokenizers
    /// saw different text).
    DisjointCoverage { token: String, position: usize },
    /// A parse token is not covered by any scorer token.
    UncoveredParseToken { token: String, position: usize },
}

impl core::fmt::Display for AlignError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AlignError::DisjointCoverage { token, position } => write!(
                f,
                "scorer token {token:?} at char {position} lies outside every parse token"
            ),
            AlignError::UncoveredParseToken { token, position } => write!(
                f,
                "parse token {token:?} at char {position} is not covered by any scorer token"
            ),
        }
    }
}

impl core::error::Error for AlignError {}

/// Aligned value and length per parse token, indexed by ordinal minus one.
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub entropy: Vec<f64>,
    pub length: Vec<usize>,
}

impl Alignment {
    pub fn total_entropy(&self) -> f64 {
        self.entropy.iter().sum()
    }

    pub fn total_length(&self) -> usize {
        self.length.iter().sum()
    }
}

/// Finds the index of the span in `spans` (sorted, non-overlapping) that
/// contains `pos`.
fn containing(spans: &[(usize, usize)], pos: usize) -> Option<usize> {
    let mut lo = 0usize;
    let mut hi = spans.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        let (s, e) = spans[mid];
        if pos < s {
            hi = mid;
        } else if pos >= e {
            lo = mid + 1;
        } else {
            return Some(mid);
        }
    }
    None
}

fn overlap(a: (usize, usize), b: (usize, usize)) -> usize {
    let lo = a.0.max(b.0);
    let hi = a.1.min(b.1);
    hi.saturating_sub(lo)
}

/// Computes `(e_aligned, length)` per parse token from scorer output over
/// the same sentence text.
pub fn align(parse: &LocalParseTree, scored: &[ScoredToken]) -> Result<Alignment, AlignError> {
    let parse_spans: Vec<(usize, usize)> = parse.tokens.iter().map(|t| t.span).collect();
    let scored_spans: Vec<(usize, usize)> = scored.iter().map(|t| t.span).collect();
    let n = parse_spans.len();
    let mut entropy = alloc::vec![0.0f64; n];
    let mut counts = alloc::vec![0usize; n];

    // First pass: assign each scorer token to the parse token owning its
    // first character.
    let mut owner_of_scored = alloc::vec![0usize; scored.len()];
    for (si, s) in scored.iter().enumerate() {
        let owner = containing(&parse_spans, s.span.0).ok_or_else(|| {
            AlignError::DisjointCoverage {
                token: s.text.clone(),
                position: s.span.0,
            }
        })?;
        entropy[owner] += s.entropy;
        counts[owner] += 1;
        owner_of_scored[si] = owner;
    }

    // Second pass: parse tokens with no assignment sit inside a spanning
    // scorer token; give them a character-weighted share of its entropy.
    for (pi, span) in parse_spans.iter().enumerate() {
        if counts[pi] > 0 {
            continue;
        }
        let si = containing(&scored_spans, span.0).ok_or_else(|| {
            AlignError::UncoveredParseToken {
                token: parse.tokens[pi].text.clone(),
                position: span.0,
            }
        })?;
        let spanning = &scored[si];
        let width = spanning.span.1 - spanning.span.0;
        let share = if width == 0 {
            0.0
        } else {
            spanning.entropy * overlap(*span, spanning.span) as f64 / width as f64
        };
        entropy[pi] += share;
        entropy[owner_of_scored[si]] -= share;
    }

    let length: Vec<usize> = counts.iter().map(|&c| c.max(1)).collect();
    Ok(Alignment { entropy, length })
}
