//! Deterministic synthetic documents for benchmarks and stress tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STEMS: &[&str] = &[
    "river", "market", "signal", "garden", "harbor", "window", "story", "record", "village",
    "engine", "forest", "bridge", "letter", "silver", "meadow", "border", "winter", "summer",
    "copper", "valley", "mirror", "candle", "basket", "stone", "cloud", "horse", "train",
    "paper", "music", "light",
];

/// Builds a document of `sentences` sentences with `tokens_per_sentence`
/// word tokens each (plus a final period), grouped two sentences to a
/// paragraph and two paragraphs to a section with `#` headings. Identical
/// `(sentences, tokens_per_sentence, seed)` always yields identical text.
pub fn synthesize_document(sentences: usize, tokens_per_sentence: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    let per_paragraph = 2usize;
    let per_section = 2usize;
    let mut sentence_in_paragraph = 0usize;
    let mut paragraph_in_section = 0usize;
    let mut section = 0usize;
    let mut opened = false;
    for s in 0..sentences {
        if !opened {
            out.push_str(&format!("# Part {section}\n\n"));
            opened = true;
        }
        let mut words = Vec::with_capacity(tokens_per_sentence);
        for w in 0..tokens_per_sentence.max(1) {
            let stem = STEMS[rng.gen_range(0..STEMS.len())];
            let suffix = rng.gen_range(0..100);
            let word = if w == 0 {
                let mut c = stem.chars();
                let first = c.next().unwrap().to_uppercase().to_string();
                format!("{first}{}{suffix}", c.as_str())
            } else {
                format!("{stem}{suffix}")
            };
            words.push(word);
        }
        out.push_str(&words.join(" "));
        out.push('.');
        sentence_in_paragraph += 1;
        let last = s + 1 == sentences;
        if sentence_in_paragraph == per_paragraph || last {
            out.push_str("\n\n");
            sentence_in_paragraph = 0;
            paragraph_in_section += 1;
            if paragraph_in_section == per_section && !last {
                section += 1;
                paragraph_in_section = 0;
                opened = false;
            }
        } else {
            out.push(' ');
        }
    }
    out
}
