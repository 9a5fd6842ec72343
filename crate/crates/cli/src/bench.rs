//! Stage timing over synthetic documents.

use std::time::Instant;

use anyhow::{bail, Result};
use promptshear_core::{
    adjust, align, build_global_tree, calculate_solution, fallback_parse, segment, train_ngram,
    AdjustmentParams,
};

use crate::synth::synthesize_document;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchSize {
    pub sentences: usize,
    pub tokens: usize,
}

impl BenchSize {
    /// Parses `8x20` as 8 sentences of 20 tokens.
    pub fn parse(spec: &str) -> Result<BenchSize> {
        let Some((m, n)) = spec.split_once('x') else {
            bail!("size {spec:?} not of the form <sentences>x<tokens>");
        };
        Ok(BenchSize {
            sentences: m.trim().parse()?,
            tokens: n.trim().parse()?,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub size: BenchSize,
    pub segment_ms: f64,
    pub parse_ms: f64,
    pub score_ms: f64,
    pub align_ms: f64,
    pub build_ms: f64,
    pub adjust_ms: f64,
    pub solve_ms: f64,
    pub total_ms: f64,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs[xs.len() / 2]
}

/// Times each pipeline stage on one synthetic document per size; the
/// reported value is the median over `runs` repetitions.
pub fn bench(sizes: &[BenchSize], runs: usize, seed: u64) -> Result<Vec<BenchRow>> {
    let runs = runs.max(1);
    let mut rows = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let text = synthesize_document(size.sentences, size.tokens, seed);
        let mut samples: Vec<[f64; 7]> = Vec::with_capacity(runs);
        for _ in 0..runs {
            let mut stamp = Instant::now();
            let mut lap = || {
                let elapsed = stamp.elapsed().as_secs_f64() * 1e3;
                stamp = Instant::now();
                elapsed
            };

            let doc = segment(&text);
            let segment_ms = lap();

            let parses: Vec<_> = doc
                .sentences
                .iter()
                .map(|s| fallback_parse(s).expect("synthetic sentences tokenize"))
                .collect();
            let parse_ms = lap();

            let model = train_ngram(&doc.source_text).map_err(|e| anyhow::anyhow!("{e}"))?;
            let scored: Vec<_> = doc
                .sentences
                .iter()
                .map(|s| model.score_sentence(&s.text))
                .collect();
            let score_ms = lap();

            let alignments: Vec<_> = parses
                .iter()
                .zip(&scored)
                .map(|(p, s)| align(p, s).expect("same tokenizer"))
                .collect();
            let align_ms = lap();

            let mut tree = build_global_tree(&doc, &parses).map_err(|e| anyhow::anyhow!("{e}"))?;
            let by_sentence = tree.actual_ids_by_sentence();
            for (j, a) in alignments.iter().enumerate() {
                for (i, &id) in by_sentence[&j].iter().enumerate() {
                    tree.nodes[id].length = a.length[i];
                    tree.nodes[id].e_aligned = a.entropy[i];
                }
            }
            let build_ms = lap();

            adjust(&mut tree, &AdjustmentParams::default()).map_err(|e| anyhow::anyhow!("{e}"))?;
            let adjust_ms = lap();

            let solution = calculate_solution(&tree, tree.root);
            std::hint::black_box(solution.value(tree.total_length() / 2));
            let solve_ms = lap();

            samples.push([
                segment_ms, parse_ms, score_ms, align_ms, build_ms, adjust_ms, solve_ms,
            ]);
        }
        let col = |i: usize| median(samples.iter().map(|s| s[i]).collect());
        let row = BenchRow {
            size,
            segment_ms: col(0),
            parse_ms: col(1),
            score_ms: col(2),
            align_ms: col(3),
            build_ms: col(4),
            adjust_ms: col(5),
            solve_ms: col(6),
            total_ms: (0..7).map(col).sum(),
        };
        rows.push(row);
    }
    Ok(rows)
}

pub fn render_table(rows: &[BenchRow]) -> String {
    let mut out = String::from(
        "sentences tokens  segment    parse    score    align    build   adjust    solve    total (ms)\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{:9} {:6} {:8.3} {:8.3} {:8.3} {:8.3} {:8.3} {:8.3} {:8.3} {:8.3}\n",
            r.size.sentences,
            r.size.tokens,
            r.segment_ms,
            r.parse_ms,
            r.score_ms,
            r.align_ms,
            r.build_ms,
            r.adjust_ms,
            r.solve_ms,
            r.total_ms,
        ));
    }
    out
}
