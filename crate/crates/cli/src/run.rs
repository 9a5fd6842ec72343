//! End-to-end execution: resolve inputs, run the pipeline, write outputs.
//!
//! Everything is computed before anything is written, so a failing run
//! leaves no partial output files behind.

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use promptshear_core::{
    parse_sidecar, read_conllu, run_document, segment, train_ngram, DocumentRun, MetricReport,
    PipelineOptions, ScoreSource, SegmentedDocument,
};

use crate::config::{EntropyKind, EvalMode, RunConfig};
use crate::formats::{compressed_file_name, read_segmented, MetricsRecord, RatioRecord, Report};
use crate::remote::RemoteProvider;

/// What a run produced: the report (also serialized to JSON) and the files
/// written.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: Report,
    pub report_json: String,
    pub written: Vec<PathBuf>,
}

/// Runs one document through the pipeline per the config. A directory input
/// switches to batch mode: every `*.txt` inside is processed in parallel
/// (deterministically, each into its own subdirectory of `out_dir`) and the
/// outcomes come back sorted by file name.
pub fn execute(config: &RunConfig) -> Result<RunOutcome> {
    let doc = load_document(config)?;
    let run = run_pipeline(config, doc)?;
    let report = build_report(config, &run)?;
    let report_json =
        serde_json::to_string_pretty(&report).context("serializing report")?;
    let written = write_outputs(config, &run, &report_json)?;
    Ok(RunOutcome { report, report_json, written })
}

/// Batch mode over a directory of `*.txt` documents.
pub fn execute_batch(config: &RunConfig) -> Result<Vec<(PathBuf, RunOutcome)>> {
    use rayon::prelude::*;
    let mut inputs: Vec<PathBuf> = std::fs::read_dir(&config.input)
        .with_context(|| format!("reading directory {}", config.input.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    inputs.sort();
    if inputs.is_empty() {
        anyhow::bail!("no .txt documents in {}", config.input.display());
    }
    inputs
        .par_iter()
        .map(|path| {
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "doc".into());
            let mut per_doc = config.clone();
            per_doc.input = path.clone();
            per_doc.out_dir = config.out_dir.join(&stem);
            per_doc.report = Some(per_doc.out_dir.join("report.json"));
            let outcome = execute(&per_doc)
                .with_context(|| format!("processing {}", path.display()))?;
            Ok((path.clone(), outcome))
        })
        .collect()
}

fn load_document(config: &RunConfig) -> Result<SegmentedDocument> {
    if config.segmented {
        read_segmented(&config.input)
    } else {
        let text = fs::read_to_string(&config.input)
            .with_context(|| format!("reading input {}", config.input.display()))?;
        Ok(segment(&text))
    }
}

/// Resolves parses and scores, then runs the core pipeline.
pub fn run_pipeline(config: &RunConfig, doc: SegmentedDocument) -> Result<DocumentRun> {
    let parses = match &config.parses {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading parses {}", path.display()))?;
            Some(read_conllu(&text, &doc).map_err(|e| anyhow::anyhow!("parse: {e}"))?)
        }
        None => None,
    };

    let options = PipelineOptions {
        ratios: config.ratios.clone(),
        params: config.params,
        variant: config.variant,
        adjust_enabled: !config.no_adjust,
        unsafe_params: config.unsafe_params,
    };

    let run = match config.entropy {
        EntropyKind::NGram => {
            let corpus = match &config.ngram_corpus {
                Some(path) => fs::read_to_string(path)
                    .with_context(|| format!("reading corpus {}", path.display()))?,
                None => doc.source_text.clone(),
            };
            let model = train_ngram(&corpus).map_err(|e| anyhow::anyhow!("scoring: {e}"))?;
            run_document(doc, parses, ScoreSource::Provider(&model), &options)
        }
        EntropyKind::Sidecar => {
            let path = config.sidecar.as_ref().expect("validated by config");
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading sidecar {}", path.display()))?;
            let scores =
                parse_sidecar(&text, &doc).map_err(|e| anyhow::anyhow!("scoring: {e}"))?;
            run_document(doc, parses, ScoreSource::Precomputed(scores), &options)
        }
        EntropyKind::Remote => {
            let endpoint = config.endpoint.as_ref().expect("validated by config");
            let provider = RemoteProvider::new(endpoint);
            run_document(doc, parses, ScoreSource::Provider(&provider), &options)
        }
    };
    run.map_err(|e| anyhow::anyhow!("{e}"))
}

fn build_report(config: &RunConfig, run: &DocumentRun) -> Result<Report> {
    let reference = match &config.eval_against {
        Some(EvalMode::Original) => Some(run.doc.source_text.clone()),
        Some(EvalMode::File(path)) => Some(
            fs::read_to_string(path)
                .with_context(|| format!("reading reference {}", path.display()))?,
        ),
        None => None,
    };

    let mut results = Vec::with_capacity(run.results.len());
    for r in &run.results {
        let metrics = match &reference {
            Some(reference) if r.realized_length > 0 => Some(MetricsRecord::from(
                MetricReport::compute(&r.compressed_text, reference, r, &run.tree)
                    .map_err(|e| anyhow::anyhow!("metrics: {e}"))?,
            )),
            _ => None,
        };
        let retained_token_count = r
            .retained
            .iter()
            .filter(|&&id| run.tree.nodes[id].token_text.is_some())
            .count();
        results.push(RatioRecord {
            ratio: r.ratio,
            budget: r.budget,
            realized_length: r.realized_length,
            realized_ratio: r.realized_ratio,
            objective_value: r.objective_value,
            retained_token_count,
            retained_node_ids: r.retained.iter().copied().collect(),
            output_path: Some(
                config
                    .out_dir
                    .join(compressed_file_name(r.ratio))
                    .display()
                    .to_string(),
            ),
            compressed_text: r.compressed_text.clone(),
            metrics,
        });
    }

    Ok(Report {
        input: config.input.display().to_string(),
        variant: config.variant.name().to_string(),
        a1: config.params.a1,
        a2: config.params.a2,
        total_length: run.tree.total_length(),
        sentence_count: run.doc.sentences.len(),
        warnings: run
            .warnings
            .iter()
            .map(|w| match w.sentence {
                Some(s) => format!("{}: sentence {s}: {}", w.module, w.message),
                None => format!("{}: {}", w.module, w.message),
            })
            .collect(),
        results,
    })
}

fn write_outputs(config: &RunConfig, run: &DocumentRun, report_json: &str) -> Result<Vec<PathBuf>> {
    // stage everything in memory first
    let mut pending: Vec<(PathBuf, String)> = Vec::new();
    for r in &run.results {
        pending.push((
            config.out_dir.join(compressed_file_name(r.ratio)),
            r.compressed_text.clone(),
        ));
    }
    if config.dump_tree {
        pending.push((config.out_dir.join("tree.txt"), run.tree.dump_text()));
        pending.push((config.out_dir.join("tree.dot"), run.tree.dump_dot()));
    }
    if let Some(report_path) = &config.report {
        pending.push((report_path.clone(), report_json.to_string()));
    }

    fs::create_dir_all(&config.out_dir)
        .with_context(|| format!("creating {}", config.out_dir.display()))?;
    let mut written = Vec::with_capacity(pending.len());
    for (path, contents) in pending {
        if let Err(e) = fs::write(&path, &contents) {
            for done in &written {
                let _ = fs::remove_file(done);
            }
            return Err(e).with_context(|| format!("writing {}", path.display()));
        }
        written.push(path);
    }
    Ok(written)
}
