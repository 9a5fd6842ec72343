use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use promptshear_cli::bench::{bench, render_table, BenchSize};
use promptshear_cli::config::{CliOverrides, FileConfig, RunConfig};

#[derive(Parser)]
#[command(name = "promptshear", version, about = "Selective prompt compression over parse trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a document at one or more ratios.
    Run(Box<RunArgs>),
    /// Time the pipeline stages on synthetic documents.
    Bench(BenchArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Input document (UTF-8 text, or segmented JSON with --segmented).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Treat the input as pre-segmented JSON.
    #[arg(long)]
    segmented: bool,
    /// CoNLL-U dependency parses, one block per sentence.
    #[arg(long)]
    parses: Option<PathBuf>,
    /// Entropy provider: ngram, sidecar, or remote.
    #[arg(long)]
    entropy: Option<String>,
    /// Entropy sidecar (tab-separated: sentence_index, token, entropy).
    #[arg(long)]
    sidecar: Option<PathBuf>,
    /// Remote scorer endpoint URL.
    #[arg(long)]
    endpoint: Option<String>,
    /// Training corpus for the n-gram provider (defaults to the input).
    #[arg(long)]
    ngram_corpus: Option<PathBuf>,
    /// Compression ratios in (0,1), comma separated.
    #[arg(long, value_delimiter = ',')]
    ratio: Option<Vec<f64>>,
    /// Value adjustment exponent.
    #[arg(long)]
    a1: Option<f64>,
    /// First-child emphasis multiplier.
    #[arg(long)]
    a2: Option<f64>,
    /// Selection strategy: full, no-adjust, local, flat, parse-only.
    #[arg(long)]
    variant: Option<String>,
    /// Disable node value adjustment.
    #[arg(long)]
    no_adjust: bool,
    /// Allow a1/a2 outside their typical ranges.
    #[arg(long)]
    unsafe_params: bool,
    /// Score outputs against a reference: original or file:<path>.
    #[arg(long)]
    eval_against: Option<String>,
    /// Write tree.txt and tree.dot next to the outputs.
    #[arg(long)]
    dump_tree: bool,
    /// Output directory for compressed files.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// TOML config file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Sizes as <sentences>x<tokens>, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "8x20,16x20,32x20")]
    sizes: Vec<String>,
    /// Repetitions per size; the median is reported.
    #[arg(long, default_value_t = 5)]
    runs: usize,
    /// Seed for the synthetic documents.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => run(*args),
        Command::Bench(args) => {
            let sizes: Vec<BenchSize> = args
                .sizes
                .iter()
                .map(|s| BenchSize::parse(s))
                .collect::<Result<_>>()?;
            let rows = bench(&sizes, args.runs, args.seed)?;
            print!("{}", render_table(&rows));
            Ok(())
        }
    }
}

fn run(args: RunArgs) -> Result<()> {
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let overrides = CliOverrides {
        input: args.input,
        segmented: args.segmented,
        parses: args.parses,
        entropy: args.entropy,
        sidecar: args.sidecar,
        endpoint: args.endpoint,
        ngram_corpus: args.ngram_corpus,
        ratio: args.ratio,
        a1: args.a1,
        a2: args.a2,
        variant: args.variant,
        no_adjust: args.no_adjust,
        unsafe_params: args.unsafe_params,
        eval_against: args.eval_against,
        dump_tree: args.dump_tree,
        out_dir: args.out_dir,
        report: args.report,
    };
    let config = RunConfig::resolve(overrides, file)?;
    if config.input.is_dir() {
        let outcomes = promptshear_cli::run::execute_batch(&config)?;
        for (path, outcome) in outcomes {
            let total: usize = outcome.report.results.iter().map(|r| r.realized_length).sum();
            println!(
                "{}: {} ratios, {} retained tokens total",
                path.display(),
                outcome.report.results.len(),
                total
            );
        }
        return Ok(());
    }
    let outcome = promptshear_cli::execute(&config)?;
    if config.report.is_none() {
        println!("{}", outcome.report_json);
    }
    Ok(())
}
