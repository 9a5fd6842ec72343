//! Run configuration: command-line flags layered over an optional TOML
//! config file, over built-in defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use promptshear_core::{select_variant, AdjustmentParams, VariantMode};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyKind {
    NGram,
    Sidecar,
    Remote,
}

impl EntropyKind {
    pub fn parse(name: &str) -> Result<EntropyKind> {
        match name {
            "ngram" => Ok(EntropyKind::NGram),
            "sidecar" => Ok(EntropyKind::Sidecar),
            "remote" => Ok(EntropyKind::Remote),
            other => bail!("unknown entropy provider {other:?} (expected ngram|sidecar|remote)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalMode {
    Original,
    File(PathBuf),
}

impl EvalMode {
    pub fn parse(spec: &str) -> Result<EvalMode> {
        if spec == "original" {
            Ok(EvalMode::Original)
        } else if let Some(path) = spec.strip_prefix("file:") {
            Ok(EvalMode::File(PathBuf::from(path)))
        } else {
            bail!("invalid --eval-against {spec:?} (expected original or file:<path>)")
        }
    }
}

/// Optional config file mirroring the command-line flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub segmented: Option<bool>,
    pub parses: Option<PathBuf>,
    pub entropy: Option<String>,
    pub sidecar: Option<PathBuf>,
    pub endpoint: Option<String>,
    pub ngram_corpus: Option<PathBuf>,
    pub ratio: Option<Vec<f64>>,
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    pub variant: Option<String>,
    pub no_adjust: Option<bool>,
    pub unsafe_params: Option<bool>,
    pub eval_against: Option<String>,
    pub dump_tree: Option<bool>,
    pub out_dir: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config file {}", path.display()))
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: PathBuf,
    pub segmented: bool,
    pub parses: Option<PathBuf>,
    pub entropy: EntropyKind,
    pub sidecar: Option<PathBuf>,
    pub endpoint: Option<String>,
    pub ngram_corpus: Option<PathBuf>,
    pub ratios: Vec<f64>,
    pub params: AdjustmentParams,
    pub variant: VariantMode,
    pub no_adjust: bool,
    pub unsafe_params: bool,
    pub eval_against: Option<EvalMode>,
    pub dump_tree: bool,
    pub out_dir: PathBuf,
    pub report: Option<PathBuf>,
}

/// The unresolved flag values as they come from clap; `None` falls through
/// to the config file, then to defaults.
#[derive(Debug, Clone, Default)]
pub struct CliOverrides {
    pub input: Option<PathBuf>,
    pub segmented: bool,
    pub parses: Option<PathBuf>,
    pub entropy: Option<String>,
    pub sidecar: Option<PathBuf>,
    pub endpoint: Option<String>,
    pub ngram_corpus: Option<PathBuf>,
    pub ratio: Option<Vec<f64>>,
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    pub variant: Option<String>,
    pub no_adjust: bool,
    pub unsafe_params: bool,
    pub eval_against: Option<String>,
    pub dump_tree: bool,
    pub out_dir: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(cli: CliOverrides, file: FileConfig) -> Result<RunConfig> {
        let input = cli
            .input
            .or(file.input)
            .context("no input document (pass --input)")?;
        let ratios = cli
            .ratio
            .or(file.ratio)
            .unwrap_or_else(|| vec![0.5]);
        if ratios.is_empty() {
            bail!("at least one compression ratio required");
        }
        for &r in &ratios {
            if !(r > 0.0 && r < 1.0) {
                bail!("ratio {r} outside (0, 1)");
            }
        }
        let entropy = match cli.entropy.or(file.entropy) {
            Some(name) => EntropyKind::parse(&name)?,
            None => EntropyKind::NGram,
        };
        let sidecar = cli.sidecar.or(file.sidecar);
        let endpoint = cli.endpoint.or(file.endpoint);
        match entropy {
            EntropyKind::Sidecar if sidecar.is_none() => {
                bail!("--entropy sidecar requires --sidecar <path>")
            }
            EntropyKind::Remote if endpoint.is_none() => {
                bail!("--entropy remote requires --endpoint <url>")
            }
            _ => {}
        }
        let variant = select_variant(
            &cli.variant.or(file.variant).unwrap_or_else(|| "full".into()),
        )
        .map_err(|e| anyhow::anyhow!("{e}"))?;
        let eval_against = match cli.eval_against.or(file.eval_against) {
            Some(spec) => Some(EvalMode::parse(&spec)?),
            None => None,
        };
        Ok(RunConfig {
            input,
            segmented: cli.segmented || file.segmented.unwrap_or(false),
            parses: cli.parses.or(file.parses),
            entropy,
            sidecar,
            endpoint,
            ngram_corpus: cli.ngram_corpus.or(file.ngram_corpus),
            params: AdjustmentParams::new(
                cli.a1.or(file.a1).unwrap_or(4.0),
                cli.a2.or(file.a2).unwrap_or(100.0),
            ),
            variant,
            no_adjust: cli.no_adjust || file.no_adjust.unwrap_or(false),
            unsafe_params: cli.unsafe_params || file.unsafe_params.unwrap_or(false),
            eval_against,
            dump_tree: cli.dump_tree || file.dump_tree.unwrap_or(false),
            out_dir: cli.out_dir.or(file.out_dir).unwrap_or_else(|| PathBuf::from("out")),
            report: cli.report.or(file.report),
            ratios,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_overrides_file() {
        let cli = CliOverrides {
            input: Some(PathBuf::from("cli.txt")),
            a1: Some(2.0),
            ..CliOverrides::default()
        };
        let file = FileConfig {
            input: Some(PathBuf::from("file.txt")),
            a1: Some(3.0),
            a2: Some(50.0),
            ..FileConfig::default()
        };
        let cfg = RunConfig::resolve(cli, file).unwrap();
        assert_eq!(cfg.input, PathBuf::from("cli.txt"));
        assert_eq!(cfg.params.a1, 2.0);
        assert_eq!(cfg.params.a2, 50.0);
    }

    #[test]
    fn defaults_apply() {
        let cli = CliOverrides {
            input: Some(PathBuf::from("x.txt")),
            ..CliOverrides::default()
        };
        let cfg = RunConfig::resolve(cli, FileConfig::default()).unwrap();
        assert_eq!(cfg.ratios, vec![0.5]);
        assert_eq!(cfg.params.a1, 4.0);
        assert_eq!(cfg.params.a2, 100.0);
        assert_eq!(cfg.variant, VariantMode::Full);
        assert_eq!(cfg.entropy, EntropyKind::NGram);
    }

    #[test]
    fn bad_ratio_rejected() {
        let cli = CliOverrides {
            input: Some(PathBuf::from("x.txt")),
            ratio: Some(vec![1.5]),
            ..CliOverrides::default()
        };
        assert!(RunConfig::resolve(cli, FileConfig::default()).is_err());
    }

    #[test]
    fn sidecar_provider_needs_path() {
        let cli = CliOverrides {
            input: Some(PathBuf::from("x.txt")),
            entropy: Some("sidecar".into()),
            ..CliOverrides::default()
        };
        assert!(RunConfig::resolve(cli, FileConfig::default()).is_err());
    }

    #[test]
    fn eval_mode_parses() {
        assert_eq!(EvalMode::parse("original").unwrap(), EvalMode::Original);
        assert_eq!(
            EvalMode::parse("file:ref.txt").unwrap(),
            EvalMode::File(PathBuf::from("ref.txt"))
        );
        assert!(EvalMode::parse("nonsense").is_err());
    }
}
