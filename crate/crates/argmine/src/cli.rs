//! Command-line frontend: `ingest` builds labeled instances from a corpus
//! directory, `extract` turns instances into a dataset file, and `cv` runs
//! cross-validated evaluation (optionally as an ablation pair).
//!
//! Option precedence is flags over config file over built-in defaults; the
//! resolved configuration is echoed into every report. Human-readable
//! summaries go to stderr, machine-readable artifacts to the output files.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::corpus::{self, Instance, Segmenter};
use crate::dataset::{self, AssembleOptions, Dataset, Format};
use crate::error::{Error, Result};
use crate::eval::{self, PerFoldExtraction};
use crate::features::{IndicatorLexicon, LookupScope, ModalList, VocabScope, Vocabulary};
use crate::svm::Hyperparams;

#[derive(Debug, Parser)]
#[command(
    name = "argmine",
    version,
    about = "Argument component classification: ingest annotated essays, extract features, cross-validate a linear SVM"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LookupScopeArg {
    /// Look n-grams and keywords up in the whole covering sentence
    Sentence,
    /// Look them up in the component text when one is present
    Component,
}

impl From<LookupScopeArg> for LookupScope {
    fn from(v: LookupScopeArg) -> Self {
        match v {
            LookupScopeArg::Sentence => LookupScope::Sentence,
            LookupScopeArg::Component => LookupScope::Component,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VocabScopeArg {
    /// Build the n-gram vocabulary once from the whole corpus
    Corpus,
    /// Rebuild the vocabulary from the training fold during cv
    Fold,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Arff,
    Json,
}

impl From<FormatArg> for Format {
    fn from(v: FormatArg) -> Self {
        match v {
            FormatArg::Csv => Format::Csv,
            FormatArg::Arff => Format::Arff,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a corpus directory (<id>.txt + <id>.ann) into labeled instances
    Ingest {
        /// Corpus directory
        #[arg(long)]
        corpus: PathBuf,
        /// Abbreviation guard list for sentence segmentation, one entry per line
        #[arg(long)]
        abbrev_file: Option<PathBuf>,
        /// Output instances file (JSON)
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract features from an instances file into a dataset file
    Extract {
        /// Instances file written by `ingest`
        #[arg(long)]
        instances: PathBuf,
        /// Keyword lexicon, one lowercase phrase per line
        #[arg(long)]
        indicator_lexicon: Option<PathBuf>,
        /// Drop the indicator feature families
        #[arg(long)]
        no_indicator: bool,
        #[arg(long, value_enum)]
        lookup_scope: Option<LookupScopeArg>,
        #[arg(long, value_enum)]
        vocab_scope: Option<VocabScopeArg>,
        /// Override the built-in modal verb list
        #[arg(long)]
        modal_list: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: FormatArg,
        /// Output dataset file
        #[arg(long)]
        out: PathBuf,
        /// JSON config file (flags take precedence)
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Cross-validate a dataset, or an ablation pair of datasets
    Cv {
        /// Dataset file (csv/arff/json); with --ablation, the indicator side
        #[arg(long)]
        features: Option<PathBuf>,
        /// Second dataset for --ablation (the no-indicator side)
        #[arg(long)]
        features_b: Option<PathBuf>,
        /// Compare --features against --features-b under one fold plan
        #[arg(long)]
        ablation: bool,
        /// Instances file; required for --vocab-scope fold, which re-extracts
        /// features per fold instead of reading a fixed dataset
        #[arg(long)]
        instances: Option<PathBuf>,
        #[arg(long)]
        indicator_lexicon: Option<PathBuf>,
        #[arg(long)]
        no_indicator: bool,
        #[arg(long, value_enum)]
        lookup_scope: Option<LookupScopeArg>,
        #[arg(long, value_enum)]
        vocab_scope: Option<VocabScopeArg>,
        #[arg(long)]
        modal_list: Option<PathBuf>,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// SVM regularization parameter
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Skip min-max feature scaling
        #[arg(long)]
        no_normalize: bool,
        /// Plain instead of stratified folds
        #[arg(long)]
        no_stratify: bool,
        /// Output report file (JSON)
        #[arg(long)]
        report: PathBuf,
        /// JSON config file (flags take precedence)
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

/// Optional settings loadable from a JSON config file.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub folds: Option<usize>,
    pub seed: Option<u64>,
    pub c: Option<f64>,
    pub tolerance: Option<f64>,
    pub max_iter: Option<usize>,
    pub normalize: Option<bool>,
    pub stratify: Option<bool>,
    pub indicator: Option<bool>,
    pub lookup_scope: Option<String>,
    pub vocab_scope: Option<String>,
}

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<FileConfig> {
        match path {
            None => Ok(FileConfig::default()),
            Some(p) => {
                let raw = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                serde_json::from_str(&raw).map_err(|e| Error::Config {
                    message: format!("{}: {e}", p.display()),
                })
            }
        }
    }

    fn lookup(&self) -> Result<Option<LookupScope>> {
        match self.lookup_scope.as_deref() {
            None => Ok(None),
            Some("sentence") => Ok(Some(LookupScope::Sentence)),
            Some("component") => Ok(Some(LookupScope::Component)),
            Some(other) => Err(Error::Config {
                message: format!("invalid lookup_scope {other:?}"),
            }),
        }
    }

    fn vocab(&self) -> Result<Option<VocabScopeArg>> {
        match self.vocab_scope.as_deref() {
            None => Ok(None),
            Some("corpus") => Ok(Some(VocabScopeArg::Corpus)),
            Some("fold") => Ok(Some(VocabScopeArg::Fold)),
            Some(other) => Err(Error::Config {
                message: format!("invalid vocab_scope {other:?}"),
            }),
        }
    }
}

/// The instances file written by `ingest` and read by `extract`/`cv`.
#[derive(Debug, Serialize, Deserialize)]
pub struct InstancesFile {
    pub total: usize,
    /// Counts indexed by label code: major claim, claim, premise, none.
    pub label_counts: [usize; 4],
    pub instances: Vec<Instance>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest {
            corpus,
            abbrev_file,
            out,
        } => cmd_ingest(&corpus, abbrev_file.as_deref(), &out),
        Command::Extract {
            instances,
            indicator_lexicon,
            no_indicator,
            lookup_scope,
            vocab_scope,
            modal_list,
            format,
            out,
            config,
        } => cmd_extract(ExtractArgs {
            instances,
            indicator_lexicon,
            no_indicator,
            lookup_scope,
            vocab_scope,
            modal_list,
            format,
            out,
            config,
        }),
        Command::Cv {
            features,
            features_b,
            ablation,
            instances,
            indicator_lexicon,
            no_indicator,
            lookup_scope,
            vocab_scope,
            modal_list,
            folds,
            seed,
            c,
            tolerance,
            max_iter,
            no_normalize,
            no_stratify,
            report,
            config,
        } => cmd_cv(CvArgs {
            features,
            features_b,
            ablation,
            instances,
            indicator_lexicon,
            no_indicator,
            lookup_scope,
            vocab_scope,
            modal_list,
            folds,
            seed,
            c,
            tolerance,
            max_iter,
            no_normalize,
            no_stratify,
            report,
            config,
        }),
    }
}

pub fn cmd_ingest(corpus_dir: &Path, abbrev_file: Option<&Path>, out: &Path) -> Result<()> {
    let segmenter = match abbrev_file {
        Some(path) => Segmenter::from_file(path)?,
        None => Segmenter::default(),
    };
    let instances = corpus::load_corpus(corpus_dir, &segmenter)?;
    let label_counts = corpus::label_counts(&instances);
    let file = InstancesFile {
        total: instances.len(),
        label_counts,
        instances,
    };
    let json = serde_json::to_string_pretty(&file).expect("instances serialize");
    fs::write(out, json).map_err(|e| Error::io(out, e))?;
    eprintln!(
        "ingested {} instances: {} major claim, {} claim, {} premise, {} none",
        file.total, label_counts[0], label_counts[1], label_counts[2], label_counts[3]
    );
    eprintln!("instances written to {}", out.display());
    Ok(())
}

fn read_instances(path: &Path) -> Result<InstancesFile> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&raw).map_err(|e| Error::Import {
        line: e.line(),
        message: format!("instances file: {e}"),
    })
}

struct ExtractArgs {
    instances: PathBuf,
    indicator_lexicon: Option<PathBuf>,
    no_indicator: bool,
    lookup_scope: Option<LookupScopeArg>,
    vocab_scope: Option<VocabScopeArg>,
    modal_list: Option<PathBuf>,
    format: FormatArg,
    out: PathBuf,
    config: Option<PathBuf>,
}

fn cmd_extract(args: ExtractArgs) -> Result<()> {
    let file_config = FileConfig::load(args.config.as_deref())?;
    let indicator = if args.no_indicator {
        false
    } else {
        file_config.indicator.unwrap_or(true)
    };
    let lookup: LookupScope = args
        .lookup_scope
        .map(Into::into)
        .or(file_config.lookup()?)
        .unwrap_or(LookupScope::Sentence);
    let vocab_scope = args
        .vocab_scope
        .or(file_config.vocab()?)
        .unwrap_or(VocabScopeArg::Corpus);
    if vocab_scope == VocabScopeArg::Fold {
        return Err(Error::Config {
            message: "a fold-scoped vocabulary cannot be exported as a fixed dataset; \
                      run `argmine cv --instances <file> --vocab-scope fold` instead"
                .into(),
        });
    }

    let instances = read_instances(&args.instances)?;
    let lexicon = match (indicator, &args.indicator_lexicon) {
        (true, Some(path)) => Some(IndicatorLexicon::from_file(path)?),
        (true, None) => {
            return Err(Error::Config {
                message: "--indicator-lexicon is required unless --no-indicator is set".into(),
            })
        }
        (false, _) => None,
    };
    let modals = match &args.modal_list {
        Some(path) => ModalList::from_file(path)?,
        None => ModalList::default(),
    };

    let vocab = Vocabulary::build(&instances.instances, VocabScope::FullCorpus, lookup);
    let options = AssembleOptions { indicator, lookup };
    let ds = dataset::assemble(
        &instances.instances,
        &vocab,
        lexicon.as_ref(),
        &modals,
        options,
    )?;
    dataset::export_to_path(&ds, args.format.into(), &args.out)?;

    let dim = ds.dim();
    eprintln!(
        "vocabulary: {} unigrams, {} bigrams, {} trigrams",
        vocab.unigrams.len(),
        vocab.bigrams.len(),
        vocab.trigrams.len()
    );
    match &lexicon {
        Some(lex) => eprintln!(
            "columns: {dim} with indicator features, {} without",
            dim - lex.len() - 1
        ),
        None => eprintln!("columns: {dim} (indicator features disabled)"),
    }
    eprintln!(
        "dataset ({} rows) written to {}",
        ds.len(),
        args.out.display()
    );
    Ok(())
}

struct CvArgs {
    features: Option<PathBuf>,
    features_b: Option<PathBuf>,
    ablation: bool,
    instances: Option<PathBuf>,
    indicator_lexicon: Option<PathBuf>,
    no_indicator: bool,
    lookup_scope: Option<LookupScopeArg>,
    vocab_scope: Option<VocabScopeArg>,
    modal_list: Option<PathBuf>,
    folds: Option<usize>,
    seed: Option<u64>,
    c: Option<f64>,
    tolerance: Option<f64>,
    max_iter: Option<usize>,
    no_normalize: bool,
    no_stratify: bool,
    report: PathBuf,
    config: Option<PathBuf>,
}

fn cmd_cv(args: CvArgs) -> Result<()> {
    let file_config = FileConfig::load(args.config.as_deref())?;
    let defaults = Hyperparams::default();
    let folds = args.folds.or(file_config.folds).unwrap_or(10);
    let seed = args.seed.or(file_config.seed).unwrap_or(defaults.seed);
    let stratify = if args.no_stratify {
        false
    } else {
        file_config.stratify.unwrap_or(true)
    };
    let hp = Hyperparams {
        c: args.c.or(file_config.c).unwrap_or(defaults.c),
        max_iter: args
            .max_iter
            .or(file_config.max_iter)
            .unwrap_or(defaults.max_iter),
        tolerance: args
            .tolerance
            .or(file_config.tolerance)
            .unwrap_or(defaults.tolerance),
        seed,
        normalize: if args.no_normalize {
            false
        } else {
            file_config.normalize.unwrap_or(defaults.normalize)
        },
    };
    let vocab_scope = args
        .vocab_scope
        .or(file_config.vocab()?)
        .unwrap_or(VocabScopeArg::Corpus);
    let lookup: LookupScope = args
        .lookup_scope
        .map(Into::into)
        .or(file_config.lookup()?)
        .unwrap_or(LookupScope::Sentence);

    let config_echo = serde_json::json!({
        "c": hp.c,
        "max_iter": hp.max_iter,
        "tolerance": hp.tolerance,
        "seed": seed,
        "normalize": hp.normalize,
        "folds": folds,
        "stratify": stratify,
        "vocab_scope": match vocab_scope {
            VocabScopeArg::Corpus => "corpus",
            VocabScopeArg::Fold => "fold",
        },
        "features": args.features.as_ref().map(|p| p.display().to_string()),
        "features_b": args.features_b.as_ref().map(|p| p.display().to_string()),
        "instances": args.instances.as_ref().map(|p| p.display().to_string()),
        "ablation": args.ablation,
    });

    if args.ablation {
        let (a_path, b_path) = match (&args.features, &args.features_b) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::Config {
                    message: "--ablation requires both --features and --features-b".into(),
                })
            }
        };
        let a = dataset::import_from_path(a_path, Format::from_path(a_path)?)?;
        let b = dataset::import_from_path(b_path, Format::from_path(b_path)?)?;
        let mut report = eval::ablation_compare(&a, &b, &hp, folds, seed)?;
        report.with_indicator.config = config_echo.clone();
        report.without_indicator.config = config_echo;
        let json = serde_json::to_string_pretty(&report).expect("report serialize");
        fs::write(&args.report, json).map_err(|e| Error::io(&args.report, e))?;
        eprint!("{}", report.render());
        eprintln!("report written to {}", args.report.display());
        return Ok(());
    }

    let mut report = match (vocab_scope, &args.instances, &args.features) {
        (VocabScopeArg::Fold, Some(instances_path), None) => {
            let instances = read_instances(instances_path)?;
            let indicator = if args.no_indicator {
                false
            } else {
                file_config.indicator.unwrap_or(true)
            };
            let lexicon = match (indicator, &args.indicator_lexicon) {
                (true, Some(path)) => Some(IndicatorLexicon::from_file(path)?),
                (true, None) => {
                    return Err(Error::Config {
                        message: "--indicator-lexicon is required unless --no-indicator is set"
                            .into(),
                    })
                }
                (false, _) => None,
            };
            let modals = match &args.modal_list {
                Some(path) => ModalList::from_file(path)?,
                None => ModalList::default(),
            };
            let source = PerFoldExtraction {
                instances: &instances.instances,
                lexicon: lexicon.as_ref(),
                modals: &modals,
                options: AssembleOptions { indicator, lookup },
            };
            let labels = source.instances.iter().map(|i| i.label).collect::<Vec<_>>();
            let plan = if stratify {
                eval::stratified_folds(&labels, folds, seed)?
            } else {
                eval::plain_folds(labels.len(), folds, seed)?
            };
            eval::cross_validate(&source, &hp, &plan)?
        }
        (VocabScopeArg::Fold, _, _) => {
            return Err(Error::Config {
                message: "--vocab-scope fold re-extracts features per fold and needs --instances \
                          (not --features)"
                    .into(),
            })
        }
        (VocabScopeArg::Corpus, _, Some(features_path)) => {
            let ds: Dataset =
                dataset::import_from_path(features_path, Format::from_path(features_path)?)?;
            let plan = if stratify {
                eval::stratified_folds(&ds.labels(), folds, seed)?
            } else {
                eval::plain_folds(ds.len(), folds, seed)?
            };
            eval::cross_validate(&ds, &hp, &plan)?
        }
        (VocabScopeArg::Corpus, _, None) => {
            return Err(Error::Config {
                message: "--features is required (or --instances with --vocab-scope fold)".into(),
            })
        }
    };
    report.config = config_echo;
    let json = serde_json::to_string_pretty(&report).expect("report serialize");
    fs::write(&args.report, json).map_err(|e| Error::io(&args.report, e))?;
    eprint!("{}", report.render());
    eprintln!("report written to {}", args.report.display());
    Ok(())
}
