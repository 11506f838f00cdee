//! Feature extraction: structural counts per instance, n-gram vocabulary
//! booleans with a modal flag, and indicator features from a discourse
//! marker keyword lexicon.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Instance, InstanceLabel};
use crate::error::{Error, Result};
use crate::text::{self, tokenize};

/// Which text of an instance lexical and indicator lookups run against:
/// the whole covering sentence, or the component text when present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LookupScope {
    Sentence,
    Component,
}

/// The text of `inst` that n-gram and keyword lookups see under `scope`.
/// `None` instances always expose their full sentence.
pub fn lookup_text(inst: &Instance, scope: LookupScope) -> &str {
    match scope {
        LookupScope::Sentence => &inst.covering_sentence,
        LookupScope::Component => inst
            .component_text
            .as_deref()
            .unwrap_or(&inst.covering_sentence),
    }
}

/// The seven structural features of an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralFeatures {
    /// Token count of the covering sentence.
    pub covering_tokens: usize,
    /// Whether the component spans the entire covering sentence.
    pub fully_contained: bool,
    /// Token count of the component (0 for `None` instances).
    pub component_tokens: usize,
    /// Tokens of the covering sentence outside the component; for `None`
    /// instances, the whole sentence's token count.
    pub surrounding_tokens: usize,
    /// Punctuation marks in the covering sentence.
    pub punctuation: usize,
    /// component_tokens / covering_tokens, 0 for `None` instances.
    pub token_ratio: f64,
    /// Whether the covering sentence ends with a question mark.
    pub ends_question: bool,
}

pub fn structural_features(inst: &Instance) -> StructuralFeatures {
    let covering = tokenize(&inst.covering_sentence);
    let covering_tokens = covering.len();
    let punctuation = covering.punctuation_count;
    let ends_question = inst.covering_sentence.trim_end().ends_with('?');

    match &inst.component_text {
        Some(component) => {
            let component_tokens = tokenize(component).len();
            let token_ratio = if covering_tokens > 0 {
                component_tokens as f64 / covering_tokens as f64
            } else {
                0.0
            };
            StructuralFeatures {
                covering_tokens,
                fully_contained: component_tokens == covering_tokens,
                component_tokens,
                surrounding_tokens: covering_tokens.saturating_sub(component_tokens),
                punctuation,
                token_ratio,
                ends_question,
            }
        }
        None => StructuralFeatures {
            covering_tokens,
            fully_contained: false,
            component_tokens: 0,
            surrounding_tokens: covering_tokens,
            punctuation,
            token_ratio: 0.0,
            ends_question,
        },
    }
}

/// Where a vocabulary's n-grams were collected from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VocabScope {
    /// All instances of the corpus; the default.
    FullCorpus,
    /// Only the training rows of the current fold.
    TrainFoldOnly,
}

/// Ordered unigram/bigram/trigram inventories with stable indices
/// (first-occurrence order over the instance list).
#[derive(Debug, Clone)]
pub struct Vocabulary {
    pub unigrams: Vec<String>,
    pub bigrams: Vec<String>,
    pub trigrams: Vec<String>,
    pub source_scope: VocabScope,
    unigram_index: HashMap<String, u32>,
    bigram_index: HashMap<String, u32>,
    trigram_index: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn build(instances: &[Instance], scope: VocabScope, lookup: LookupScope) -> Self {
        let mut vocab = Vocabulary {
            unigrams: Vec::new(),
            bigrams: Vec::new(),
            trigrams: Vec::new(),
            source_scope: scope,
            unigram_index: HashMap::new(),
            bigram_index: HashMap::new(),
            trigram_index: HashMap::new(),
        };
        for inst in instances {
            let tokens = tokenize(lookup_text(inst, lookup)).tokens;
            for n in 1..=3 {
                for gram in text::ngrams(&tokens, n) {
                    let (list, index) = vocab.layer_mut(n);
                    if !index.contains_key(&gram) {
                        index.insert(gram.clone(), list.len() as u32);
                        list.push(gram);
                    }
                }
            }
        }
        vocab
    }

    fn layer_mut(&mut self, n: usize) -> (&mut Vec<String>, &mut HashMap<String, u32>) {
        match n {
            1 => (&mut self.unigrams, &mut self.unigram_index),
            2 => (&mut self.bigrams, &mut self.bigram_index),
            _ => (&mut self.trigrams, &mut self.trigram_index),
        }
    }

    fn layer(&self, n: usize) -> &HashMap<String, u32> {
        match n {
            1 => &self.unigram_index,
            2 => &self.bigram_index,
            _ => &self.trigram_index,
        }
    }

    /// Total number of n-gram boolean columns.
    pub fn len(&self) -> usize {
        self.unigrams.len() + self.bigrams.len() + self.trigrams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Modal verbs checked for the modal boolean feature.
pub const DEFAULT_MODALS: &[&str] = &[
    "can", "could", "may", "might", "must", "shall", "should", "will", "would", "ought",
];

/// The modal verb list; token match is case-insensitive.
#[derive(Debug, Clone)]
pub struct ModalList {
    words: HashSet<String>,
}

impl Default for ModalList {
    fn default() -> Self {
        ModalList {
            words: DEFAULT_MODALS.iter().map(|w| w.to_string()).collect(),
        }
    }
}

impl ModalList {
    /// One word per line, `#` comments and blank lines skipped.
    pub fn from_lines(lines: &str) -> Self {
        ModalList {
            words: lines
                .lines()
                .map(|l| l.trim())
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(|l| l.to_lowercase())
                .collect(),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::from_lines(&raw))
    }

    pub fn contains(&self, token_lower: &str) -> bool {
        self.words.contains(token_lower)
    }
}

/// N-gram presence indices into a [`Vocabulary`] plus the modal flag.
/// Index lists are sorted; each index set means the corresponding boolean
/// feature is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexicalFeatures {
    pub unigram_hits: Vec<u32>,
    pub bigram_hits: Vec<u32>,
    pub trigram_hits: Vec<u32>,
    pub modal: bool,
}

pub fn lexical_features(
    inst: &Instance,
    vocab: &Vocabulary,
    lookup: LookupScope,
    modals: &ModalList,
) -> LexicalFeatures {
    let tokens = tokenize(lookup_text(inst, lookup)).tokens;
    let hits = |n: usize| -> Vec<u32> {
        let index = vocab.layer(n);
        let set: BTreeSet<u32> = text::ngrams(&tokens, n)
            .into_iter()
            .filter_map(|g| index.get(&g).copied())
            .collect();
        set.into_iter().collect()
    };
    let modal = tokens.iter().any(|t| modals.contains(&t.to_lowercase()));
    LexicalFeatures {
        unigram_hits: hits(1),
        bigram_hits: hits(2),
        trigram_hits: hits(3),
        modal,
    }
}

/// A discourse marker keyword phrase, pre-tokenized for matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phrase {
    pub text: String,
    tokens: Vec<String>,
}

/// Ordered keyword lexicon; order and indices follow the source file.
#[derive(Debug, Clone)]
pub struct IndicatorLexicon {
    phrases: Vec<Phrase>,
}

impl IndicatorLexicon {
    /// One lowercase phrase per line, `#` comments and blank lines skipped.
    /// Duplicate phrases are rejected.
    pub fn from_lines(lines: &str) -> Result<Self> {
        let mut phrases = Vec::new();
        let mut seen = HashSet::new();
        for (idx, line) in lines.lines().enumerate() {
            let lineno = idx + 1;
            let entry = line.trim();
            if entry.is_empty() || entry.starts_with('#') {
                continue;
            }
            let text = entry.to_lowercase();
            let tokens = tokenize(&text).tokens;
            if tokens.is_empty() {
                return Err(Error::Lexicon {
                    line: lineno,
                    message: format!("phrase {entry:?} contains no word tokens"),
                });
            }
            if !seen.insert(text.clone()) {
                return Err(Error::Lexicon {
                    line: lineno,
                    message: format!("duplicate phrase {entry:?}"),
                });
            }
            phrases.push(Phrase { text, tokens });
        }
        Ok(IndicatorLexicon { phrases })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_lines(&raw)
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    pub fn phrases(&self) -> &[Phrase] {
        &self.phrases
    }
}

/// Indicator features: total keyword occurrences plus the indices of the
/// keywords that occur at least once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatorFeatures {
    pub count: usize,
    pub keyword_hits: Vec<u32>,
}

pub fn indicator_features(
    inst: &Instance,
    lexicon: &IndicatorLexicon,
    lookup: LookupScope,
) -> IndicatorFeatures {
    let tokens = tokenize(lookup_text(inst, lookup)).lowercased();
    let mut count = 0;
    let mut keyword_hits = Vec::new();
    for (idx, phrase) in lexicon.phrases.iter().enumerate() {
        let occurrences = count_phrase(&tokens, &phrase.tokens);
        if occurrences > 0 {
            count += occurrences;
            keyword_hits.push(idx as u32);
        }
    }
    IndicatorFeatures {
        count,
        keyword_hits,
    }
}

/// Non-overlapping occurrences of `phrase` in `tokens`, scanned greedily
/// left to right. Both sides must already be lowercased.
fn count_phrase(tokens: &[String], phrase: &[String]) -> usize {
    let m = phrase.len();
    if m == 0 || tokens.len() < m {
        return 0;
    }
    let mut count = 0;
    let mut i = 0;
    while i + m <= tokens.len() {
        if tokens[i..i + m] == *phrase {
            count += 1;
            i += m;
        } else {
            i += 1;
        }
    }
    count
}

/// Per-label counts of a label sequence, for stats and stratification.
pub fn class_counts(labels: &[InstanceLabel]) -> [usize; 4] {
    let mut counts = [0usize; 4];
    for l in labels {
        counts[l.index()] += 1;
    }
    counts
}
