//! Corpus ingestion: standoff annotation parsing, sentence segmentation
//! and construction of labeled classification instances.
//!
//! A corpus directory holds `<essay-id>.txt` (UTF-8 essay text) next to
//! `<essay-id>.ann` (standoff annotations referencing the text by character
//! offsets). Every annotated component becomes one instance labeled with
//! its component kind; every sentence without a component becomes one
//! instance labeled `None`.

pub mod segment;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use segment::Segmenter;

/// One essay: identifier plus raw text with original character offsets.
#[derive(Debug, Clone)]
pub struct Essay {
    pub id: String,
    pub text: String,
}

/// Kind of annotated argument component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentLabel {
    MajorClaim,
    Claim,
    Premise,
}

impl ComponentLabel {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "MajorClaim" => Some(ComponentLabel::MajorClaim),
            "Claim" => Some(ComponentLabel::Claim),
            "Premise" => Some(ComponentLabel::Premise),
            _ => None,
        }
    }
}

/// An annotated component span; offsets are character offsets into the
/// essay text, end exclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSpan {
    pub label: ComponentLabel,
    pub start: usize,
    pub end: usize,
    pub surface: String,
}

/// A sentence span; offsets are character offsets into the essay text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub start: usize,
    pub end: usize,
    pub text: String,
}

/// Class label of an instance. The numeric codes are the wire format used
/// in datasets and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum InstanceLabel {
    MajorClaim,
    Claim,
    Premise,
    None,
}

impl InstanceLabel {
    pub const ALL: [InstanceLabel; 4] = [
        InstanceLabel::MajorClaim,
        InstanceLabel::Claim,
        InstanceLabel::Premise,
        InstanceLabel::None,
    ];

    pub fn index(self) -> usize {
        match self {
            InstanceLabel::MajorClaim => 0,
            InstanceLabel::Claim => 1,
            InstanceLabel::Premise => 2,
            InstanceLabel::None => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        InstanceLabel::ALL.get(i).copied()
    }

    pub fn display_name(self) -> &'static str {
        match self {
            InstanceLabel::MajorClaim => "MajorClaim",
            InstanceLabel::Claim => "Claim",
            InstanceLabel::Premise => "Premise",
            InstanceLabel::None => "None",
        }
    }
}

impl fmt::Display for InstanceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_name())
    }
}

impl From<InstanceLabel> for u8 {
    fn from(l: InstanceLabel) -> u8 {
        l.index() as u8
    }
}

impl TryFrom<u8> for InstanceLabel {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        InstanceLabel::from_index(v as usize).ok_or_else(|| format!("invalid label {v}"))
    }
}

impl From<ComponentLabel> for InstanceLabel {
    fn from(l: ComponentLabel) -> Self {
        match l {
            ComponentLabel::MajorClaim => InstanceLabel::MajorClaim,
            ComponentLabel::Claim => InstanceLabel::Claim,
            ComponentLabel::Premise => InstanceLabel::Premise,
        }
    }
}

/// One classification unit: a component with its covering sentence, or a
/// sentence without any component (`label == None`, no component text).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub essay_id: String,
    pub label: InstanceLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component_text: Option<String>,
    pub covering_sentence: String,
}

/// Parse a standoff annotation file.
///
/// Component lines look like `T1\tMajorClaim 10 25\tsurface text`. Lines
/// with other prefixes (relations, attributes, notes) are skipped. The
/// returned spans are sorted by start offset.
pub fn parse_annotations(raw: &str) -> Result<Vec<ComponentSpan>> {
    let mut spans = Vec::new();
    for (idx, line) in raw.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if !line.starts_with('T') {
            log::debug!("annotation line {lineno}: skipping non-component line");
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Annotation {
                line: lineno,
                message: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let mid: Vec<&str> = fields[1].split_whitespace().collect();
        if mid.len() != 3 {
            return Err(Error::Annotation {
                line: lineno,
                message: format!("expected `<Type> <start> <end>`, found {:?}", fields[1]),
            });
        }
        let label = ComponentLabel::parse(mid[0]).ok_or_else(|| Error::Annotation {
            line: lineno,
            message: format!("unknown component type {:?}", mid[0]),
        })?;
        let start: usize = mid[1].parse().map_err(|_| Error::Annotation {
            line: lineno,
            message: format!("invalid start offset {:?}", mid[1]),
        })?;
        let end: usize = mid[2].parse().map_err(|_| Error::Annotation {
            line: lineno,
            message: format!("invalid end offset {:?}", mid[2]),
        })?;
        if start >= end {
            return Err(Error::Annotation {
                line: lineno,
                message: format!("empty or inverted span {start}..{end}"),
            });
        }
        spans.push(ComponentSpan {
            label,
            start,
            end,
            surface: fields[2].to_string(),
        });
    }
    spans.sort_by_key(|s| (s.start, s.end));
    Ok(spans)
}

/// Check spans against the essay text: offsets in bounds, surface text
/// matching, and no overlap between spans.
pub fn validate_spans(essay: &Essay, spans: &[ComponentSpan]) -> Result<()> {
    let chars: Vec<char> = essay.text.chars().collect();
    for span in spans {
        if span.end > chars.len() {
            return Err(Error::Span {
                essay: essay.id.clone(),
                message: format!(
                    "span {}..{} exceeds text length {}",
                    span.start,
                    span.end,
                    chars.len()
                ),
            });
        }
        let actual: String = chars[span.start..span.end].iter().collect();
        if actual != span.surface {
            return Err(Error::Span {
                essay: essay.id.clone(),
                message: format!(
                    "surface mismatch at {}..{}: annotation has {:?}, text has {:?}",
                    span.start, span.end, span.surface, actual
                ),
            });
        }
    }
    for pair in spans.windows(2) {
        if pair[1].start < pair[0].end {
            return Err(Error::Span {
                essay: essay.id.clone(),
                message: format!(
                    "overlapping spans {}..{} and {}..{}",
                    pair[0].start, pair[0].end, pair[1].start, pair[1].end
                ),
            });
        }
    }
    Ok(())
}

/// Build the instance list for one essay: an instance per component span
/// (covering sentence = the sentence containing the span's start) and a
/// `None` instance per sentence without any component span. Instances are
/// in document order.
pub fn build_instances(
    essay: &Essay,
    spans: &[ComponentSpan],
    segmenter: &Segmenter,
) -> Result<Vec<Instance>> {
    let sentences = segmenter.segment(&essay.text);
    let mut per_sentence: Vec<Vec<&ComponentSpan>> = vec![Vec::new(); sentences.len()];

    for span in spans {
        let si = sentences
            .iter()
            .position(|s| s.start <= span.start && span.start < s.end)
            .ok_or_else(|| Error::Span {
                essay: essay.id.clone(),
                message: format!(
                    "span starting at {} lies in no sentence (corrupt offsets)",
                    span.start
                ),
            })?;
        per_sentence[si].push(span);
    }

    let mut instances = Vec::new();
    for (si, sentence) in sentences.iter().enumerate() {
        if per_sentence[si].is_empty() {
            instances.push(Instance {
                essay_id: essay.id.clone(),
                label: InstanceLabel::None,
                component_text: None,
                covering_sentence: sentence.text.clone(),
            });
        } else {
            for span in &per_sentence[si] {
                instances.push(Instance {
                    essay_id: essay.id.clone(),
                    label: span.label.into(),
                    component_text: Some(span.surface.clone()),
                    covering_sentence: sentence.text.clone(),
                });
            }
        }
    }
    Ok(instances)
}

/// Parse, validate and build instances for one essay.
pub fn ingest_essay(
    essay: &Essay,
    annotations: &str,
    segmenter: &Segmenter,
) -> Result<Vec<Instance>> {
    let spans = parse_annotations(annotations)?;
    validate_spans(essay, &spans)?;
    build_instances(essay, &spans, segmenter)
}

/// Load every essay in a corpus directory (`<id>.txt` + `<id>.ann`).
///
/// Essays are processed in filename order so repeated runs yield the same
/// instance list. All per-file failures are gathered before reporting.
pub fn load_corpus(dir: &Path, segmenter: &Segmenter) -> Result<Vec<Instance>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut txt_paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().map(|x| x == "txt").unwrap_or(false))
        .collect();
    txt_paths.sort();
    if txt_paths.is_empty() {
        return Err(Error::NoEssays {
            dir: dir.to_path_buf(),
        });
    }

    let mut instances = Vec::new();
    let mut failures: Vec<(PathBuf, String)> = Vec::new();
    for txt in &txt_paths {
        let id = txt
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let ann = txt.with_extension("ann");
        let result = (|| -> Result<Vec<Instance>> {
            let text = fs::read_to_string(txt).map_err(|e| Error::io(txt, e))?;
            if text.trim().is_empty() {
                return Err(Error::Span {
                    essay: id.clone(),
                    message: "essay text is empty".into(),
                });
            }
            let raw_ann = fs::read_to_string(&ann).map_err(|e| Error::io(&ann, e))?;
            let essay = Essay {
                id: id.clone(),
                text,
            };
            ingest_essay(&essay, &raw_ann, segmenter)
        })();
        match result {
            Ok(list) => instances.extend(list),
            Err(e) => failures.push((txt.clone(), e.to_string())),
        }
    }
    if !failures.is_empty() {
        return Err(Error::CorpusLoad { failures });
    }
    Ok(instances)
}

/// Per-label instance counts, indexed by `InstanceLabel::index`.
pub fn label_counts(instances: &[Instance]) -> [usize; 4] {
    let mut counts = [0usize; 4];
    for inst in instances {
        counts[inst.label.index()] += 1;
    }
    counts
}
