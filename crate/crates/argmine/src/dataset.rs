//! Sparse labeled feature matrix with a canonical column order, plus
//! CSV/ARFF/JSON export and import.
//!
//! Column order is fixed: the 7 structural features, then unigram, bigram
//! and trigram booleans, the modal boolean, and (when indicator features
//! are enabled) the keyword occurrence count followed by the per-keyword
//! booleans. The class label is not a column; it rides on each row.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Instance, InstanceLabel};
use crate::error::{Error, Result};
#[cfg(test)]
use crate::features::VocabScope;
use crate::features::{self, IndicatorLexicon, LookupScope, ModalList, Vocabulary};

pub const STRUCTURAL_COLUMNS: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnFamily {
    Structural,
    Unigram,
    Bigram,
    Trigram,
    Modal,
    IndicatorCount,
    IndicatorKeyword,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnType {
    Count,
    Boolean,
    Real,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub family: ColumnFamily,
    #[serde(rename = "type")]
    pub ty: ColumnType,
}

/// Ordered column descriptors of a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub columns: Vec<Column>,
}

/// Number of columns per family, in canonical family order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyCounts {
    pub structural: usize,
    pub unigram: usize,
    pub bigram: usize,
    pub trigram: usize,
    pub modal: usize,
    pub indicator_count: usize,
    pub indicator_keyword: usize,
}

impl FamilyCounts {
    pub fn total(&self) -> usize {
        self.structural
            + self.unigram
            + self.bigram
            + self.trigram
            + self.modal
            + self.indicator_count
            + self.indicator_keyword
    }
}

const STRUCTURAL_TYPES: [ColumnType; STRUCTURAL_COLUMNS] = [
    ColumnType::Count,   // covering-sentence tokens
    ColumnType::Boolean, // component spans the whole sentence
    ColumnType::Count,   // component tokens
    ColumnType::Count,   // surrounding tokens
    ColumnType::Count,   // punctuation marks
    ColumnType::Real,    // component/covering token ratio
    ColumnType::Boolean, // sentence ends with a question mark
];

impl Schema {
    /// Build the canonical schema for the given family sizes.
    /// `indicator_keywords == None` disables the two indicator families.
    pub fn canonical(
        unigrams: usize,
        bigrams: usize,
        trigrams: usize,
        indicator_keywords: Option<usize>,
    ) -> Schema {
        let mut columns = Vec::new();
        let mut push = |family: ColumnFamily, ty: ColumnType, n: &mut usize| {
            columns.push(Column {
                name: format!("f{n}"),
                family,
                ty,
            });
            *n += 1;
        };
        let mut i = 0usize;
        for ty in STRUCTURAL_TYPES {
            push(ColumnFamily::Structural, ty, &mut i);
        }
        for _ in 0..unigrams {
            push(ColumnFamily::Unigram, ColumnType::Boolean, &mut i);
        }
        for _ in 0..bigrams {
            push(ColumnFamily::Bigram, ColumnType::Boolean, &mut i);
        }
        for _ in 0..trigrams {
            push(ColumnFamily::Trigram, ColumnType::Boolean, &mut i);
        }
        push(ColumnFamily::Modal, ColumnType::Boolean, &mut i);
        if let Some(keywords) = indicator_keywords {
            push(ColumnFamily::IndicatorCount, ColumnType::Count, &mut i);
            for _ in 0..keywords {
                push(ColumnFamily::IndicatorKeyword, ColumnType::Boolean, &mut i);
            }
        }
        Schema { columns }
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn family_counts(&self) -> FamilyCounts {
        let count = |f: ColumnFamily| self.columns.iter().filter(|c| c.family == f).count();
        FamilyCounts {
            structural: count(ColumnFamily::Structural),
            unigram: count(ColumnFamily::Unigram),
            bigram: count(ColumnFamily::Bigram),
            trigram: count(ColumnFamily::Trigram),
            modal: count(ColumnFamily::Modal),
            indicator_count: count(ColumnFamily::IndicatorCount),
            indicator_keyword: count(ColumnFamily::IndicatorKeyword),
        }
    }

    fn from_family_counts(fc: FamilyCounts) -> Result<Schema> {
        if fc.structural != STRUCTURAL_COLUMNS || fc.modal != 1 {
            return Err(Error::Schema {
                message: format!(
                    "expected structural={STRUCTURAL_COLUMNS} and modal=1, found structural={} modal={}",
                    fc.structural, fc.modal
                ),
            });
        }
        let indicator = match (fc.indicator_count, fc.indicator_keyword) {
            (0, 0) => None,
            (1, k) => Some(k),
            _ => {
                return Err(Error::Schema {
                    message: format!("invalid indicator_count={}", fc.indicator_count),
                })
            }
        };
        Ok(Schema::canonical(
            fc.unigram, fc.bigram, fc.trigram, indicator,
        ))
    }
}

/// One sparse row: strictly increasing column indices with nonzero values,
/// plus the class label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub entries: Vec<(u32, f64)>,
    pub label: InstanceLabel,
}

impl FeatureVector {
    /// Normalizes: drops zero entries and sorts by column index.
    pub fn new(mut entries: Vec<(u32, f64)>, label: InstanceLabel) -> Self {
        entries.retain(|&(_, v)| v != 0.0);
        entries.sort_by_key(|&(i, _)| i);
        FeatureVector { entries, label }
    }

    pub fn get(&self, index: u32) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0.0)
    }

    pub fn dense(&self, dim: usize) -> Vec<f64> {
        let mut row = vec![0.0; dim];
        for &(i, v) in &self.entries {
            row[i as usize] = v;
        }
        row
    }

    pub fn max_index(&self) -> Option<u32> {
        self.entries.last().map(|&(i, _)| i)
    }
}

/// The assembled labeled matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub schema: Schema,
    pub rows: Vec<FeatureVector>,
    pub class_counts: [usize; 4],
}

impl Dataset {
    pub fn new(schema: Schema, rows: Vec<FeatureVector>) -> Self {
        let mut class_counts = [0usize; 4];
        for row in &rows {
            class_counts[row.label.index()] += 1;
        }
        Dataset {
            schema,
            rows,
            class_counts,
        }
    }

    pub fn dim(&self) -> usize {
        self.schema.dim()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn labels(&self) -> Vec<InstanceLabel> {
        self.rows.iter().map(|r| r.label).collect()
    }

    /// The rows at `indices`, as a new dataset sharing this schema.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let rows = indices.iter().map(|&i| self.rows[i].clone()).collect();
        Dataset::new(self.schema.clone(), rows)
    }

    /// Internal consistency: indices in bounds and strictly increasing,
    /// values finite and nonzero, class counts matching the rows.
    pub fn validate(&self) -> Result<()> {
        let dim = self.dim() as u32;
        for (ri, row) in self.rows.iter().enumerate() {
            let mut prev: Option<u32> = None;
            for &(i, v) in &row.entries {
                if i >= dim {
                    return Err(Error::Schema {
                        message: format!("row {ri}: column index {i} exceeds dimensionality {dim}"),
                    });
                }
                if prev.map(|p| i <= p).unwrap_or(false) {
                    return Err(Error::Schema {
                        message: format!("row {ri}: column indices not strictly increasing"),
                    });
                }
                if !v.is_finite() || v == 0.0 {
                    return Err(Error::Schema {
                        message: format!("row {ri}: column {i} holds invalid value {v}"),
                    });
                }
                prev = Some(i);
            }
        }
        let mut counts = [0usize; 4];
        for row in &self.rows {
            counts[row.label.index()] += 1;
        }
        if counts != self.class_counts {
            return Err(Error::Schema {
                message: format!(
                    "class counts {:?} disagree with rows {:?}",
                    self.class_counts, counts
                ),
            });
        }
        Ok(())
    }
}

/// Assembly switches.
#[derive(Debug, Clone, Copy)]
pub struct AssembleOptions {
    pub indicator: bool,
    pub lookup: LookupScope,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions {
            indicator: true,
            lookup: LookupScope::Sentence,
        }
    }
}

/// Extract features for every instance and lay them out in the canonical
/// column order.
pub fn assemble(
    instances: &[Instance],
    vocab: &Vocabulary,
    lexicon: Option<&IndicatorLexicon>,
    modals: &ModalList,
    options: AssembleOptions,
) -> Result<Dataset> {
    let lexicon = if options.indicator {
        Some(lexicon.ok_or_else(|| Error::Config {
            message: "indicator features enabled but no lexicon provided".into(),
        })?)
    } else {
        None
    };

    let (u, b, t) = (
        vocab.unigrams.len(),
        vocab.bigrams.len(),
        vocab.trigrams.len(),
    );
    let schema = Schema::canonical(u, b, t, lexicon.map(|l| l.len()));

    let unigram_base = STRUCTURAL_COLUMNS as u32;
    let bigram_base = unigram_base + u as u32;
    let trigram_base = bigram_base + b as u32;
    let modal_col = trigram_base + t as u32;
    let count_col = modal_col + 1;
    let keyword_base = count_col + 1;

    let mut rows = Vec::with_capacity(instances.len());
    for inst in instances {
        let s = features::structural_features(inst);
        let mut entries: Vec<(u32, f64)> = vec![
            (0, s.covering_tokens as f64),
            (1, s.fully_contained as u8 as f64),
            (2, s.component_tokens as f64),
            (3, s.surrounding_tokens as f64),
            (4, s.punctuation as f64),
            (5, s.token_ratio),
            (6, s.ends_question as u8 as f64),
        ];

        let lex = features::lexical_features(inst, vocab, options.lookup, modals);
        entries.extend(lex.unigram_hits.iter().map(|&i| (unigram_base + i, 1.0)));
        entries.extend(lex.bigram_hits.iter().map(|&i| (bigram_base + i, 1.0)));
        entries.extend(lex.trigram_hits.iter().map(|&i| (trigram_base + i, 1.0)));
        if lex.modal {
            entries.push((modal_col, 1.0));
        }

        if let Some(lexicon) = lexicon {
            let ind = features::indicator_features(inst, lexicon, options.lookup);
            if ind.count > 0 {
                entries.push((count_col, ind.count as f64));
            }
            entries.extend(ind.keyword_hits.iter().map(|&i| (keyword_base + i, 1.0)));
        }

        rows.push(FeatureVector::new(entries, inst.label));
    }
    Ok(Dataset::new(schema, rows))
}

/// Dataset file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Arff,
    Json,
}

impl Format {
    pub fn from_path(path: &Path) -> Result<Format> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Ok(Format::Csv),
            Some("arff") => Ok(Format::Arff),
            Some("json") => Ok(Format::Json),
            other => Err(Error::Config {
                message: format!(
                    "cannot infer dataset format from extension {:?} of {}",
                    other.unwrap_or(""),
                    path.display()
                ),
            }),
        }
    }
}

/// Integers print bare; other reals use the shortest representation that
/// parses back to the same value, so exports re-import losslessly.
fn format_value(v: f64) -> String {
    if v == v.trunc() && v.abs() < 9.0e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

fn families_line(schema: &Schema) -> String {
    let fc = schema.family_counts();
    format!(
        "families: structural={} unigram={} bigram={} trigram={} modal={} indicator_count={} indicator_keyword={}",
        fc.structural, fc.unigram, fc.bigram, fc.trigram, fc.modal, fc.indicator_count, fc.indicator_keyword
    )
}

fn parse_families_line(line: &str, lineno: usize) -> Result<Schema> {
    let body = line.trim();
    let mut parts = body.split_whitespace();
    if parts.next() != Some("families:") {
        return Err(Error::Import {
            line: lineno,
            message: "expected a `families:` schema annotation".into(),
        });
    }
    let mut get = |key: &str| -> Result<usize> {
        let part = parts.next().unwrap_or("");
        let (k, v) = part.split_once('=').unwrap_or((part, ""));
        if k != key {
            return Err(Error::Import {
                line: lineno,
                message: format!("expected `{key}=<n>`, found {part:?}"),
            });
        }
        v.parse().map_err(|_| Error::Import {
            line: lineno,
            message: format!("invalid count in {part:?}"),
        })
    };
    let fc = FamilyCounts {
        structural: get("structural")?,
        unigram: get("unigram")?,
        bigram: get("bigram")?,
        trigram: get("trigram")?,
        modal: get("modal")?,
        indicator_count: get("indicator_count")?,
        indicator_keyword: get("indicator_keyword")?,
    };
    Schema::from_family_counts(fc)
}

fn render_data_row(row: &FeatureVector, dim: usize) -> String {
    let mut fields = vec![String::from("0"); dim + 1];
    for &(i, v) in &row.entries {
        fields[i as usize] = format_value(v);
    }
    fields[dim] = u8::from(row.label).to_string();
    fields.join(",")
}

fn parse_data_row(line: &str, lineno: usize, dim: usize) -> Result<FeatureVector> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != dim + 1 {
        return Err(Error::Import {
            line: lineno,
            message: format!("expected {} fields, found {}", dim + 1, fields.len()),
        });
    }
    let mut entries = Vec::new();
    for (i, field) in fields[..dim].iter().enumerate() {
        let v: f64 = field.trim().parse().map_err(|_| Error::Import {
            line: lineno,
            message: format!("invalid numeric value {field:?} in column {i}"),
        })?;
        if !v.is_finite() {
            return Err(Error::Import {
                line: lineno,
                message: format!("non-finite value in column {i}"),
            });
        }
        if v != 0.0 {
            entries.push((i as u32, v));
        }
    }
    let label_field = fields[dim].trim();
    let code: u8 = label_field.parse().map_err(|_| Error::Import {
        line: lineno,
        message: format!("invalid class label {label_field:?}"),
    })?;
    let label = InstanceLabel::try_from(code).map_err(|e| Error::Import {
        line: lineno,
        message: e,
    })?;
    Ok(FeatureVector::new(entries, label))
}

/// Serialize a dataset in the given format.
pub fn export(dataset: &Dataset, format: Format) -> Result<String> {
    match format {
        Format::Csv => Ok(export_csv(dataset)),
        Format::Arff => Ok(export_arff(dataset)),
        Format::Json => serde_json::to_string_pretty(dataset).map_err(|e| Error::Schema {
            message: format!("serializing dataset: {e}"),
        }),
    }
}

pub fn export_to_path(dataset: &Dataset, format: Format, path: &Path) -> Result<()> {
    let data = export(dataset, format)?;
    fs::write(path, data).map_err(|e| Error::io(path, e))
}

fn export_csv(dataset: &Dataset) -> String {
    let dim = dataset.dim();
    let mut out = String::new();
    let _ = writeln!(out, "# {}", families_line(&dataset.schema));
    let header: Vec<String> = (0..dim).map(|i| format!("f{i}")).collect();
    let _ = writeln!(out, "{},label", header.join(","));
    for row in &dataset.rows {
        let _ = writeln!(out, "{}", render_data_row(row, dim));
    }
    out
}

fn export_arff(dataset: &Dataset) -> String {
    let dim = dataset.dim();
    let mut out = String::new();
    let _ = writeln!(out, "% {}", families_line(&dataset.schema));
    let _ = writeln!(out, "@relation argmine");
    let _ = writeln!(out);
    for i in 0..dim {
        let _ = writeln!(out, "@attribute f{i} numeric");
    }
    let _ = writeln!(out, "@attribute class {{0,1,2,3}}");
    let _ = writeln!(out);
    let _ = writeln!(out, "@data");
    for row in &dataset.rows {
        let _ = writeln!(out, "{}", render_data_row(row, dim));
    }
    out
}

/// Parse a dataset from a string in the given format.
pub fn import(data: &str, format: Format) -> Result<Dataset> {
    let dataset = match format {
        Format::Csv => import_csv(data)?,
        Format::Arff => import_arff(data)?,
        Format::Json => {
            let ds: Dataset = serde_json::from_str(data).map_err(|e| Error::Import {
                line: e.line(),
                message: e.to_string(),
            })?;
            ds
        }
    };
    dataset.validate()?;
    Ok(dataset)
}

pub fn import_from_path(path: &Path, format: Format) -> Result<Dataset> {
    let data = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    import(&data, format)
}

fn import_csv(data: &str) -> Result<Dataset> {
    let mut lines = data.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (lineno, first) = lines.next().ok_or(Error::Import {
        line: 1,
        message: "empty file".into(),
    })?;
    let schema = parse_families_line(
        first.strip_prefix('#').ok_or(Error::Import {
            line: lineno,
            message: "expected `# families: ...` annotation line".into(),
        })?,
        lineno,
    )?;
    let dim = schema.dim();

    let (lineno, header) = lines.next().ok_or(Error::Import {
        line: 2,
        message: "missing header row".into(),
    })?;
    let expected: Vec<String> = (0..dim).map(|i| format!("f{i}")).collect();
    let expected = format!("{},label", expected.join(","));
    if header.trim() != expected {
        return Err(Error::Import {
            line: lineno,
            message: format!("header does not match the {dim}-column schema"),
        });
    }

    let mut rows = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        rows.push(parse_data_row(line, lineno, dim)?);
    }
    Ok(Dataset::new(schema, rows))
}

fn import_arff(data: &str) -> Result<Dataset> {
    let mut schema: Option<Schema> = None;
    let mut attributes = 0usize;
    let mut saw_class = false;
    let mut in_data = false;
    let mut rows = Vec::new();

    for (idx, line) in data.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('%') {
            if schema.is_none() && comment.trim().starts_with("families:") {
                schema = Some(parse_families_line(comment, lineno)?);
            }
            continue;
        }
        if in_data {
            let dim = schema.as_ref().map(|s| s.dim()).unwrap_or(0);
            rows.push(parse_data_row(trimmed, lineno, dim)?);
            continue;
        }
        let lower = trimmed.to_lowercase();
        if lower.starts_with("@relation") {
            continue;
        }
        if lower.starts_with("@attribute") {
            if lower.contains("class") && trimmed.contains('{') {
                let set = trimmed
                    .split_once('{')
                    .map(|(_, rest)| rest.trim_end_matches('}').replace(' ', ""))
                    .unwrap_or_default();
                if set != "0,1,2,3" {
                    return Err(Error::Import {
                        line: lineno,
                        message: format!(
                            "class attribute must be nominal {{0,1,2,3}}, found {{{set}}}"
                        ),
                    });
                }
                saw_class = true;
            } else {
                attributes += 1;
            }
            continue;
        }
        if lower.starts_with("@data") {
            let schema_ref = schema.as_ref().ok_or(Error::Import {
                line: lineno,
                message: "missing `% families: ...` schema annotation".into(),
            })?;
            if !saw_class {
                return Err(Error::Import {
                    line: lineno,
                    message: "missing nominal class attribute".into(),
                });
            }
            if attributes != schema_ref.dim() {
                return Err(Error::Import {
                    line: lineno,
                    message: format!(
                        "{} numeric attributes declared but schema annotation has {}",
                        attributes,
                        schema_ref.dim()
                    ),
                });
            }
            in_data = true;
            continue;
        }
        return Err(Error::Import {
            line: lineno,
            message: format!("unexpected content {trimmed:?}"),
        });
    }

    let schema = schema.ok_or(Error::Import {
        line: 1,
        message: "missing `% families: ...` schema annotation".into(),
    })?;
    if !in_data {
        return Err(Error::Import {
            line: 1,
            message: "missing @data section".into(),
        });
    }
    Ok(Dataset::new(schema, rows))
}
