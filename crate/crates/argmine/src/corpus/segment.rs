//! Rule-based sentence boundary detection.
//!
//! A sentence ends after `.`, `!` or `?` when the terminator is followed by
//! whitespace and the next non-whitespace character is uppercase (or the
//! text ends). A period is suppressed as a boundary when the word it closes
//! is a known abbreviation. Line breaks always end a sentence, so headings
//! without a terminator do not merge into the following paragraph.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use crate::corpus::Sentence;
use crate::error::{Error, Result};

/// Abbreviations that keep a trailing period from ending a sentence.
const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "e.g.", "i.e.", "etc.", "cf.", "vs.", "mr.", "mrs.", "ms.", "dr.", "prof.", "st.", "jr.",
    "sr.", "no.", "fig.", "inc.", "ltd.", "co.", "u.s.", "u.k.", "a.m.", "p.m.", "ph.d.",
];

/// Sentence segmenter with a configurable abbreviation guard list.
#[derive(Debug, Clone)]
pub struct Segmenter {
    abbreviations: HashSet<String>,
}

impl Default for Segmenter {
    fn default() -> Self {
        Segmenter {
            abbreviations: DEFAULT_ABBREVIATIONS
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

impl Segmenter {
    /// Build a segmenter from an abbreviation list, one entry per line.
    /// Entries are lowercased; a trailing period is added when missing.
    /// `#` starts a comment, blank lines are skipped.
    pub fn from_lines(lines: &str) -> Self {
        let abbreviations = lines
            .lines()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                let mut a = l.to_lowercase();
                if !a.ends_with('.') {
                    a.push('.');
                }
                a
            })
            .collect();
        Segmenter { abbreviations }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::from_lines(&raw))
    }

    /// Split `text` into sentences. Offsets are character offsets into
    /// `text`; each sentence is trimmed of surrounding whitespace, so the
    /// original text is the sentences joined by whitespace-only gaps.
    pub fn segment(&self, text: &str) -> Vec<Sentence> {
        let chars: Vec<char> = text.chars().collect();
        let n = chars.len();

        let mut boundaries: Vec<usize> = Vec::new();
        for (i, &c) in chars.iter().enumerate() {
            if c == '\n' {
                boundaries.push(i);
                continue;
            }
            if c != '.' && c != '!' && c != '?' {
                continue;
            }
            if i + 1 < n && !chars[i + 1].is_whitespace() {
                continue;
            }
            let mut j = i + 1;
            while j < n && chars[j].is_whitespace() {
                j += 1;
            }
            if j < n && !chars[j].is_uppercase() {
                continue;
            }
            if c == '.' && self.closes_abbreviation(&chars, i) {
                continue;
            }
            boundaries.push(i + 1);
        }
        boundaries.push(n);

        let mut sentences = Vec::new();
        let mut start = 0usize;
        for b in boundaries {
            if b > start {
                let (mut s, mut e) = (start, b);
                while s < e && chars[s].is_whitespace() {
                    s += 1;
                }
                while e > s && chars[e - 1].is_whitespace() {
                    e -= 1;
                }
                if s < e {
                    sentences.push(Sentence {
                        start: s,
                        end: e,
                        text: chars[s..e].iter().collect(),
                    });
                }
                start = b;
            }
        }
        sentences
    }

    /// The word ending at `dot_idx` (inclusive), lowercased and with leading
    /// punctuation stripped, is checked against the guard list.
    fn closes_abbreviation(&self, chars: &[char], dot_idx: usize) -> bool {
        let mut w = dot_idx;
        while w > 0 && !chars[w - 1].is_whitespace() {
            w -= 1;
        }
        let word: String = chars[w..=dot_idx].iter().collect::<String>().to_lowercase();
        let word = word.trim_start_matches(|c: char| !c.is_alphanumeric());
        self.abbreviations.contains(word)
    }
}
