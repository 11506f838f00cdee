//! Deterministic tokenizer, punctuation counter and n-gram generator.
//!
//! Word tokens are maximal runs of non-whitespace, non-punctuation
//! characters. A hyphen or apostrophe between two alphanumeric characters
//! stays inside its token ("close-downs", "don't"); every other
//! punctuation mark acts as a separator and is never a token itself.

/// The punctuation inventory. `-` is special-cased: it does not count as
/// punctuation when it sits between two letters.
const PUNCT_CHARS: &[char] = &[
    '.', ',', ';', ':', '!', '?', '\'', '"', '(', ')', '[', ']', '{', '}', '-', '–', '—', '…', '‘',
    '’', '“', '”',
];

/// Characters that stay inside a token when flanked by alphanumerics.
const JOINERS: &[char] = &['-', '\'', '’'];

/// Word tokens of a text plus the punctuation tally of the same text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenList {
    pub tokens: Vec<String>,
    pub punctuation_count: usize,
}

impl TokenList {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens lowercased, as used for n-gram and keyword identity.
    pub fn lowercased(&self) -> Vec<String> {
        self.tokens.iter().map(|t| t.to_lowercase()).collect()
    }
}

fn is_punct(c: char) -> bool {
    PUNCT_CHARS.contains(&c)
}

/// Split a text into word tokens, preserving case.
///
/// Punctuation never appears in a token; a joiner character (`-`, `'`, `’`)
/// is kept when both neighbours are alphanumeric. The punctuation count of
/// the source text rides along in the result.
pub fn tokenize(text: &str) -> TokenList {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();

    for (i, &c) in chars.iter().enumerate() {
        let breaks = if c.is_whitespace() {
            true
        } else if is_punct(c) {
            !(JOINERS.contains(&c) && alnum_at(&chars, i, -1) && alnum_at(&chars, i, 1))
        } else {
            false
        };
        if breaks {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
        } else {
            current.push(c);
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }

    TokenList {
        tokens,
        punctuation_count: count_punctuation(text),
    }
}

fn alnum_at(chars: &[char], i: usize, offset: isize) -> bool {
    let j = i as isize + offset;
    j >= 0 && (j as usize) < chars.len() && chars[j as usize].is_alphanumeric()
}

fn letter_at(chars: &[char], i: usize, offset: isize) -> bool {
    let j = i as isize + offset;
    j >= 0 && (j as usize) < chars.len() && chars[j as usize].is_alphabetic()
}

/// Count punctuation characters in a text.
///
/// `-` counts only when it is not between two letters, so the hyphen in
/// "close-downs" is not punctuation while a free-standing dash is.
pub fn count_punctuation(text: &str) -> usize {
    let chars: Vec<char> = text.chars().collect();
    chars
        .iter()
        .enumerate()
        .filter(|&(i, &c)| {
            is_punct(c) && !(c == '-' && letter_at(&chars, i, -1) && letter_at(&chars, i, 1))
        })
        .count()
}

/// All consecutive `n`-token sequences, in order, one string per n-gram
/// with tokens lowercased and joined by a single space.
pub fn ngrams(tokens: &[String], n: usize) -> Vec<String> {
    assert!((1..=3).contains(&n), "n must be 1, 2 or 3");
    if tokens.len() < n {
        return Vec::new();
    }
    tokens
        .windows(n)
        .map(|w| {
            w.iter()
                .map(|t| t.to_lowercase())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Worked example: the claim's covering sentence has 16 tokens, the
    // leading "Hence," comma notwithstanding.
    #[test]
    fn sixteen_token_sentence() {
        let t = tokenize(
            "Hence, the print media has failed to keep its important role in the provision of information",
        );
        assert_eq!(t.len(), 16);
    }

    // Worked example: 21 tokens, "close-downs" counting as one.
    #[test]
    fn twenty_one_token_sentence_with_hyphenated_word() {
        let t = tokenize(
            "The number of people reading newspapers may continue falling sharply, possibly leading to the close-downs of many in the coming time",
        );
        assert_eq!(t.len(), 21);
        assert!(t.tokens.contains(&"close-downs".to_string()));
    }

    // Worked example: the premise that is its own covering sentence has 19 tokens.
    #[test]
    fn nineteen_token_sentence() {
        let t = tokenize(
            "The internet has been more and more popular for recent years, providing people with a huge source of information",
        );
        assert_eq!(t.len(), 19);
    }

    #[test]
    fn empty_and_whitespace_only() {
        assert_eq!(tokenize("").len(), 0);
        assert_eq!(tokenize("   \t\n ").len(), 0);
    }

    #[test]
    fn case_is_preserved() {
        let t = tokenize("The Internet");
        assert_eq!(t.tokens, vec!["The", "Internet"]);
    }

    #[test]
    fn apostrophes_inside_words_are_kept() {
        let t = tokenize("don't stop");
        assert_eq!(t.tokens, vec!["don't", "stop"]);
        // trailing possessive apostrophe is stripped
        let t = tokenize("Newspapers' production");
        assert_eq!(t.tokens, vec!["Newspapers", "production"]);
    }

    #[test]
    fn punctuation_is_never_a_token() {
        let t = tokenize("a - b — c ( d )");
        assert_eq!(t.tokens, vec!["a", "b", "c", "d"]);
    }

    #[test]
    fn internal_periods_split_tokens() {
        let t = tokenize("e.g. this");
        assert_eq!(t.tokens, vec!["e", "g", "this"]);
    }

    // Worked example: three commas in the long premise.
    #[test]
    fn three_commas_counted() {
        let n = count_punctuation(
            "Contrary to the past when people had to wait long hours to take a daily newspaper, nowadays, they can acquire latest news updated every second through their mobile phones or computers connected to the internet, everywhere and at anytime",
        );
        assert_eq!(n, 3);
    }

    #[test]
    fn zero_punctuation() {
        assert_eq!(count_punctuation("no punctuation here"), 0);
    }

    // "a, b; c." has exactly a comma, a semicolon and a period.
    #[test]
    fn mixed_punctuation_counted_by_inspection() {
        assert_eq!(count_punctuation("a, b; c."), 3);
    }

    #[test]
    fn hyphen_between_letters_is_not_punctuation() {
        assert_eq!(count_punctuation("close-downs"), 0);
        assert_eq!(count_punctuation("a - b"), 1);
        // digits are not letters, so the hyphen counts here
        assert_eq!(count_punctuation("16-year"), 1);
    }

    #[test]
    fn typographic_marks_count() {
        assert_eq!(count_punctuation("“quoted” … ‘text’"), 5);
    }

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn bigrams_of_three_tokens() {
        assert_eq!(ngrams(&toks(&["a", "b", "c"]), 2), vec!["a b", "b c"]);
    }

    #[test]
    fn ngram_shorter_than_n_is_empty() {
        assert!(ngrams(&toks(&["a"]), 3).is_empty());
    }

    #[test]
    fn trigram_count_of_sixteen_token_sentence() {
        let t = tokenize(
            "Hence, the print media has failed to keep its important role in the provision of information",
        );
        // len - n + 1
        assert_eq!(ngrams(&t.tokens, 3).len(), 14);
    }

    #[test]
    fn ngram_identity_is_lowercased() {
        assert_eq!(ngrams(&toks(&["The", "End"]), 2), vec!["the end"]);
    }
}
