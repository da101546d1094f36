//! Description preprocessing: word tokenization, stop-word removal and
//! truncation to a fixed model input length.

use std::collections::HashSet;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Default input length: 130 content tokens plus two special-token slots.
pub const DEFAULT_MAX_TOKENS: usize = 132;
/// Longer input length covering nearly all descriptions: 256 + 2.
pub const EXTENDED_MAX_TOKENS: usize = 258;
/// Slots reserved for sequence start/end markers.
pub const SPECIAL_TOKEN_SLOTS: usize = 2;

const ENGLISH_V1: &str = include_str!("../data/stopwords-en-v1.txt");

/// A fixed stop-word list. Lines starting with `#` in the source file are
/// comments; the first comment line is kept as the version string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopWords {
    version: String,
    words: HashSet<String>,
}

impl StopWords {
    /// The list shipped with this crate.
    pub fn english_v1() -> Self {
        Self::parse(ENGLISH_V1)
    }

    pub fn load(path: impl AsRef<Path>) -> io::Result<Self> {
        Ok(Self::parse(&fs::read_to_string(path)?))
    }

    pub fn parse(text: &str) -> Self {
        let mut version = None;
        let mut words = HashSet::new();
        for line in text.lines().map(str::trim) {
            if let Some(comment) = line.strip_prefix('#') {
                version.get_or_insert_with(|| comment.trim().to_string());
            } else if !line.is_empty() {
                words.insert(line.to_lowercase());
            }
        }
        Self { version: version.unwrap_or_else(|| "unversioned".into()), words }
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self {
            version: "custom".into(),
            words: words.into_iter().map(|w| w.as_ref().to_lowercase()).collect(),
        }
    }

    pub fn with_version<I, S>(version: impl Into<String>, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self { version: version.into(), ..Self::from_words(words) }
    }

    pub fn empty() -> Self {
        Self::from_words(std::iter::empty::<&str>())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Words in sorted order.
    pub fn sorted(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.words.iter().map(String::as_str).collect();
        v.sort_unstable();
        v
    }
}

/// Lowercase word tokens; any character that is not alphanumeric separates
/// tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSeq {
    pub tokens: Vec<String>,
    pub truncated: bool,
    /// Content tokens before truncation.
    pub original_length: usize,
}

impl TokenSeq {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum TextError {
    #[error("description has no content tokens after preprocessing")]
    EmptyAfterPreprocess,
    #[error("max_tokens {0} leaves no room for content after {SPECIAL_TOKEN_SLOTS} special slots")]
    MaxTokensTooSmall(usize),
}

/// Tokenizes, drops stop words and keeps at most `max_tokens - 2` content tokens.
pub fn preprocess(description: &str, max_tokens: usize, stop_words: &StopWords) -> Result<TokenSeq, TextError> {
    let capacity = max_tokens
        .checked_sub(SPECIAL_TOKEN_SLOTS)
        .filter(|c| *c > 0)
        .ok_or(TextError::MaxTokensTooSmall(max_tokens))?;
    let mut tokens: Vec<String> = tokenize(description).into_iter().filter(|t| !stop_words.contains(t)).collect();
    if tokens.is_empty() {
        return Err(TextError::EmptyAfterPreprocess);
    }
    let original_length = tokens.len();
    let truncated = original_length > capacity;
    tokens.truncate(capacity);
    Ok(TokenSeq { tokens, truncated, original_length })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_stop_words_and_punctuation() {
        let stop = StopWords::from_words(["the", "may"]);
        let seq = preprocess("The attacker MAY execute arbitrary code.", DEFAULT_MAX_TOKENS, &stop).unwrap();
        assert_eq!(seq.tokens, ["attacker", "execute", "arbitrary", "code"]);
        assert!(!seq.truncated);
        assert_eq!(seq.original_length, 4);
    }

    #[test]
    fn truncates_long_descriptions() {
        let text: Vec<String> = (0..300).map(|i| format!("word{i}")).collect();
        let seq = preprocess(&text.join(" "), 132, &StopWords::empty()).unwrap();
        assert_eq!(seq.len(), 130);
        assert!(seq.truncated);
        assert_eq!(seq.original_length, 300);
        assert_eq!(seq.tokens[129], "word129");
    }

    #[test]
    fn exactly_capacity_is_not_truncated() {
        let text: Vec<String> = (0..130).map(|i| format!("w{i}")).collect();
        let seq = preprocess(&text.join(" "), 132, &StopWords::empty()).unwrap();
        assert!(!seq.truncated);
        assert_eq!(seq.len(), 130);
    }

    #[test]
    fn only_stop_words_is_an_error() {
        let stop = StopWords::english_v1();
        assert_eq!(preprocess("It is this that was, and so it was.", 132, &stop), Err(TextError::EmptyAfterPreprocess));
        assert_eq!(preprocess("  ...  ", 132, &stop), Err(TextError::EmptyAfterPreprocess));
        assert_eq!(preprocess("code", 2, &stop), Err(TextError::MaxTokensTooSmall(2)));
    }

    #[test]
    fn shipped_list_is_versioned() {
        let stop = StopWords::english_v1();
        assert_eq!(stop.len(), 179);
        assert!(stop.version().contains("version 1"));
        assert!(stop.contains("the") && stop.contains("don't") && !stop.contains("attacker"));
    }

    #[test]
    fn tokenizer_splits_on_symbols() {
        assert_eq!(tokenize("Cross-site scripting (XSS) in v2.4.1"), ["cross", "site", "scripting", "xss", "in", "v2", "4", "1"]);
    }
}
