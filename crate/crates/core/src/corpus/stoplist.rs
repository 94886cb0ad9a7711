use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};

const DEFAULT_WORDS: &str = include_str!("stoplist.txt");

/// A set of lowercase stopwords.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopList {
    words: HashSet<String>,
}

impl StopList {
    /// The bundled English list (SMART, without apostrophe contractions).
    pub fn english() -> Self {
        Self::from_words(DEFAULT_WORDS.lines())
    }

    /// An empty list; nothing is removed.
    pub fn empty() -> Self {
        StopList {
            words: HashSet::new(),
        }
    }

    /// Builds a list from words; entries are trimmed and lowercased, blanks skipped.
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let words = words
            .into_iter()
            .map(|w| w.as_ref().trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        StopList { words }
    }

    /// Reads one word per line. The file replaces the bundled list entirely.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::from_words(text.lines()))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl Default for StopList {
    fn default() -> Self {
        Self::english()
    }
}
