//! Tokenized corpora and the parsers for the supported input layouts.
//!
//! Input files hold one document per line. Plain files carry only
//! whitespace-separated tokens. Sentence files split each line on a
//! separator (`--` by default). Tagged files put a list of authors, links or
//! labels before a TAB and the text after it.

mod lemma;
mod preprocess;
mod stoplist;

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};

pub use lemma::lemmatize;
pub use preprocess::{preprocess, tokenize};
pub use stoplist::StopList;

/// Bijection between token strings and dense ids, in first-occurrence order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `word`, assigning the next free id if it is new.
    pub fn intern(&mut self, word: &str) -> usize {
        if let Some(&id) = self.index.get(word) {
            return id;
        }
        let id = self.words.len();
        self.words.push(word.to_owned());
        self.index.insert(word.to_owned(), id);
        id
    }

    pub fn id(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: usize) -> &str {
        &self.words[id]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Kind of per-document metadata carried by a tagged input file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagKind {
    Authors,
    Links,
    Labels,
}

impl TagKind {
    fn name(self) -> &'static str {
        match self {
            TagKind::Authors => "authors",
            TagKind::Links => "links",
            TagKind::Labels => "labels",
        }
    }
}

/// Per-document metadata ids with their own vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tags {
    pub vocab: Vocabulary,
    /// Deduplicated ids per document, in order of first appearance.
    pub docs: Vec<Vec<usize>>,
}

/// An indexed corpus. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    vocab: Vocabulary,
    docs: Vec<Vec<usize>>,
    sentences: Option<Vec<Vec<usize>>>,
    authors: Option<Tags>,
    links: Option<Tags>,
    labels: Option<Tags>,
    dropped_lines: Vec<usize>,
}

impl Corpus {
    /// Builds a corpus from token lists, interning words in first-occurrence order.
    ///
    /// Empty documents are kept; use the parsers for the drop-with-warning rule.
    pub fn from_tokens<I, D, S>(docs: I) -> Self
    where
        I: IntoIterator<Item = D>,
        D: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut vocab = Vocabulary::new();
        let docs = docs
            .into_iter()
            .map(|d| d.into_iter().map(|w| vocab.intern(w.as_ref())).collect())
            .collect();
        Corpus::bare(vocab, docs)
    }

    /// Builds a corpus directly from word ids over a vocabulary of `vocab_size`
    /// synthetic words named `w0`, `w1`, ...
    pub fn from_ids(docs: Vec<Vec<usize>>, vocab_size: usize) -> Result<Self> {
        let mut vocab = Vocabulary::new();
        for v in 0..vocab_size {
            vocab.intern(&format!("w{v}"));
        }
        if let Some(bad) = docs.iter().flatten().find(|&&v| v >= vocab_size) {
            return Err(Error::invalid("docs", format!("word id {bad} >= {vocab_size}")));
        }
        Ok(Corpus::bare(vocab, docs))
    }

    fn bare(vocab: Vocabulary, docs: Vec<Vec<usize>>) -> Self {
        Corpus {
            vocab,
            docs,
            sentences: None,
            authors: None,
            links: None,
            labels: None,
            dropped_lines: Vec::new(),
        }
    }

    /// Attaches sentence boundaries. `bounds[m]` starts at 0 and ends at `N_m`.
    pub fn with_sentences(mut self, bounds: Vec<Vec<usize>>) -> Result<Self> {
        if bounds.len() != self.docs.len() {
            return Err(Error::invalid("sentences", "one boundary list per document"));
        }
        for (m, b) in bounds.iter().enumerate() {
            let ok = b.first() == Some(&0)
                && b.last() == Some(&self.docs[m].len())
                && b.windows(2).all(|w| w[0] < w[1]);
            if !ok {
                return Err(Error::invalid(
                    "sentences",
                    format!("boundaries {b:?} do not partition document {m}"),
                ));
            }
        }
        self.sentences = Some(bounds);
        Ok(self)
    }

    /// Attaches per-document tags of the given kind.
    pub fn with_tags(mut self, kind: TagKind, tags: Tags) -> Result<Self> {
        if tags.docs.len() != self.docs.len() {
            return Err(Error::invalid(kind.name(), "one tag list per document"));
        }
        if let Some(bad) = tags.docs.iter().flatten().find(|&&t| t >= tags.vocab.len()) {
            return Err(Error::invalid(kind.name(), format!("tag id {bad} out of range")));
        }
        match kind {
            TagKind::Authors => self.authors = Some(tags),
            TagKind::Links => self.links = Some(tags),
            TagKind::Labels => self.labels = Some(tags),
        }
        Ok(self)
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn docs(&self) -> &[Vec<usize>] {
        &self.docs
    }

    pub fn num_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn num_tokens(&self) -> usize {
        self.docs.iter().map(Vec::len).sum()
    }

    /// Sentence boundary offsets per document, if parsed with sentences.
    pub fn sentences(&self) -> Option<&[Vec<usize>]> {
        self.sentences.as_deref()
    }

    pub fn tags(&self, kind: TagKind) -> Option<&Tags> {
        match kind {
            TagKind::Authors => self.authors.as_ref(),
            TagKind::Links => self.links.as_ref(),
            TagKind::Labels => self.labels.as_ref(),
        }
    }

    pub fn authors(&self) -> Option<&Tags> {
        self.authors.as_ref()
    }

    pub fn links(&self) -> Option<&Tags> {
        self.links.as_ref()
    }

    pub fn labels(&self) -> Option<&Tags> {
        self.labels.as_ref()
    }

    /// 1-based input line numbers of documents dropped for being empty.
    pub fn dropped_lines(&self) -> &[usize] {
        &self.dropped_lines
    }

    /// Maps a document back to its tokens.
    pub fn doc_words(&self, m: usize) -> Vec<&str> {
        self.docs[m].iter().map(|&v| self.vocab.word(v)).collect()
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.docs.is_empty() || self.num_tokens() == 0 {
            return Err(Error::EmptyCorpus);
        }
        Ok(())
    }
}

fn drop_warning(line: usize) {
    log::warn!("line {line}: document is empty after cleaning, dropped");
}

fn finish(mut corpus: Corpus, dropped: Vec<usize>) -> Result<Corpus> {
    if corpus.docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    corpus.dropped_lines = dropped;
    Ok(corpus)
}

/// Parses one whitespace-tokenized document per line.
pub fn parse_plain<I, S>(lines: I) -> Result<Corpus>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut vocab = Vocabulary::new();
    let mut docs = Vec::new();
    let mut dropped = Vec::new();
    for (i, line) in lines.into_iter().enumerate() {
        let doc: Vec<usize> = line
            .as_ref()
            .split_whitespace()
            .map(|w| vocab.intern(w))
            .collect();
        if doc.is_empty() {
            drop_warning(i + 1);
            dropped.push(i + 1);
        } else {
            docs.push(doc);
        }
    }
    finish(Corpus::bare(vocab, docs), dropped)
}

/// Parses documents whose sentences are separated by `sep`.
///
/// Empty sentences are dropped; a line with no tokens is dropped with a warning.
pub fn parse_sentences<I, S>(lines: I, sep: &str) -> Result<Corpus>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    if sep.is_empty() {
        return Err(Error::invalid("separator", "must not be empty"));
    }
    let mut vocab = Vocabulary::new();
    let mut docs = Vec::new();
    let mut bounds = Vec::new();
    let mut dropped = Vec::new();
    for (i, line) in lines.into_iter().enumerate() {
        let mut doc = Vec::new();
        let mut b = vec![0];
        for sentence in line.as_ref().split(sep) {
            let before = doc.len();
            doc.extend(sentence.split_whitespace().map(|w| vocab.intern(w)));
            if doc.len() > before {
                b.push(doc.len());
            }
        }
        if doc.is_empty() {
            drop_warning(i + 1);
            dropped.push(i + 1);
        } else {
            docs.push(doc);
            bounds.push(b);
        }
    }
    let mut corpus = Corpus::bare(vocab, docs);
    corpus.sentences = Some(bounds);
    finish(corpus, dropped)
}

/// Parses `items<TAB>text` lines, splitting `items` on `item_sep`.
///
/// Items are trimmed, empty items skipped and repeats within a line removed.
/// Lines whose text is empty are dropped with a warning.
pub fn parse_tagged<I, S>(lines: I, item_sep: &str, kind: TagKind) -> Result<Corpus>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    if item_sep.is_empty() {
        return Err(Error::invalid("separator", "must not be empty"));
    }
    let mut vocab = Vocabulary::new();
    let mut tag_vocab = Vocabulary::new();
    let mut docs = Vec::new();
    let mut tag_docs = Vec::new();
    let mut dropped = Vec::new();
    for (i, line) in lines.into_iter().enumerate() {
        let line = line.as_ref();
        if line.trim().is_empty() {
            drop_warning(i + 1);
            dropped.push(i + 1);
            continue;
        }
        let (head, body) = line.split_once('\t').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("missing TAB between {} and text", kind.name()),
        })?;
        let doc: Vec<usize> = body.split_whitespace().map(|w| vocab.intern(w)).collect();
        if doc.is_empty() {
            drop_warning(i + 1);
            dropped.push(i + 1);
            continue;
        }
        let mut ids: Vec<usize> = Vec::new();
        for item in head.split(item_sep).map(str::trim).filter(|s| !s.is_empty()) {
            let id = tag_vocab.intern(item);
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
        docs.push(doc);
        tag_docs.push(ids);
    }
    let tags = Tags {
        vocab: tag_vocab,
        docs: tag_docs,
    };
    let corpus = Corpus::bare(vocab, docs).with_tags(kind, tags)?;
    finish(corpus, dropped)
}

/// Reads a text file in the named encoding (any WHATWG label, e.g. `utf-8`, `gbk`)
/// and splits it into lines.
pub fn read_lines(path: impl AsRef<Path>, encoding: &str) -> Result<Vec<String>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let enc = encoding_rs::Encoding::for_label(encoding.trim().as_bytes())
        .ok_or_else(|| Error::UnknownEncoding(encoding.to_owned()))?;
    let (text, _, had_errors) = enc.decode(&bytes);
    if had_errors {
        log::warn!("{}: malformed {} sequences replaced", path.display(), enc.name());
    }
    Ok(text.lines().map(str::to_owned).collect())
}
