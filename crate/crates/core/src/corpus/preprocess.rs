use super::lemma::lemmatize;
use super::stoplist::StopList;

fn is_url(token: &str) -> bool {
    let lower = token.to_ascii_lowercase();
    lower.contains("://") || lower.starts_with("www.")
}

/// Splits raw text into lowercase word tokens.
///
/// URLs are discarded, punctuation separates tokens, and runs without any
/// letter (pure numbers) are dropped. Hyphens inside a word are kept.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace().filter(|t| !is_url(t)) {
        let chars: Vec<char> = chunk.chars().collect();
        let mut current = String::new();
        for (i, &c) in chars.iter().enumerate() {
            let joins_word = c == '-'
                && !current.is_empty()
                && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
            if c.is_alphanumeric() || joins_word {
                current.push(c);
            } else {
                push_token(&mut out, &mut current);
            }
        }
        push_token(&mut out, &mut current);
    }
    out
}

fn push_token(out: &mut Vec<String>, current: &mut String) {
    if current.chars().any(char::is_alphabetic) {
        out.push(current.to_lowercase());
    }
    current.clear();
}

/// Cleans one raw document: tokenize, lemmatize, remove stopwords.
///
/// A token is removed when either its surface form or its lemma is a
/// stopword. Output tokens are joined by single spaces in input order.
///
/// ```
/// use topicmodel::corpus::{preprocess, StopList};
/// let line = "http://t.cn/RAPgR4n Artificial intelligence is a known phenomenons \
///             in the world today. Its root started to build years";
/// assert_eq!(
///     preprocess(line, &StopList::english()),
///     "artificial intelligence phenomenon world today root start build year"
/// );
/// ```
pub fn preprocess(line: &str, stoplist: &StopList) -> String {
    tokenize(line)
        .into_iter()
        .filter(|t| !stoplist.contains(t))
        .map(|t| lemmatize(&t))
        .filter(|l| !stoplist.contains(l))
        .collect::<Vec<_>>()
        .join(" ")
}
